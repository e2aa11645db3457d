/** View state: open tabs, the single modal, and the question box.
 *  Invariants live here so they are testable without any DOM. */

export interface TabState {
  uri: string;
  scroll: number;
}

export class ViewState {
  tabs: TabState[] = [];
  activeTab: string | null = null;
  modalUri: string | null = null;
  question = '';
  askPending = false;
  askQueue: string[] = [];

  /** At most one modal is ever visible; opening replaces the previous one. */
  openModal(uri: string): void {
    this.modalUri = uri;
  }

  closeModal(): void {
    this.modalUri = null;
  }

  /** Tabs keep a stable order; reopening an existing tab only focuses it. */
  openTab(uri: string): TabState {
    let tab = this.tabs.find((t) => t.uri === uri);
    if (!tab) {
      tab = { uri, scroll: 0 };
      this.tabs.push(tab);
    }
    this.activeTab = uri;
    return tab;
  }

  closeTab(uri: string): void {
    this.tabs = this.tabs.filter((t) => t.uri !== uri);
    if (this.activeTab === uri) {
      this.activeTab = this.tabs.length ? this.tabs[this.tabs.length - 1].uri : null;
    }
  }

  rememberScroll(uri: string, scroll: number): void {
    const tab = this.tabs.find((t) => t.uri === uri);
    if (tab) {
      tab.scroll = scroll;
    }
  }

  /** One ask request in flight; later submissions wait in order. */
  submitAsk(question: string): 'send' | 'queued' {
    if (this.askPending) {
      this.askQueue.push(question);
      return 'queued';
    }
    this.askPending = true;
    return 'send';
  }

  finishAsk(): string | null {
    this.askPending = false;
    if (this.askQueue.length) {
      const next = this.askQueue.shift()!;
      this.askPending = true;
      return next;
    }
    return null;
  }
}
