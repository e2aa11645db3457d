/** Application wiring: entry page, modal, tabs, and the ask box.
 *  The server decides content and order everywhere; this file only
 *  routes clicks to API calls and API payloads to the screen. */

import { renderAnnotated } from './annotate.js';
import { ApiClient, ApiError } from './api.js';
import { cardHasContent, renderCard, CardHandlers } from './card.js';
import { ViewState } from './state.js';
import type { AskResponse, EntryResponse, HealthResponse } from './types.js';

export interface AppElements {
  entry: HTMLElement;
  tabs: HTMLElement;
  panels: HTMLElement;
  modalRoot: HTMLElement;
  banner: HTMLElement;
  askBox: HTMLElement;
  askInput: HTMLInputElement;
  askSubmit: HTMLButtonElement;
  askStatus: HTMLElement;
  askResults: HTMLElement;
}

export class ExplorerApp {
  state = new ViewState();
  health: HealthResponse | null = null;

  constructor(
    public api: ApiClient,
    public el: AppElements,
  ) {}

  private handlers(): CardHandlers {
    return {
      api: this.api,
      onOpenConcept: (uri) => void this.openOverview(uri),
      onOpenTab: (uri) => void this.openTab(uri),
    };
  }

  async boot(): Promise<void> {
    this.el.banner.hidden = true;
    try {
      this.health = await this.api.health();
      const entry = await this.api.entry();
      this.renderEntry(entry);
      this.configureAskBox();
    } catch (err) {
      this.showRetryBanner(err);
    }
  }

  showRetryBanner(err: unknown): void {
    const banner = this.el.banner;
    banner.hidden = false;
    banner.textContent = '';
    const message = document.createElement('span');
    message.textContent =
      err instanceof ApiError && err.status > 0
        ? `service error (${err.status}): ${err.message}`
        : 'service unreachable';
    banner.appendChild(message);
    const retry = document.createElement('button');
    retry.type = 'button';
    retry.className = 'retry';
    retry.textContent = 'retry';
    retry.addEventListener('click', () => void this.boot());
    banner.appendChild(retry);
  }

  renderEntry(entry: EntryResponse): void {
    const container = this.el.entry;
    container.textContent = '';
    for (const block of entry.blocks) {
      const paragraph = document.createElement('p');
      paragraph.className = 'entry-block';
      paragraph.dataset.paragraphId = block.paragraph_id;
      paragraph.appendChild(
        renderAnnotated(block.text, block.links, (uri) => void this.openOverview(uri)),
      );
      container.appendChild(paragraph);
    }
    if (entry.documents.length) {
      const docs = document.createElement('ul');
      docs.className = 'document-list';
      for (const doc of entry.documents) {
        const item = document.createElement('li');
        const link = document.createElement('a');
        link.href = `${this.api.base}/api/docs/${encodeURIComponent(doc.id)}`;
        link.textContent = doc.title;
        item.appendChild(link);
        docs.appendChild(item);
      }
      container.appendChild(docs);
    }
  }

  async openOverview(uri: string): Promise<void> {
    try {
      const card = await this.api.overview(uri);
      this.state.openModal(uri);
      const root = this.el.modalRoot;
      root.textContent = '';
      const overlay = document.createElement('div');
      overlay.className = 'modal';
      overlay.dataset.uri = uri;
      const close = document.createElement('button');
      close.type = 'button';
      close.className = 'close';
      close.textContent = 'close';
      close.addEventListener('click', () => {
        this.state.closeModal();
        root.textContent = '';
      });
      overlay.appendChild(close);
      overlay.appendChild(renderCard(card, this.handlers()));
      if (!cardHasContent(card)) {
        overlay.classList.add('empty-card');
      }
      root.appendChild(overlay);
    } catch (err) {
      this.showRetryBanner(err);
    }
  }

  async openTab(uri: string): Promise<void> {
    const existing = this.state.tabs.some((t) => t.uri === uri);
    this.state.openTab(uri);
    if (!existing) {
      try {
        const card = await this.api.overview(uri);
        const panel = document.createElement('section');
        panel.className = 'tab-panel';
        panel.dataset.uri = uri;
        panel.appendChild(renderCard(card, this.handlers()));
        this.el.panels.appendChild(panel);

        const tab = document.createElement('button');
        tab.type = 'button';
        tab.className = 'tab';
        tab.dataset.uri = uri;
        tab.textContent = card.label;
        tab.addEventListener('click', () => this.focusTab(uri));
        this.el.tabs.appendChild(tab);
      } catch (err) {
        this.state.closeTab(uri);
        this.showRetryBanner(err);
        return;
      }
    }
    this.focusTab(uri);
  }

  focusTab(uri: string): void {
    this.state.activeTab = uri;
    for (const panel of Array.from(
      this.el.panels.querySelectorAll<HTMLElement>('.tab-panel'),
    )) {
      panel.hidden = panel.dataset.uri !== uri;
    }
    for (const tab of Array.from(
      this.el.tabs.querySelectorAll<HTMLElement>('.tab'),
    )) {
      tab.classList.toggle('active', tab.dataset.uri === uri);
    }
  }

  configureAskBox(): void {
    const { askBox, askInput, askSubmit, askStatus } = this.el;
    if (!this.health || !this.health.open_qa_enabled) {
      askBox.hidden = true;
      const notice = document.createElement('p');
      notice.className = 'ask-notice';
      notice.textContent =
        'Open question answering is not available in this profile.';
      askBox.insertAdjacentElement('afterend', notice);
      return;
    }
    askBox.hidden = false;
    askSubmit.disabled = true;
    askInput.addEventListener('input', () => {
      askSubmit.disabled = askInput.value.trim().length === 0;
    });
    askSubmit.addEventListener('click', () => {
      const question = askInput.value.trim();
      if (question) {
        void this.ask(question);
      }
    });
    askStatus.textContent = '';
  }

  async ask(question: string): Promise<void> {
    const decision = this.state.submitAsk(question);
    if (decision === 'queued') {
      this.el.askStatus.textContent = `pending… (${this.state.askQueue.length} queued)`;
      return;
    }
    this.el.askStatus.textContent = 'pending…';
    try {
      const payload = await this.api.ask(question);
      this.renderAskResults(payload);
      this.el.askStatus.textContent = '';
    } catch (err) {
      if (err instanceof ApiError && err.status === 403) {
        // the profile forbids asking: hide the box and say so
        this.el.askBox.hidden = true;
        const notice = document.createElement('p');
        notice.className = 'ask-notice';
        notice.textContent =
          'Open question answering is not available in this profile.';
        this.el.askBox.insertAdjacentElement('afterend', notice);
      } else {
        this.showRetryBanner(err);
      }
      this.el.askStatus.textContent = '';
    }
    const queued = this.state.finishAsk();
    if (queued !== null) {
      this.state.askPending = false;
      void this.ask(queued);
    }
  }

  renderAskResults(payload: AskResponse): void {
    const container = this.el.askResults;
    container.textContent = '';
    const list = document.createElement('ol');
    list.className = 'answers';
    for (const answer of payload.answers) {
      const item = document.createElement('li');
      item.className = 'answer';
      const score = document.createElement('span');
      score.className = 'score';
      score.textContent = answer.score.toFixed(3);
      item.appendChild(score);
      const text = document.createElement('span');
      text.className = 'answer-text';
      text.appendChild(
        renderAnnotated(answer.snippet, answer.links, (uri) =>
          void this.openOverview(uri),
        ),
      );
      item.appendChild(text);
      const context = document.createElement('span');
      context.className = 'context';
      context.textContent = answer.context;
      item.appendChild(context);
      list.appendChild(item);
    }
    container.appendChild(list);
  }
}

export function collectElements(root: Document): AppElements {
  const byId = (id: string) => {
    const el = root.getElementById(id);
    if (!el) {
      throw new Error(`missing #${id}`);
    }
    return el;
  };
  return {
    entry: byId('entry'),
    tabs: byId('tabs'),
    panels: byId('tab-panels'),
    modalRoot: byId('modal-root'),
    banner: byId('banner'),
    askBox: byId('ask-box'),
    askInput: byId('ask-input') as HTMLInputElement,
    askSubmit: byId('ask-submit') as HTMLButtonElement,
    askStatus: byId('ask-status'),
    askResults: byId('ask-results'),
  };
}

export function mount(root: Document, base = ''): ExplorerApp {
  const app = new ExplorerApp(new ApiClient(base), collectElements(root));
  void app.boot();
  return app;
}

declare global {
  interface Window {
    __espaceExplorer?: ExplorerApp;
  }
}

if (typeof window !== 'undefined' && document.getElementById('entry')) {
  window.__espaceExplorer = mount(document);
}
