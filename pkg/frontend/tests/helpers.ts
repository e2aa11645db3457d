/** Test harness: a recording fake fetch over the canned fixtures, plus
 *  the DOM shell the app mounts into. */

import * as fx from '../mock/fixtures.mjs';
import { AppElements, ExplorerApp } from '../src/app.js';
import { ApiClient } from '../src/api.js';

export interface RecordedRequest {
  method: string;
  url: string;
  body?: unknown;
}

export interface FakeApiOptions {
  profile?: 'ose' | 'hwn' | 'yai4hu';
  entry?: unknown;
  failHealth?: boolean;
  askDelayed?: boolean;
}

export class FakeApi {
  requests: RecordedRequest[] = [];
  pendingAsks: Array<(body: unknown) => void> = [];
  options: FakeApiOptions;

  constructor(options: FakeApiOptions = {}) {
    this.options = options;
  }

  install(): void {
    globalThis.fetch = this.fetch.bind(this) as typeof fetch;
  }

  private respond(status: number, body: unknown): Response {
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => body,
    } as unknown as Response;
  }

  async fetch(input: string, init?: RequestInit): Promise<Response> {
    const url = String(input);
    const method = init?.method ?? 'GET';
    const record: RecordedRequest = { method, url };
    if (init?.body) {
      record.body = JSON.parse(String(init.body));
    }
    this.requests.push(record);

    const profile = this.options.profile ?? 'yai4hu';
    if (url.endsWith('/api/health')) {
      if (this.options.failHealth) {
        throw new TypeError('fetch failed');
      }
      return this.respond(200, profile === 'yai4hu' ? fx.health : {
        ...fx.health,
        profile,
        open_qa_enabled: false,
      });
    }
    if (url.endsWith('/api/entry')) {
      return this.respond(200, this.options.entry ?? fx.entry);
    }
    const overview = url.match(/\/api\/overview\/([^/]+)$/);
    if (overview) {
      const uri = decodeURIComponent(overview[1]);
      const card =
        profile === 'hwn' && uri === 'bank_account'
          ? fx.hwnCard
          : (fx.cards as Record<string, unknown>)[uri];
      return card
        ? this.respond(200, card)
        : this.respond(404, { error: `no overview for uri '${uri}'`, uri });
    }
    if (url.includes('/api/summary/')) {
      return this.respond(200, fx.summaryChildren);
    }
    if (url.endsWith('/api/ask')) {
      if (profile !== 'yai4hu') {
        return this.respond(403, fx.forbidden);
      }
      if (this.options.askDelayed) {
        const body = await new Promise<unknown>((resolve) => {
          this.pendingAsks.push(resolve);
        });
        return this.respond(200, body);
      }
      return this.respond(200, fx.askAnswers);
    }
    return this.respond(404, { error: 'not found' });
  }

  releaseAsk(body: unknown = fx.askAnswers): void {
    const resolve = this.pendingAsks.shift();
    if (!resolve) {
      throw new Error('no ask in flight');
    }
    resolve(body);
  }

  calls(pattern: RegExp): RecordedRequest[] {
    return this.requests.filter((r) => pattern.test(r.url));
  }
}

export function buildDom(): AppElements {
  document.body.innerHTML = `
    <div id="banner" hidden></div>
    <section id="ask-box" hidden>
      <input id="ask-input" type="text" />
      <button id="ask-submit" type="button" disabled>ask</button>
      <span id="ask-status"></span>
      <div id="ask-results"></div>
    </section>
    <main id="entry"></main>
    <nav id="tabs"></nav>
    <section id="tab-panels"></section>
    <div id="modal-root"></div>
  `;
  return {
    entry: document.getElementById('entry')!,
    tabs: document.getElementById('tabs')!,
    panels: document.getElementById('tab-panels')!,
    modalRoot: document.getElementById('modal-root')!,
    banner: document.getElementById('banner')!,
    askBox: document.getElementById('ask-box')!,
    askInput: document.getElementById('ask-input') as HTMLInputElement,
    askSubmit: document.getElementById('ask-submit') as HTMLButtonElement,
    askStatus: document.getElementById('ask-status')!,
    askResults: document.getElementById('ask-results')!,
  };
}

export async function bootApp(
  options: FakeApiOptions = {},
): Promise<{ app: ExplorerApp; api: FakeApi }> {
  const api = new FakeApi(options);
  api.install();
  const app = new ExplorerApp(new ApiClient(''), buildDom());
  await app.boot();
  return { app, api };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
