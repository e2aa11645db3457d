import { describe, expect, it } from 'vitest';

import { bootApp, flush } from './helpers.js';

describe('overview cards', () => {
  it('shows label and "no further information" for an all-empty card', async () => {
    const { app } = await bootApp();
    await app.openOverview('collateral');
    const modal = document.querySelector('.modal')!;
    expect(modal.querySelector('h2')!.textContent).toBe('collateral');
    expect(modal.querySelector('.no-info')!.textContent).toBe(
      'no further information',
    );
  });

  it('renders exactly the payload sections: hwn card has two headers', async () => {
    const { app } = await bootApp({ profile: 'hwn' });
    await app.openOverview('bank_account');
    const headers = document.querySelectorAll('.modal .archetype-section h3');
    expect(Array.from(headers).map((h) => h.textContent)).toEqual([
      'how',
      'why',
    ]);
  });

  it('keeps units in payload order without re-sorting', async () => {
    const { app } = await bootApp();
    await app.openOverview('bank_account');
    const units = document.querySelectorAll('.modal .unit .unit-text');
    expect(Array.from(units).map((u) => u.textContent)).toEqual([
      'the customer opened a bank account',
      'a bank account holds the money',
    ]);
  });

  it('expanding a summary node fetches children and inserts them beneath', async () => {
    const { app, api } = await bootApp();
    await app.openOverview('bank_account');
    const node = document.querySelector<HTMLElement>(
      '.modal .summary-node[data-node-id="bank_account:what:4"]',
    )!;
    const expand = node.querySelector<HTMLButtonElement>('.expand')!;
    expand.click();
    await flush();
    const calls = api.calls(/\/api\/summary\//);
    expect(calls.length).toBe(1);
    expect(calls[0].url).toContain(
      '/api/summary/bank_account%3Awhat%3A4/children',
    );
    const children = node.querySelectorAll('.summary-children .summary-node');
    expect(children.length).toBe(2);
    expect(children[0].textContent).toContain('Opened by the customer.');
    // the expand control is consumed once the children are in place
    expect(node.querySelector(':scope > .expand')).toBeNull();
  });

  it('card text is annotated and clicking a span opens that concept', async () => {
    const { app, api } = await bootApp();
    await app.openOverview('bank_account');
    const span = document.querySelector<HTMLElement>(
      '.modal .unit .syntagm[data-uri="customer"]',
    )!;
    expect(span).not.toBeNull();
    span.click();
    await flush();
    expect(api.calls(/\/api\/overview\/customer/).length).toBe(1);
    expect(
      document.querySelector<HTMLElement>('.modal')!.dataset.uri,
    ).toBe('customer');
  });

  it('taxonomic links open a new tab rather than a modal', async () => {
    const { app, api } = await bootApp();
    await app.openOverview('bank_account');
    const link = document.querySelector<HTMLElement>(
      '.modal .taxonomy-link[data-uri="account"]',
    )!;
    link.click();
    await flush();
    expect(api.calls(/\/api\/overview\/account/).length).toBe(1);
    const tabs = document.querySelectorAll<HTMLElement>('#tabs .tab');
    expect(tabs.length).toBe(1);
    expect(tabs[0].dataset.uri).toBe('account');
    const panel = document.querySelector<HTMLElement>(
      '#tab-panels .tab-panel[data-uri="account"]',
    )!;
    expect(panel.hidden).toBe(false);
    expect(app.state.tabs.map((t) => t.uri)).toEqual(['account']);
  });

  it('reopening an existing tab focuses it and keeps tab order stable', async () => {
    const { app, api } = await bootApp();
    await app.openTab('account');
    await app.openTab('customer');
    await app.openTab('account');
    expect(app.state.tabs.map((t) => t.uri)).toEqual(['account', 'customer']);
    expect(app.state.activeTab).toBe('account');
    // only two overview fetches despite three openTab calls
    expect(api.calls(/\/api\/overview\//).length).toBe(2);
    const panels = document.querySelectorAll<HTMLElement>('.tab-panel');
    const visible = Array.from(panels).filter((p) => !p.hidden);
    expect(visible.length).toBe(1);
    expect(visible[0].dataset.uri).toBe('account');
  });
});
