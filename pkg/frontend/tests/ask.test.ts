import { describe, expect, it } from 'vitest';

import * as fx from '../mock/fixtures.mjs';
import { bootApp, flush } from './helpers.js';

describe('open question answering box', () => {
  it('submit stays disabled while the input is empty', async () => {
    await bootApp();
    const input = document.getElementById('ask-input') as HTMLInputElement;
    const submit = document.getElementById('ask-submit') as HTMLButtonElement;
    expect(submit.disabled).toBe(true);
    input.value = 'What is an inquiry?';
    input.dispatchEvent(new Event('input'));
    expect(submit.disabled).toBe(false);
    input.value = '   ';
    input.dispatchEvent(new Event('input'));
    expect(submit.disabled).toBe(true);
  });

  it('is hidden with a notice when the profile disables open QA', async () => {
    await bootApp({ profile: 'hwn' });
    const box = document.getElementById('ask-box')!;
    expect(box.hidden).toBe(true);
    const notice = document.querySelector('.ask-notice')!;
    expect(notice.textContent).toContain('not available');
  });

  it('hides the box with a notice when the server answers 403', async () => {
    const { app, api } = await bootApp();
    // e.g. a service started with a stricter profile than /api/health said
    api.options.profile = 'hwn';
    await app.ask('anything at all');
    expect(document.getElementById('ask-box')!.hidden).toBe(true);
    expect(document.querySelector('.ask-notice')).not.toBeNull();
  });

  it('renders answers exactly in server order with scores and contexts', async () => {
    const { app } = await bootApp();
    await app.ask('What is an inquiry?');
    const rows = document.querySelectorAll('#ask-results .answer');
    expect(rows.length).toBe(2);
    // fixture scores are deliberately not sorted: server order rules
    const texts = Array.from(
      document.querySelectorAll('#ask-results .answer-text'),
    ).map((r) => r.textContent);
    expect(texts).toEqual([
      'An inquiry is a request.',
      'A hard inquiry follows a new credit application.',
    ]);
    const scores = Array.from(
      document.querySelectorAll('#ask-results .answer .score'),
    ).map((s) => s.textContent);
    expect(scores).toEqual(['0.480', '0.510']);
    const contexts = Array.from(
      document.querySelectorAll('#ask-results .answer .context'),
    ).map((c) => c.textContent);
    expect(contexts).toEqual(['credit_basics_p0', 'credit_basics_p0']);
  });

  it('answer snippets are annotated with clickable spans', async () => {
    const { app, api } = await bootApp();
    await app.ask('What is an inquiry?');
    const span = document.querySelector<HTMLElement>(
      '#ask-results .syntagm[data-uri="inquiry"]',
    )!;
    expect(span).not.toBeNull();
    span.click();
    await flush();
    expect(api.calls(/\/api\/overview\/inquiry/).length).toBe(1);
  });

  it('allows one in-flight request and queues later submissions', async () => {
    const { app, api } = await bootApp({ askDelayed: true });
    const first = app.ask('first question');
    await flush();
    expect(app.state.askPending).toBe(true);
    expect(document.getElementById('ask-status')!.textContent).toContain(
      'pending',
    );

    const second = app.ask('second question');
    await flush();
    expect(app.state.askQueue).toEqual(['second question']);
    expect(document.getElementById('ask-status')!.textContent).toContain(
      '1 queued',
    );
    expect(api.calls(/\/api\/ask/).length).toBe(1);

    api.releaseAsk();
    await first;
    await flush();
    // the queued question goes out automatically
    expect(api.calls(/\/api\/ask/).length).toBe(2);
    expect(api.calls(/\/api\/ask/)[1].body).toEqual({
      question: 'second question',
    });
    api.releaseAsk(fx.askAnswers);
    await second;
    await flush();
    expect(app.state.askPending).toBe(false);
    expect(app.state.askQueue).toEqual([]);
  });
});
