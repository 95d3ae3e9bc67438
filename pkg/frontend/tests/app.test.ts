import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { initialState, renderApp, ReporterApp } from '../src/app';
import type { Handlers } from '../src/app';
import { renderValidationReport } from '../src/upload';
import type { ReportedStep } from '../src/types';
import { card, fakeFetch, flush, jsonResponse, response } from './helpers';

const step = (index: number, overrides: Partial<ReportedStep> = {}): ReportedStep => ({
  index,
  text: `Step ${index}`,
  matched: true,
  inferred: false,
  source: 'typed',
  stale: false,
  screenshot: null,
  ...overrides,
});

function setup(...scripted: Array<Response | Promise<Response>>) {
  const root = document.createElement('div');
  const { fn, calls } = fakeFetch(...scripted);
  const app = new ReporterApp(root, new ApiClient('', fn), (path) => `/assets/${path}`);
  return { root, app, calls };
}

describe('ReporterApp', () => {
  it('greets the reporter when a session starts', async () => {
    const { root, app, calls } = setup(
      jsonResponse(response({ messages: ["Let's report a bug in DemoPad 1.0."] })),
    );
    await app.start('demopad-1.0');
    expect(calls[0]).toMatchObject({
      url: '/sessions',
      method: 'POST',
      body: { app_id: 'demopad-1.0' },
    });
    const bubbles = root.querySelectorAll('[data-testid="chat-bot"]');
    expect(bubbles).toHaveLength(1);
    expect(bubbles[0].textContent).toContain('DemoPad 1.0');
  });

  it('echoes typed text and posts it to the session', async () => {
    const { root, app, calls } = setup(
      jsonResponse(response()),
      jsonResponse(response({ messages: ['Got it.'] })),
    );
    await app.start(null);
    const input = root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!;
    input.value = 'The fuel stats page shows NaN';
    root.querySelector<HTMLButtonElement>('[data-testid="chat-send"]')!.click();
    await flush();

    expect(calls[1]).toMatchObject({
      url: '/sessions/sess-1/messages',
      method: 'POST',
      body: { text: 'The fuel stats page shows NaN' },
    });
    const log = root.querySelector('[data-testid="chat-log"]')!;
    const kinds = [...log.children].map((el) => el.getAttribute('data-testid'));
    expect(kinds).toEqual(['chat-user', 'chat-bot']);
    expect(root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!.value).toBe('');
  });

  it('submits on Enter but not on Shift+Enter or an empty draft', async () => {
    const { root, app, calls } = setup(jsonResponse(response()), jsonResponse(response()));
    await app.start(null);
    const input = root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!;

    input.value = '   ';
    root.querySelector<HTMLButtonElement>('[data-testid="chat-send"]')!.click();
    input.value = 'Open the fillup form';
    input.dispatchEvent(
      new KeyboardEvent('keydown', { key: 'Enter', shiftKey: true, cancelable: true }),
    );
    expect(calls).toHaveLength(1);

    input.dispatchEvent(new KeyboardEvent('keydown', { key: 'Enter', cancelable: true }));
    await flush();
    expect(calls).toHaveLength(2);
    expect(calls[1].body).toEqual({ text: 'Open the fillup form' });
  });

  it('caps the suggestion row at five cards', async () => {
    const seven = Array.from({ length: 7 }, (_, i) => card(`opt-${i}`));
    const { root, app } = setup(
      jsonResponse(response({ phase: 'S2R_PREDICT_OFFER', suggestion_cards: seven })),
    );
    await app.start(null);
    expect(root.querySelectorAll('[data-testid="suggestion-card"]')).toHaveLength(5);
  });

  it('posts an empty selection for none-of-these', async () => {
    const { root, app, calls } = setup(
      jsonResponse(
        response({ phase: 'S2R_PREDICT_OFFER', suggestion_cards: [card('a'), card('b')] }),
      ),
      jsonResponse(response({ messages: ['Describe the next step in your own words.'] })),
    );
    await app.start(null);
    root.querySelector<HTMLButtonElement>('[data-testid="select-none"]')!.click();
    await flush();
    expect(calls[1]).toMatchObject({
      url: '/sessions/sess-1/selections',
      method: 'POST',
      body: { option_ids: [] },
    });
  });

  it('submits a single card choice directly', async () => {
    const { root, app, calls } = setup(
      jsonResponse(response({ phase: 'APP_SELECTION', suggestion_cards: [card('a'), card('b')] })),
      jsonResponse(response()),
    );
    await app.start(null);
    expect(root.querySelector('[data-testid="select-none"]')).toBeNull();
    root.querySelectorAll<HTMLButtonElement>('[data-testid="suggestion-card"]')[1].click();
    await flush();
    expect(calls[1].body).toEqual({ option_ids: ['b'] });
  });

  it('lets the reporter turn down a screen listing to see more', async () => {
    const { root, app, calls } = setup(
      jsonResponse(response({ phase: 'OB_SELECT', suggestion_cards: [card('a'), card('b')] })),
      jsonResponse(
        response({
          phase: 'OB_SELECT',
          messages: ['Here are more possible screens. Select one, or none of them.'],
          suggestion_cards: [card('c')],
        }),
      ),
    );
    await app.start(null);
    expect(root.querySelector('[data-testid="submit-selection"]')).toBeNull();
    root.querySelector<HTMLButtonElement>('[data-testid="select-none"]')!.click();
    await flush();
    expect(calls[1]).toMatchObject({
      url: '/sessions/sess-1/selections',
      body: { option_ids: [] },
    });
    expect(root.querySelectorAll('[data-testid="suggestion-card"]')).toHaveLength(1);
  });

  it('answers yes/no questions through the confirmation endpoint', async () => {
    const { root, app, calls } = setup(
      jsonResponse(
        response({
          phase: 'OB_CONFIRM',
          messages: ['I found a matching screen. Is this where the problem appears?'],
          suggestion_cards: [card('a', { highlight_bounds: [10, 10, 110, 60] })],
        }),
      ),
      jsonResponse(response({ phase: 'EB_DESCRIBE', messages: ['Thanks, noted.'] })),
    );
    await app.start(null);

    const preview = root.querySelector<HTMLButtonElement>('[data-testid="suggestion-card"]')!;
    expect(preview.disabled).toBe(true);
    expect(root.querySelector('[data-testid="select-none"]')).toBeNull();

    root.querySelector<HTMLButtonElement>('[data-testid="confirm-yes"]')!.click();
    await flush();
    expect(calls[1]).toMatchObject({
      url: '/sessions/sess-1/confirmations',
      method: 'POST',
      body: { value: true },
    });
    const kinds = [...root.querySelector('[data-testid="chat-log"]')!.children].map((el) =>
      el.getAttribute('data-testid'),
    );
    expect(kinds).toEqual(['chat-bot', 'chat-user', 'chat-bot']);
    expect(root.querySelector('[data-testid="confirm-row"]')).toBeNull();
  });

  it('posts a rejection when the match is wrong', async () => {
    const { root, app, calls } = setup(
      jsonResponse(response({ phase: 'S2R_CONFIRM', suggestion_cards: [card('a')] })),
      jsonResponse(response({ phase: 'S2R_DESCRIBE' })),
    );
    await app.start(null);
    root.querySelector<HTMLButtonElement>('[data-testid="confirm-no"]')!.click();
    await flush();
    expect(calls[1].body).toEqual({ value: false });
  });

  it('shows exactly the captures the server sent, resolved to URLs', async () => {
    const steps = [1, 2, 3, 4, 5].map((i) => step(i, { screenshot: `screenshots/s${i}.png` }));
    const { root, app } = setup(
      jsonResponse(
        response({
          reported_steps: steps,
          capture_panel: ['screenshots/s3.png', 'screenshots/s4.png', 'screenshots/s5.png'],
        }),
      ),
    );
    await app.start(null);
    const thumbs = [...root.querySelectorAll<HTMLImageElement>('[data-testid="capture-thumb"]')];
    expect(thumbs.map((img) => img.getAttribute('src'))).toEqual([
      '/assets/screenshots/s3.png',
      '/assets/screenshots/s4.png',
      '/assets/screenshots/s5.png',
    ]);
  });

  it('disables every input while a request is in flight', async () => {
    let release!: (res: Response) => void;
    const pending = new Promise<Response>((resolve) => (release = resolve));
    const { root, app, calls } = setup(
      jsonResponse(response({ phase: 'OB_SELECT', suggestion_cards: [card('a')] })),
      pending,
    );
    await app.start(null);
    const input = root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!;
    input.value = 'step one';
    root.querySelector<HTMLButtonElement>('[data-testid="chat-send"]')!.click();

    const busyInput = root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!;
    expect(busyInput.disabled).toBe(true);
    expect(root.querySelector<HTMLButtonElement>('[data-testid="chat-send"]')!.disabled).toBe(true);
    expect(
      root.querySelector<HTMLButtonElement>('[data-testid="suggestion-card"]')!.disabled,
    ).toBe(true);
    expect(root.querySelector<HTMLButtonElement>('[data-testid="action-restart"]')!.disabled).toBe(
      true,
    );

    busyInput.value = 'step two';
    root.querySelector<HTMLButtonElement>('[data-testid="chat-send"]')!.click();
    expect(calls).toHaveLength(2);

    release(jsonResponse(response({ messages: ['Step recorded.'] })));
    await flush();
    expect(root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!.disabled).toBe(
      false,
    );
  });

  it('surfaces a stale-option rejection as a toast and keeps the cards', async () => {
    const { root, app } = setup(
      jsonResponse(response({ phase: 'OB_SELECT', suggestion_cards: [card('a'), card('b')] })),
      jsonResponse({ detail: 'That option has expired; pick from the current cards.' }, 400),
    );
    await app.start(null);
    root.querySelector<HTMLButtonElement>('[data-testid="suggestion-card"]')!.click();
    await flush();

    const toast = root.querySelector('[data-testid="toast"]');
    expect(toast).not.toBeNull();
    expect(toast!.textContent).toContain('expired');
    expect(root.querySelectorAll('[data-testid="suggestion-card"]')).toHaveLength(2);
    expect(root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!.disabled).toBe(
      false,
    );
  });

  it('reports a busy session and re-enables input once the call resolves', async () => {
    const { root, app } = setup(
      jsonResponse(response()),
      jsonResponse({ detail: 'another event is still being processed' }, 409),
    );
    await app.start(null);
    const input = root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!;
    input.value = 'hello';
    root.querySelector<HTMLButtonElement>('[data-testid="chat-send"]')!.click();
    await flush();

    expect(root.querySelector('[data-testid="toast"]')!.textContent).toContain(
      'still being processed',
    );
    expect(root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!.disabled).toBe(
      false,
    );
  });

  it('shows a generic toast when the service is unreachable', async () => {
    const down = Promise.reject<Response>(new TypeError('fetch failed'));
    void down.catch(() => {});
    const { root, app } = setup(jsonResponse(response()), down);
    await app.start(null);
    const input = root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!;
    input.value = 'hello';
    root.querySelector<HTMLButtonElement>('[data-testid="chat-send"]')!.click();
    await flush();
    expect(root.querySelector('[data-testid="toast"]')!.textContent).toBe(
      'The service is unreachable. Try again.',
    );
  });

  it('patches an edited step and re-renders from the response', async () => {
    const before = [step(1, { source: 'suggested' }), step(2, { text: 'Tap Stats' })];
    const after = [before[0], step(2, { text: 'Tap the Stats tab', source: 'edited' })];
    const { root, app, calls } = setup(
      jsonResponse(response({ reported_steps: before })),
      jsonResponse(response({ reported_steps: after, messages: ['Step 2 updated.'] })),
    );
    await app.start(null);
    root.querySelector<HTMLButtonElement>('[data-testid="edit-step"]')!.click();
    const field = root.querySelector<HTMLInputElement>('[data-testid="edit-step-input"]')!;
    field.value = 'Tap the Stats tab';
    root.querySelector<HTMLButtonElement>('[data-testid="edit-step-save"]')!.click();
    await flush();

    expect(calls[1]).toMatchObject({
      url: '/sessions/sess-1/steps/2',
      method: 'PATCH',
      body: { text: 'Tap the Stats tab' },
    });
    const rows = root.querySelectorAll('[data-testid="step-row"]');
    expect(rows[1].textContent).toContain('Tap the Stats tab');
  });

  it('sends quick actions and honors can_finish', async () => {
    const { root, app, calls } = setup(
      jsonResponse(response({ can_finish: false })),
      jsonResponse(response({ messages: ['Starting over.'] })),
    );
    await app.start(null);
    expect(root.querySelector<HTMLButtonElement>('[data-testid="action-finish"]')!.disabled).toBe(
      true,
    );
    root.querySelector<HTMLButtonElement>('[data-testid="action-restart"]')!.click();
    await flush();
    expect(calls[1]).toMatchObject({
      url: '/sessions/sess-1/actions',
      method: 'POST',
      body: { action: 'restart' },
    });
  });

  it('keeps the local draft when the view re-renders', async () => {
    const { root, app } = setup(jsonResponse(response()));
    await app.start(null);
    const input = root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!;
    input.value = 'half a thought';
    input.dispatchEvent(new Event('input'));
    app.render();
    expect(root.querySelector<HTMLTextAreaElement>('[data-testid="chat-input"]')!.value).toBe(
      'half a thought',
    );
  });
});

describe('renderApp', () => {
  it('renders identically for the same state', () => {
    const handlers: Handlers = {
      onText: () => {},
      onSelection: () => {},
      onConfirm: () => {},
      onAction: () => {},
      onEditStep: () => {},
      onDraftChange: () => {},
    };
    const state = {
      ...initialState(),
      response: response({
        phase: 'S2R_PREDICT_OFFER',
        suggestion_cards: [card('a', { highlight_bounds: [10, 10, 110, 60] })],
        reported_steps: [step(1), step(2, { inferred: true })],
        capture_panel: ['screenshots/a.png'],
        tips: ['Short steps match better.'],
      }),
      transcript: [{ sender: 'bot' as const, text: 'Hi.' }],
      draft: 'halfway typed',
    };
    const first = document.createElement('div');
    const second = document.createElement('div');
    renderApp(first, state, handlers);
    renderApp(second, state, handlers);
    expect(first.innerHTML).toBe(second.innerHTML);

    renderApp(first, state, handlers);
    expect(first.innerHTML).toBe(second.innerHTML);
  });
});

describe('developer upload flow', () => {
  it('renders the per-file error list when an upload is rejected', async () => {
    const rejection = {
      ok: false,
      app_name: null,
      app_version: null,
      trace_count: 0,
      event_count: 0,
      errors: [
        { file: 'traces/bad.json', sequence: null, message: 'malformed trace' },
        { file: 'traces/manual-001.json', sequence: 3, message: 'unknown event kind' },
      ],
    };
    const { fn } = fakeFetch(jsonResponse(rejection, 422));
    const api = new ApiClient('', fn);
    const report = await api.uploadPackage(new File([new Uint8Array(8)], 'traces.zip'));

    const panel = document.createElement('div');
    renderValidationReport(panel, report);
    const items = [...panel.querySelectorAll('[data-testid="upload-error"]')].map(
      (item) => item.textContent,
    );
    expect(items).toEqual([
      'traces/bad.json: malformed trace',
      'traces/manual-001.json (event 3): unknown event kind',
    ]);
  });
});
