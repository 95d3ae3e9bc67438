import type { DialogueResponse, SuggestionCard } from '../src/types';

export function card(id: string, overrides: Partial<SuggestionCard> = {}): SuggestionCard {
  return {
    id,
    caption: `Tap '${id}'`,
    image_url: `/apps/demo/screens/${id}/capture`,
    highlight_bounds: null,
    ...overrides,
  };
}

export function response(overrides: Partial<DialogueResponse> = {}): DialogueResponse {
  return {
    session_id: 'sess-1',
    phase: 'OB_DESCRIBE',
    messages: [],
    suggestion_cards: [],
    reported_steps: [],
    capture_panel: [],
    tips: [],
    can_finish: true,
    ...overrides,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export interface RecordedCall {
  url: string;
  method: string;
  /** Parsed JSON body, the raw FormData, or null */
  body: unknown;
}

/** A scripted stand-in for fetch that records every request it serves. */
export function fakeFetch(...queued: Array<Response | Promise<Response>>) {
  const calls: RecordedCall[] = [];
  const queue = [...queued];
  const fn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url =
      typeof input === 'string' ? input : input instanceof URL ? input.toString() : input.url;
    const method = init?.method ?? 'GET';
    let body: unknown = null;
    if (typeof init?.body === 'string') body = JSON.parse(init.body);
    else if (init?.body) body = init.body;
    calls.push({ url, method, body });
    const next = queue.shift();
    if (!next) throw new Error(`unscripted request: ${method} ${url}`);
    return next;
  }) as typeof fetch;
  return { fn, calls };
}

/** Waits for the microtask chain behind a click handler to settle. */
export const flush = () => new Promise<void>((resolve) => setTimeout(resolve));
