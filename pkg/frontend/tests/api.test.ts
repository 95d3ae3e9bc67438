import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/api';
import { fakeFetch, jsonResponse, response } from './helpers';

describe('ApiClient', () => {
  it('posts a new session for the chosen app', async () => {
    const { fn, calls } = fakeFetch(jsonResponse(response()));
    const api = new ApiClient('', fn);
    const res = await api.createSession('demopad-1.0');
    expect(res.session_id).toBe('sess-1');
    expect(calls[0]).toMatchObject({
      url: '/sessions',
      method: 'POST',
      body: { app_id: 'demopad-1.0' },
    });
  });

  it('sends selections under the option_ids wire name', async () => {
    const { fn, calls } = fakeFetch(jsonResponse(response()));
    const api = new ApiClient('', fn);
    await api.sendSelection('sess-1', []);
    expect(calls[0]).toMatchObject({
      url: '/sessions/sess-1/selections',
      method: 'POST',
      body: { option_ids: [] },
    });
  });

  it('patches an edited step', async () => {
    const { fn, calls } = fakeFetch(jsonResponse(response()));
    const api = new ApiClient('', fn);
    await api.editStep('sess-1', 2, 'Tap the save button');
    expect(calls[0]).toMatchObject({
      url: '/sessions/sess-1/steps/2',
      method: 'PATCH',
      body: { text: 'Tap the save button' },
    });
  });

  it('rejects a second call while one is in flight', async () => {
    let release!: (res: Response) => void;
    const pending = new Promise<Response>((resolve) => (release = resolve));
    const { fn, calls } = fakeFetch(pending);
    const api = new ApiClient('', fn);

    const first = api.sendMessage('sess-1', 'hello');
    expect(api.busy).toBe(true);
    await expect(api.sendMessage('sess-1', 'again')).rejects.toThrow(
      'a request is already in flight for this session',
    );

    release(jsonResponse(response()));
    await first;
    expect(api.busy).toBe(false);
    expect(calls).toHaveLength(1);
  });

  it('turns an error body into an ApiError', async () => {
    const { fn } = fakeFetch(jsonResponse({ detail: 'unknown session', reason: 'not-found' }, 404));
    const api = new ApiClient('', fn);
    const error = await api.sendMessage('nope', 'hi').catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).message).toBe('unknown session');
    expect((error as ApiError).status).toBe(404);
    expect((error as ApiError).reason).toBe('not-found');
  });

  it('keeps the status line when the error body is not JSON', async () => {
    const { fn } = fakeFetch(new Response('gateway meltdown', { status: 502 }));
    const api = new ApiClient('', fn);
    await expect(api.listApps()).rejects.toThrow('502');
  });

  it('resolves the validation report on publish and on rejection', async () => {
    const ok = {
      ok: true,
      app_name: 'DemoPad',
      app_version: '1.0',
      trace_count: 2,
      event_count: 8,
      errors: [],
      app_id: 'demopad-1.0',
    };
    const bad = {
      ok: false,
      app_name: null,
      app_version: null,
      trace_count: 0,
      event_count: 0,
      errors: [{ file: 'traces/bad.json', sequence: null, message: 'malformed trace' }],
    };
    const { fn, calls } = fakeFetch(jsonResponse(ok, 201), jsonResponse(bad, 422));
    const api = new ApiClient('', fn);
    const zip = new File([new Uint8Array(16)], 'traces.zip');
    const icon = new File([new Uint8Array(8)], 'icon.png');

    await expect(api.uploadPackage(zip, icon)).resolves.toMatchObject({
      ok: true,
      app_id: 'demopad-1.0',
    });
    const form = calls[0].body as FormData;
    expect(form).toBeInstanceOf(FormData);
    expect(form.get('zip')).toBe(zip);
    expect(form.get('icon')).toBe(icon);

    const rejected = await api.uploadPackage(zip);
    expect(rejected.ok).toBe(false);
    expect(rejected.errors).toHaveLength(1);
    expect((calls[1].body as FormData).get('icon')).toBeNull();
  });

  it('throws on non-validation upload failures', async () => {
    const { fn } = fakeFetch(jsonResponse({ detail: 'package too large' }, 413));
    const api = new ApiClient('', fn);
    await expect(api.uploadPackage(new File([new Uint8Array(16)], 'traces.zip'))).rejects.toThrow(
      'package too large',
    );
  });

  it('builds report links for both formats', () => {
    const api = new ApiClient('http://localhost:8765');
    expect(api.reportUrl('sess-1')).toBe('http://localhost:8765/sessions/sess-1/report');
    expect(api.reportUrl('sess-1', true)).toBe('http://localhost:8765/sessions/sess-1/report.md');
  });
});
