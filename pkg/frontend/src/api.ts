import type { AppSummary, DialogueResponse, ValidationReport } from './types';

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
    public reason?: string
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function throwForStatus(res: Response): Promise<never> {
  let detail = `${res.status} ${res.statusText}`;
  let reason: string | undefined;
  try {
    const body = await res.json();
    if (typeof body?.detail === 'string') detail = body.detail;
    if (typeof body?.reason === 'string') reason = body.reason;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(detail, res.status, reason);
}

/**
 * Typed client for the reporting service.
 *
 * At most one request may be in flight at a time; callers are expected to
 * disable their inputs while `busy` is true, and a second concurrent call
 * is rejected outright rather than queued.
 */
export class ApiClient {
  private inflight = false;

  constructor(
    private baseUrl: string = '',
    private fetchFn: typeof fetch = (...args) => fetch(...args)
  ) {}

  get busy(): boolean {
    return this.inflight;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    if (this.inflight) {
      throw new Error('a request is already in flight for this session');
    }
    this.inflight = true;
    try {
      const res = await this.fetchFn(`${this.baseUrl}${path}`, init);
      if (!res.ok) await throwForStatus(res);
      return (await res.json()) as T;
    } finally {
      this.inflight = false;
    }
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  listApps(): Promise<AppSummary[]> {
    return this.request<AppSummary[]>('/apps');
  }

  createSession(appId: string | null): Promise<DialogueResponse> {
    return this.post<DialogueResponse>('/sessions', { app_id: appId });
  }

  sendMessage(sessionId: string, text: string): Promise<DialogueResponse> {
    return this.post<DialogueResponse>(`/sessions/${sessionId}/messages`, { text });
  }

  /** An empty `optionIds` array means "none of these fit". */
  sendSelection(sessionId: string, optionIds: string[]): Promise<DialogueResponse> {
    return this.post<DialogueResponse>(`/sessions/${sessionId}/selections`, {
      option_ids: optionIds,
    });
  }

  sendConfirmation(sessionId: string, value: boolean): Promise<DialogueResponse> {
    return this.post<DialogueResponse>(`/sessions/${sessionId}/confirmations`, { value });
  }

  sendQuickAction(
    sessionId: string,
    action: 'restart' | 'finish' | 'preview'
  ): Promise<DialogueResponse> {
    return this.post<DialogueResponse>(`/sessions/${sessionId}/actions`, { action });
  }

  editStep(sessionId: string, index: number, text: string): Promise<DialogueResponse> {
    return this.request<DialogueResponse>(`/sessions/${sessionId}/steps/${index}`, {
      method: 'PATCH',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    });
  }

  /**
   * Upload a trace package. Resolves with the ValidationReport in both the
   * published (201) and rejected (422) cases; other statuses throw ApiError.
   */
  async uploadPackage(zip: File | Blob, icon?: File | Blob): Promise<ValidationReport> {
    if (this.inflight) {
      throw new Error('a request is already in flight for this session');
    }
    const form = new FormData();
    form.append('zip', zip);
    if (icon) form.append('icon', icon);
    this.inflight = true;
    try {
      const res = await this.fetchFn(`${this.baseUrl}/apps`, { method: 'POST', body: form });
      if (res.status === 201 || res.status === 422) {
        return (await res.json()) as ValidationReport;
      }
      return await throwForStatus(res);
    } finally {
      this.inflight = false;
    }
  }

  reportUrl(sessionId: string, markdown = false): string {
    return `${this.baseUrl}/sessions/${sessionId}/report${markdown ? '.md' : ''}`;
  }
}
