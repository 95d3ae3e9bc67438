import { ApiClient, ApiError } from './api';
import { renderSuggestionCards } from './cards';
import {
  AssetResolver,
  renderCapturePanel,
  renderQuickActions,
  renderStepsPanel,
  renderTipsPanel,
} from './panels';
import type { DialogueResponse } from './types';

export interface ChatEntry {
  sender: 'user' | 'bot';
  text: string;
}

export interface AppState {
  response: DialogueResponse | null;
  transcript: ChatEntry[];
  draft: string;
  busy: boolean;
  toast: string | null;
}

export function initialState(): AppState {
  return { response: null, transcript: [], draft: '', busy: false, toast: null };
}

/** Step predictions are the only multi-select surface; everything else picks one. */
function isMultiSelect(response: DialogueResponse): boolean {
  return response.phase === 'S2R_PREDICT_OFFER';
}

/** Yes/no questions; the server rejects selections here, so cards are previews. */
function isConfirm(response: DialogueResponse): boolean {
  return response.phase.endsWith('CONFIRM');
}

/** Listing phases where an empty selection legally means "none of these". */
function allowsNone(response: DialogueResponse): boolean {
  return response.phase === 'OB_SELECT' || response.phase === 'S2R_SELECT';
}

export interface Handlers {
  onText: (text: string) => void;
  onSelection: (optionIds: string[]) => void;
  onConfirm: (value: boolean) => void;
  onAction: (action: 'restart' | 'finish' | 'preview') => void;
  onEditStep: (index: number, text: string) => void;
  onDraftChange: (draft: string) => void;
}

/**
 * Draws the whole client from one state snapshot.
 *
 * Everything below the root is rebuilt on each call, so the markup is a
 * function of the latest DialogueResponse plus the local draft text; no
 * dialogue decisions are made here.
 */
export function renderApp(
  root: HTMLElement,
  state: AppState,
  handlers: Handlers,
  resolveAsset: AssetResolver = (path) => path
): void {
  root.innerHTML = '';
  const { response } = state;

  const chat = document.createElement('div');
  chat.setAttribute('data-testid', 'chat-log');
  for (const entry of state.transcript) {
    const bubble = document.createElement('div');
    bubble.setAttribute('data-testid', `chat-${entry.sender}`);
    bubble.textContent = entry.text;
    chat.appendChild(bubble);
  }
  root.appendChild(chat);

  if (state.toast) {
    const toast = document.createElement('div');
    toast.setAttribute('data-testid', 'toast');
    toast.textContent = state.toast;
    root.appendChild(toast);
  }

  const cardBox = document.createElement('div');
  if (response) {
    renderSuggestionCards(cardBox, response.suggestion_cards, {
      multiSelect: isMultiSelect(response),
      allowNone: allowsNone(response),
      onSubmit: handlers.onSelection,
      disabled: state.busy || isConfirm(response),
    });
  }
  root.appendChild(cardBox);

  if (response && isConfirm(response)) {
    const confirmRow = document.createElement('div');
    confirmRow.setAttribute('data-testid', 'confirm-row');
    confirmRow.style.display = 'flex';
    confirmRow.style.gap = '8px';
    for (const value of [true, false]) {
      const button = document.createElement('button');
      button.type = 'button';
      button.setAttribute('data-testid', value ? 'confirm-yes' : 'confirm-no');
      button.textContent = value ? 'Yes' : 'No';
      button.disabled = state.busy;
      button.onclick = () => handlers.onConfirm(value);
      confirmRow.appendChild(button);
    }
    root.appendChild(confirmRow);
  }

  const input = document.createElement('textarea');
  input.setAttribute('data-testid', 'chat-input');
  input.value = state.draft;
  input.disabled = state.busy;
  input.placeholder = 'Describe it in your own words...';
  input.addEventListener('input', () => handlers.onDraftChange(input.value));
  input.addEventListener('keydown', (event: KeyboardEvent) => {
    if (event.key === 'Enter' && !event.shiftKey) {
      event.preventDefault();
      if (input.value.trim()) handlers.onText(input.value);
    }
  });
  root.appendChild(input);

  const send = document.createElement('button');
  send.type = 'button';
  send.setAttribute('data-testid', 'chat-send');
  send.textContent = 'Send';
  send.disabled = state.busy;
  send.onclick = () => {
    if (input.value.trim()) handlers.onText(input.value);
  };
  root.appendChild(send);

  const stepsBox = document.createElement('div');
  const capturesBox = document.createElement('div');
  const tipsBox = document.createElement('div');
  const actionsBox = document.createElement('div');
  if (response) {
    renderStepsPanel(stepsBox, response.reported_steps, {
      onEdit: handlers.onEditStep,
      disabled: state.busy,
    });
    renderCapturePanel(capturesBox, response.capture_panel, resolveAsset);
    renderTipsPanel(tipsBox, response.tips);
    renderQuickActions(actionsBox, {
      canFinish: response.can_finish,
      onAction: handlers.onAction,
      disabled: state.busy,
    });
  }
  root.append(stepsBox, capturesBox, tipsBox, actionsBox);
}

/**
 * Wires the rendered panels to the service client.
 *
 * One event is in flight at a time: `busy` flips before the request and the
 * whole UI re-renders with inputs disabled until the response (or error)
 * lands, which satisfies the server's one-event-per-session rule by
 * construction.
 */
export class ReporterApp {
  state = initialState();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private resolveAsset: AssetResolver = (path) => path
  ) {}

  async start(appId: string | null): Promise<void> {
    await this.dispatch(() => this.api.createSession(appId));
  }

  private sessionId(): string {
    const id = this.state.response?.session_id;
    if (!id) throw new Error('no active session');
    return id;
  }

  private async dispatch(
    call: () => Promise<DialogueResponse>,
    userEcho?: string
  ): Promise<void> {
    if (this.state.busy) return;
    this.state.busy = true;
    this.state.toast = null;
    if (userEcho) this.state.transcript.push({ sender: 'user', text: userEcho });
    this.render();
    try {
      const response = await call();
      this.state.response = response;
      for (const text of response.messages) {
        this.state.transcript.push({ sender: 'bot', text });
      }
    } catch (error) {
      if (error instanceof ApiError) {
        this.state.toast = error.message;
      } else {
        this.state.toast = 'The service is unreachable. Try again.';
      }
    } finally {
      this.state.busy = false;
      this.render();
    }
  }

  render(): void {
    renderApp(
      this.root,
      this.state,
      {
        onText: (text) => {
          this.state.draft = '';
          void this.dispatch(() => this.api.sendMessage(this.sessionId(), text), text);
        },
        onSelection: (ids) => {
          void this.dispatch(() => this.api.sendSelection(this.sessionId(), ids));
        },
        onConfirm: (value) => {
          void this.dispatch(
            () => this.api.sendConfirmation(this.sessionId(), value),
            value ? 'Yes' : 'No'
          );
        },
        onAction: (action) => {
          void this.dispatch(() => this.api.sendQuickAction(this.sessionId(), action));
        },
        onEditStep: (index, text) => {
          void this.dispatch(() => this.api.editStep(this.sessionId(), index, text));
        },
        onDraftChange: (draft) => {
          this.state.draft = draft;
        },
      },
      this.resolveAsset
    );
  }
}
