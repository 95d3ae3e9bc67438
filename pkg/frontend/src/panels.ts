import type { ReportedStep } from './types';

/** Maps an asset-relative capture name to a displayable URL. */
export type AssetResolver = (path: string) => string;

const identity: AssetResolver = (path) => path;

export interface StepsPanelOptions {
  onEdit: (index: number, text: string) => void;
  disabled?: boolean;
}

/**
 * The reported-steps list. Every step except the seeded first one gets an
 * edit control that swaps the row for an inline input; confirming calls
 * `onEdit` and the panel is re-rendered from the next server response.
 */
export function renderStepsPanel(
  container: HTMLElement,
  steps: ReportedStep[],
  options: StepsPanelOptions
): void {
  container.innerHTML = '';
  const list = document.createElement('ol');
  list.setAttribute('data-testid', 'steps-panel');

  for (const step of steps) {
    const item = document.createElement('li');
    item.setAttribute('data-testid', 'step-row');
    item.setAttribute('data-step-index', String(step.index));

    const text = document.createElement('span');
    text.textContent = step.text;
    item.appendChild(text);

    const flags: string[] = [];
    if (step.inferred) flags.push('inferred');
    if (!step.matched) flags.push('unverified');
    if (step.stale) flags.push('needs review');
    if (flags.length) {
      const badge = document.createElement('em');
      badge.setAttribute('data-testid', 'step-flags');
      badge.textContent = ` (${flags.join(', ')})`;
      item.appendChild(badge);
    }

    if (step.index > 1) {
      const edit = document.createElement('button');
      edit.type = 'button';
      edit.setAttribute('data-testid', 'edit-step');
      edit.textContent = 'Edit';
      edit.disabled = options.disabled ?? false;
      edit.onclick = () => {
        const input = document.createElement('input');
        input.type = 'text';
        input.value = step.text;
        input.setAttribute('data-testid', 'edit-step-input');
        const save = document.createElement('button');
        save.type = 'button';
        save.setAttribute('data-testid', 'edit-step-save');
        save.textContent = 'Save';
        save.onclick = () => options.onEdit(step.index, input.value);
        item.replaceChildren(input, save);
      };
      item.appendChild(edit);
    }
    list.appendChild(item);
  }
  container.appendChild(list);
}

/** The last-three-captures strip; renders exactly what the server sent. */
export function renderCapturePanel(
  container: HTMLElement,
  captures: string[],
  resolve: AssetResolver = identity
): void {
  container.innerHTML = '';
  const strip = document.createElement('div');
  strip.setAttribute('data-testid', 'capture-panel');
  strip.style.display = 'flex';
  strip.style.gap = '6px';
  for (const path of captures) {
    const img = document.createElement('img');
    img.setAttribute('data-testid', 'capture-thumb');
    img.src = resolve(path);
    img.alt = path;
    strip.appendChild(img);
  }
  container.appendChild(strip);
}

export function renderTipsPanel(container: HTMLElement, tips: string[]): void {
  container.innerHTML = '';
  const list = document.createElement('ul');
  list.setAttribute('data-testid', 'tips-panel');
  for (const tip of tips) {
    const item = document.createElement('li');
    item.textContent = tip;
    list.appendChild(item);
  }
  container.appendChild(list);
}

export interface QuickActionOptions {
  canFinish: boolean;
  onAction: (action: 'restart' | 'finish' | 'preview') => void;
  disabled?: boolean;
}

export function renderQuickActions(container: HTMLElement, options: QuickActionOptions): void {
  container.innerHTML = '';
  const row = document.createElement('div');
  row.setAttribute('data-testid', 'quick-actions');
  row.style.display = 'flex';
  row.style.gap = '8px';
  const actions: Array<'restart' | 'preview' | 'finish'> = ['restart', 'preview', 'finish'];
  for (const action of actions) {
    const button = document.createElement('button');
    button.type = 'button';
    button.setAttribute('data-testid', `action-${action}`);
    button.textContent = action[0].toUpperCase() + action.slice(1);
    button.disabled = (options.disabled ?? false) || (action === 'finish' && !options.canFinish);
    button.onclick = () => options.onAction(action);
    row.appendChild(button);
  }
  container.appendChild(row);
}
