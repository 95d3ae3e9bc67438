import { renderCardImage } from './overlay';
import type { SuggestionCard } from './types';

/** The service never sends more than five cards; the UI never draws more either. */
export const MAX_CARDS = 5;

export interface CardRowOptions {
  /** Allow picking several cards (step predictions) instead of exactly one */
  multiSelect: boolean;
  /** Offer "None of these" on a single-select row (screen/step listings) */
  allowNone?: boolean;
  /** Called with the chosen card ids; [] means "none of these" */
  onSubmit: (optionIds: string[]) => void;
  disabled?: boolean;
}

/**
 * The selectable suggestion row under the newest bot message.
 *
 * Single-select submits on click. Multi-select toggles cards and adds a
 * "Use selected" control. "None of these" submits an empty selection so the
 * server can page further candidates or fall back to typed input; it appears
 * on every multi-select row and on single-select rows that opt in.
 */
export function renderSuggestionCards(
  container: HTMLElement,
  cards: SuggestionCard[],
  options: CardRowOptions
): void {
  container.innerHTML = '';
  const visible = cards.slice(0, MAX_CARDS);
  if (!visible.length) return;

  const chosen = new Set<string>();
  const row = document.createElement('div');
  row.setAttribute('data-testid', 'suggestion-row');
  row.style.display = 'flex';
  row.style.flexWrap = 'wrap';
  row.style.gap = '8px';

  for (const card of visible) {
    const button = document.createElement('button');
    button.type = 'button';
    button.setAttribute('data-testid', 'suggestion-card');
    button.setAttribute('data-option-id', card.id);
    button.disabled = options.disabled ?? false;
    button.style.display = 'block';
    button.style.border = '1px solid #d1d5db';
    button.style.borderRadius = '8px';
    button.style.padding = '6px';

    button.appendChild(renderCardImage(card));
    const caption = document.createElement('div');
    caption.textContent = card.caption;
    caption.style.marginTop = '4px';
    button.appendChild(caption);

    button.onclick = () => {
      if (!options.multiSelect) {
        options.onSubmit([card.id]);
        return;
      }
      if (chosen.has(card.id)) {
        chosen.delete(card.id);
        button.style.outline = '';
      } else {
        chosen.add(card.id);
        button.style.outline = '3px solid #2563eb';
      }
    };
    row.appendChild(button);
  }
  container.appendChild(row);

  if (options.multiSelect || options.allowNone) {
    const controls = document.createElement('div');
    controls.style.marginTop = '6px';
    controls.style.display = 'flex';
    controls.style.gap = '8px';

    if (options.multiSelect) {
      const submit = document.createElement('button');
      submit.type = 'button';
      submit.setAttribute('data-testid', 'submit-selection');
      submit.textContent = 'Use selected';
      submit.disabled = options.disabled ?? false;
      submit.onclick = () => options.onSubmit([...chosen]);
      controls.appendChild(submit);
    }

    const none = document.createElement('button');
    none.type = 'button';
    none.setAttribute('data-testid', 'select-none');
    none.textContent = 'None of these';
    none.disabled = options.disabled ?? false;
    none.onclick = () => options.onSubmit([]);
    controls.appendChild(none);

    container.appendChild(controls);
  }
}
