import type { SuggestionCard } from './types';

export type Bounds = [number, number, number, number];

export interface Ellipse {
  /** Center, in capture pixels */
  cx: number;
  cy: number;
  /** Radii, in capture pixels */
  rx: number;
  ry: number;
}

/** The ellipse inscribed in a component's bounding box. */
export function inscribedEllipse(bounds: Bounds): Ellipse {
  const [x1, y1, x2, y2] = bounds;
  return {
    cx: (x1 + x2) / 2,
    cy: (y1 + y2) / 2,
    rx: (x2 - x1) / 2,
    ry: (y2 - y1) / 2,
  };
}

function positionEllipse(el: HTMLElement, bounds: Bounds, scaleX: number, scaleY: number): void {
  const [x1, y1, x2, y2] = bounds;
  el.style.left = `${x1 * scaleX}px`;
  el.style.top = `${y1 * scaleY}px`;
  el.style.width = `${(x2 - x1) * scaleX}px`;
  el.style.height = `${(y2 - y1) * scaleY}px`;
}

/**
 * A capture thumbnail with the targeted component circled.
 *
 * The highlight is drawn as an absolutely positioned ellipse inscribed in
 * `highlight_bounds`. Bounds are in capture pixels, so the overlay is placed
 * at scale 1 immediately and rescaled once the image reports its natural
 * size (and again if the image is displayed at a different size).
 */
export function renderCardImage(card: SuggestionCard): HTMLElement {
  const wrap = document.createElement('div');
  wrap.style.position = 'relative';
  wrap.style.display = 'inline-block';

  if (!card.image_url) {
    wrap.setAttribute('data-testid', 'card-caption-only');
    wrap.textContent = card.caption;
    return wrap;
  }

  const img = document.createElement('img');
  img.src = card.image_url;
  img.alt = card.caption;
  img.style.display = 'block';
  wrap.appendChild(img);

  const bounds = card.highlight_bounds;
  if (bounds) {
    const ellipse = inscribedEllipse(bounds);
    const halo = document.createElement('div');
    halo.setAttribute('data-testid', 'highlight-ellipse');
    halo.setAttribute('data-cx', String(ellipse.cx));
    halo.setAttribute('data-cy', String(ellipse.cy));
    halo.style.position = 'absolute';
    halo.style.border = '3px solid #facc15';
    halo.style.borderRadius = '50%';
    halo.style.pointerEvents = 'none';
    positionEllipse(halo, bounds, 1, 1);
    img.addEventListener('load', () => {
      if (!img.naturalWidth || !img.naturalHeight) return;
      const scaleX = (img.clientWidth || img.naturalWidth) / img.naturalWidth;
      const scaleY = (img.clientHeight || img.naturalHeight) / img.naturalHeight;
      positionEllipse(halo, bounds, scaleX, scaleY);
    });
    wrap.appendChild(halo);
  }

  return wrap;
}
