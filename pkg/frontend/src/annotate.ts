/** Turns server-provided link spans into clickable syntagm elements.
 *  The client never discovers concepts on its own: every interactive
 *  span comes verbatim from the payload. */

import type { Link } from './types.js';

export type SyntagmHandler = (uri: string) => void;

export function renderAnnotated(
  text: string,
  links: Link[] | undefined,
  onOpen: SyntagmHandler,
): DocumentFragment {
  const fragment = document.createDocumentFragment();
  let cursor = 0;
  for (const [start, end, uri] of links ?? []) {
    if (start > cursor) {
      fragment.appendChild(document.createTextNode(text.slice(cursor, start)));
    }
    const span = document.createElement('button');
    span.type = 'button';
    span.className = 'syntagm';
    span.dataset.uri = uri;
    span.textContent = text.slice(start, end);
    span.addEventListener('click', () => onOpen(uri));
    fragment.appendChild(span);
    cursor = end;
  }
  if (cursor < text.length) {
    fragment.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return fragment;
}
