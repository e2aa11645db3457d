/** Overview card rendering, shared by the modal and by tab panels.
 *  Sections appear exactly in payload order, units in payload order;
 *  no client-side sorting or filtering anywhere. */

import { renderAnnotated, SyntagmHandler } from './annotate.js';
import type { ApiClient } from './api.js';
import type { OverviewResponse, SummaryTreeNode } from './types.js';

export interface CardHandlers {
  /** Click on an annotated span inside card text. */
  onOpenConcept: SyntagmHandler;
  /** Click on a taxonomic reference (opens a new tab). */
  onOpenTab: SyntagmHandler;
  api: ApiClient;
}

function taxonomicList(
  title: string,
  uris: string[],
  handlers: CardHandlers,
): HTMLElement | null {
  if (!uris.length) {
    return null;
  }
  const wrap = document.createElement('div');
  wrap.className = 'taxonomy-row';
  const label = document.createElement('span');
  label.className = 'taxonomy-title';
  label.textContent = title;
  wrap.appendChild(label);
  for (const uri of uris) {
    const link = document.createElement('button');
    link.type = 'button';
    link.className = 'taxonomy-link';
    link.dataset.uri = uri;
    link.textContent = uri;
    link.addEventListener('click', () => handlers.onOpenTab(uri));
    wrap.appendChild(link);
  }
  return wrap;
}

function renderSummaryNode(
  node: SummaryTreeNode,
  handlers: CardHandlers,
): HTMLElement {
  const item = document.createElement('li');
  item.className = 'summary-node';
  item.dataset.nodeId = node.id;
  const text = document.createElement('span');
  text.className = 'summary-text';
  text.textContent = node.summary;
  item.appendChild(text);

  if (node.unit_index === null) {
    const expand = document.createElement('button');
    expand.type = 'button';
    expand.className = 'expand';
    expand.textContent = 'expand';
    expand.addEventListener('click', async () => {
      expand.disabled = true;
      try {
        const payload = await handlers.api.summaryChildren(node.id);
        const list = document.createElement('ul');
        list.className = 'summary-children';
        for (const child of payload.children) {
          const childNode: SummaryTreeNode = {
            id: child.id,
            summary: child.summary,
            unit_index: child.unit_index,
            children: [],
          };
          list.appendChild(
            renderSummaryNode(
              child.leaf ? { ...childNode, unit_index: child.unit_index ?? 0 } : childNode,
              handlers,
            ),
          );
        }
        item.appendChild(list);
        expand.remove();
      } catch {
        expand.disabled = false;
      }
    });
    item.appendChild(expand);
  }
  return item;
}

export function cardHasContent(card: OverviewResponse): boolean {
  if (card.abstract) {
    return true;
  }
  for (const section of Object.values(card.sections)) {
    if (section.units.length) {
      return true;
    }
  }
  return false;
}

export function renderCard(
  card: OverviewResponse,
  handlers: CardHandlers,
): HTMLElement {
  const root = document.createElement('article');
  root.className = 'card';
  root.dataset.uri = card.uri;

  const heading = document.createElement('h2');
  heading.textContent = card.label;
  root.appendChild(heading);

  if (card.type_labels.length) {
    const type = document.createElement('p');
    type.className = 'type-labels';
    type.textContent = card.type_labels.join(', ');
    root.appendChild(type);
  }

  if (card.abstract) {
    const abstract = document.createElement('p');
    abstract.className = 'abstract';
    abstract.appendChild(
      renderAnnotated(card.abstract, card.abstract_links, handlers.onOpenConcept),
    );
    root.appendChild(abstract);
  }

  const taxonomy = document.createElement('div');
  taxonomy.className = 'taxonomy';
  const rows = [
    taxonomicList('type of', card.taxonomy_parent ? [card.taxonomy_parent] : [], handlers),
    taxonomicList('super-classes', card.super_classes, handlers),
    taxonomicList('sub-classes', card.sub_classes, handlers),
    taxonomicList('sub-types', card.sub_types, handlers),
  ];
  for (const row of rows) {
    if (row) {
      taxonomy.appendChild(row);
    }
  }
  if (taxonomy.childElementCount) {
    root.appendChild(taxonomy);
  }

  let anyUnits = false;
  for (const [archetype, section] of Object.entries(card.sections)) {
    const block = document.createElement('section');
    block.className = 'archetype-section';
    block.dataset.archetype = archetype;
    const header = document.createElement('h3');
    header.textContent = archetype;
    block.appendChild(header);

    if (section.tree && section.tree.children.length) {
      const treeList = document.createElement('ul');
      treeList.className = 'summary-tree';
      treeList.appendChild(renderSummaryNode(section.tree, handlers));
      block.appendChild(treeList);
    }

    const units = document.createElement('ol');
    units.className = 'units';
    for (const unit of section.units) {
      anyUnits = true;
      const item = document.createElement('li');
      item.className = 'unit';
      const score = document.createElement('span');
      score.className = 'score';
      score.textContent = unit.score.toFixed(3);
      item.appendChild(score);
      const text = document.createElement('span');
      text.className = 'unit-text';
      text.appendChild(
        renderAnnotated(unit.snippet, unit.links, handlers.onOpenConcept),
      );
      item.appendChild(text);
      units.appendChild(item);
    }
    block.appendChild(units);
    root.appendChild(block);
  }

  if (!anyUnits && !card.abstract) {
    const empty = document.createElement('p');
    empty.className = 'no-info';
    empty.textContent = 'no further information';
    root.appendChild(empty);
  }
  return root;
}
