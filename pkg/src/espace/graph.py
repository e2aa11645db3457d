"""The explanatory space: aspects with cards, linked by their answers.

Nodes are concepts that own an overview card; an edge A -> B means B is
mentioned inside an answer unit shown on A's card, so a reader of A can
hop to B. The entry point is the annotated initial explanation. Two
pruning rules keep the space walkable: concepts made only of very
frequent words are dropped as generic world knowledge, and concepts that
no shortest path passes through (betweenness zero on the unfiltered
graph) are dropped as dead weight, with an exemption for concepts the
landing page itself mentions.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .corpus import Document
from .errors import ParseError, ValidationError
from .kg import KnowledgeGraph
from .overview import OverviewCard

log = logging.getLogger(__name__)


@dataclass
class InitialExplanation:
    document_id: str
    blocks: list[dict]  # {"paragraph_id", "text", "links": [[start, end, uri]]}


@dataclass
class AnnotatedText:
    text: str
    links: list[tuple[int, int, str]]


@dataclass
class ExplanatorySpace:
    nodes: dict[str, OverviewCard]
    edges: set[tuple[str, str, str]]  # (from uri, to uri, via "archetype:unit")
    entry: InitialExplanation
    profile: str = "yai4hu"

    def edge_pairs(self) -> set[tuple[str, str]]:
        return {(a, b) for a, b, _ in self.edges}


class LabelMatcher:
    """Finds concept mentions in free text by longest lexical match.

    A concept matches through its preferred label or its space-joined
    lemma sequence, case-insensitively and on word boundaries. Overlaps
    resolve to the longest span, then the leftmost one.
    """

    def __init__(self, kg: KnowledgeGraph, uris):
        self.patterns: dict[str, str] = {}
        for uri in sorted(uris):
            concept = kg.concepts.get(uri)
            if concept is None:
                continue
            for form in {concept.label.lower(), " ".join(concept.lemma_seq)}:
                if not form.strip():
                    continue
                current = self.patterns.get(form)
                if current is None or uri < current:
                    self.patterns[form] = uri
        self._regexes = [
            (re.compile(r"(?<![0-9A-Za-z])" + re.escape(form) + r"(?![0-9A-Za-z])",
                        re.IGNORECASE), form, uri)
            for form, uri in sorted(self.patterns.items())
        ]

    def annotate(self, text: str) -> AnnotatedText:
        matches = []
        for regex, form, uri in self._regexes:
            for hit in regex.finditer(text):
                matches.append((hit.start(), hit.end(), uri))
        matches.sort(key=lambda m: (-(m[1] - m[0]), m[0], m[2]))
        accepted: list[tuple[int, int, str]] = []
        for start, end, uri in matches:
            if all(end <= s or start >= e for s, e, _ in accepted):
                accepted.append((start, end, uri))
        accepted.sort()
        return AnnotatedText(text=text, links=accepted)


def assemble(kg: KnowledgeGraph, cards: dict[str, OverviewCard],
             entry_doc: Document, profile: str = "yai4hu") -> ExplanatorySpace:
    """Wire cards into a graph and plant the entry document.

    Edges follow mentions: whenever another card's concept shows up in an
    answer unit of card A, the first mentioning unit contributes one
    A -> B edge. Entry blocks are annotated against the full node set;
    the final annotation pass happens again after filtering.
    """
    if not cards:
        raise ValidationError("no overview cards: nothing to assemble")
    if not entry_doc.paragraphs:
        raise ValidationError(f"entry document {entry_doc.document_id!r} is empty")

    matcher = LabelMatcher(kg, cards.keys())
    edges: dict[tuple[str, str], str] = {}
    for uri in sorted(cards):
        card = cards[uri]
        for archetype_id, section in card.sections.items():
            for index, unit in enumerate(section["units"]):
                for _, _, target in matcher.annotate(unit.snippet).links:
                    if target == uri:
                        continue
                    edges.setdefault((uri, target), f"{archetype_id}:{index}")

    blocks = []
    for par in entry_doc.paragraphs:
        annotated = matcher.annotate(par.text)
        blocks.append(
            {
                "paragraph_id": par.paragraph_id,
                "text": par.text,
                "links": [list(link) for link in annotated.links],
            }
        )
    entry = InitialExplanation(document_id=entry_doc.document_id, blocks=blocks)
    return ExplanatorySpace(
        nodes=dict(cards),
        edges={(a, b, via) for (a, b), via in edges.items()},
        entry=entry,
        profile=profile,
    )


def betweenness(es: ExplanatorySpace) -> dict[str, float]:
    """Exact betweenness centrality of every node on the directed graph."""
    adj: dict[str, list[str]] = {uri: [] for uri in es.nodes}
    for a, b in sorted(es.edge_pairs()):
        if a in adj and b in es.nodes:
            adj[a].append(b)
    return betweenness_directed(sorted(es.nodes), adj)


def betweenness_directed(nodes, adj) -> dict[str, float]:
    """Brandes accumulation over BFS shortest paths, unnormalized."""
    bc = {v: 0.0 for v in nodes}
    for source in nodes:
        stack = []
        preds = {v: [] for v in nodes}
        sigma = {v: 0 for v in nodes}
        dist = {v: -1 for v in nodes}
        sigma[source] = 1
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj.get(v, ()):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: 0.0 for v in nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != source:
                bc[w] += delta[w]
    return bc


def load_frequency_table(path) -> list[str]:
    """Reference word frequencies: ``lemma<TAB>count`` sorted by count desc."""
    lemmas = []
    last = None
    for lineno, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError("expected lemma<TAB>count", line=lineno)
        lemma, count = cols[0].strip().lower(), cols[1].strip()
        try:
            value = int(count)
        except ValueError:
            raise ParseError(f"non-integer count {count!r}", line=lineno) from None
        if last is not None and value > last:
            raise ParseError("counts must be sorted descending", line=lineno)
        last = value
        lemmas.append(lemma)
    return lemmas


def card_is_empty(card: OverviewCard) -> bool:
    has_units = any(section["units"] for section in card.sections.values())
    has_taxonomy = bool(card.super_classes or card.sub_classes or card.sub_types
                        or card.type_labels)
    return not (has_units or card.abstract or has_taxonomy)


def filter_nodes(es: ExplanatorySpace, freq_lemmas, centrality,
                 kg: KnowledgeGraph, top_f: int = 1000) -> ExplanatorySpace:
    """Prune generic and unvisited concepts, then re-annotate everything.

    Rule (a): a concept goes when every one of its lemmas sits in the top
    ``top_f`` rows of the frequency table. Rule (b): a concept goes when
    its betweenness on the pre-filter graph is zero, unless the entry
    page mentions it and its card is non-empty. Edges incident to removed
    nodes are dropped, card cross-references are pruned to survivors, and
    entry links are recomputed against the surviving node set.
    """
    top = set(freq_lemmas[:top_f])
    entry_mentions = {
        link[2] for block in es.entry.blocks for link in block["links"]
    }

    survivors = {}
    for uri, card in es.nodes.items():
        concept = kg.concepts[uri]
        generic = bool(concept.lemma_seq) and all(
            lemma in top for lemma in concept.lemma_seq
        )
        if generic:
            continue
        if centrality.get(uri, 0.0) == 0.0:
            exempt = uri in entry_mentions and not card_is_empty(card)
            if not exempt:
                continue
        survivors[uri] = card

    for card in survivors.values():
        card.super_classes = [u for u in card.super_classes if u in survivors]
        card.sub_classes = [u for u in card.sub_classes if u in survivors]
        card.sub_types = [u for u in card.sub_types if u in survivors]
        if card.taxonomy_parent not in survivors:
            card.taxonomy_parent = None

    matcher = LabelMatcher(kg, survivors.keys())
    blocks = []
    for block in es.entry.blocks:
        annotated = matcher.annotate(block["text"])
        blocks.append(
            {
                "paragraph_id": block["paragraph_id"],
                "text": block["text"],
                "links": [list(link) for link in annotated.links],
            }
        )
    entry = InitialExplanation(document_id=es.entry.document_id, blocks=blocks)

    filtered = ExplanatorySpace(
        nodes=survivors,
        edges={(a, b, via) for a, b, via in es.edges
               if a in survivors and b in survivors},
        entry=entry,
        profile=es.profile,
    )
    if survivors and not any(block["links"] for block in blocks):
        log.warning(
            "entry document %s has no links into the filtered space "
            "(%d surviving nodes); the space is not explorable from the entry",
            entry.document_id, len(survivors),
        )
    return filtered


def annotate(text: str, es: ExplanatorySpace, kg: KnowledgeGraph) -> AnnotatedText:
    """Link surviving concept mentions inside arbitrary text."""
    return LabelMatcher(kg, es.nodes.keys()).annotate(text)
