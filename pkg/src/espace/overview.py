"""Overview cards: archetypal answers clustered per concept.

For every concept the knowledge graph can talk about, candidate snippets
(triple realizations plus endpoint labels, including those of subclass
descendants) are scored against a fixed set of archetypal questions
("What is X?", "Why X?", ...). Archetypes claim candidates in priority
order and exclusively: once a snippet lands in a cluster it is gone for
later archetypes. Each cluster is ordered by pertinence and folded into
an expandable summary tree. Open question answering reuses the same
snippet pool corpus-wide.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ValidationError
from .kg import KnowledgeGraph
from .pertinence import LexicalProvider, pertinence
from .taxonomy import Lexicon, TaxonomyForest


@dataclass(frozen=True)
class Archetype:
    """A question archetype: the ``{X}`` slot takes the concept label."""

    id: str
    priority: int
    surface_templates: tuple[str, ...]

    def realize(self, label: str) -> list[str]:
        return [t.replace("{X}", label) for t in self.surface_templates]


DEFAULT_ARCHETYPES = (
    Archetype("what", 1, ("What is {X}, what does {X} mean?",)),
    Archetype("why", 2, ("Why {X}, which reason causes {X}?",)),
    Archetype("what-for", 3, ("What purpose does {X} serve, what is {X} used to do?",)),
    Archetype("how", 4, ("How does {X} happen, become, or change?",)),
    Archetype("who", 5, ("Who deals with {X}, which person?",)),
    Archetype("where", 6, ("Where is {X}, which place?",)),
    Archetype("when", 7, ("When does {X} occur, which time, day, or year?",)),
)


def archetypes_from_config(items) -> tuple[Archetype, ...]:
    """Parse ``[{id, priority, templates}]`` and enforce unique priorities."""
    out = []
    for item in items:
        templates = tuple(item["templates"])
        if not templates:
            raise ValidationError(f"archetype {item['id']!r} has no templates")
        out.append(Archetype(item["id"], int(item["priority"]), templates))
    priorities = [a.priority for a in out]
    if len(set(priorities)) != len(priorities):
        raise ValidationError("archetype priorities must be unique")
    return tuple(sorted(out, key=lambda a: a.priority))


@dataclass
class Candidate:
    snippet: str
    paragraph_id: str
    triple_id: str | None


@dataclass
class AnswerUnit:
    snippet: str
    context: str  # paragraph id
    score: float
    assigned_archetype: str | None
    triple_id: str | None = None


@dataclass
class SummaryTree:
    node_id: str
    summary: str
    children: list["SummaryTree"] = field(default_factory=list)
    unit_index: int | None = None  # leaf payload: position in the cluster

    def leaves(self) -> list["SummaryTree"]:
        if not self.children:
            return [self]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out


@dataclass
class OverviewCard:
    uri: str
    label: str
    abstract: str
    type_labels: list[str]
    super_classes: list[str]
    sub_classes: list[str]
    sub_types: list[str]
    taxonomy_parent: str | None
    sections: dict[str, dict]  # archetype id -> {"tree": SummaryTree|None, "units": [...]}


def collect_candidates(uri: str, kg: KnowledgeGraph) -> list[Candidate]:
    """Snippets that can speak about the concept or its subclass descendants."""
    if uri not in kg.concepts:
        raise ValidationError(f"unknown concept uri {uri!r}")
    family = {uri} | kg.subclass_descendants(uri)
    out: list[Candidate] = []
    seen: set[str] = set()

    def push(snippet, paragraph_id, triple_id):
        if snippet and snippet not in seen:
            seen.add(snippet)
            out.append(Candidate(snippet, paragraph_id, triple_id))

    for triple in kg.triples:
        if triple.subj in family or triple.obj in family:
            par = triple.source[1]
            push(triple.realize(), par, triple.triple_id)
            push(kg.concepts[triple.subj].label, par, triple.triple_id)
            push(kg.concepts[triple.obj].label, par, triple.triple_id)
    return out


def cluster_by_archetype(label: str, candidates, archetypes,
                         provider: LexicalProvider, theta: float,
                         theta_overrides: dict[str, float] | None = None,
                         paragraph_texts: dict[str, str] | None = None,
                         ) -> dict[str, list[AnswerUnit]]:
    """Assign candidates to archetypes with a priority sweep.

    Archetypes run in priority order; each claims every still-unassigned
    candidate whose best template score reaches the threshold. Clusters
    come back ordered by score (ties keep candidate order). A candidate's
    context paragraph text takes part in its embedding when available.
    """
    theta_overrides = theta_overrides or {}
    paragraph_texts = paragraph_texts or {}
    ordered = sorted(archetypes, key=lambda a: a.priority)
    embeddings = []
    for cand in candidates:
        context = paragraph_texts.get(cand.paragraph_id, "")
        embeddings.append(provider.embed(cand.snippet, context, kind="answer"))

    assigned: dict[int, tuple[str, float]] = {}
    for archetype in ordered:
        cutoff = theta_overrides.get(archetype.id, theta)
        questions = [
            provider.embed(q, kind="question") for q in archetype.realize(label)
        ]
        for i, cand in enumerate(candidates):
            if i in assigned:
                continue
            score = max(pertinence(q, embeddings[i]) for q in questions)
            if score >= cutoff:
                assigned[i] = (archetype.id, score)

    clusters: dict[str, list[AnswerUnit]] = {a.id: [] for a in ordered}
    for archetype in ordered:
        members = [
            (i, score)
            for i, (aid, score) in sorted(assigned.items())
            if aid == archetype.id
        ]
        members.sort(key=lambda pair: (-pair[1], pair[0]))
        clusters[archetype.id] = [
            AnswerUnit(
                snippet=candidates[i].snippet,
                context=candidates[i].paragraph_id,
                score=score,
                assigned_archetype=archetype.id,
                triple_id=candidates[i].triple_id,
            )
            for i, score in members
        ]
    return clusters


def first_sentence(text: str) -> str:
    parts = re.split(r"(?<=[.!?])\s+", text.strip(), maxsplit=1)
    return parts[0]


def build_summary_tree(units, k: int = 3, budget: int = 280,
                       id_prefix: str = "s") -> SummaryTree | None:
    """Fold ordered answer units into a bounded-branching summary tree.

    Leaves are the units in order; every group of up to ``k`` siblings
    gets a parent summarizing them extractively (first sentence of each
    child, clipped to the character budget). A single unit is its own
    root. Returns None for an empty cluster.
    """
    if k < 2:
        raise ValidationError("summary group size must be at least 2")
    if not units:
        return None
    counter = [0]

    def next_id():
        counter[0] += 1
        return f"{id_prefix}:{counter[0]}"

    nodes = [
        SummaryTree(node_id=next_id(), summary=unit.snippet, unit_index=i)
        for i, unit in enumerate(units)
    ]
    while len(nodes) > 1:
        grouped = []
        for start in range(0, len(nodes), k):
            chunk = nodes[start : start + k]
            if len(chunk) == 1:
                grouped.append(chunk[0])
                continue
            summary = " ".join(first_sentence(c.summary) for c in chunk)
            if len(summary) > budget:
                summary = summary[: budget - 1].rstrip() + "…"
            grouped.append(
                SummaryTree(node_id=next_id(), summary=summary, children=chunk)
            )
        nodes = grouped
    return nodes[0]


def compose_overview(uri: str, kg: KnowledgeGraph, forest: TaxonomyForest,
                     clusters: dict[str, list[AnswerUnit]],
                     lexicon: Lexicon | None = None, k: int = 3,
                     budget: int = 280) -> OverviewCard:
    """Assemble the card: abstract, taxonomic neighbors, archetype sections."""
    if uri not in kg.concepts:
        raise ValidationError(f"unknown concept uri {uri!r}")
    concept = kg.concepts[uri]

    what_units = clusters.get("what", [])
    abstract = what_units[0].snippet if what_units else ""

    type_labels: list[str] = []
    taxonomy_parent = None
    tree = forest.tree_of(uri)
    if tree is not None:
        taxonomy_parent = None
        for parent, child in tree.edges:
            if child == uri:
                taxonomy_parent = parent
                break
        if taxonomy_parent and taxonomy_parent in kg.concepts:
            type_labels.append(kg.concepts[taxonomy_parent].label)
        if lexicon is not None and tree.root_label in lexicon.entries:
            root_lemma = lexicon.entries[tree.root_label].lemma
            if root_lemma not in type_labels:
                type_labels.append(root_lemma)

    sections = {}
    for archetype_id, units in clusters.items():
        sections[archetype_id] = {
            "tree": build_summary_tree(units, k=k, budget=budget,
                                       id_prefix=f"{uri}:{archetype_id}"),
            "units": units,
        }

    return OverviewCard(
        uri=uri,
        label=concept.label,
        abstract=abstract,
        type_labels=type_labels,
        super_classes=kg.superclasses(uri),
        sub_classes=kg.subclasses(uri),
        sub_types=forest.children_of(uri),
        taxonomy_parent=taxonomy_parent,
        sections=sections,
    )
