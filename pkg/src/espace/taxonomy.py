"""Taxonomy construction over the concept graph.

Concepts are aligned to a hypernym lexicon (a flat TSV shipped with the
build inputs) through gloss-overlap sense disambiguation. The resolved
senses and their transitive hypernyms form a binary object/attribute
context, whose complete concept lattice is enumerated and then flattened
into a forest of single-rooted concept trees. The forest provides the
abstraction axis of the explanatory space: cards expose it as type labels
and sub-type links.

Everything here is deterministic: sense order follows the lexicon file,
lattice enumeration follows the lexicographic attribute order, and tree
shaping uses fixed, documented tie-breaks so repeated builds are
byte-identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError

_WORD = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class SenseEntry:
    lemma: str
    sense_id: str
    parent: str  # empty string for roots
    gloss: str


class Lexicon:
    """Sense inventory with hypernym chains.

    File format: UTF-8, tab-separated ``lemma<TAB>sense_id<TAB>parent_sense_id<TAB>gloss``,
    one sense per line, ``#`` comments allowed. The order of senses for a
    lemma is meaningful: first is the most frequent sense.
    """

    def __init__(self, entries):
        self.entries: dict[str, SenseEntry] = {}
        self.by_lemma: dict[str, list[SenseEntry]] = {}
        for entry in entries:
            if entry.sense_id in self.entries:
                raise ValidationError(f"duplicate sense id {entry.sense_id!r}")
            self.entries[entry.sense_id] = entry
            self.by_lemma.setdefault(entry.lemma, []).append(entry)
        for sense_id in self.entries:
            self.chain(sense_id)  # validates termination

    @classmethod
    def load(cls, path) -> "Lexicon":
        entries = []
        for lineno, raw in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = raw.strip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise ParseError(f"expected 4 tab-separated columns", line=lineno)
            lemma, sense_id, parent, gloss = cols
            entries.append(SenseEntry(lemma.strip(), sense_id.strip(),
                                      parent.strip(), gloss.strip()))
        return cls(entries)

    def senses_for(self, lemma: str) -> list[SenseEntry]:
        return self.by_lemma.get(lemma, [])

    def chain(self, sense_id: str) -> list[str]:
        """The sense itself plus its hypernyms, ordered up to the root."""
        out = []
        seen = set()
        cur = sense_id
        while cur:
            if cur in seen:
                raise ValidationError(f"cyclic hypernym chain at {cur!r}")
            if cur not in self.entries:
                raise ValidationError(f"unknown sense id {cur!r} in hypernym chain")
            seen.add(cur)
            out.append(cur)
            cur = self.entries[cur].parent
        return out

    def depth(self, sense_id: str) -> int:
        return len(self.chain(sense_id)) - 1


def gloss_words(text: str) -> set[str]:
    return set(_WORD.findall(text.lower()))


def disambiguate(concept, contexts, lexicon: Lexicon,
                 stop_words=()) -> str | None:
    """Pick a sense for the concept's head lemma by gloss overlap.

    The winning sense is the one whose gloss shares the most words with
    the concept's source paragraphs; ties go to the earlier sense in the
    lexicon (most-frequent first). Returns None when the lemma is absent
    from the lexicon.
    """
    senses = lexicon.senses_for(concept.head_lemma)
    if not senses:
        return None
    if len(senses) == 1:
        return senses[0].sense_id
    context_words = set()
    for par in contexts:
        context_words |= gloss_words(par.text)
    context_words -= set(stop_words)
    best = None
    best_overlap = -1
    for sense in senses:
        overlap = len((gloss_words(sense.gloss) - set(stop_words)) & context_words)
        if overlap > best_overlap:
            best = sense
            best_overlap = overlap
    return best.sense_id


@dataclass
class FormalContext:
    objects: list[str]
    attributes: list[str]
    incidence: list[list[bool]]  # objects x attributes

    def row_mask(self, obj_index: int) -> int:
        mask = 0
        for j, hit in enumerate(self.incidence[obj_index]):
            if hit:
                mask |= 1 << j
        return mask


@dataclass(frozen=True)
class FormalConcept:
    extent: tuple[str, ...]
    intent: tuple[str, ...]


def build_formal_context(senses: dict[str, str], lexicon: Lexicon) -> FormalContext:
    """Context with resolved concepts as objects and hypernym closures as attributes.

    ``senses`` maps concept uri to resolved sense id; the incidence holds
    when an attribute sense lies on the object's hypernym chain (the
    sense itself included).
    """
    objects = sorted(senses)
    closures = {uri: set(lexicon.chain(senses[uri])) for uri in objects}
    attributes = sorted(set().union(*closures.values())) if closures else []
    incidence = [[a in closures[uri] for a in attributes] for uri in objects]
    return FormalContext(objects=objects, attributes=attributes, incidence=incidence)


def fca_lattice(context: FormalContext) -> list[FormalConcept]:
    """Enumerate every formal concept of the context.

    Uses closure-skipping enumeration in lectic attribute order, then
    sorts by extent size and lexicographic extent. Exact and complete:
    the test suite checks it against brute-force subset enumeration.
    """
    m = len(context.attributes)
    rows = [context.row_mask(i) for i in range(len(context.objects))]
    full = (1 << m) - 1

    def close(intent: int) -> tuple[int, int]:
        extent = 0
        common = full
        for i, row in enumerate(rows):
            if row & intent == intent:
                extent |= 1 << i
                common &= row
        if extent == 0:
            common = full
        return extent, common

    concepts = []
    extent, intent = close(0)
    concepts.append((extent, intent))
    while intent != full:
        nxt = None
        for i in reversed(range(m)):
            bit = 1 << i
            if intent & bit:
                intent &= ~bit
            else:
                ext2, int2 = close(intent | bit)
                if (int2 & ~intent) & (bit - 1) == 0:
                    nxt = (ext2, int2)
                    break
        if nxt is None:
            break
        concepts.append(nxt)
        intent = nxt[1]

    def names(mask, pool):
        return tuple(sorted(pool[i] for i in range(len(pool)) if mask & (1 << i)))

    result = [
        FormalConcept(extent=names(e, context.objects),
                      intent=names(i, context.attributes))
        for e, i in concepts
    ]
    result.sort(key=lambda c: (len(c.extent), c.extent))
    return result


@dataclass
class TaxonomyTree:
    root_label: str  # sense id the cluster is rooted in
    nodes: list[str]  # concept uris
    edges: list[tuple[str, str]]  # (parent uri, child uri)


@dataclass
class TaxonomyForest:
    trees: list[TaxonomyTree]

    def tree_of(self, uri: str) -> TaxonomyTree | None:
        for tree in self.trees:
            if uri in tree.nodes:
                return tree
        return None

    def parent_of(self, uri: str) -> str | None:
        tree = self.tree_of(uri)
        if tree:
            for parent, child in tree.edges:
                if child == uri:
                    return parent
        return None

    def children_of(self, uri: str) -> list[str]:
        tree = self.tree_of(uri)
        if not tree:
            return []
        return sorted(child for parent, child in tree.edges if parent == uri)


def lattice_to_forest(lattice, context: FormalContext,
                      lexicon: Lexicon) -> TaxonomyForest:
    """Flatten the lattice into single-rooted concept trees.

    Objects cluster together when they transitively share attributes.
    Within a cluster each object hangs below its most specific proper
    generalization (by object-concept extents); tie-breaks are fixed:
    larger extent first, then lexicographic extent, then uri. The tree
    root label is the deepest attribute shared by every member, falling
    back to the most widely shared one.
    """
    objects = context.objects
    if not objects:
        return TaxonomyForest(trees=[])
    rows = {obj: context.row_mask(i) for i, obj in enumerate(objects)}

    def gamma_extent(obj: str) -> frozenset:
        intent = rows[obj]
        return frozenset(o for o in objects if rows[o] & intent == intent)

    gammas = {obj: gamma_extent(obj) for obj in objects}

    # Union-find over shared attributes.
    parent_uf = {obj: obj for obj in objects}

    def find(x):
        while parent_uf[x] != x:
            parent_uf[x] = parent_uf[parent_uf[x]]
            x = parent_uf[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent_uf[max(ra, rb)] = min(ra, rb)

    for i, a in enumerate(objects):
        for b in objects[i + 1 :]:
            if rows[a] & rows[b]:
                union(a, b)

    clusters: dict[str, list[str]] = {}
    for obj in objects:
        clusters.setdefault(find(obj), []).append(obj)

    attr_index = {a: j for j, a in enumerate(context.attributes)}
    trees = []
    for key in sorted(clusters):
        members = sorted(clusters[key])
        common = None
        for obj in members:
            common = rows[obj] if common is None else common & rows[obj]
        if common:
            shared = [a for a in context.attributes if common & (1 << attr_index[a])]
        else:
            # No attribute spans the whole cluster: fall back to the most
            # widely shared one.
            counts = {
                a: sum(1 for obj in members if rows[obj] & (1 << attr_index[a]))
                for a in context.attributes
            }
            top = max(counts.values())
            shared = [a for a, c in counts.items() if c == top]
        root_label = sorted(shared, key=lambda a: (-lexicon.depth(a), a))[0]

        edges = []
        for obj in members:
            candidates = [p for p in members if gammas[p] > gammas[obj]]
            minimal = [
                p
                for p in candidates
                if not any(gammas[q] < gammas[p] for q in candidates if q != p)
            ]
            if minimal:
                chosen = min(
                    minimal,
                    key=lambda p: (-len(gammas[p]), tuple(sorted(gammas[p])), p),
                )
                edges.append((chosen, obj))
        trees.append(TaxonomyTree(root_label=root_label, nodes=members,
                                  edges=sorted(edges)))
    return TaxonomyForest(trees=trees)


def forest_to_dict(forest: TaxonomyForest) -> dict:
    return {
        "trees": [
            {"root_label": t.root_label, "nodes": t.nodes,
             "edges": [list(e) for e in t.edges]}
            for t in forest.trees
        ]
    }


def forest_from_dict(data: dict) -> TaxonomyForest:
    return TaxonomyForest(
        trees=[
            TaxonomyTree(root_label=t["root_label"], nodes=list(t["nodes"]),
                         edges=[tuple(e) for e in t["edges"]])
            for t in data["trees"]
        ]
    )
