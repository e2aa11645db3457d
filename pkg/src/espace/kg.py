"""Concept and relation extraction from dependency-parsed sentences.

Concepts are syntagms: a nominal head plus the contiguous run of its
determiner / adjectival / compound / nominal-modifier dependents. Each
head also contributes its noun-compound core and the bare head itself as
candidates, so "the customer opened a new bank account" yields, among
others, "the customer", "customer", "bank account", "bank".

Relations are template triples: for a pair of syntagms in one sentence,
the remaining sentence tokens (minus each endpoint's own noun-phrase
extension) become a natural-language predicate template with ``{subj}``
and ``{obj}`` placeholders. Substituting the endpoint texts back into the
template reproduces the supporting tokens verbatim, which is the
round-trip property the whole downstream question-answering relies on.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .corpus import Corpus, Sentence, detokenize
from .errors import ValidationError

log = logging.getLogger(__name__)

NOMINAL_POS = ("NOUN", "PROPN")
SYNTAGM_DEPRELS = ("det", "amod", "compound", "flat", "nmod", "nummod")
CORE_DEPRELS = ("compound", "flat")
STOP_DETERMINERS = ("a", "an", "the", "this", "that", "these", "those")
STOP_WORDS = (
    "a", "an", "the", "this", "that", "these", "those",
    "of", "for", "to", "in", "on", "at", "by", "with", "from", "and", "or",
)
SUBJECT_DEPRELS = ("nsubj", "nsubj:pass", "csubj", "csubj:pass")

_URI_OK = re.compile(r"[^a-z0-9-]+")


@dataclass(frozen=True)
class Syntagm:
    """A candidate concept mention: a token range within one sentence."""

    start: int
    end: int  # inclusive, 1-based
    head: int
    label: str
    lemma_seq: tuple[str, ...]

    def overlaps(self, other: "Syntagm") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass
class Concept:
    uri: str
    label: str
    lemma_seq: tuple[str, ...]
    head_lemma: str
    source_mentions: list[tuple[str, tuple[int, int]]] = field(default_factory=list)


@dataclass
class TemplateTriple:
    triple_id: str
    subj: str
    obj: str
    template: str
    subj_text: str
    obj_text: str
    source: tuple[str, str]  # (sentence_id, paragraph_id)
    token_support: tuple[int, ...]

    def realize(self) -> str:
        return self.template.replace("{subj}", self.subj_text).replace(
            "{obj}", self.obj_text
        )


@dataclass
class KnowledgeGraph:
    concepts: dict[str, Concept] = field(default_factory=dict)
    triples: list[TemplateTriple] = field(default_factory=list)
    subclass_edges: set[tuple[str, str]] = field(default_factory=set)
    provenance: dict[str, list[dict]] = field(default_factory=dict)

    def subclass_descendants(self, uri: str) -> set[str]:
        """All concepts reachable downward through child-of edges."""
        parents_of: dict[str, set[str]] = {}
        for child, parent in self.subclass_edges:
            parents_of.setdefault(parent, set()).add(child)
        out: set[str] = set()
        stack = [uri]
        while stack:
            cur = stack.pop()
            for child in parents_of.get(cur, ()):
                if child not in out:
                    out.add(child)
                    stack.append(child)
        return out

    def superclasses(self, uri: str) -> list[str]:
        return sorted(p for c, p in self.subclass_edges if c == uri)

    def subclasses(self, uri: str) -> list[str]:
        return sorted(c for c, p in self.subclass_edges if p == uri)


def assign_uri(label_lemmas, stop_determiners=STOP_DETERMINERS) -> str:
    """Build a concept URI from lemmas: lowercase, stop-determiners out, joined by underscores."""
    parts = []
    for lemma in label_lemmas:
        low = _URI_OK.sub("", lemma.lower())
        if not low or low in stop_determiners:
            continue
        parts.append(low)
    if not parts:
        raise ValidationError(f"no usable lemmas in {list(label_lemmas)!r}")
    return "_".join(parts)


def _subtree(sentence: Sentence, index: int) -> set[int]:
    out = {index}
    stack = [index]
    while stack:
        cur = stack.pop()
        for child in sentence.children(cur):
            if child.index not in out:
                out.add(child.index)
                stack.append(child.index)
    return out


def _contiguous_range(members: set[int], head: int) -> tuple[int, int]:
    start = end = head
    while start - 1 in members:
        start -= 1
    while end + 1 in members:
        end += 1
    return start, end


def _span_for(sentence: Sentence, head: int, deprels) -> tuple[int, int]:
    members = {head}
    for child in sentence.children(head):
        if child.deprel.split(":")[0] in deprels or child.deprel in deprels:
            members |= _subtree(sentence, child.index)
    return _contiguous_range(members, head)


def _make_syntagm(sentence: Sentence, span: tuple[int, int], head: int,
                  stop_determiners) -> Syntagm:
    tokens = sentence.tokens[span[0] - 1 : span[1]]
    lemmas = tuple(
        t.lemma.lower() for t in tokens if t.lemma.lower() not in stop_determiners
    )
    return Syntagm(
        start=span[0],
        end=span[1],
        head=head,
        label=detokenize(tokens),
        lemma_seq=lemmas,
    )


def extract_syntagms(sentence: Sentence, nominal_pos=NOMINAL_POS,
                     syntagm_deprels=SYNTAGM_DEPRELS,
                     stop_determiners=STOP_DETERMINERS) -> list[Syntagm]:
    """Collect concept candidates around every nominal head.

    Per head: the maximal contiguous modifier span, the noun-compound
    core, and the bare head. Deduplicated by token range, ordered by
    start position then span length (longest first).
    """
    spans: dict[tuple[int, int], Syntagm] = {}
    for tok in sentence.tokens:
        if tok.pos not in nominal_pos:
            continue
        for deprels in (syntagm_deprels, CORE_DEPRELS, ()):
            span = _span_for(sentence, tok.index, deprels)
            if span not in spans:
                syn = _make_syntagm(sentence, span, tok.index, stop_determiners)
                if syn.lemma_seq:
                    spans[span] = syn
    return sorted(spans.values(), key=lambda s: (s.start, -(s.end - s.start)))


def _path_between(sentence: Sentence, a: int, b: int) -> list[int]:
    """Token indices on the dependency path from a to b, inclusive."""

    def ancestors(i):
        chain = [i]
        cur = i
        while sentence.token(cur).head != 0:
            cur = sentence.token(cur).head
            chain.append(cur)
        return chain

    up_a = ancestors(a)
    up_b = ancestors(b)
    set_b = {i: pos for pos, i in enumerate(up_b)}
    for pos_a, node in enumerate(up_a):
        if node in set_b:
            return up_a[: pos_a + 1] + list(reversed(up_b[: set_b[node]]))
    raise ValidationError(f"tokens {a} and {b} are not connected")


def _side_deprel(sentence: Sentence, endpoint: int, path: list[int]) -> str:
    """Deprel of the path node just below the path's topmost token, on endpoint's side."""
    top = min(path, key=lambda i: _depth(sentence, i))
    if endpoint == top:
        return sentence.token(endpoint).deprel
    idx = path.index(endpoint)
    step = 1 if path.index(top) > idx else -1
    cur = idx
    while path[cur] != top:
        nxt = cur + step
        if path[nxt] == top:
            return sentence.token(path[cur]).deprel
        cur = nxt
    return sentence.token(endpoint).deprel


def _depth(sentence: Sentence, index: int) -> int:
    d = 0
    cur = index
    while sentence.token(cur).head != 0:
        cur = sentence.token(cur).head
        d += 1
    return d


def _join_units(units) -> str:
    """units: iterable of (text, space_after). Joined like detokenize."""
    parts = []
    units = list(units)
    for i, (text, space_after) in enumerate(units):
        parts.append(text)
        if space_after and i + 1 < len(units):
            parts.append(" ")
    return "".join(parts).strip()


def build_template_triples(sentence: Sentence, syntagms,
                           nominal_pos=NOMINAL_POS,
                           syntagm_deprels=SYNTAGM_DEPRELS) -> list[dict]:
    """Emit template-triple records for connected syntagm pairs.

    A pair qualifies when the spans are disjoint, no intermediate token
    on the dependency path between the heads is itself the head of
    another candidate syntagm, and the connection is clausal: either the
    path crosses an intermediate token, or the heads are directly linked
    by a clause-level relation (copular subjects), never by a
    noun-phrase-internal one (compound, nmod, ...). The emitted template
    must keep at least one word of connecting text. The subject is the
    endpoint on the subject side of the governing predicate, falling
    back to sentence order.

    Returned dicts carry subj/obj syntagms, the template, and supporting
    token indices; URI assignment and deduplication happen in build_kg.
    """
    heads = {s.head for s in syntagms}
    maximal: dict[int, tuple[int, int]] = {}
    for s in syntagms:
        if s.head not in maximal:
            maximal[s.head] = (s.start, s.end)
        else:
            lo, hi = maximal[s.head]
            maximal[s.head] = (min(lo, s.start), max(hi, s.end))

    out = []
    for i, a in enumerate(syntagms):
        for b in syntagms[i + 1 :]:
            if a.head == b.head or a.overlaps(b):
                if a.overlaps(b) and a.head != b.head:
                    log.debug(
                        "skipping overlapping syntagms %r / %r in %s",
                        a.label, b.label, sentence.sentence_id,
                    )
                continue
            path = _path_between(sentence, a.head, b.head)
            intermediates = [t for t in path if t not in (a.head, b.head)]
            if any(t in heads for t in intermediates):
                continue
            if not intermediates:
                # Direct head-to-head link: allow clause-level relations
                # (e.g. the subject of a copular predicate), never
                # phrase-internal attachment.
                child = a.head if sentence.token(a.head).head == b.head else b.head
                deprel = sentence.token(child).deprel
                if deprel.split(":")[0] in syntagm_deprels or deprel in syntagm_deprels:
                    continue

            dep_a = _side_deprel(sentence, a.head, path).split(":")[0]
            dep_b = _side_deprel(sentence, b.head, path).split(":")[0]
            full_a = _side_deprel(sentence, a.head, path)
            full_b = _side_deprel(sentence, b.head, path)
            if dep_a in SUBJECT_DEPRELS or full_a in SUBJECT_DEPRELS:
                subj, obj = a, b
            elif dep_b in SUBJECT_DEPRELS or full_b in SUBJECT_DEPRELS:
                subj, obj = b, a
            else:
                subj, obj = (a, b) if a.start < b.start else (b, a)

            excluded = set()
            for syn in (a, b):
                lo, hi = maximal[syn.head]
                excluded |= set(range(lo, hi + 1))

            units = []
            support = []
            idx = 1
            n = len(sentence.tokens)
            while idx <= n:
                if idx == subj.start:
                    last = sentence.token(subj.end)
                    units.append(("{subj}", last.space_after))
                    support.extend(range(subj.start, subj.end + 1))
                    idx = subj.end + 1
                elif idx == obj.start:
                    last = sentence.token(obj.end)
                    units.append(("{obj}", last.space_after))
                    support.extend(range(obj.start, obj.end + 1))
                    idx = obj.end + 1
                elif idx in excluded:
                    idx += 1
                else:
                    tok = sentence.token(idx)
                    units.append((tok.surface, tok.space_after))
                    support.append(idx)
                    idx += 1
            template = _join_units(units)
            assert template.count("{subj}") == 1 and template.count("{obj}") == 1
            connecting = template.replace("{subj}", "").replace("{obj}", "")
            if not re.search(r"[A-Za-z0-9]", connecting):
                continue
            out.append(
                {
                    "subj": subj,
                    "obj": obj,
                    "template": template,
                    "token_support": tuple(sorted(support)),
                }
            )
    return out


def support_text(sentence: Sentence, token_support) -> str:
    """Surfaces of the supporting tokens in sentence order, detokenized."""
    toks = [sentence.token(i) for i in sorted(token_support)]
    return _join_units((t.surface, t.space_after) for t in toks)


def add_subclass_edges(kg: KnowledgeGraph, stop_words=STOP_WORDS) -> KnowledgeGraph:
    """Link every composite concept below each single lemma it contains.

    Missing single-lemma concepts are created on the fly. Edges always go
    from a longer lemma sequence to a length-one one, which keeps the
    relation acyclic by construction.
    """
    for uri in sorted(kg.concepts):
        concept = kg.concepts[uri]
        if len(concept.lemma_seq) < 2:
            continue
        for lemma in concept.lemma_seq:
            low = _URI_OK.sub("", lemma.lower())
            if not low or low in stop_words:
                continue
            if low not in kg.concepts:
                kg.concepts[low] = Concept(
                    uri=low, label=lemma, lemma_seq=(lemma,), head_lemma=lemma
                )
            kg.subclass_edges.add((uri, low))
    return kg


def validate_kg(kg: KnowledgeGraph) -> None:
    for triple in kg.triples:
        for uri in (triple.subj, triple.obj):
            if uri not in kg.concepts:
                raise ValidationError(f"triple {triple.triple_id}: unknown uri {uri}")
    for child, parent in kg.subclass_edges:
        if child not in kg.concepts or parent not in kg.concepts:
            raise ValidationError(f"subclass edge ({child}, {parent}): unknown uri")
        if len(kg.concepts[child].lemma_seq) <= len(kg.concepts[parent].lemma_seq):
            raise ValidationError(
                f"subclass edge ({child}, {parent}) does not shorten the lemma sequence"
            )


def build_kg(corpus: Corpus, nominal_pos=NOMINAL_POS,
             syntagm_deprels=SYNTAGM_DEPRELS,
             stop_determiners=STOP_DETERMINERS,
             stop_words=STOP_WORDS) -> KnowledgeGraph:
    """Run extraction over the whole corpus and merge into one graph.

    Deterministic: documents in manifest order, sentences in file order,
    pairs in span order. Concepts merge by URI (first label wins), equal
    (subject, template, object) triples merge with one provenance record
    per occurrence.
    """
    kg = KnowledgeGraph()
    triple_index: dict[tuple[str, str, str], TemplateTriple] = {}
    for doc in corpus.documents:
        for sentence in doc.sentences:
            syntagms = extract_syntagms(
                sentence, nominal_pos, syntagm_deprels, stop_determiners
            )
            uris: dict[Syntagm, str] = {}
            for syn in syntagms:
                try:
                    uri = assign_uri(syn.lemma_seq, stop_determiners)
                except ValidationError:
                    continue
                uris[syn] = uri
                concept = kg.concepts.get(uri)
                if concept is None:
                    head_lemma = sentence.token(syn.head).lemma.lower()
                    kg.concepts[uri] = concept = Concept(
                        uri=uri,
                        label=syn.label,
                        lemma_seq=syn.lemma_seq,
                        head_lemma=head_lemma,
                    )
                concept.source_mentions.append(
                    (sentence.sentence_id, (syn.start, syn.end))
                )
            usable = [s for s in syntagms if s in uris]
            for rec in build_template_triples(sentence, usable, nominal_pos,
                                              syntagm_deprels):
                subj_uri = uris[rec["subj"]]
                obj_uri = uris[rec["obj"]]
                key = (subj_uri, rec["template"], obj_uri)
                triple = triple_index.get(key)
                if triple is None:
                    triple = TemplateTriple(
                        triple_id=f"t{len(kg.triples)}",
                        subj=subj_uri,
                        obj=obj_uri,
                        template=rec["template"],
                        subj_text=rec["subj"].label,
                        obj_text=rec["obj"].label,
                        source=(sentence.sentence_id, sentence.paragraph_ref),
                        token_support=rec["token_support"],
                    )
                    triple_index[key] = triple
                    kg.triples.append(triple)
                    kg.provenance[triple.triple_id] = []
                kg.provenance[triple.triple_id].append(
                    {
                        "document": doc.document_id,
                        "paragraph": sentence.paragraph_ref,
                        "sentence": sentence.sentence_id,
                        "token_support": list(rec["token_support"]),
                    }
                )
    add_subclass_edges(kg, stop_words)
    validate_kg(kg)
    return kg


def kg_to_dict(kg: KnowledgeGraph) -> dict:
    """Stable JSON form: sorted concepts and edges, triples in id order."""
    return {
        "concepts": [
            {
                "uri": c.uri,
                "label": c.label,
                "lemma_seq": list(c.lemma_seq),
                "head_lemma": c.head_lemma,
                "source_mentions": [
                    {"sentence": sid, "span": list(span)}
                    for sid, span in c.source_mentions
                ],
            }
            for c in (kg.concepts[u] for u in sorted(kg.concepts))
        ],
        "triples": [
            {
                "id": t.triple_id,
                "subj": t.subj,
                "obj": t.obj,
                "template": t.template,
                "subj_text": t.subj_text,
                "obj_text": t.obj_text,
                "source": list(t.source),
                "token_support": list(t.token_support),
            }
            for t in kg.triples
        ],
        "subclass_edges": [list(e) for e in sorted(kg.subclass_edges)],
        "provenance": {tid: kg.provenance[tid] for tid in sorted(kg.provenance)},
    }


def kg_from_dict(data: dict) -> KnowledgeGraph:
    kg = KnowledgeGraph()
    for c in data["concepts"]:
        kg.concepts[c["uri"]] = Concept(
            uri=c["uri"],
            label=c["label"],
            lemma_seq=tuple(c["lemma_seq"]),
            head_lemma=c["head_lemma"],
            source_mentions=[
                (m["sentence"], tuple(m["span"])) for m in c["source_mentions"]
            ],
        )
    for t in data["triples"]:
        kg.triples.append(
            TemplateTriple(
                triple_id=t["id"],
                subj=t["subj"],
                obj=t["obj"],
                template=t["template"],
                subj_text=t["subj_text"],
                obj_text=t["obj_text"],
                source=tuple(t["source"]),
                token_support=tuple(t["token_support"]),
            )
        )
    kg.subclass_edges = {tuple(e) for e in data["subclass_edges"]}
    kg.provenance = dict(data["provenance"])
    return kg
