"""Build pipeline and the serialized bundle artifact.

``build_bundle`` runs the whole chain: corpus loading, concept and triple
extraction, lexicon alignment and lattice-based taxonomy, archetype
clustering into overview cards, explanatory-space assembly and filtering.
The result is one canonical JSON file: corpus metadata, knowledge graph,
taxonomy forest, cards, the filtered graph with the annotated entry, the
frozen embedding provider, and the config hash. Builds are deterministic,
so rebuilding from identical inputs yields byte-identical bundles.

Profiles are applied at serialization time: a restricted profile keeps
the same surviving nodes but prunes card sections and the edges that
ride on invisible sections.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import graph as espace_graph
from .config import BuildConfig, profile_settings
from .corpus import Corpus, load_corpus
from .errors import BundleError, ValidationError
from .kg import KnowledgeGraph, build_kg, kg_from_dict, kg_to_dict
from .overview import (
    AnswerUnit,
    OverviewCard,
    SummaryTree,
    cluster_by_archetype,
    collect_candidates,
    compose_overview,
)
from .pertinence import LexicalProvider, RemoteProvider, ScoredSnippet, pertinence
from .taxonomy import (
    Lexicon,
    TaxonomyForest,
    build_formal_context,
    disambiguate,
    fca_lattice,
    forest_from_dict,
    forest_to_dict,
    lattice_to_forest,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class Bundle:
    profile: str
    config: BuildConfig
    config_hash: str
    corpus_meta: dict
    kg: KnowledgeGraph
    forest: TaxonomyForest
    senses: dict[str, str]
    cards: dict[str, OverviewCard]
    es: espace_graph.ExplanatorySpace
    provider: LexicalProvider
    documents: list[dict]  # raw second-level docs: {id, title, url, paragraphs}
    stats: dict = field(default_factory=dict)
    bundle_hash: str = ""

    def open_qa_enabled(self) -> bool:
        return bool(profile_settings(self.profile)["open_qa_enabled"])

    # -- query-time helpers ---------------------------------------------

    def snippet_pool(self) -> list[ScoredSnippet]:
        """Corpus-wide candidate snippets for open question answering."""
        pool = []
        seen = set()
        for triple in self.kg.triples:
            for text in (
                triple.realize(),
                self.kg.concepts[triple.subj].label,
                self.kg.concepts[triple.obj].label,
            ):
                if text and text not in seen:
                    seen.add(text)
                    pool.append(
                        ScoredSnippet(
                            snippet=text,
                            context=triple.source[1],
                            score=0.0,
                            source_triple=triple.triple_id,
                        )
                    )
        return pool

    def paragraph_texts(self) -> dict[str, str]:
        return {d["paragraph_id"]: d["text"] for doc in self.documents
                for d in doc["paragraphs"]}

    def answer_open_question(self, question: str, n: int | None = None,
                             theta: float | None = None) -> list[ScoredSnippet]:
        """Rank corpus-wide snippets against a free-form question."""
        if not question or not question.strip():
            raise ValidationError("empty question")
        n = n if n is not None else self.config.open_qa_n
        theta = theta if theta is not None else self.config.theta
        q_vec = self.provider.embed(question, kind="question")
        texts = self.paragraph_texts()
        scored = []
        for index, snip in enumerate(self.snippet_pool()):
            a_vec = self.provider.embed(
                snip.snippet, texts.get(snip.context, ""), kind="answer"
            )
            score = pertinence(q_vec, a_vec)
            if score >= theta:
                scored.append((index, score, snip))
        scored.sort(key=lambda item: (-item[1], item[0]))
        return [
            ScoredSnippet(snippet=s.snippet, context=s.context, score=score,
                          source_triple=s.source_triple)
            for _, score, s in scored[:n]
        ]

    def summary_node(self, node_id: str) -> SummaryTree | None:
        for card in self.es.nodes.values():
            for section in card.sections.values():
                tree = section["tree"]
                if tree is None:
                    continue
                stack = [tree]
                while stack:
                    node = stack.pop()
                    if node.node_id == node_id:
                        return node
                    stack.extend(node.children)
        return None

    def action_graph(self) -> dict[str, list[str]]:
        """Navigation adjacency: card-to-card hops available to a reader.

        Includes answer-unit mention edges and the taxonomic links shown
        on a card. The entry page's outgoing actions are its annotation
        links (``entry`` key).
        """
        adj: dict[str, list[str]] = {"entry": []}
        entry_targets = []
        for block in self.es.entry.blocks:
            for _, _, uri in block["links"]:
                if uri not in entry_targets:
                    entry_targets.append(uri)
        adj["entry"] = entry_targets
        for uri in sorted(self.es.nodes):
            card = self.es.nodes[uri]
            targets = []
            for a, b in sorted(self.es.edge_pairs()):
                if a == uri and b not in targets:
                    targets.append(b)
            for ref in (card.taxonomy_parent, *card.super_classes,
                        *card.sub_classes, *card.sub_types):
                if ref and ref in self.es.nodes and ref not in targets and ref != uri:
                    targets.append(ref)
            adj[uri] = targets
        return adj

    def annotate(self, text: str):
        return espace_graph.annotate(text, self.es, self.kg)


def _resolve_senses(kg: KnowledgeGraph, corpus: Corpus, lexicon: Lexicon,
                    stop_words) -> dict[str, str]:
    par_of_sentence = {}
    par_by_id = {}
    for doc in corpus.documents:
        for par in doc.paragraphs:
            par_by_id[par.paragraph_id] = par
        for sent in doc.sentences:
            par_of_sentence[sent.sentence_id] = sent.paragraph_ref
    senses = {}
    for uri in sorted(kg.concepts):
        concept = kg.concepts[uri]
        par_ids = []
        for sentence_id, _ in concept.source_mentions:
            pid = par_of_sentence.get(sentence_id)
            if pid and pid not in par_ids:
                par_ids.append(pid)
        contexts = [par_by_id[p] for p in par_ids if p in par_by_id]
        sense = disambiguate(concept, contexts, lexicon, stop_words=stop_words)
        if sense is not None:
            senses[uri] = sense
    return senses


def build_bundle(manifest_path, lexicon_path, freq_path,
                 profile: str = "yai4hu",
                 config: BuildConfig | None = None) -> Bundle:
    """Run the six-stage pipeline and return an in-memory bundle."""
    config = config or BuildConfig()
    settings = profile_settings(profile)

    corpus = load_corpus(manifest_path)
    if not corpus.documents:
        raise ValidationError("no documents in manifest")
    entry_id = config.entry_document or corpus.documents[0].document_id
    entry_doc = next(
        (d for d in corpus.documents if d.document_id == entry_id), None
    )
    if entry_doc is None:
        raise ValidationError(f"entry document {entry_id!r} not in corpus")

    kg = build_kg(
        corpus,
        nominal_pos=config.nominal_pos,
        syntagm_deprels=config.syntagm_deprels,
        stop_determiners=config.stop_determiners,
        stop_words=config.stop_words,
    )

    lexicon = Lexicon.load(lexicon_path)
    senses = _resolve_senses(kg, corpus, lexicon, config.stop_words)
    context = build_formal_context(senses, lexicon)
    lattice = fca_lattice(context)
    forest = lattice_to_forest(lattice, context, lexicon)

    if config.provider == "remote":
        if not config.provider_endpoint:
            raise ValidationError("provider 'remote' needs provider_endpoint")
        provider = RemoteProvider(config.provider_endpoint,
                                  config.provider_timeout)
    else:
        provider = LexicalProvider.from_corpus(corpus, dim=config.hash_dim)
    paragraph_texts = {p.paragraph_id: p.text for p in corpus.paragraphs()}
    archetypes = config.archetype_list()

    cards: dict[str, OverviewCard] = {}
    for uri in sorted(kg.concepts):
        candidates = collect_candidates(uri, kg)
        clusters = cluster_by_archetype(
            kg.concepts[uri].label,
            candidates,
            archetypes,
            provider,
            config.theta,
            theta_overrides=config.theta_per_archetype,
            paragraph_texts=paragraph_texts,
        )
        cards[uri] = compose_overview(
            uri, kg, forest, clusters, lexicon=lexicon,
            k=config.summary_k, budget=config.summary_budget,
        )

    es = espace_graph.assemble(kg, cards, entry_doc, profile=profile)
    centrality = espace_graph.betweenness(es)
    freq_lemmas = espace_graph.load_frequency_table(freq_path)
    filtered = espace_graph.filter_nodes(es, freq_lemmas, centrality, kg,
                                         top_f=config.top_f)
    filtered.profile = profile

    visible = set(settings["archetypes"])
    for card in filtered.nodes.values():
        card.sections = {
            aid: section for aid, section in card.sections.items() if aid in visible
        }
    filtered.edges = {
        (a, b, via) for a, b, via in filtered.edges
        if via.split(":")[0] in visible
    }

    documents = [
        {
            "id": doc.document_id,
            "title": doc.title,
            "url": doc.url,
            "paragraphs": [
                {"paragraph_id": p.paragraph_id, "text": p.text, "order": p.order}
                for p in doc.paragraphs
            ],
        }
        for doc in corpus.documents
    ]

    try:
        manifest_mtime = Path(manifest_path).stat().st_mtime
    except OSError:
        manifest_mtime = 0.0
    corpus_meta = dict(corpus.meta)
    corpus_meta["manifest_mtime"] = manifest_mtime
    corpus_meta["config_hash"] = config.config_hash()
    corpus_meta["entry_document"] = entry_doc.document_id

    stats = {
        "documents": len(corpus.documents),
        "paragraphs": sum(len(d.paragraphs) for d in corpus.documents),
        "sentences": sum(len(d.sentences) for d in corpus.documents),
        "concepts": len(kg.concepts),
        "triples": len(kg.triples),
        "subclass_edges": len(kg.subclass_edges),
        "formal_concepts": len(lattice),
        "taxonomy_trees": len(forest.trees),
        "cards": len(cards),
        "filtered_nodes": len(filtered.nodes),
        "edges": len(filtered.edges),
    }
    log.info("build stats: %s", stats)

    bundle = Bundle(
        profile=profile,
        config=config,
        config_hash=config.config_hash(),
        corpus_meta=corpus_meta,
        kg=kg,
        forest=forest,
        senses=senses,
        cards=filtered.nodes,
        es=filtered,
        provider=provider,
        documents=documents,
        stats=stats,
    )
    bundle.bundle_hash = hashlib.sha256(
        _canonical_payload(bundle).encode("utf-8")
    ).hexdigest()
    return bundle


# -- serialization -------------------------------------------------------


def _tree_to_dict(tree: SummaryTree | None) -> dict | None:
    if tree is None:
        return None
    return {
        "id": tree.node_id,
        "summary": tree.summary,
        "unit_index": tree.unit_index,
        "children": [_tree_to_dict(c) for c in tree.children],
    }


def _tree_from_dict(data: dict | None) -> SummaryTree | None:
    if data is None:
        return None
    return SummaryTree(
        node_id=data["id"],
        summary=data["summary"],
        unit_index=data["unit_index"],
        children=[_tree_from_dict(c) for c in data["children"]],
    )


def card_to_dict(card: OverviewCard) -> dict:
    return {
        "uri": card.uri,
        "label": card.label,
        "abstract": card.abstract,
        "type_labels": card.type_labels,
        "super_classes": card.super_classes,
        "sub_classes": card.sub_classes,
        "sub_types": card.sub_types,
        "taxonomy_parent": card.taxonomy_parent,
        "sections": {
            aid: {
                "tree": _tree_to_dict(section["tree"]),
                "units": [
                    {
                        "snippet": u.snippet,
                        "context": u.context,
                        "score": u.score,
                        "assigned_archetype": u.assigned_archetype,
                        "triple_id": u.triple_id,
                    }
                    for u in section["units"]
                ],
            }
            for aid, section in sorted(card.sections.items())
        },
    }


def card_from_dict(data: dict) -> OverviewCard:
    return OverviewCard(
        uri=data["uri"],
        label=data["label"],
        abstract=data["abstract"],
        type_labels=list(data["type_labels"]),
        super_classes=list(data["super_classes"]),
        sub_classes=list(data["sub_classes"]),
        sub_types=list(data["sub_types"]),
        taxonomy_parent=data["taxonomy_parent"],
        sections={
            aid: {
                "tree": _tree_from_dict(section["tree"]),
                "units": [
                    AnswerUnit(
                        snippet=u["snippet"],
                        context=u["context"],
                        score=u["score"],
                        assigned_archetype=u["assigned_archetype"],
                        triple_id=u["triple_id"],
                    )
                    for u in section["units"]
                ],
            }
            for aid, section in data["sections"].items()
        },
    )


def bundle_to_dict(bundle: Bundle) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "profile": bundle.profile,
        "config": bundle.config.to_dict(),
        "config_hash": bundle.config_hash,
        "corpus_meta": bundle.corpus_meta,
        "kg": kg_to_dict(bundle.kg),
        "forest": forest_to_dict(bundle.forest),
        "senses": {k: bundle.senses[k] for k in sorted(bundle.senses)},
        "cards": {uri: card_to_dict(bundle.cards[uri]) for uri in sorted(bundle.cards)},
        "entry": {
            "document_id": bundle.es.entry.document_id,
            "blocks": bundle.es.entry.blocks,
        },
        "edges": sorted(list(e) for e in bundle.es.edges),
        "provider": bundle.provider.to_dict(),
        "documents": bundle.documents,
        "stats": bundle.stats,
    }


def _canonical_payload(bundle: Bundle) -> str:
    return json.dumps(bundle_to_dict(bundle), sort_keys=True,
                      separators=(",", ":"), ensure_ascii=False)


def save_bundle(bundle: Bundle, path) -> str:
    """Write the bundle as canonical JSON; returns the content hash."""
    payload = _canonical_payload(bundle)
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    bundle.bundle_hash = digest
    wrapped = f'{{"bundle_hash":"{digest}","bundle":{payload}}}'
    Path(path).write_text(wrapped, encoding="utf-8")
    return digest


def load_bundle(path) -> Bundle:
    path = Path(path)
    if not path.exists():
        raise BundleError(f"bundle not found: {path}")
    try:
        wrapped = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleError(f"bundle {path} is not valid JSON: {exc}") from exc
    if "bundle" not in wrapped or "bundle_hash" not in wrapped:
        raise BundleError(f"bundle {path} is missing required envelope fields")
    data = wrapped["bundle"]
    payload = json.dumps(data, sort_keys=True, separators=(",", ":"),
                         ensure_ascii=False)
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    if digest != wrapped["bundle_hash"]:
        raise BundleError(f"bundle {path} hash mismatch: corrupt or edited file")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise BundleError(
            f"bundle schema {data.get('schema_version')} unsupported "
            f"(expected {SCHEMA_VERSION})"
        )

    from .overview import archetypes_from_config

    config = BuildConfig()
    config_data = dict(data["config"])
    config.archetypes = archetypes_from_config(config_data.pop("archetypes"))
    for key, value in config_data.items():
        if key in ("nominal_pos", "syntagm_deprels", "stop_determiners", "stop_words"):
            value = tuple(value)
        setattr(config, key, value)

    cards = {uri: card_from_dict(c) for uri, c in data["cards"].items()}
    entry = espace_graph.InitialExplanation(
        document_id=data["entry"]["document_id"],
        blocks=data["entry"]["blocks"],
    )
    es = espace_graph.ExplanatorySpace(
        nodes=cards,
        edges={tuple(e) for e in data["edges"]},
        entry=entry,
        profile=data["profile"],
    )
    bundle = Bundle(
        profile=data["profile"],
        config=config,
        config_hash=data["config_hash"],
        corpus_meta=data["corpus_meta"],
        kg=kg_from_dict(data["kg"]),
        forest=forest_from_dict(data["forest"]),
        senses=dict(data["senses"]),
        cards=cards,
        es=es,
        provider=(
            RemoteProvider.from_dict(data["provider"])
            if data["provider"].get("provider_id") == "remote"
            else LexicalProvider.from_dict(data["provider"])
        ),
        documents=data["documents"],
        stats=data["stats"],
        bundle_hash=wrapped["bundle_hash"],
    )
    if bundle.config.config_hash() != bundle.config_hash:
        raise BundleError(
            f"bundle {path}: config hash mismatch "
            f"({bundle.config.config_hash()} != {bundle.config_hash})"
        )
    return bundle
