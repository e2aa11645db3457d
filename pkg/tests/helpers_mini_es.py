"""A hand-built miniature bundle for navigation-cost tests.

The graph is small enough to trace on paper: the entry page mentions the
inquiry concept; the inquiry card's "what" section mentions the hard
inquiry example (so that hop exists only where "what" sections are
visible), and its "how" section mentions the credit score. The example
answer is phrased so one open question retrieves it.
"""

from __future__ import annotations

from espace.bundle import Bundle
from espace.config import BuildConfig, profile_settings
from espace.corpus import Corpus, parse_conllu, Paragraph, Document
from espace.graph import ExplanatorySpace, InitialExplanation
from espace.kg import build_kg
from espace.overview import AnswerUnit, OverviewCard
from espace.pertinence import LexicalProvider
from espace.taxonomy import TaxonomyForest

_SENTENCES = """# newpar id = mini_p0
# sent_id = mini_p0_s0
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tsystem\tsystem\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tdenied\tdeny\tVERB\t_\t_\t0\troot\t_\t_
4\tthe\tthe\tDET\t_\t_\t5\tdet\t_\t_
5\tapplication\tapplication\tNOUN\t_\t_\t3\tobj\t_\tSpaceAfter=No
6\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_

# newpar id = mini_p1
# sent_id = mini_p1_s0
1\tAn\ta\tDET\t_\t_\t2\tdet\t_\t_
2\texample\texample\tNOUN\t_\t_\t9\tnsubj\t_\t_
3\tof\tof\tADP\t_\t_\t6\tcase\t_\t_
4\ta\ta\tDET\t_\t_\t6\tdet\t_\t_
5\thard\thard\tADJ\t_\t_\t6\tamod\t_\t_
6\tinquiry\tinquiry\tNOUN\t_\t_\t2\tnmod\t_\t_
7\tis\tbe\tAUX\t_\t_\t9\tcop\t_\t_
8\ta\ta\tDET\t_\t_\t9\tdet\t_\t_
9\tapplication\tapplication\tNOUN\t_\t_\t0\troot\t_\tSpaceAfter=No
10\t.\t.\tPUNCT\t_\t_\t9\tpunct\t_\t_

# sent_id = mini_p1_s1
1\tAn\ta\tDET\t_\t_\t2\tdet\t_\t_
2\tinquiry\tinquiry\tNOUN\t_\t_\t5\tnsubj\t_\t_
3\tis\tbe\tAUX\t_\t_\t5\tcop\t_\t_
4\ta\ta\tDET\t_\t_\t5\tdet\t_\t_
5\trequest\trequest\tNOUN\t_\t_\t0\troot\t_\tSpaceAfter=No
6\t.\t.\tPUNCT\t_\t_\t5\tpunct\t_\t_

# sent_id = mini_p1_s2
1\tInquiries\tinquiry\tNOUN\t_\t_\t3\tnsubj\t_\t_
2\tcan\tcan\tAUX\t_\t_\t3\taux\t_\t_
3\tlower\tlower\tVERB\t_\t_\t0\troot\t_\t_
4\tthe\tthe\tDET\t_\t_\t6\tdet\t_\t_
5\tcredit\tcredit\tNOUN\t_\t_\t6\tcompound\t_\t_
6\tscore\tscore\tNOUN\t_\t_\t3\tobj\t_\tSpaceAfter=No
7\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_
"""

PAR_TEXTS = {
    "mini_p0": "The system denied the application.",
    "mini_p1": "An example of a hard inquiry is a application. "
               "An inquiry is a request. Inquiries can lower the credit score.",
}


def _mini_corpus() -> Corpus:
    sentences = parse_conllu(_SENTENCES, doc_id="mini")
    paragraphs = []
    for order, (pid, text) in enumerate(PAR_TEXTS.items()):
        paragraphs.append(Paragraph(paragraph_id=pid, text=text,
                                    document_ref="mini", order=order))
    doc = Document(document_id="mini", title="mini", url=None,
                   paragraphs=paragraphs, sentences=sentences)
    return Corpus(documents=[doc])


def _card(uri, label, sections):
    return OverviewCard(uri=uri, label=label, abstract="", type_labels=[],
                        super_classes=[], sub_classes=[], sub_types=[],
                        taxonomy_parent=None, sections=sections)


def _unit(snippet, context="mini_p1"):
    return AnswerUnit(snippet=snippet, context=context, score=0.5,
                      assigned_archetype=None)


def build_mini_bundle(profile: str) -> Bundle:
    corpus = _mini_corpus()
    kg = build_kg(corpus)
    provider = LexicalProvider.from_corpus(corpus)
    settings = profile_settings(profile)
    visible = set(settings["archetypes"])

    sections_full = {
        "inquiry": {
            "what": {"tree": None, "units": [
                _unit("An example of a hard inquiry is application."),
                _unit("An inquiry is a request."),
            ]},
            "how": {"tree": None, "units": [
                _unit("Inquiries can lower the credit score."),
            ]},
        },
        "hard_inquiry": {
            "what": {"tree": None, "units": [
                _unit("An example of a hard inquiry is application."),
            ]},
        },
        "credit_score": {
            "how": {"tree": None, "units": [
                _unit("Inquiries can lower the credit score."),
            ]},
        },
    }

    cards = {}
    for uri, sections in sections_full.items():
        kept = {aid: sec for aid, sec in sections.items() if aid in visible}
        label = {"inquiry": "inquiry", "hard_inquiry": "hard inquiry",
                 "credit_score": "credit score"}[uri]
        cards[uri] = _card(uri, label, kept)

    # Edges ride on the mentioning section, so they vanish with it.
    edges = set()
    for uri, card in cards.items():
        for aid, sec in card.sections.items():
            for index, unit in enumerate(sec["units"]):
                for target, label in (("hard_inquiry", "hard inquiry"),
                                      ("credit_score", "credit score"),
                                      ("inquiry", "inquiry")):
                    if target != uri and label in unit.snippet.lower():
                        edges.add((uri, target, f"{aid}:{index}"))

    entry_links = [] if settings["static"] else [[26, 33, "inquiry"]]
    entry = InitialExplanation(
        document_id="mini",
        blocks=[{
            "paragraph_id": "mini_p0",
            "text": "The system denied it after inquiry checks.",
            "links": entry_links,
        }],
    )
    es = ExplanatorySpace(nodes=cards, edges=edges, entry=entry, profile=profile)
    config = BuildConfig(entry_document="mini", theta=0.1)
    documents = [{
        "id": "mini", "title": "mini", "url": None,
        "paragraphs": [
            {"paragraph_id": pid, "text": text, "order": i}
            for i, (pid, text) in enumerate(PAR_TEXTS.items())
        ],
    }]
    return Bundle(
        profile=profile,
        config=config,
        config_hash=config.config_hash(),
        corpus_meta={},
        kg=kg,
        forest=TaxonomyForest(trees=[]),
        senses={},
        cards=cards,
        es=es,
        provider=provider,
        documents=documents,
        stats={},
        bundle_hash="mini",
    )
