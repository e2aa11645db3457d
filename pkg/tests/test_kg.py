import pytest

from espace.corpus import parse_conllu
from espace.errors import ValidationError
from espace.kg import (
    add_subclass_edges,
    assign_uri,
    build_kg,
    build_template_triples,
    extract_syntagms,
    kg_from_dict,
    kg_to_dict,
    support_text,
    validate_kg,
    Concept,
    KnowledgeGraph,
)

CUSTOMER = """1\tthe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tcustomer\tcustomer\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\topened\topen\tVERB\t_\t_\t0\troot\t_\t_
4\ta\ta\tDET\t_\t_\t7\tdet\t_\t_
5\tnew\tnew\tADJ\t_\t_\t7\tamod\t_\t_
6\tbank\tbank\tNOUN\t_\t_\t7\tcompound\t_\t_
7\taccount\taccount\tNOUN\t_\t_\t3\tobj\t_\t_
"""

VERB_ONLY = "1\tRun\trun\tVERB\t_\t_\t0\troot\t_\tSpaceAfter=No\n2\t!\t!\tPUNCT\t_\t_\t1\tpunct\t_\t_\n"


def _sentence(block):
    return parse_conllu(block)[0]


class TestAssignUri:
    def test_drops_stop_determiners(self):
        assert assign_uri(["the", "applicable", "law"]) == "applicable_law"

    def test_compound(self):
        assert assign_uri(["bank", "account"]) == "bank_account"

    def test_lowercases(self):
        assert assign_uri(["Member", "State"]) == "member_state"

    def test_pure_determiner_fails(self):
        with pytest.raises(ValidationError):
            assign_uri(["the"])


class TestExtractSyntagms:
    def test_customer_sentence_candidates(self):
        labels = {s.label for s in extract_syntagms(_sentence(CUSTOMER))}
        assert {"customer", "bank", "bank account"} <= labels

    def test_verb_only_sentence_has_no_candidates(self):
        assert extract_syntagms(_sentence(VERB_ONLY)) == []

    def test_fixture_spans_keep_determiners_in_label(self, credit_corpus):
        target = None
        for sent in credit_corpus.sentences():
            if sent.text().startswith("Surprisingly"):
                target = sent
        assert target is not None
        labels = {s.label for s in extract_syntagms(target)}
        assert "the applicable law" in labels
        assert "that Member State" in labels

    def test_lemma_seq_drops_determiners(self):
        syntagms = extract_syntagms(_sentence(CUSTOMER))
        by_label = {s.label: s for s in syntagms}
        assert by_label["the customer"].lemma_seq == ("customer",)
        assert by_label["a new bank account"].lemma_seq == ("new", "bank", "account")


class TestTemplateTriples:
    def test_customer_triple_present(self):
        sent = _sentence(CUSTOMER)
        recs = build_template_triples(sent, extract_syntagms(sent))
        templates = {
            (r["subj"].lemma_seq, r["template"], r["obj"].lemma_seq) for r in recs
        }
        assert (("customer",), "{subj} opened {obj}", ("bank", "account")) in templates

    def test_single_syntagm_yields_nothing(self):
        block = "1\tBirds\tbird\tNOUN\t_\t_\t2\tnsubj\t_\t_\n2\tsing\tsing\tVERB\t_\t_\t0\troot\t_\t_\n"
        sent = _sentence(block)
        syntagms = extract_syntagms(sent)
        assert build_template_triples(sent, syntagms) == []

    def test_every_template_has_one_subj_one_obj(self, credit_corpus):
        for sent in credit_corpus.sentences():
            for rec in build_template_triples(sent, extract_syntagms(sent)):
                assert rec["template"].count("{subj}") == 1
                assert rec["template"].count("{obj}") == 1

    def test_compound_internal_pairs_are_skipped(self):
        sent = _sentence(CUSTOMER)
        recs = build_template_triples(sent, extract_syntagms(sent))
        for rec in recs:
            pair = {rec["subj"].lemma_seq, rec["obj"].lemma_seq}
            assert not (pair == {("bank",), ("account",)})


class TestRoundTrip:
    def test_full_fixture_realization(self, credit_corpus, heart_corpus):
        for corpus in (credit_corpus, heart_corpus):
            kg = build_kg(corpus)
            sentences = {s.sentence_id: s for s in corpus.sentences()}
            assert kg.triples
            for triple in kg.triples:
                sent = sentences[triple.source[0]]
                assert triple.realize() == support_text(sent, triple.token_support)

    def test_paper_example_template_verbatim(self, credit_corpus):
        kg = build_kg(credit_corpus)
        wanted = (
            "Surprisingly {subj} is considered to be clearly more related to "
            "{obj} rather than to something else."
        )
        hits = [
            t for t in kg.triples
            if t.template == wanted
            and t.subj_text == "the applicable law"
            and t.obj_text == "that Member State"
        ]
        assert len(hits) == 1
        assert hits[0].subj == "applicable_law"
        assert hits[0].obj == "member_state"

    def test_provenance_contains_support_indices(self, credit_corpus):
        kg = build_kg(credit_corpus)
        sentences = {s.sentence_id: s for s in corpus_sentences(credit_corpus)}
        for triple in kg.triples:
            sent = sentences[triple.source[0]]
            n = len(sent.tokens)
            for record in kg.provenance[triple.triple_id]:
                assert all(1 <= i <= n for i in record["token_support"])


def corpus_sentences(corpus):
    return list(corpus.sentences())


class TestSubclassEdges:
    def test_bank_account_links_to_parts(self):
        kg = KnowledgeGraph()
        kg.concepts["bank_account"] = Concept(
            "bank_account", "bank account", ("bank", "account"), "account"
        )
        add_subclass_edges(kg)
        assert ("bank_account", "bank") in kg.subclass_edges
        assert ("bank_account", "account") in kg.subclass_edges
        assert "bank" in kg.concepts and "account" in kg.concepts

    def test_single_lemma_graph_unchanged(self):
        kg = KnowledgeGraph()
        kg.concepts["bank"] = Concept("bank", "bank", ("bank",), "bank")
        add_subclass_edges(kg)
        assert kg.subclass_edges == set()

    def test_stop_words_dropped_in_heloc_composite(self, credit_corpus):
        kg = build_kg(credit_corpus)
        children = {
            parent for child, parent in kg.subclass_edges
            if child == "home_equity_line_of_credit"
        }
        assert children == {"home", "equity", "line", "credit"}

    def test_edges_are_acyclic_by_length(self, credit_corpus):
        kg = build_kg(credit_corpus)
        validate_kg(kg)
        for child, parent in kg.subclass_edges:
            assert len(kg.concepts[child].lemma_seq) > len(
                kg.concepts[parent].lemma_seq
            )


class TestBuildKg:
    def test_empty_corpus_empty_graph(self):
        from espace.corpus import Corpus

        kg = build_kg(Corpus(documents=[]))
        assert not kg.concepts and not kg.triples

    def test_concepts_devduplicated_by_uri(self, credit_corpus):
        kg = build_kg(credit_corpus)
        assert len(kg.concepts) == len({c.uri for c in kg.concepts.values()})

    def test_duplicate_sentences_merge_with_two_provenance_records(self, tmp_path):
        import json

        text = "The customer opened a new bank account.\n"
        conllu = (
            "# newpar id = DOC_p0\n"
            + CUSTOMER.replace("account\taccount\tNOUN\t_\t_\t3\tobj\t_\t_",
                                "account\taccount\tNOUN\t_\t_\t3\tobj\t_\tSpaceAfter=No")
            + "8\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_\n"
        )
        docs = []
        for doc_id in ("one", "two"):
            (tmp_path / f"{doc_id}.txt").write_text(text)
            (tmp_path / f"{doc_id}.conllu").write_text(
                conllu.replace("DOC", doc_id).replace("The", "The")
            )
            docs.append({"id": doc_id, "title": doc_id,
                         "text_file": f"{doc_id}.txt",
                         "conllu_file": f"{doc_id}.conllu"})
        # titles differ, contents identical; lowercase both text variants
        (tmp_path / "one.txt").write_text("the customer opened a new bank account.\n")
        (tmp_path / "two.txt").write_text("the customer opened a new bank account.\n")
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({"documents": docs}))
        from espace.corpus import load_corpus

        kg = build_kg(load_corpus(manifest))
        merged = [t for t in kg.triples if t.template == "{subj} opened {obj}."
                  and t.obj == "bank_account"]
        assert len(merged) == 1
        provenance = kg.provenance[merged[0].triple_id]
        assert {r["document"] for r in provenance} == {"one", "two"}

    def test_build_is_deterministic(self, credit_corpus):
        a = kg_to_dict(build_kg(credit_corpus))
        b = kg_to_dict(build_kg(credit_corpus))
        assert a == b

    def test_serialization_round_trip(self, credit_corpus):
        kg = build_kg(credit_corpus)
        assert kg_to_dict(kg_from_dict(kg_to_dict(kg))) == kg_to_dict(kg)
