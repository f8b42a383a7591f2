"""Taxonomy closure and knowledge base lookups."""
import random

import pytest

import corpusgen
from conftest import write_jsonl
from ontovsm.errors import KnowledgeBaseError, TaxonomyError
from ontovsm.ontology import (
    ClassTaxonomy,
    load_knowledge_base,
    load_taxonomy,
    read_kb_file,
    read_taxonomy_file,
)


class TestTaxonomy:
    def test_fixture_size(self, taxonomy):
        # Three children under Location, two under Organization.
        assert len(taxonomy.classes) == 8
        assert taxonomy.edge_count == 5

    def test_contains(self, taxonomy):
        assert "City" in taxonomy
        assert "Galaxy" not in taxonomy

    def test_ancestors_single_step(self, taxonomy):
        assert taxonomy.ancestors("City") == {"City", "Location"}
        assert taxonomy.ancestors("InternationalOrganization") == {
            "InternationalOrganization",
            "Organization",
        }

    def test_ancestors_root_is_self_only(self, taxonomy):
        assert taxonomy.ancestors("Person") == {"Person"}

    def test_ancestors_unknown_class(self, taxonomy):
        with pytest.raises(KeyError):
            taxonomy.ancestors("Galaxy")

    def test_multi_parent_union(self):
        t = load_taxonomy(corpusgen.SYNTH_TAXONOMY_RECORDS)
        assert t.ancestors("PortCity") == {"PortCity", "City", "Place", "TransportHub"}

    def test_three_level_chain(self):
        t = load_taxonomy(corpusgen.SYNTH_TAXONOMY_RECORDS)
        assert t.ancestors("Politician") == {"Politician", "Person", "Agent"}

    def test_is_subclass(self, taxonomy):
        assert taxonomy.is_subclass("City", "Location")
        assert taxonomy.is_subclass("City", "City")
        assert not taxonomy.is_subclass("Location", "City")

    def test_is_subclass_unknown(self, taxonomy):
        with pytest.raises(KeyError):
            taxonomy.is_subclass("City", "Galaxy")

    def test_empty_taxonomy_valid(self):
        t = load_taxonomy([])
        assert len(t.classes) == 0 and t.edge_count == 0

    def test_duplicate_class_rejected(self):
        with pytest.raises(TaxonomyError, match="duplicate"):
            load_taxonomy([{"class": "A"}, {"class": "A"}])

    def test_undeclared_parent_rejected(self):
        with pytest.raises(TaxonomyError, match="undeclared"):
            load_taxonomy([{"class": "A", "parents": ["Missing"]}])

    def test_self_loop_is_cycle(self):
        with pytest.raises(TaxonomyError, match="cycle"):
            load_taxonomy([{"class": "City", "parents": ["City"]}])

    def test_longer_cycle(self):
        with pytest.raises(TaxonomyError, match="cycle"):
            load_taxonomy(
                [
                    {"class": "A", "parents": ["C"]},
                    {"class": "B", "parents": ["A"]},
                    {"class": "C", "parents": ["B"]},
                ]
            )

    def test_malformed_records(self):
        with pytest.raises(TaxonomyError):
            load_taxonomy([{"parents": []}])
        with pytest.raises(TaxonomyError):
            load_taxonomy([{"class": "A", "parents": "Location"}])

    def test_ancestors_monotone(self):
        # sub below sup implies ancestors(sup) is a subset of ancestors(sub).
        t = load_taxonomy(corpusgen.SYNTH_TAXONOMY_RECORDS)
        for sub in t.classes:
            for sup in t.ancestors(sub):
                assert t.ancestors(sup) <= t.ancestors(sub)

    def test_random_dags_close_without_error(self):
        # Parents drawn only from earlier classes, so the graph is acyclic.
        rng = random.Random(11)
        for _ in range(25):
            names = [f"c{i}" for i in range(rng.randint(1, 12))]
            records = []
            for i, name in enumerate(names):
                parents = [p for p in names[:i] if rng.random() < 0.3]
                records.append({"class": name, "parents": parents})
            t = load_taxonomy(records)
            for name in names:
                assert name in t.ancestors(name)
                for parent in t.parents[name]:
                    assert t.ancestors(parent) <= t.ancestors(name)


class TestKnowledgeBase:
    def test_size_and_membership(self, kb):
        assert len(kb) == 5
        assert "e1" in kb
        assert "e99" not in kb

    def test_resolve(self, kb):
        record = kb.resolve("e1")
        assert record.class_id == "City"
        assert len(record.names) == 3
        assert kb.resolve("e4").canonical_name == "United Nations"

    def test_resolve_unknown(self, kb):
        with pytest.raises(KeyError, match="e99"):
            kb.resolve("e99")

    def test_entities_by_name_ambiguous(self, kb):
        assert kb.entities_by_name("Saigon") == {"e1", "e2"}

    def test_entities_by_name_unique(self, kb):
        assert kb.entities_by_name("Ho Chi Minh City") == {"e1"}

    def test_entities_by_name_unknown(self, kb):
        assert kb.entities_by_name("Paris") == frozenset()

    def test_name_lookup_case_insensitive(self, kb):
        assert kb.entities_by_name("SAIGON") == {"e1", "e2"}
        assert kb.entities_by_name("united nations") == {"e4"}

    def test_name_index_inverts_names(self, kb):
        for identifier, record in kb.entities.items():
            for name in record.names:
                assert identifier in kb.entities_by_name(name)

    def test_duplicate_identifier_rejected(self, taxonomy):
        records = [
            {"id": "x", "class": "City", "names": ["A"]},
            {"id": "x", "class": "River", "names": ["B"]},
        ]
        with pytest.raises(KnowledgeBaseError, match="duplicate"):
            load_knowledge_base(records, taxonomy)

    def test_unknown_class_rejected(self, taxonomy):
        with pytest.raises(KnowledgeBaseError, match="Galaxy"):
            load_knowledge_base([{"id": "x", "class": "Galaxy", "names": ["A"]}], taxonomy)

    def test_empty_names_rejected(self, taxonomy):
        with pytest.raises(KnowledgeBaseError):
            load_knowledge_base([{"id": "x", "class": "City", "names": []}], taxonomy)

    def test_repeated_alias_within_record_rejected(self, taxonomy):
        records = [{"id": "x", "class": "City", "names": ["Hue", "HUE"]}]
        with pytest.raises(KnowledgeBaseError, match="repeats"):
            load_knowledge_base(records, taxonomy)

    def test_shared_alias_across_records_allowed(self, kb):
        # "Saigon" legitimately names both the city and the river.
        assert len(kb.entities_by_name("Saigon")) == 2

    def test_malformed_records(self, taxonomy):
        with pytest.raises(KnowledgeBaseError):
            load_knowledge_base([{"class": "City", "names": ["A"]}], taxonomy)
        with pytest.raises(KnowledgeBaseError):
            load_knowledge_base([{"id": "x", "class": "City", "names": "A"}], taxonomy)


class TestFileLoading:
    def test_round_trip(self, tmp_path):
        taxo_path = write_jsonl(tmp_path / "taxonomy.jsonl", corpusgen.TAXONOMY_RECORDS)
        kb_path = write_jsonl(tmp_path / "kb.jsonl", corpusgen.ENTITY_RECORDS)
        taxonomy = read_taxonomy_file(taxo_path)
        kb = read_kb_file(kb_path, taxonomy)
        assert len(taxonomy.classes) == 8
        assert len(kb) == 5

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "taxonomy.jsonl"
        path.write_text('{"class": "A"}\n\n{"class": "B"}\n')
        assert len(read_taxonomy_file(path).classes) == 2

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "taxonomy.jsonl"
        path.write_text('{"class": "A"}\nnot json\n')
        with pytest.raises(TaxonomyError, match="line 2"):
            read_taxonomy_file(path)

    def test_non_object_line_rejected(self, tmp_path):
        path = tmp_path / "kb.jsonl"
        path.write_text("[1, 2]\n")
        with pytest.raises(KnowledgeBaseError, match="object"):
            read_kb_file(path, ClassTaxonomy([], {}))
