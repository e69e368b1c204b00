import json

import numpy as np
import pytest

from kgtrace import kg
from kgtrace.kg import (
    EntityCategory, RelationCategory, KgSchema, SchemaError,
    load_schema, schema_from_dict, build_kg, validate_kg, kg_features,
    make_bundled_schema, load_bundled_kg,
)

MINI = {
    "entities": [
        {"name": "msgflag", "category": "data_field_type"},
        {"name": "1-Registration", "category": "procedure_type"},
        {"name": "regis request cnt", "category": "statistical_indicator"},
        {"name": "regis success rate", "category": "algorithm_indicator"},
    ],
    "relations": [
        {"head": "1-Registration", "tail": "msgflag",
         "category": "procedure_relation"},
        {"head": "regis request cnt", "tail": "msgflag",
         "category": "condition_relation"},
        {"head": "regis request cnt", "tail": "regis success rate",
         "category": "algorithm_relation"},
    ],
}


def write_schema(tmp_path, doc):
    path = tmp_path / "schema.json"
    path.write_text(json.dumps(doc))
    return path


class TestLoadSchema:
    def test_minimal_schema(self, tmp_path):
        schema = load_schema(write_schema(tmp_path, MINI))
        counts = schema.category_counts()
        assert [counts[c] for c in EntityCategory] == [1, 1, 1, 1]

    def test_bundled_schema_counts(self):
        schema = load_schema(kg.bundled_schema_path())
        counts = schema.category_counts()
        assert counts[EntityCategory.DATA_FIELD_TYPE] == 132
        assert counts[EntityCategory.PROCEDURE_TYPE] == 40
        assert counts[EntityCategory.STATISTICAL_INDICATOR] == 73
        assert counts[EntityCategory.ALGORITHM_INDICATOR] == 2
        assert len(schema.entities) == 247

    def test_endpoint_typing_enforced(self, tmp_path):
        doc = json.loads(json.dumps(MINI))
        doc["relations"].append({
            "head": "regis success rate", "tail": "msgflag",
            "category": "algorithm_relation",
        })
        with pytest.raises(SchemaError, match="endpoint-typing"):
            load_schema(write_schema(tmp_path, doc))

    def test_unknown_category(self, tmp_path):
        doc = {"entities": [{"name": "x", "category": "bogus"}], "relations": []}
        with pytest.raises(SchemaError, match="unknown category"):
            load_schema(write_schema(tmp_path, doc))

    def test_dangling_endpoint(self, tmp_path):
        doc = {"entities": [{"name": "x", "category": "data_field_type"}],
               "relations": [{"head": "x", "tail": "ghost",
                              "category": "procedure_relation"}]}
        with pytest.raises(SchemaError, match="not an entity"):
            load_schema(write_schema(tmp_path, doc))

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"entities": [\n  {"name": }\n]}')
        with pytest.raises(SchemaError, match=":2:"):
            load_schema(path)

    def test_duplicate_entity_names(self, tmp_path):
        doc = {"entities": [{"name": "x", "category": "data_field_type"},
                            {"name": "x", "category": "procedure_type"}],
               "relations": []}
        with pytest.raises(SchemaError, match="duplicate"):
            load_schema(write_schema(tmp_path, doc))


class TestBuildKg:
    def test_bundled_is_247_nodes(self):
        knowledge = load_bundled_kg()
        assert knowledge.graph.n == 247
        assert len(knowledge.labels) == 247

    def test_minimal_graph_shape(self, tmp_path):
        knowledge = build_kg(load_schema(write_schema(tmp_path, MINI)))
        assert knowledge.graph.n == 4
        assert knowledge.graph.num_edges == 3

    def test_isolated_entity_retained(self):
        schema = schema_from_dict({
            "entities": MINI["entities"] + [
                {"name": "orphan field", "category": "data_field_type"}],
            "relations": MINI["relations"],
        })
        knowledge = build_kg(schema)
        assert knowledge.graph.n == 5
        report = validate_kg(knowledge)
        assert report.isolated_nodes == ["orphan field"]

    def test_deterministic(self):
        a = build_kg(make_bundled_schema())
        b = build_kg(make_bundled_schema())
        assert a.graph.edges == b.graph.edges
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_bundled_file_matches_generator(self):
        assert load_schema(kg.bundled_schema_path()) == make_bundled_schema()

    def test_label_distribution(self):
        knowledge = load_bundled_kg()
        counts = np.bincount(knowledge.labels, minlength=4)
        np.testing.assert_array_equal(counts, [132, 40, 73, 2])


class TestValidateKg:
    def test_bundled_clean(self):
        assert validate_kg(load_bundled_kg()).is_clean

    def test_duplicate_relation_reported(self):
        doc = json.loads(json.dumps(MINI))
        doc["relations"].append(dict(doc["relations"][0]))
        knowledge = build_kg(schema_from_dict(doc, strict_typing=False))
        report = validate_kg(knowledge)
        assert len(report.duplicate_relations) == 1

    def test_typing_violation_reported(self):
        doc = {
            "entities": [
                {"name": "a", "category": "statistical_indicator"},
                {"name": "b", "category": "statistical_indicator"},
            ],
            "relations": [{"head": "a", "tail": "b",
                           "category": "condition_relation"}],
        }
        knowledge = build_kg(schema_from_dict(doc, strict_typing=False))
        report = validate_kg(knowledge)
        assert len(report.typing_violations) == 1
        assert not report.is_clean

    def test_every_bundled_edge_satisfies_exactly_one_rule(self):
        knowledge = load_bundled_kg()
        cat_of = dict(knowledge.schema.entities)
        for head, tail, _ in knowledge.schema.relations:
            matches = [
                rcat for rcat in RelationCategory
                if kg.relation_typing_ok(cat_of[head], cat_of[tail], rcat)
            ]
            assert len(matches) == 1


class TestKgFeatures:
    def test_minimal_identity(self, tmp_path):
        knowledge = build_kg(load_schema(write_schema(tmp_path, MINI)))
        np.testing.assert_array_equal(kg_features(knowledge), np.eye(4))

    def test_bundled_identity(self):
        x = kg_features(load_bundled_kg())
        assert x.shape == (247, 247)
        np.testing.assert_array_equal(x, np.eye(247))

    def test_row_sums_one(self):
        x = kg_features(load_bundled_kg())
        np.testing.assert_array_equal(x.sum(axis=1), np.ones(247))
