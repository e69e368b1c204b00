"""Define a small knowledge-graph schema from scratch, validate it, and run
the whole pipeline on it: embed, reconstruct, trace.

Run:  python demos/05_custom_schema.py
"""

from kgtrace import (
    EncoderConfig, build_association_tree, build_kg, decode,
    render_tree_text, schema_from_dict, train, validate_kg,
)
from kgtrace.graph import Graph
from kgtrace.kg import kg_features

doc = {
    "entities": [
        {"name": "session id", "category": "data_field_type"},
        {"name": "release cause", "category": "data_field_type"},
        {"name": "bearer type", "category": "data_field_type"},
        {"name": "session setup", "category": "procedure_type"},
        {"name": "session release", "category": "procedure_type"},
        {"name": "setup attempt cnt", "category": "statistical_indicator"},
        {"name": "setup success cnt", "category": "statistical_indicator"},
        {"name": "abnormal release cnt", "category": "statistical_indicator"},
        {"name": "setup success rate", "category": "algorithm_indicator"},
    ],
    "relations": [
        {"head": "session setup", "tail": "session id",
         "category": "procedure_relation"},
        {"head": "session setup", "tail": "bearer type",
         "category": "procedure_relation"},
        {"head": "session release", "tail": "release cause",
         "category": "procedure_relation"},
        {"head": "setup attempt cnt", "tail": "session id",
         "category": "condition_relation"},
        {"head": "setup success cnt", "tail": "bearer type",
         "category": "condition_relation"},
        {"head": "abnormal release cnt", "tail": "release cause",
         "category": "condition_relation"},
        {"head": "setup attempt cnt", "tail": "setup success rate",
         "category": "algorithm_relation"},
        {"head": "setup success cnt", "tail": "setup success rate",
         "category": "algorithm_relation"},
    ],
}

schema = schema_from_dict(doc)
kg = build_kg(schema)
report = validate_kg(kg)
print(f"schema: {len(schema.entities)} entities, "
      f"{len(schema.relations)} relations, clean={report.is_clean}")

graph = Graph(n=kg.graph.n, edges=kg.graph.edges, features=kg_features(kg))
result = train(graph, EncoderConfig(epochs=300, seed=0))
a_hat = decode(result.z)

names = [None] * graph.n
for name, i in kg.symbols.items():
    names[i] = name

tree = build_association_tree(kg.symbols["setup success rate"], l=2, m=2,
                              a_hat=a_hat)
print("\nassociation tree below 'setup success rate':\n")
print(render_tree_text(tree, names=names))
