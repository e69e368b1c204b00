"""Wireless core-network knowledge graph: typed entities and relations,
schema loading/validation, and compilation to a trainable Graph."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

import numpy as np

from .graph import Graph


class SchemaError(ValueError):
    """Schema file failed to parse or validate."""


class EntityCategory(str, Enum):
    DATA_FIELD_TYPE = "data_field_type"
    PROCEDURE_TYPE = "procedure_type"
    STATISTICAL_INDICATOR = "statistical_indicator"
    ALGORITHM_INDICATOR = "algorithm_indicator"


class RelationCategory(str, Enum):
    PROCEDURE_RELATION = "procedure_relation"
    CONDITION_RELATION = "condition_relation"
    ALGORITHM_RELATION = "algorithm_relation"


# which unordered pair of entity categories each relation category may connect
ENDPOINT_RULES = {
    RelationCategory.PROCEDURE_RELATION: frozenset(
        {EntityCategory.PROCEDURE_TYPE, EntityCategory.DATA_FIELD_TYPE}
    ),
    RelationCategory.CONDITION_RELATION: frozenset(
        {EntityCategory.STATISTICAL_INDICATOR, EntityCategory.DATA_FIELD_TYPE}
    ),
    RelationCategory.ALGORITHM_RELATION: frozenset(
        {EntityCategory.STATISTICAL_INDICATOR, EntityCategory.ALGORITHM_INDICATOR}
    ),
}

# cluster-label order, fixed for reproducible label vectors
CATEGORY_ORDER = (
    EntityCategory.DATA_FIELD_TYPE,
    EntityCategory.PROCEDURE_TYPE,
    EntityCategory.STATISTICAL_INDICATOR,
    EntityCategory.ALGORITHM_INDICATOR,
)


@dataclass(frozen=True)
class KgSchema:
    entities: tuple  # of (name, EntityCategory)
    relations: tuple  # of (head_name, tail_name, RelationCategory)

    def __post_init__(self):
        names = [n for n, _ in self.entities]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate entity names: {dupes}")
        known = set(names)
        for head, tail, _ in self.relations:
            for endpoint in (head, tail):
                if endpoint not in known:
                    raise SchemaError(f"relation endpoint {endpoint!r} is not an entity")
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "relations", tuple(self.relations))

    def category_counts(self) -> dict:
        counts = {c: 0 for c in EntityCategory}
        for _, cat in self.entities:
            counts[cat] += 1
        return counts

    def category_of(self, name: str) -> EntityCategory:
        for n, cat in self.entities:
            if n == name:
                return cat
        raise KeyError(name)


def relation_typing_ok(head_cat, tail_cat, rel_cat) -> bool:
    want = ENDPOINT_RULES[rel_cat]
    got = {head_cat, tail_cat}
    return got == set(want)


@dataclass(frozen=True)
class KnowledgeGraph:
    schema: KgSchema
    graph: Graph
    labels: np.ndarray  # per-node index into CATEGORY_ORDER
    symbols: dict  # entity name -> node id

    @property
    def names(self):
        return [name for name, _ in self.schema.entities]

    def node_of(self, name: str) -> int:
        return self.symbols[name]


@dataclass
class ValidationReport:
    typing_violations: list = field(default_factory=list)
    duplicate_relations: list = field(default_factory=list)
    isolated_nodes: list = field(default_factory=list)

    @property
    def is_clean(self) -> bool:
        return not (self.typing_violations or self.duplicate_relations
                    or self.isolated_nodes)


def load_schema(path) -> KgSchema:
    """Parse and validate a schema JSON file (entities + typed relations)."""
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}:{e.lineno}: {e.msg}") from e
    return schema_from_dict(doc, strict_typing=True)


def schema_from_dict(doc: dict, strict_typing=True) -> KgSchema:
    entities = []
    for i, ent in enumerate(doc.get("entities", [])):
        try:
            cat = EntityCategory(ent["category"])
        except ValueError:
            raise SchemaError(f"entity {i} ({ent.get('name')!r}): "
                              f"unknown category {ent.get('category')!r}")
        entities.append((ent["name"], cat))
    relations = []
    for i, rel in enumerate(doc.get("relations", [])):
        try:
            cat = RelationCategory(rel["category"])
        except ValueError:
            raise SchemaError(f"relation {i}: unknown category {rel.get('category')!r}")
        relations.append((rel["head"], rel["tail"], cat))
    schema = KgSchema(tuple(entities), tuple(relations))
    if strict_typing:
        cat_of = dict(schema.entities)
        for head, tail, rcat in schema.relations:
            if not relation_typing_ok(cat_of[head], cat_of[tail], rcat):
                raise SchemaError(
                    f"relation ({head!r}, {tail!r}, {rcat.value}) violates the "
                    f"endpoint-typing rule for {rcat.value}"
                )
    return schema


def schema_to_dict(schema: KgSchema) -> dict:
    return {
        "entities": [{"name": n, "category": c.value} for n, c in schema.entities],
        "relations": [
            {"head": h, "tail": t, "category": c.value} for h, t, c in schema.relations
        ],
    }


def build_kg(schema: KgSchema) -> KnowledgeGraph:
    """Compile a schema to a graph: one node per entity, one edge per relation."""
    symbols = {name: i for i, (name, _) in enumerate(schema.entities)}
    edges = sorted({
        (min(symbols[h], symbols[t]), max(symbols[h], symbols[t]))
        for h, t, _ in schema.relations
    })
    graph = Graph(n=len(schema.entities), edges=tuple(edges))
    label_of = {c: i for i, c in enumerate(CATEGORY_ORDER)}
    labels = np.array([label_of[cat] for _, cat in schema.entities], dtype=np.int64)
    return KnowledgeGraph(schema=schema, graph=graph, labels=labels, symbols=symbols)


def validate_kg(kg: KnowledgeGraph) -> ValidationReport:
    """Report endpoint-typing violations, duplicate relations, isolated nodes."""
    report = ValidationReport()
    cat_of = dict(kg.schema.entities)
    seen = set()
    for head, tail, rcat in kg.schema.relations:
        if not relation_typing_ok(cat_of[head], cat_of[tail], rcat):
            report.typing_violations.append((head, tail, rcat))
        key = (min(head, tail), max(head, tail))
        if key in seen:
            report.duplicate_relations.append((head, tail, rcat))
        seen.add(key)
    degree = np.zeros(kg.graph.n, dtype=np.int64)
    for i, j in kg.graph.edges:
        degree[i] += 1
        degree[j] += 1
    names = kg.names
    report.isolated_nodes = [names[i] for i in np.flatnonzero(degree == 0)]
    return report


def kg_features(kg: KnowledgeGraph) -> np.ndarray:
    """Identity features: the featureless-graph convention."""
    return np.eye(kg.graph.n, dtype=np.float64)


# --- bundled synthetic schema ---
#
# The real 247-entity schema is proprietary; this one reproduces its category
# counts (132 data fields, 40 procedures, 73 statistical indicators,
# 2 algorithm indicators) and typed wiring, seeded with the named entities
# from the registration-procedure example. Edge counts beyond the named
# relations are a modeling choice.

_NAMED_DATA_FIELDS = [
    "msgflag", "procedure status", "request cause group",
    "auth type", "rejected NSSAI number",
]
_NAMED_PROCEDURES = ["1-Registration", "3-Service request", "4-Paging"]
_NAMED_INDICATORS = [
    "regis request cnt", "regis accept cnt", "regis fail cnt",
    "registration success cnt",
]
_NAMED_ALGORITHMS = ["regis success rate", "regis failure rate"]

_NAMED_RELATIONS = [
    # registration-procedure neighborhood
    ("1-Registration", "msgflag", RelationCategory.PROCEDURE_RELATION),
    ("1-Registration", "auth type", RelationCategory.PROCEDURE_RELATION),
    ("1-Registration", "rejected NSSAI number", RelationCategory.PROCEDURE_RELATION),
    ("1-Registration", "request cause group", RelationCategory.PROCEDURE_RELATION),
    ("3-Service request", "procedure status", RelationCategory.PROCEDURE_RELATION),
    ("4-Paging", "msgflag", RelationCategory.PROCEDURE_RELATION),
    ("registration success cnt", "msgflag", RelationCategory.CONDITION_RELATION),
    ("regis request cnt", "msgflag", RelationCategory.CONDITION_RELATION),
    ("regis fail cnt", "request cause group", RelationCategory.CONDITION_RELATION),
    ("regis fail cnt", "auth type", RelationCategory.CONDITION_RELATION),
    ("regis accept cnt", "procedure status", RelationCategory.CONDITION_RELATION),
    ("registration success cnt", "regis success rate", RelationCategory.ALGORITHM_RELATION),
    ("regis fail cnt", "regis success rate", RelationCategory.ALGORITHM_RELATION),
    ("regis accept cnt", "regis success rate", RelationCategory.ALGORITHM_RELATION),
    ("regis request cnt", "regis success rate", RelationCategory.ALGORITHM_RELATION),
    ("regis fail cnt", "regis failure rate", RelationCategory.ALGORITHM_RELATION),
    ("regis request cnt", "regis failure rate", RelationCategory.ALGORITHM_RELATION),
]

_COUNTS = {
    EntityCategory.DATA_FIELD_TYPE: 132,
    EntityCategory.PROCEDURE_TYPE: 40,
    EntityCategory.STATISTICAL_INDICATOR: 73,
    EntityCategory.ALGORITHM_INDICATOR: 2,
}

_SCHEMA_SEED = 20226


_N_THEMES = 8


def make_bundled_schema() -> KgSchema:
    """Deterministically generate the bundled 247-entity schema.

    Entities are wired within procedure themes (groups of related procedures
    and the fields/indicators around them), mimicking how real procedures
    share data fields. Degree rules: each data field attaches to 3-4
    procedures of its theme, each statistical indicator conditions on 2-3
    fields of its theme, each algorithm indicator aggregates several
    statistical indicators.
    """
    rng = np.random.default_rng(_SCHEMA_SEED)

    def pad(named, prefix, total):
        gen = [f"{prefix} {i:03d}" for i in range(len(named), total)]
        return list(named) + gen

    fields = pad(_NAMED_DATA_FIELDS, "data field", _COUNTS[EntityCategory.DATA_FIELD_TYPE])
    procs = pad(_NAMED_PROCEDURES, "procedure", _COUNTS[EntityCategory.PROCEDURE_TYPE])
    inds = pad(_NAMED_INDICATORS, "stat indicator",
               _COUNTS[EntityCategory.STATISTICAL_INDICATOR])
    algos = list(_NAMED_ALGORITHMS)

    entities = (
        [(n, EntityCategory.DATA_FIELD_TYPE) for n in fields]
        + [(n, EntityCategory.PROCEDURE_TYPE) for n in procs]
        + [(n, EntityCategory.STATISTICAL_INDICATOR) for n in inds]
        + [(n, EntityCategory.ALGORITHM_INDICATOR) for n in algos]
    )

    relations = list(_NAMED_RELATIONS)
    seen = {(min(h, t), max(h, t)) for h, t, _ in relations}

    def add(head, tail, cat):
        key = (min(head, tail), max(head, tail))
        if key not in seen:
            seen.add(key)
            relations.append((head, tail, cat))

    # theme assignment; the named registration entities all sit in theme 0
    proc_theme = {p: i % _N_THEMES for i, p in enumerate(procs)}
    for p in _NAMED_PROCEDURES:
        proc_theme[p] = 0
    theme_procs = [[p for p in procs if proc_theme[p] == t]
                   for t in range(_N_THEMES)]
    field_theme = {f: i % _N_THEMES for i, f in enumerate(fields)}
    for f in _NAMED_DATA_FIELDS:
        field_theme[f] = 0
    theme_fields = [[f for f in fields if field_theme[f] == t]
                    for t in range(_N_THEMES)]
    ind_theme = {ind: i % _N_THEMES for i, ind in enumerate(inds)}
    for ind in _NAMED_INDICATORS:
        ind_theme[ind] = 0

    # each data field hangs off 3-4 procedures of its theme
    for f in fields:
        pool = theme_procs[field_theme[f]]
        size = min(int(rng.integers(3, 5)), len(pool))
        for p in rng.choice(pool, size=size, replace=False):
            add(str(p), f, RelationCategory.PROCEDURE_RELATION)
    # each statistical indicator conditions on 2-3 data fields of its theme
    for ind in inds:
        pool = theme_fields[ind_theme[ind]]
        size = min(int(rng.integers(2, 4)), len(pool))
        for f in rng.choice(pool, size=size, replace=False):
            add(ind, str(f), RelationCategory.CONDITION_RELATION)
    # each algorithm indicator aggregates several statistical indicators
    for a in algos:
        for ind in rng.choice(inds, size=4, replace=False):
            add(str(ind), a, RelationCategory.ALGORITHM_RELATION)
    # no procedure left isolated
    used = {h for h, _, c in relations if c is RelationCategory.PROCEDURE_RELATION}
    for p in procs:
        if p not in used:
            add(p, str(rng.choice(theme_fields[proc_theme[p]])),
                RelationCategory.PROCEDURE_RELATION)

    return KgSchema(tuple(entities), tuple(relations))


def bundled_schema_path():
    return resources.files("kgtrace") / "data" / "kg_schema.json"


def load_bundled_kg() -> KnowledgeGraph:
    with resources.as_file(bundled_schema_path()) as p:
        return build_kg(load_schema(p))
