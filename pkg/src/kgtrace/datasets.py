"""Dataset ingestion: LINQS-style citation networks and the bundled
knowledge graph, normalized into one bundle shape for the CLI."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph
from . import kg as kgmod


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetBundle:
    name: str
    graph: Graph
    labels: np.ndarray | None  # dense class ids, or None
    symbols: dict  # external id -> node index
    class_names: tuple
    dropped_edges: int = 0  # citations referencing unknown ids


def load_citation_dataset(content_path, cites_path, name="dataset") -> DatasetBundle:
    """LINQS format: content rows `id<TAB>f_1..f_m<TAB>class`, cites rows
    `cited<TAB>citing`. Edges are symmetrized; rows citing unknown ids are
    dropped and counted."""
    symbols = {}
    feature_rows = []
    label_names = []
    for lineno, line in enumerate(_lines(content_path), 1):
        parts = line.split("\t")
        if len(parts) < 3:
            raise DatasetError(f"{content_path}:{lineno}: expected id, features, class")
        ext_id, feats, cls = parts[0], parts[1:-1], parts[-1]
        if ext_id in symbols:
            raise DatasetError(f"{content_path}:{lineno}: duplicate id {ext_id!r}")
        try:
            row = np.array([float(v) for v in feats], dtype=np.float64)
        except ValueError as e:
            raise DatasetError(f"{content_path}:{lineno}: bad feature value ({e})")
        symbols[ext_id] = len(symbols)
        feature_rows.append(row)
        label_names.append(cls)
    if not symbols:
        raise DatasetError(f"{content_path}: empty dataset")
    m = len(feature_rows[0])
    for i, row in enumerate(feature_rows):
        if len(row) != m:
            raise DatasetError(f"{content_path}: row {i} has {len(row)} features, "
                               f"expected {m}")
    features = np.vstack(feature_rows)
    class_names = tuple(sorted(set(label_names)))
    class_ids = {c: i for i, c in enumerate(class_names)}
    labels = np.array([class_ids[c] for c in label_names], dtype=np.int64)

    edges = set()
    dropped = 0
    for lineno, line in enumerate(_lines(cites_path), 1):
        parts = line.split("\t")
        if len(parts) != 2:
            raise DatasetError(f"{cites_path}:{lineno}: expected `cited<TAB>citing`")
        a, b = parts
        if a not in symbols or b not in symbols:
            dropped += 1
            continue
        i, j = symbols[a], symbols[b]
        if i != j:
            edges.add((min(i, j), max(i, j)))
    graph = Graph(n=len(symbols), edges=tuple(sorted(edges)), features=features)
    return DatasetBundle(name=name, graph=graph, labels=labels, symbols=symbols,
                         class_names=class_names, dropped_edges=dropped)


def _lines(path):
    p = Path(path)
    if not p.exists():
        raise DatasetError(f"no such file: {path}")
    for line in p.read_text(encoding="utf-8").splitlines():
        line = line.strip("\r\n")
        if line:
            yield line


def load_bundled_kg_dataset() -> DatasetBundle:
    """The 247-node wireless core-network KG with identity features."""
    knowledge = kgmod.load_bundled_kg()
    graph = Graph(n=knowledge.graph.n, edges=knowledge.graph.edges,
                  features=kgmod.kg_features(knowledge))
    return DatasetBundle(
        name="kg",
        graph=graph,
        labels=knowledge.labels,
        symbols=knowledge.symbols,
        class_names=tuple(c.value for c in kgmod.CATEGORY_ORDER),
    )


def resolve_dataset(spec: str) -> DatasetBundle:
    """`kg` for the bundled KG, otherwise `<stem>` expecting `<stem>.content`
    and `<stem>.cites` on disk."""
    if spec == "kg":
        return load_bundled_kg_dataset()
    stem = Path(spec)
    content = stem.with_suffix(".content")
    cites = stem.with_suffix(".cites")
    if not content.exists() or not cites.exists():
        raise DatasetError(
            f"dataset {spec!r}: expected files {content} and {cites}"
        )
    return load_citation_dataset(content, cites, name=stem.name)
