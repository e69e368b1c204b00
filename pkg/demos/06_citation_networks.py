"""Load a LINQS-style citation network (id<TAB>features<TAB>class rows plus a
cited<TAB>citing edge file) and run node classification on the embeddings.

This demo fabricates a tiny two-community citation network on the fly; point
`STEM` at e.g. `data/cora/cora` to run the same pipeline on a real corpus.

Run:  python demos/06_citation_networks.py
"""

import tempfile
from pathlib import Path

import numpy as np

from kgtrace import (
    EncoderConfig, cluster_accuracy, kmeans, load_citation_dataset, train,
)

STEM = None  # e.g. Path("data/cora/cora")

if STEM is None:
    rng = np.random.default_rng(0)
    tmp = Path(tempfile.mkdtemp())
    STEM = tmp / "toy"
    n_per, n_feat = 30, 8
    with open(f"{STEM}.content", "w") as f:
        for i in range(2 * n_per):
            cls = "theory" if i < n_per else "systems"
            feats = "\t".join(str(int(v)) for v in rng.integers(0, 2, n_feat))
            f.write(f"paper{i}\t{feats}\t{cls}\n")
    with open(f"{STEM}.cites", "w") as f:
        for i in range(2 * n_per):
            lo = 0 if i < n_per else n_per
            for j in rng.integers(lo, lo + n_per, 4):
                if i != j:
                    f.write(f"paper{i}\tpaper{j}\n")
        # a few cross-community citations
        for _ in range(5):
            f.write(f"paper{rng.integers(n_per)}\t"
                    f"paper{rng.integers(n_per, 2 * n_per)}\n")

bundle = load_citation_dataset(f"{STEM}.content", f"{STEM}.cites",
                               name=STEM.name)
print(f"dataset: {bundle.name}, {bundle.graph.n} papers, "
      f"{bundle.graph.num_edges} citation edges, "
      f"classes={bundle.class_names}, dropped={bundle.dropped_edges}")

result = train(bundle.graph, EncoderConfig(seed=0))
k = len(bundle.class_names)
acc = cluster_accuracy(kmeans(result.z, k, seed=0).labels, bundle.labels)
print(f"K-means (k={k}) matched accuracy: {acc:.3f}")
