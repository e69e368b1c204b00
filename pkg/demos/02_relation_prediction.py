"""Hold out a fraction of the knowledge-graph relations, retrain on the rest,
and measure how well the reconstructed correlation matrix recovers them.

Run:  python demos/02_relation_prediction.py
"""

from kgtrace import (
    EncoderConfig, Graph, ap_auc, load_bundled_kg_dataset, split_edges, train,
)

bundle = load_bundled_kg_dataset()
cfg = EncoderConfig(seed=0)

print("ratio   AP      AUC")
for pct in (5, 10, 20, 30, 50):
    split = split_edges(bundle.graph, pct / 100.0, seed=0)
    train_graph = Graph(n=bundle.graph.n, edges=split.train_edges,
                        features=bundle.graph.features)
    result = train(train_graph, cfg)
    scores = ap_auc(result.a_hat, split)
    print(f"{pct:3d}%   {scores['ap']:.3f}   {scores['auc']:.3f}")

print("\nAP stays roughly flat up to 30% held out, then degrades at 50% "
      "when half the structure is hidden from training.")
