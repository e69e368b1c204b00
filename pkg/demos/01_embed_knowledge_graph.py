"""Train the adversarial graph autoencoder on the bundled wireless-network
knowledge graph and look at what it learned.

Run:  python demos/01_embed_knowledge_graph.py
"""

import numpy as np

from kgtrace import EncoderConfig, load_bundled_kg_dataset, train

bundle = load_bundled_kg_dataset()
print(f"dataset: {bundle.name}, {bundle.graph.n} nodes, "
      f"{bundle.graph.num_edges} edges")

cfg = EncoderConfig(seed=0)
result = train(bundle.graph, cfg)

print(f"\ntrained {len(result.history)} epochs")
for h in result.history[:: max(1, len(result.history) // 5)]:
    print(f"  epoch {h['epoch']:3d}  recon_loss={h['recon_loss']:.4f}"
          + (f"  disc={h['disc_loss']:.4f}  gen={h['gen_loss']:.4f}"
             if h["disc_loss"] is not None else ""))

z = result.z
print(f"\nembedding matrix Z: {z.shape}")

# reconstructed correlations should rank true edges above non-edges
a_hat = result.a_hat
edges = set(bundle.graph.edges)
edge_scores = [a_hat[i, j] for i, j in edges]
rng = np.random.default_rng(0)
non_scores = []
while len(non_scores) < len(edge_scores):
    i, j = rng.integers(bundle.graph.n, size=2)
    if i < j and (int(i), int(j)) not in edges:
        non_scores.append(a_hat[i, j])
print(f"mean correlation on edges:     {np.mean(edge_scores):.3f}")
print(f"mean correlation on non-edges: {np.mean(non_scores):.3f}")
