"""Build an association tree below an abnormal performance indicator and
extract the greedy maximum-weight cause path down to a raw data field.

Run:  python demos/04_trace_anomaly.py
"""

from kgtrace import (
    EncoderConfig, build_association_tree, decode, load_bundled_kg_dataset,
    render_tree_text, trace_path, train,
)

bundle = load_bundled_kg_dataset()
result = train(bundle.graph, EncoderConfig(seed=0))
a_hat = decode(result.z)

names = [None] * bundle.graph.n
for name, i in bundle.symbols.items():
    names[i] = name

abnormal = "regis success rate"
tree = build_association_tree(bundle.symbols[abnormal], l=2, m=3, a_hat=a_hat)

print(f"association tree below {abnormal!r} (l=2, m=3); "
      "'*' marks the greedy trace path:\n")
print(render_tree_text(tree, names=names))

path = trace_path(tree)
print("\ntrace path:")
for node, weight in zip(path.nodes, path.weights):
    print(f"  -> {names[node]}  (weight {weight:.3f})")
