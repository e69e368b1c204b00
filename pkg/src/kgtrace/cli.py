"""Command-line workflows: train, classify, linkpred, trace, export,
validate-kg, and serving the tree-explorer API.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys
from pathlib import Path

import numpy as np

from . import datasets, kg as kgmod, metrics, model as modelmod, tracer
from .datasets import DatasetError
from .graph import Graph, GraphError
from .kg import SchemaError
from .model import EncoderConfig, NumericError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_RATIOS = (5, 10, 20, 30, 50)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kgtrace", description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", type=Path, help="JSON config file; CLI flags win")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train on a dataset and write a model file")
    t.add_argument("--dataset", default="kg",
                   help="`kg` or a path stem with .content/.cites files")
    t.add_argument("--epochs", type=int)
    t.add_argument("--learning-rate", type=float)
    t.add_argument("--gan-weight", type=float)
    t.add_argument("--hidden", type=int)
    t.add_argument("--embedding-dim", type=int)

    c = sub.add_parser("classify", help="K-means on the embeddings + matched ACC")
    c.add_argument("--model", type=Path, required=True)
    c.add_argument("--dataset", default="kg")
    c.add_argument("--k", type=int)

    lp = sub.add_parser("linkpred", help="edge-split relation prediction sweep")
    lp.add_argument("--dataset", default="kg")
    lp.add_argument("--ratios", default=",".join(str(r) for r in DEFAULT_RATIOS),
                    help="comma-separated test-set percentages")
    lp.add_argument("--epochs", type=int)
    lp.add_argument("--gan-weight", type=float)

    tr = sub.add_parser("trace", help="association tree for an abnormal node")
    tr.add_argument("--model", type=Path, required=True)
    tr.add_argument("--node", required=True)
    tr.add_argument("--levels", type=int, default=2)
    tr.add_argument("--degree", type=int, default=3)

    ex = sub.add_parser("export", help="write embeddings TSV for external plotting")
    ex.add_argument("--model", type=Path, required=True)
    ex.add_argument("--dataset", default="kg")

    v = sub.add_parser("validate-kg", help="validate a KG schema file")
    v.add_argument("--schema", type=Path, help="defaults to the bundled schema")

    sv = sub.add_parser("serve", help="run the tree-explorer HTTP API")
    sv.add_argument("--model", type=Path, required=True)
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--host", default="127.0.0.1")
    return p


def _encoder_config(args, file_cfg: dict) -> EncoderConfig:
    cfg = EncoderConfig(seed=args.seed)
    for key in ("layer_dims", "learning_rate", "epochs", "seed", "disc_hidden",
                "disc_learning_rate", "gan_weight"):
        if key in file_cfg:
            setattr(cfg, key, file_cfg[key])
    if getattr(args, "epochs", None) is not None:
        cfg.epochs = args.epochs
    if getattr(args, "learning_rate", None) is not None:
        cfg.learning_rate = args.learning_rate
    if getattr(args, "gan_weight", None) is not None:
        cfg.gan_weight = args.gan_weight
    hidden = getattr(args, "hidden", None)
    emb = getattr(args, "embedding_dim", None)
    if hidden is not None or emb is not None:
        dims = list(cfg.layer_dims)
        if hidden is not None:
            dims[1:-1] = [hidden]
        if emb is not None:
            dims[-1] = emb
        cfg.layer_dims = dims
    return cfg


def cmd_train(args, file_cfg):
    bundle = datasets.resolve_dataset(args.dataset)
    cfg = _encoder_config(args, file_cfg)
    result = modelmod.train(bundle.graph, cfg)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    model_path = out / "model.kgt"
    meta = {"dataset": bundle.name}
    if bundle.labels is not None:
        meta["labels"] = [int(x) for x in bundle.labels]
        meta["class_names"] = list(bundle.class_names)
    modelmod.save_model(model_path, cfg.resolved(bundle.graph.features.shape[1]
                                                 if bundle.graph.features is not None
                                                 else bundle.graph.n),
                        result.state, result.z, symbols=bundle.symbols, meta=meta)
    metrics.write_jsonl(out / "history.jsonl", result.history)
    print(json.dumps({"model": str(model_path),
                      "epochs": len(result.history),
                      "final_recon_loss": result.history[-1]["recon_loss"]}))
    return EXIT_OK


def cmd_classify(args, file_cfg):
    loaded = modelmod.load_model(args.model)
    bundle = datasets.resolve_dataset(args.dataset)
    if bundle.labels is None:
        raise DatasetError(f"dataset {args.dataset!r} has no truth labels")
    k = args.k if args.k is not None else len(bundle.class_names)
    assignment = metrics.kmeans(loaded.z, k, seed=args.seed)
    acc = metrics.cluster_accuracy(assignment.labels, bundle.labels)
    record = {"dataset": bundle.name, "seed": args.seed, "k": k, "acc": acc}
    args.out.mkdir(parents=True, exist_ok=True)
    metrics.write_jsonl(args.out / "classify.jsonl", [record])
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def cmd_linkpred(args, file_cfg):
    bundle = datasets.resolve_dataset(args.dataset)
    try:
        ratios = [float(r) / 100.0 for r in str(args.ratios).split(",")]
    except ValueError:
        raise DatasetError(f"bad ratio list: {args.ratios!r}")
    cfg = _encoder_config(args, file_cfg)
    records = []
    for ratio in ratios:
        rec = linkpred_at_ratio(bundle, ratio, cfg, args.seed)
        records.append(rec)
        print(json.dumps(rec, sort_keys=True))
    args.out.mkdir(parents=True, exist_ok=True)
    metrics.write_jsonl(args.out / "linkpred.jsonl", records)
    return EXIT_OK


def linkpred_at_ratio(bundle, ratio: float, cfg: EncoderConfig, seed: int) -> dict:
    """Train on the retained edges, score the held-out pairs."""
    split = metrics.split_edges(bundle.graph, ratio, seed=seed)
    train_graph = Graph(n=bundle.graph.n, edges=split.train_edges,
                        features=bundle.graph.features)
    result = modelmod.train(train_graph, cfg)
    a_hat = result.a_hat if result.a_hat is not None else modelmod.decode(result.z)
    report = metrics.ap_auc(a_hat, split)
    return {"dataset": bundle.name, "seed": seed, "test_ratio": ratio,
            "ap": report["ap"], "auc": report["auc"]}


def _names_from_model(loaded) -> list:
    if not loaded.symbols:
        raise DatasetError("model file carries no symbol table")
    names = [None] * len(loaded.symbols)
    for name, idx in loaded.symbols.items():
        names[idx] = name
    return names


def cmd_trace(args, file_cfg):
    loaded = modelmod.load_model(args.model)
    names = _names_from_model(loaded)
    if args.node not in loaded.symbols:
        near = difflib.get_close_matches(args.node, names, n=5, cutoff=0.3)
        raise DatasetError(f"unknown node {args.node!r}; closest names: {near}")
    a_hat = modelmod.decode(loaded.z)
    tree = tracer.build_association_tree(loaded.symbols[args.node],
                                         args.levels, args.degree, a_hat)
    labels = loaded.meta.get("labels")
    doc = tracer.tree_to_json(tree, names=names,
                              labels=np.asarray(labels) if labels else None)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "tree.json", "w", encoding="utf-8") as f:
        json.dump(doc, f, sort_keys=True, indent=1)
        f.write("\n")
    print(tracer.render_tree_text(tree, names=names))
    return EXIT_OK


def cmd_export(args, file_cfg):
    loaded = modelmod.load_model(args.model)
    labels = loaded.meta.get("labels")
    if labels is None:
        bundle = datasets.resolve_dataset(args.dataset)
        labels = bundle.labels
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "embeddings.tsv"
    metrics.export_embeddings(loaded.z, labels, path)
    print(json.dumps({"embeddings": str(path), "rows": int(loaded.z.shape[0])}))
    return EXIT_OK


def cmd_validate_kg(args, file_cfg):
    if args.schema is not None:
        schema = kgmod.load_schema(args.schema)
    else:
        schema = kgmod.make_bundled_schema()
    knowledge = kgmod.build_kg(schema)
    report = kgmod.validate_kg(knowledge)
    counts = {c.value: n for c, n in schema.category_counts().items()}
    print(json.dumps({
        "entities": len(schema.entities),
        "relations": len(schema.relations),
        "category_counts": counts,
        "typing_violations": [
            [h, t, c.value] for h, t, c in report.typing_violations
        ],
        "duplicate_relations": [
            [h, t, c.value] for h, t, c in report.duplicate_relations
        ],
        "isolated_nodes": report.isolated_nodes,
        "clean": report.is_clean,
    }, sort_keys=True))
    return EXIT_OK if report.is_clean else EXIT_DATA


def cmd_serve(args, file_cfg):
    import uvicorn

    from .service import create_app

    loaded = modelmod.load_model(args.model)
    names = _names_from_model(loaded)
    labels = loaded.meta.get("labels")
    app = create_app(modelmod.decode(loaded.z), names,
                     labels=np.asarray(labels) if labels else None)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "classify": cmd_classify,
    "linkpred": cmd_linkpred,
    "trace": cmd_trace,
    "export": cmd_export,
    "validate-kg": cmd_validate_kg,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    file_cfg = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            print(f"kgtrace: bad config file {args.config}: {e}", file=sys.stderr)
            return EXIT_DATA
    try:
        return _COMMANDS[args.command](args, file_cfg)
    except (DatasetError, SchemaError, GraphError, FileNotFoundError) as e:
        print(f"kgtrace: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as e:
        print(f"kgtrace: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
