"""Unsupervised evaluation: K-means clustering with matched accuracy, edge
splitting for relation prediction, and exact AP/AUC over held-out pairs."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import Graph


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray  # per-node cluster id in [0, k)
    centroids: np.ndarray  # k x d
    inertia: float
    n_iter: int


@dataclass(frozen=True)
class EdgeSplit:
    train_edges: tuple
    test_pos: tuple
    test_neg: tuple
    ratio: float


def kmeans(z: np.ndarray, k: int, seed=0, max_iters: int = 300) -> ClusterAssignment:
    """Lloyd's algorithm with k-means++ seeding and deterministic
    farthest-point repair of empty clusters."""
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range [1, {n}]")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp(z, k, rng)
    labels = None
    for it in range(1, max_iters + 1):
        d2 = _sq_dists(z, centroids)
        new_labels = d2.argmin(axis=1)
        for c in range(k):
            members = new_labels == c
            if members.any():
                centroids[c] = z[members].mean(axis=0)
            else:
                # reseed at the point farthest from its assigned centroid
                far = d2[np.arange(n), new_labels].argmax()
                centroids[c] = z[far]
                new_labels[far] = c
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
    inertia = float(_sq_dists(z, centroids)[np.arange(n), labels].sum())
    return ClusterAssignment(labels=labels, centroids=centroids,
                             inertia=inertia, n_iter=it)


def _sq_dists(z, centroids):
    return ((z[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _kmeanspp(z, k, rng):
    n = z.shape[0]
    centroids = np.empty((k, z.shape[1]))
    centroids[0] = z[rng.integers(n)]
    closest = ((z - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total == 0:
            centroids[c] = z[rng.integers(n)]
        else:
            centroids[c] = z[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, ((z - centroids[c]) ** 2).sum(axis=1))
    return centroids


def cluster_accuracy(pred, truth) -> float:
    """Best accuracy over all cluster-to-class matchings (Hungarian on the
    contingency matrix)."""
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    k = int(max(pred.max(), truth.max())) + 1
    contingency = np.zeros((k, k), dtype=np.int64)
    np.add.at(contingency, (pred, truth), 1)
    rows, cols = linear_sum_assignment(-contingency)
    return float(contingency[rows, cols].sum()) / pred.size


def split_edges(g: Graph, test_ratio: float, seed=0) -> EdgeSplit:
    """Held-out positive edges plus count-matched sampled non-edges.

    Splits are nested across ratios for a fixed seed: the positives held out
    at a smaller ratio are a prefix of those held out at a larger one.
    """
    if not 0.0 < test_ratio < 1.0:
        raise ValueError(f"test_ratio must be in (0, 1), got {test_ratio}")
    edges = list(g.edges)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(edges))
    n_test = int(round(test_ratio * len(edges)))
    if n_test >= len(edges):
        raise ValueError("ratio leaves no training edges")
    test_pos = [edges[i] for i in order[:n_test]]
    train = [edges[i] for i in sorted(order[n_test:])]

    edge_set = set(edges)
    neg = []
    neg_seen = set()
    neg_rng = np.random.default_rng(seed)  # independent of the permutation draw
    while len(neg) < n_test:
        i = int(neg_rng.integers(g.n))
        j = int(neg_rng.integers(g.n))
        if i == j:
            continue
        pair = (min(i, j), max(i, j))
        if pair in edge_set or pair in neg_seen:
            continue
        neg_seen.add(pair)
        neg.append(pair)
    return EdgeSplit(train_edges=tuple(train), test_pos=tuple(test_pos),
                     test_neg=tuple(neg), ratio=test_ratio)


def roc_auc(pos_scores, neg_scores) -> float:
    """Exact Mann-Whitney AUC: P(random positive outscores random negative),
    ties counted as one half."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("need at least one positive and one negative score")
    all_scores = np.concatenate([pos, neg])
    order = np.argsort(all_scores, kind="mergesort")
    ranks = np.empty_like(order, dtype=np.float64)
    # midranks for ties
    sorted_scores = all_scores[order]
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum = ranks[: pos.size].sum()
    u = rank_sum - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def average_precision(pos_scores, neg_scores) -> float:
    """Step-wise AP: sum of precision at each positive in descending-score
    order, divided by the number of positives."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    scores = np.concatenate([pos, neg])
    is_pos = np.concatenate([np.ones(pos.size, bool), np.zeros(neg.size, bool)])
    # descending score; on ties, negatives first (pessimistic, deterministic)
    order = np.lexsort((is_pos, -scores))
    is_pos = is_pos[order]
    tp = np.cumsum(is_pos)
    precision = tp / np.arange(1, len(is_pos) + 1)
    return float(precision[is_pos].sum() / pos.size)


def ap_auc(a_hat: np.ndarray, split: EdgeSplit) -> dict:
    """Score held-out pairs with the correlation matrix and report AP/AUC."""
    a_hat = np.asarray(a_hat, dtype=np.float64)
    for i, j in list(split.test_pos) + list(split.test_neg):
        if not (0 <= i < a_hat.shape[0] and 0 <= j < a_hat.shape[0]):
            raise ValueError(f"split pair ({i}, {j}) outside matrix")
    pos = np.array([a_hat[i, j] for i, j in split.test_pos])
    neg = np.array([a_hat[i, j] for i, j in split.test_neg])
    return {"ap": average_precision(pos, neg), "auc": roc_auc(pos, neg)}


def export_embeddings(z: np.ndarray, labels, path) -> None:
    """TSV rows `node_id<TAB>label<TAB>z_1..z_d` at full double precision."""
    z = np.asarray(z, dtype=np.float64)
    labels = np.asarray(labels)
    with open(path, "w", encoding="utf-8") as f:
        for i in range(z.shape[0]):
            coords = "\t".join(repr(float(v)) for v in z[i])
            f.write(f"{i}\t{labels[i]}\t{coords}\n")


def write_jsonl(path, records) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")
