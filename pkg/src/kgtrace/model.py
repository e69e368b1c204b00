"""Adversarially regularized graph autoencoder: GCN encoder, inner-product
decoder, row-MLP discriminator, and the alternating training loop."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, asdict

import numpy as np

from .graph import Graph, adjacency_of, add_self_loops, degree_of, \
    normalize_symmetric, SparseAdjacency
from . import tensor as T
from .tensor import Tensor, AdamState, adam_step, glorot_init, spmm

# beyond this node count the dense n x n reconstruction is replaced by
# all-positives + sampled-negatives, and the discriminator sees sampled rows
DENSE_LIMIT = 5000
_DISC_ROW_SAMPLE = 512

MAGIC = b"KGT1"


class NumericError(RuntimeError):
    """Training produced a non-finite loss."""


@dataclass
class EncoderConfig:
    layer_dims: list = field(default_factory=lambda: [None, 32, 16])
    learning_rate: float = 0.01
    epochs: int = 200
    seed: int = 0
    disc_hidden: int = 64
    disc_learning_rate: float = 0.001
    gan_weight: float = 0.1

    def __post_init__(self):
        if len(self.layer_dims) < 2:
            raise ValueError("encoder needs at least 2 layer dims (input, output)")
        if self.layer_dims[-1] < 2:
            raise ValueError("embedding dimension must be >= 2")

    def resolved(self, input_dim: int) -> "EncoderConfig":
        dims = list(self.layer_dims)
        if dims[0] is None:
            dims[0] = input_dim
        cfg = EncoderConfig(**{**asdict(self), "layer_dims": dims})
        return cfg


@dataclass
class ModelState:
    gcn_weights: list  # W^(l), shape dims[l] x dims[l+1]
    disc_weights: list  # [W1, b1, W2, b2] for the n -> h -> 1 MLP
    gen_opt: AdamState
    disc_opt: AdamState
    epoch: int = 0


def init_state(cfg: EncoderConfig, n: int) -> ModelState:
    dims = cfg.layer_dims
    gcn = [glorot_init(dims[l], dims[l + 1], (cfg.seed, l))
           for l in range(len(dims) - 1)]
    h = cfg.disc_hidden
    disc = [
        glorot_init(n, h, (cfg.seed, 1001)),
        np.zeros((1, h)),
        glorot_init(h, 1, (cfg.seed, 1002)),
        np.zeros((1, 1)),
    ]
    return ModelState(
        gcn_weights=gcn,
        disc_weights=disc,
        gen_opt=AdamState([w.shape for w in gcn]),
        disc_opt=AdamState([w.shape for w in disc]),
    )


def _encode_taped(x: Tensor, a_norm: SparseAdjacency, weights: list) -> Tensor:
    """Layered propagation: hidden layers relu, output layer linear."""
    h = x
    last = len(weights) - 1
    for l, w in enumerate(weights):
        h = spmm(a_norm, h @ w)
        if l != last:
            h = h.relu()
    return h


def encode(x: np.ndarray, a_norm: SparseAdjacency, state: ModelState) -> np.ndarray:
    """Embedding matrix Z from features and normalized adjacency."""
    weights = [Tensor(w) for w in state.gcn_weights]
    return _encode_taped(Tensor(x), a_norm, weights).data


def decode(z: np.ndarray) -> np.ndarray:
    """Correlation matrix: sigmoid of pairwise embedding inner products."""
    z = np.asarray(z, dtype=np.float64)
    return T.sigmoid(z @ z.T)


def positive_weight(a: SparseAdjacency) -> float:
    """(n^2 - 2|E|) / 2|E| -- rebalances sparse positives in the BCE."""
    n = a.n
    twice_e = float(len(a.vals))
    if twice_e == 0:
        raise ValueError("graph has no edges")
    return (n * n - twice_e) / twice_e


def _loop_targets(a: SparseAdjacency) -> np.ndarray:
    t = a.to_dense()
    np.fill_diagonal(t, 1.0)
    return t


def recon_loss(a_hat, a: SparseAdjacency, w_pos: float | None = None):
    """Weighted binary cross-entropy between the correlation matrix and the
    self-looped adjacency, averaged over all n^2 pairs."""
    if w_pos is None:
        w_pos = positive_weight(a)
    targets = _loop_targets(a)
    ah = a_hat if isinstance(a_hat, Tensor) else Tensor(np.asarray(a_hat))
    if ah.shape != targets.shape:
        raise ValueError(f"shape mismatch: {ah.shape} vs {targets.shape}")
    pos = Tensor(targets * w_pos)
    neg = Tensor(1.0 - targets)
    loss = -(pos * ah.log() + neg * (1.0 - ah).log()).mean()
    return loss if isinstance(a_hat, Tensor) else float(loss.data)


def _sampled_recon_loss(z: Tensor, a: SparseAdjacency, w_pos: float, rng):
    """All positive pairs (incl. self-loops) plus 2|E| uniform negatives,
    normalized as an unbiased estimate of the dense n^2 mean."""
    n = a.n
    pos_i = np.concatenate([a.rows, np.arange(n)])
    pos_j = np.concatenate([a.cols, np.arange(n)])
    n_neg = len(a.rows)
    neg_i = rng.integers(0, n, size=2 * n_neg)
    neg_j = rng.integers(0, n, size=2 * n_neg)
    adj = a.to_scipy()
    bad = (neg_i == neg_j) | (np.asarray(adj[neg_i, neg_j]).ravel() > 0)
    neg_i, neg_j = neg_i[~bad][:n_neg], neg_j[~bad][:n_neg]
    pos_scores = T.gather_pair_logits(z, pos_i, pos_j).sigmoid()
    neg_scores = T.gather_pair_logits(z, neg_i, neg_j).sigmoid()
    n_negative_total = n * n - len(pos_i)
    pos_term = -(pos_scores.log().sum()) * (w_pos / (n * n))
    neg_term = -((1.0 - neg_scores).log().mean()) * (n_negative_total / (n * n))
    return pos_term + neg_term


def _discriminate_taped(rows: Tensor, weights: list) -> Tensor:
    w1, b1, w2, b2 = weights
    h = (rows @ w1 + b1).relu()
    return (h @ w2 + b2).sigmoid()


def discriminate(rows: np.ndarray, state: ModelState) -> np.ndarray:
    """Per-row realness scores in (0, 1)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.shape[1] != state.disc_weights[0].shape[0]:
        raise ValueError(
            f"row width {rows.shape[1]} != discriminator input "
            f"{state.disc_weights[0].shape[0]}"
        )
    weights = [Tensor(w) for w in state.disc_weights]
    return _discriminate_taped(Tensor(rows), weights).data.ravel()


def gan_losses(real_scores, fake_scores):
    """Discriminator loss and the non-saturating generator loss."""
    real = np.asarray(real_scores, dtype=np.float64)
    fake = np.asarray(fake_scores, dtype=np.float64)
    disc_loss = -np.mean(np.log(real)) - np.mean(np.log(1.0 - fake))
    gen_loss = -np.mean(np.log(fake))
    return float(disc_loss), float(gen_loss)


@dataclass
class TrainResult:
    state: ModelState
    z: np.ndarray
    a_hat: np.ndarray | None  # None for large graphs; recompute via decode(z)
    history: list  # per-epoch dicts: epoch, recon_loss, disc_loss, gen_loss


def train(g: Graph, cfg: EncoderConfig) -> TrainResult:
    """Alternating optimization: generator on reconstruction, discriminator on
    real-vs-generated adjacency rows, generator on the adversarial loss."""
    if g.n == 0:
        raise ValueError("empty graph")
    x = g.features if g.features is not None else np.eye(g.n)
    cfg = cfg.resolved(x.shape[1])
    if cfg.layer_dims[0] != x.shape[1]:
        raise ValueError(
            f"input dim {cfg.layer_dims[0]} != feature dim {x.shape[1]}"
        )

    a = adjacency_of(g)
    a_tilde = add_self_loops(a)
    a_norm = normalize_symmetric(a_tilde, degree_of(a_tilde))
    w_pos = positive_weight(a)
    dense = g.n <= DENSE_LIMIT
    rng = np.random.default_rng((cfg.seed, 2001))

    state = init_state(cfg, g.n)
    real_rows_full = _loop_targets(a) if dense else None

    history = []
    for epoch in range(cfg.epochs):
        # (a) generator step on reconstruction
        gcn = [Tensor(w, requires_grad=True) for w in state.gcn_weights]
        z = _encode_taped(Tensor(x), a_norm, gcn)
        if dense:
            a_hat = (z @ z.T).sigmoid()
            loss = recon_loss(a_hat, a, w_pos)
        else:
            loss = _sampled_recon_loss(z, a, w_pos, rng)
        rec = float(loss.data)
        _check_finite(rec, epoch, "recon")
        loss.backward()
        adam_step(state.gcn_weights, [w.grad for w in gcn], state.gen_opt,
                  lr=cfg.learning_rate)

        disc_l = gen_l = None
        if cfg.gan_weight != 0.0:
            # (b) discriminator on real vs generated rows (generator frozen)
            z_now = encode(x, a_norm, state)
            if dense:
                fake_rows = decode(z_now)
                real_rows = real_rows_full
            else:
                idx = rng.choice(g.n, size=min(g.n, _DISC_ROW_SAMPLE), replace=False)
                fake_rows = T.sigmoid(z_now[idx] @ z_now.T)
                real_rows = _rows_of_loop_adjacency(a, idx)
            dw = [Tensor(w, requires_grad=True) for w in state.disc_weights]
            real_s = _discriminate_taped(Tensor(real_rows), dw)
            fake_s = _discriminate_taped(Tensor(fake_rows), dw)
            d_loss = -(real_s.log().mean()) - ((1.0 - fake_s).log().mean())
            disc_l = float(d_loss.data)
            _check_finite(disc_l, epoch, "disc")
            d_loss.backward()
            adam_step(state.disc_weights, [w.grad for w in dw], state.disc_opt,
                      lr=cfg.disc_learning_rate)

            # (c) generator step on the adversarial loss (discriminator frozen)
            gcn = [Tensor(w, requires_grad=True) for w in state.gcn_weights]
            z_t = _encode_taped(Tensor(x), a_norm, gcn)
            if dense:
                fake = (z_t @ z_t.T).sigmoid()
            else:
                idx = rng.choice(g.n, size=min(g.n, _DISC_ROW_SAMPLE), replace=False)
                fake = (T.gather_rows(z_t, idx) @ z_t.T).sigmoid()
            dw_const = [Tensor(w) for w in state.disc_weights]
            fake_s = _discriminate_taped(fake, dw_const)
            g_loss = -(fake_s.log().mean()) * cfg.gan_weight
            gen_l = float(g_loss.data)
            _check_finite(gen_l, epoch, "gen")
            g_loss.backward()
            adam_step(state.gcn_weights, [w.grad for w in gcn], state.gen_opt,
                      lr=cfg.learning_rate)

        state.epoch = epoch + 1
        history.append({
            "epoch": epoch,
            "recon_loss": rec,
            "disc_loss": disc_l,
            "gen_loss": gen_l,
        })

    z_final = encode(x, a_norm, state)
    a_hat_final = decode(z_final) if dense else None
    return TrainResult(state=state, z=z_final, a_hat=a_hat_final, history=history)


def _rows_of_loop_adjacency(a: SparseAdjacency, idx) -> np.ndarray:
    rows = np.asarray(a.to_scipy()[idx].todense(), dtype=np.float64)
    for k, i in enumerate(idx):
        rows[k, i] = 1.0
    return rows


def _check_finite(value, epoch, name):
    if not np.isfinite(value):
        raise NumericError(f"non-finite {name} loss at epoch {epoch}: {value}")


# --- persistence: magic + JSON header + raw little-endian float64 buffers ---

def save_model(path, cfg: EncoderConfig, state: ModelState, z: np.ndarray,
               symbols: dict | None = None, meta: dict | None = None) -> None:
    matrices = (
        [(f"gcn_{l}", w) for l, w in enumerate(state.gcn_weights)]
        + [(f"disc_{i}", w) for i, w in enumerate(state.disc_weights)]
        + [("z", z)]
    )
    header = {
        "config": asdict(cfg),
        "epoch": state.epoch,
        "symbols": symbols,
        "meta": meta or {},
        "matrices": [{"name": n, "shape": list(m.shape)} for n, m in matrices],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for _, m in matrices:
            f.write(np.ascontiguousarray(m, dtype="<f8").tobytes())


@dataclass
class LoadedModel:
    cfg: EncoderConfig
    state: ModelState
    z: np.ndarray
    symbols: dict | None
    meta: dict


def load_model(path) -> LoadedModel:
    """The correlation matrix is recomputed from z via decode(), never
    stored."""
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise ValueError(f"{path}: not a KGT1 model file")
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode("utf-8"))
        mats = {}
        for spec in header["matrices"]:
            shape = tuple(spec["shape"])
            count = int(np.prod(shape))
            mats[spec["name"]] = np.frombuffer(
                f.read(count * 8), dtype="<f8"
            ).reshape(shape).copy()
    cfg = EncoderConfig(**header["config"])
    n_gcn = len(cfg.layer_dims) - 1
    gcn = [mats[f"gcn_{l}"] for l in range(n_gcn)]
    disc = [mats[f"disc_{i}"] for i in range(4)]
    state = ModelState(
        gcn_weights=gcn, disc_weights=disc,
        gen_opt=AdamState([w.shape for w in gcn]),
        disc_opt=AdamState([w.shape for w in disc]),
        epoch=header["epoch"],
    )
    return LoadedModel(cfg=cfg, state=state, z=mats["z"],
                       symbols=header.get("symbols"),
                       meta=header.get("meta", {}))
