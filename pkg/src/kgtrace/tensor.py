"""Minimal reverse-mode autodiff over float64 numpy arrays, plus Glorot
initialization and the Adam update. Just enough primitives for a GCN
autoencoder, an MLP discriminator, and their losses."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

# smallest positive normal-ish clamp keeping sigmoid strictly inside (0, 1)
_SIG_LO = 1e-300
_SIG_HI = 1.0 - 1e-16


class Tensor:
    """Node in the computation tape. Wraps a float64 array."""

    __slots__ = ("data", "grad", "requires_grad", "_backward", "_parents")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad or any(p.requires_grad for p in _parents)
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    # -- elementwise --

    def __add__(self, other):
        other = _as_tensor(other)
        out = Tensor(self.data + other.data, _parents=(self, other))

        def bw(g):
            _accum(self, _unbroadcast(g, self.data.shape))
            _accum(other, _unbroadcast(g, other.data.shape))

        out._backward = bw
        return out

    def __sub__(self, other):
        other = _as_tensor(other)
        out = Tensor(self.data - other.data, _parents=(self, other))

        def bw(g):
            _accum(self, _unbroadcast(g, self.data.shape))
            _accum(other, _unbroadcast(-g, other.data.shape))

        out._backward = bw
        return out

    def __mul__(self, other):
        other = _as_tensor(other)
        out = Tensor(self.data * other.data, _parents=(self, other))

        def bw(g):
            _accum(self, _unbroadcast(g * other.data, self.data.shape))
            _accum(other, _unbroadcast(g * self.data, other.data.shape))

        out._backward = bw
        return out

    def __neg__(self):
        out = Tensor(-self.data, _parents=(self,))
        out._backward = lambda g: _accum(self, -g)
        return out

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return _as_tensor(other) - self

    # -- linear algebra --

    def matmul(self, other):
        other = _as_tensor(other)
        out = Tensor(self.data @ other.data, _parents=(self, other))

        def bw(g):
            _accum(self, g @ other.data.T)
            _accum(other, self.data.T @ g)

        out._backward = bw
        return out

    __matmul__ = matmul

    @property
    def T(self):
        out = Tensor(self.data.T, _parents=(self,))
        out._backward = lambda g: _accum(self, g.T)
        return out

    # -- reductions --

    def sum(self):
        out = Tensor(self.data.sum(), _parents=(self,))
        out._backward = lambda g: _accum(self, np.full_like(self.data, float(g)))
        return out

    def mean(self):
        out = Tensor(self.data.mean(), _parents=(self,))
        out._backward = lambda g: _accum(
            self, np.full_like(self.data, float(g) / self.data.size)
        )
        return out

    # -- activations / transcendental --

    def relu(self):
        out = Tensor(np.maximum(self.data, 0.0), _parents=(self,))
        out._backward = lambda g: _accum(self, g * (self.data > 0))
        return out

    def sigmoid(self):
        s = _stable_sigmoid(self.data)
        out = Tensor(s, _parents=(self,))
        out._backward = lambda g: _accum(self, g * s * (1.0 - s))
        return out

    def log(self):
        out = Tensor(np.log(self.data), _parents=(self,))
        out._backward = lambda g: _accum(self, g / self.data)
        return out

    # -- reverse pass --

    def backward(self):
        if self.data.shape != ():
            raise ValueError("backward() requires a scalar loss")
        order = []
        seen = set()

        def visit(t):
            if id(t) in seen:
                return
            seen.add(id(t))
            for p in t._parents:
                visit(p)
            order.append(t)

        visit(self)
        grads = {id(self): np.ones((), dtype=np.float64)}
        self.grad = grads[id(self)]
        for t in reversed(order):
            g = grads.get(id(t))
            if g is None or t._backward is None:
                continue
            _ctx_grads.append(grads)
            try:
                t._backward(g)
            finally:
                _ctx_grads.pop()
        for t in order:
            if t.requires_grad:
                t.grad = grads.get(id(t))


_ctx_grads = []


def _accum(t: Tensor, g: np.ndarray):
    if not t.requires_grad and not t._parents:
        return
    grads = _ctx_grads[-1]
    if id(t) in grads:
        grads[id(t)] = grads[id(t)] + g
    else:
        grads[id(t)] = g


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _unbroadcast(g, shape):
    """Sum a gradient down to `shape` after numpy broadcasting."""
    g = np.asarray(g, dtype=np.float64)
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def _stable_sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return np.clip(out, _SIG_LO, _SIG_HI)


def sigmoid(x):
    """Overflow-safe sigmoid; output strictly inside (0, 1) for finite input."""
    if isinstance(x, Tensor):
        return x.sigmoid()
    return _stable_sigmoid(x)


def relu(x):
    if isinstance(x, Tensor):
        return x.relu()
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def spmm(s, m: Tensor) -> Tensor:
    """Sparse-constant @ dense product; gradient flows to the dense side."""
    csr = s.to_scipy() if hasattr(s, "to_scipy") else sp.csr_matrix(s)
    if csr.shape[1] != m.data.shape[0]:
        raise ValueError(f"dimension mismatch: {csr.shape} @ {m.data.shape}")
    out = Tensor(csr @ m.data, _parents=(m,))
    out._backward = lambda g: _accum(m, csr.T @ g)
    return out


def gather_rows(m: Tensor, idx) -> Tensor:
    """Row subset m[idx]; gradient scatter-adds back into the full matrix."""
    idx = np.asarray(idx, dtype=np.int64)
    out = Tensor(m.data[idx], _parents=(m,))

    def bw(g):
        gm = np.zeros_like(m.data)
        np.add.at(gm, idx, g)
        _accum(m, gm)

    out._backward = bw
    return out


def gather_pair_logits(z: Tensor, idx_i, idx_j) -> Tensor:
    """Row-dot-row logits z[i]·z[j] for index pairs; scatter-add gradient."""
    idx_i = np.asarray(idx_i, dtype=np.int64)
    idx_j = np.asarray(idx_j, dtype=np.int64)
    zi, zj = z.data[idx_i], z.data[idx_j]
    out = Tensor((zi * zj).sum(axis=1), _parents=(z,))

    def bw(g):
        gz = np.zeros_like(z.data)
        np.add.at(gz, idx_i, g[:, None] * zj)
        np.add.at(gz, idx_j, g[:, None] * zi)
        _accum(z, gz)

    out._backward = bw
    return out


def glorot_init(rows: int, cols: int, seed) -> np.ndarray:
    """Uniform(-b, b) with b = sqrt(6 / (rows + cols)), deterministic per seed."""
    limit = np.sqrt(6.0 / (rows + cols))
    rng = np.random.default_rng(seed)
    return rng.uniform(-limit, limit, size=(rows, cols))


class AdamState:
    """First/second moment buffers plus step counter for a parameter list."""

    def __init__(self, shapes):
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0


def adam_step(params, grads, state: AdamState, lr=0.01,
              beta1=0.9, beta2=0.999, eps=1e-8):
    """One in-place Adam update with bias correction."""
    state.t += 1
    t = state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ValueError(f"shape mismatch: param {p.shape} vs grad {g.shape}")
        m *= beta1
        m += (1 - beta1) * g
        v *= beta2
        v += (1 - beta2) * g * g
        mhat = m / (1 - beta1 ** t)
        vhat = v / (1 - beta2 ** t)
        p -= lr * mhat / (np.sqrt(vhat) + eps)
    return params, state
