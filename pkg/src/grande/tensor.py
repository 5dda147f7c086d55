"""Dense/sparse linear algebra, losses, and the Adam optimizer.

Dense matrices are plain 2-D ``float64`` numpy arrays. The sparse diffusion
operator is a CSR matrix that always stores its diagonal explicitly.
"""

from dataclasses import dataclass

import numpy as np

from grande import kernels
from grande.errors import DimensionError, InvariantError


@dataclass
class SparsePropagator:
    """Symmetric CSR matrix with every diagonal entry stored."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        self.indptr = np.asarray(self.indptr, dtype=np.int64)
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.indptr.shape != (self.n + 1,):
            raise DimensionError(f"indptr must have length n+1={self.n + 1}")
        if len(self.indices) != len(self.data) or self.indptr[-1] != len(self.indices):
            raise DimensionError("indices/data length disagrees with indptr")

    @property
    def nnz(self):
        return len(self.indices)

    def row_ids(self):
        return np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))

    def with_values(self, data):
        return SparsePropagator(self.n, self.indptr, self.indices, data)

    def to_dense(self):
        out = np.zeros((self.n, self.n))
        out[self.row_ids(), self.indices] = self.data
        return out

    def validate(self):
        """Check the structural invariants; raises InvariantError on failure."""
        rows = self.row_ids()
        if np.any(np.diff(self.indptr) < 1):
            raise InvariantError("every row needs at least its diagonal entry")
        for i in range(self.n):
            cols = self.indices[self.indptr[i]:self.indptr[i + 1]]
            if np.any(np.diff(cols) <= 0):
                raise InvariantError(f"row {i} column indices not strictly increasing")
            if i not in cols:
                raise InvariantError(f"row {i} is missing its diagonal entry")
        if not np.all(np.isfinite(self.data)) or np.any(self.data <= 0):
            raise InvariantError("values must be finite and positive")
        fwd = set(zip(rows.tolist(), self.indices.tolist()))
        if any((j, i) not in fwd for i, j in fwd):
            raise InvariantError("propagator is not structurally symmetric")


@dataclass
class ParameterBlock:
    value: np.ndarray
    grad: np.ndarray = None
    adam_m: np.ndarray = None
    adam_v: np.ndarray = None
    step_count: int = 0

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=np.float64)
        for name in ("grad", "adam_m", "adam_v"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros_like(self.value))

    @property
    def shape(self):
        return self.value.shape

    def zero_grad(self):
        self.grad[...] = 0.0


def matmul(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return kernels.matmul(a, b)


def spmm(p, h):
    """One diffusion step: ``out[i] = sum_j p[i, j] * h[j]``."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != p.n:
        raise DimensionError(f"propagator has n={p.n} but h has shape {h.shape}")
    return kernels.spmm(p.indptr, p.indices, p.data, h)


def softmax_rows(z):
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy_masked(z, labels, mask):
    """Mean negative log-likelihood over ``mask`` and its gradient w.r.t. ``z``.

    Rows outside the mask get a zero gradient.
    """
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise ValueError("training mask is empty")
    labels = np.asarray(labels, dtype=np.int64)
    zm = z[mask]
    shifted = zm - zm.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(shifted).sum(axis=1))
    true = labels[mask]
    rows = np.arange(len(mask))
    loss = float(np.mean(logsum - shifted[rows, true]))
    probs = np.exp(shifted - logsum[:, None])
    probs[rows, true] -= 1.0
    grad = np.zeros_like(z, dtype=np.float64)
    grad[mask] = probs / len(mask)
    return loss, grad


def adam_step(p, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """Bias-corrected Adam update, in place. Leaves ``p.grad`` for the caller to clear."""
    p.step_count += 1
    t = p.step_count
    g = p.grad
    p.adam_m *= beta1
    p.adam_m += (1.0 - beta1) * g
    p.adam_v *= beta2
    p.adam_v += (1.0 - beta2) * (g * g)
    m_hat = p.adam_m / (1.0 - beta1 ** t)
    v_hat = p.adam_v / (1.0 - beta2 ** t)
    p.value -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return p


def glorot_init(rows, cols, rng):
    if rows <= 0 or cols <= 0:
        raise ValueError("glorot_init needs positive dimensions")
    a = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-a, a, size=(rows, cols))


def relu_forward(h):
    active = h > 0
    return np.where(active, h, 0.0), active


def relu_backward(grad_out, active):
    return np.where(active, grad_out, 0.0)


def dropout_apply(h, rate, rng, training):
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return h, np.ones(h.shape, dtype=bool)
    kept = rng.random(h.shape) >= rate
    return np.where(kept, h / (1.0 - rate), 0.0), kept


def dropout_backward(grad_out, kept, rate):
    if rate == 0.0:
        return grad_out
    return np.where(kept, grad_out / (1.0 - rate), 0.0)
