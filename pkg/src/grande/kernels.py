"""Backend selection for the hot loops.

The compiled extension ``grande._kernels`` is used when it imports; otherwise
the numpy implementations in ``grande._fallback`` take over. Setting
``GRANDE_BACKEND=python`` forces the fallback even when the extension exists.
"""

import os

import numpy as np

from grande import _fallback

BACKENDS = {"python": _fallback}

try:
    from grande import _kernels
except ImportError:
    _kernels = None
else:
    BACKENDS["compiled"] = _kernels

if os.environ.get("GRANDE_BACKEND", "").lower() == "python" or _kernels is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"

_impl = BACKENDS[BACKEND]


def use_backend(name):
    """Switch the active backend at runtime; returns the previous name."""
    global BACKEND, _impl
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    prev = BACKEND
    BACKEND, _impl = name, BACKENDS[name]
    return prev


def _c(a, dtype=np.float64):
    return np.ascontiguousarray(a, dtype=dtype)


def spmm(indptr, indices, data, h):
    return _impl.spmm(_c(indptr, np.int64), _c(indices, np.int64), _c(data), _c(h))


def edge_distances(indptr, indices, h):
    return _impl.edge_distances(_c(indptr, np.int64), _c(indices, np.int64), _c(h))


def inverse_kernel_means(indptr, rho_norm, sigma):
    return _impl.inverse_kernel_means(_c(indptr, np.int64), _c(rho_norm), float(sigma))


def pairwise_block(xq, x):
    return _impl.pairwise_block(_c(xq), _c(x))


def matmul(a, b):
    return _impl.matmul(_c(a), _c(b))
