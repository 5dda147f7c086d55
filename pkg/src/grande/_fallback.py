"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def spmm(indptr, indices, data, h):
    # every row owns at least its diagonal entry, so reduceat never sees an empty segment
    contrib = data[:, None] * h[indices]
    return np.add.reduceat(contrib, indptr[:-1], axis=0)


def edge_distances(indptr, indices, h):
    rows = np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))
    diff = h[rows] - h[indices]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def inverse_kernel_means(indptr, rho_norm, sigma):
    inv = 1.0 / np.exp(-(rho_norm * rho_norm) / sigma)
    return np.add.reduceat(inv, indptr[:-1]) / np.diff(indptr)


def pairwise_block(xq, x):
    diff = xq[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def matmul(a, b):
    # accumulate over the inner index in order so results match the compiled loop bit-for-bit
    out = np.zeros((a.shape[0], b.shape[1]))
    for k in range(a.shape[1]):
        out += a[:, k:k + 1] * b[k]
    return out
