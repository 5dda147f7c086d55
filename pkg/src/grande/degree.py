"""Node degrees (centrality and GRaNDe) and symmetric degree normalization.

GRaNDe adds to each node's centrality degree a neighborhood penalty: the mean,
over the closed neighborhood, of the inverse Gaussian similarity between the
node's representation and each neighbor's. Distances are min-max normalized
over every stored pair of the propagator, self pairs included.
"""

from dataclasses import dataclass

import numpy as np

from grande import kernels
from grande.errors import DimensionError, InvariantError

CENTRALITY = "centrality"
GRANDE = "grande"


@dataclass
class DegreeVector:
    values: np.ndarray
    kind: str = CENTRALITY
    sigma: float = None

    @property
    def n(self):
        return len(self.values)


@dataclass
class EdgeDistanceTable:
    """Raw and normalized distances aligned with a propagator's stored entries."""

    indptr: np.ndarray
    indices: np.ndarray
    raw: np.ndarray
    normalized: np.ndarray


def degree_centrality(p):
    return DegreeVector(np.diff(p.indptr).astype(np.float64), CENTRALITY)


def compute_edge_distances(p, h):
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != p.n:
        raise DimensionError(f"representation has shape {h.shape}, propagator n={p.n}")
    raw = kernels.edge_distances(p.indptr, p.indices, h)
    lo, hi = raw.min(), raw.max()
    if hi > lo:
        normalized = (raw - lo) / (hi - lo)
    else:
        normalized = np.zeros_like(raw)
    return EdgeDistanceTable(p.indptr, p.indices, raw, normalized)


def gaussian_kernel(rho_norm, sigma):
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    rho_norm = np.asarray(rho_norm, dtype=np.float64)
    return np.exp(-(rho_norm * rho_norm) / sigma)


def neighborhood_penalty(table, deg_ctr, sigma):
    """Mean inverse Gaussian similarity over each node's closed neighborhood.

    Each value lies in ``[1, exp(1/sigma)]``.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    counts = np.diff(table.indptr)
    if not np.array_equal(counts, deg_ctr.values):
        raise DimensionError("distance table and centrality degrees disagree")
    return kernels.inverse_kernel_means(table.indptr, table.normalized, sigma)


def grande_degree(deg_ctr, penalty, sigma=None):
    penalty = np.asarray(penalty, dtype=np.float64)
    if penalty.shape != deg_ctr.values.shape:
        raise DimensionError("penalty and degree vectors differ in length")
    return DegreeVector(deg_ctr.values + penalty, GRANDE, sigma)


def grande_degrees_for(p, h, sigma, deg_ctr=None):
    """Convenience: GRaNDe degrees of propagator ``p`` under representation ``h``."""
    if deg_ctr is None:
        deg_ctr = degree_centrality(p)
    table = compute_edge_distances(p, h)
    return grande_degree(deg_ctr, neighborhood_penalty(table, deg_ctr, sigma), sigma)


def normalize_adjacency(p, deg):
    """Replace every stored value (i, j) by ``1 / sqrt(deg[i] * deg[j])``."""
    values = np.asarray(deg.values if isinstance(deg, DegreeVector) else deg,
                        dtype=np.float64)
    if values.shape != (p.n,):
        raise DimensionError(f"degree vector length {values.shape} != n={p.n}")
    if not np.all(values > 0):
        raise InvariantError("degrees must be strictly positive")
    return p.with_values(1.0 / np.sqrt(values[p.row_ids()] * values[p.indices]))
