"""Diffusion GNNs with Gaussian rank-based neighborhood degree (GRaNDe) normalization."""

from grande.degree import (
    DegreeVector,
    EdgeDistanceTable,
    compute_edge_distances,
    degree_centrality,
    gaussian_kernel,
    grande_degree,
    grande_degrees_for,
    neighborhood_penalty,
    normalize_adjacency,
)
from grande.errors import (
    DimensionError,
    GrandeError,
    InvariantError,
    ParseError,
    TrainingDivergenceError,
)
from grande.graph import (
    NeighborGraph,
    RankedLists,
    build_reciprocal_graph,
    compute_ranked_lists,
    to_propagator_with_self_loops,
)
from grande.harness import (
    FoldPlan,
    MetricsReport,
    accuracy,
    generate_blobs,
    make_folds,
    run_experiment,
    sigma_sweep,
)
from grande.kernels import BACKEND
from grande.models import AppnpModel, SgcModel, TrainConfig, predict, train
from grande.tensor import ParameterBlock, SparsePropagator

__version__ = "0.1.0"
