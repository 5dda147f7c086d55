"""SGC and APPNP with pluggable degree normalization, plus the training loop."""

from dataclasses import dataclass, field

import numpy as np

from grande import tensor as T
from grande.degree import (
    CENTRALITY,
    GRANDE,
    degree_centrality,
    grande_degrees_for,
    normalize_adjacency,
)
from grande.errors import DimensionError, TrainingDivergenceError
from grande.graph import to_propagator_with_self_loops

SGC = "sgc"
APPNP = "appnp"
DEFAULT_K = {SGC: 2, APPNP: 10}


@dataclass
class TrainConfig:
    model: str = SGC
    epochs: int = 200
    lr: float = 1e-3
    degree_kind: str = CENTRALITY
    sigma: float = 0.2
    seed: int = 0
    k_steps: int = None
    alpha: float = 0.1
    hidden: int = 256
    dropout: float = 0.5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.model not in DEFAULT_K:
            raise ValueError(f"unknown model {self.model!r}")
        if self.k_steps is None:
            self.k_steps = DEFAULT_K[self.model]
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.lr < 0:
            raise ValueError("lr must be non-negative")
        if self.degree_kind not in (CENTRALITY, GRANDE):
            raise ValueError(f"unknown degree kind {self.degree_kind!r}")
        if self.degree_kind == GRANDE and not self.sigma > 0:
            raise ValueError("sigma must be positive for GRaNDe degrees")
        if self.k_steps < 0:
            raise ValueError("k_steps must be >= 0")
        if self.model == APPNP and not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")

    def as_dict(self):
        return dict(self.__dict__)


def _check_rows(x, a_hat):
    if x.shape[0] != a_hat.n:
        raise DimensionError(f"features have {x.shape[0]} rows, propagator n={a_hat.n}")


def diffuse(a_hat, h, k_steps):
    for _ in range(k_steps):
        h = T.spmm(a_hat, h)
    return h


class SgcModel:
    """Linear map followed by ``k_steps`` multiplications by the propagator."""

    def __init__(self, d, c, k_steps=2, rng=None, w=None):
        if w is None:
            w = T.glorot_init(d, c, rng if rng is not None else np.random.default_rng())
        self.w = T.ParameterBlock(w)
        self.k_steps = k_steps

    def params(self):
        return [self.w]

    def representation(self, x):
        """H(0) = XW, the input to diffusion."""
        return T.matmul(x, self.w.value)

    def forward(self, x, a_hat, training=False, rng=None):
        _check_rows(x, a_hat)
        z = diffuse(a_hat, self.representation(x), self.k_steps)
        return z, (x, a_hat)

    def backward(self, cache, grad_z):
        x, a_hat = cache
        # the propagator is symmetric, so its adjoint is another forward diffusion
        g = T.matmul(x.T, diffuse(a_hat, grad_z, self.k_steps))
        self.w.grad += g
        return [g]


class AppnpModel:
    """Two-layer perceptron (dropout, linear, relu, dropout, linear) then
    personalized-PageRank propagation. ``hidden=0`` gives a single linear map."""

    def __init__(self, d, c, hidden=256, k_steps=10, alpha=0.1, dropout=0.5,
                 rng=None, weights=None):
        rng = rng if rng is not None else np.random.default_rng()
        if weights is None:
            if hidden:
                weights = [T.glorot_init(d, hidden, rng), T.glorot_init(hidden, c, rng)]
            else:
                weights = [T.glorot_init(d, c, rng)]
        self.layers = [T.ParameterBlock(w) for w in weights]
        self.k_steps = k_steps
        self.alpha = alpha
        self.dropout_rate = dropout

    @property
    def w1(self):
        return self.layers[0]

    @property
    def w2(self):
        return self.layers[1] if len(self.layers) > 1 else None

    def params(self):
        return list(self.layers)

    def _mlp(self, x, training, rng):
        steps = []
        h = x
        for li, layer in enumerate(self.layers):
            if li > 0:
                h, active = T.relu_forward(h)
                steps.append(("relu", active))
            h, kept = T.dropout_apply(h, self.dropout_rate, rng, training)
            steps.append(("dropout", kept))
            steps.append(("linear", li, h))
            h = T.matmul(h, layer.value)
        return h, steps

    def representation(self, x):
        """H(0) in evaluation mode (no dropout)."""
        return self._mlp(x, False, None)[0]

    def propagate(self, a_hat, h0):
        # (1-a) A h + a h0 written as h0 + (1-a)(A h - h0): exact fixed point when A h == h0
        h = h0
        for _ in range(self.k_steps):
            h = h0 + (1.0 - self.alpha) * (T.spmm(a_hat, h) - h0)
        return h

    def forward(self, x, a_hat, training=False, rng=None):
        _check_rows(x, a_hat)
        if training and self.dropout_rate > 0 and rng is None:
            raise ValueError("training-mode dropout needs an rng")
        h0, steps = self._mlp(x, training, rng)
        return self.propagate(a_hat, h0), (a_hat, steps)

    def backward(self, cache, grad_z):
        a_hat, steps = cache
        g = grad_z
        g_h0 = np.zeros_like(grad_z)
        for _ in range(self.k_steps):
            g_h0 += self.alpha * g
            g = (1.0 - self.alpha) * T.spmm(a_hat, g)
        g = g_h0 + g
        grads = [None] * len(self.layers)
        for step in reversed(steps):
            if step[0] == "linear":
                _, li, inp = step
                grads[li] = T.matmul(inp.T, g)
                g = T.matmul(g, self.layers[li].value.T)
            elif step[0] == "relu":
                g = T.relu_backward(g, step[1])
            else:
                g = T.dropout_backward(g, step[1], self.dropout_rate)
        for layer, gw in zip(self.layers, grads):
            layer.grad += gw
        return grads


def sgc_forward(m, x, a_hat):
    return m.forward(x, a_hat)


def sgc_backward(m, cache, grad_z):
    return m.backward(cache, grad_z)[0]


def appnp_forward(m, x, a_hat, training=False, rng=None):
    return m.forward(x, a_hat, training, rng)


def appnp_backward(m, cache, grad_z):
    return m.backward(cache, grad_z)


def build_model(cfg, d, c, rng):
    if cfg.model == SGC:
        return SgcModel(d, c, cfg.k_steps, rng)
    return AppnpModel(d, c, cfg.hidden, cfg.k_steps, cfg.alpha, cfg.dropout, rng)


def diffusion_operator(model, x, prop, cfg, deg_ctr=None, fixed_degrees=None):
    """Normalized propagator for the model's current weights."""
    if fixed_degrees is not None:
        return normalize_adjacency(prop, fixed_degrees)
    if cfg.degree_kind == GRANDE:
        deg = grande_degrees_for(prop, model.representation(x), cfg.sigma, deg_ctr)
        return normalize_adjacency(prop, deg)
    return normalize_adjacency(prop, deg_ctr if deg_ctr is not None else degree_centrality(prop))


@dataclass
class TrainResult:
    model: object
    losses: list
    a_hat: T.SparsePropagator = field(repr=False)

    def __iter__(self):
        return iter((self.model, self.losses))


def train(model, x, graph, labels, train_mask, cfg, fixed_degrees=None):
    """Full-graph training for ``cfg.epochs`` Adam steps.

    Under GRaNDe the degrees, and hence the propagator, are rebuilt from the
    current weights at the start of every epoch. ``fixed_degrees`` bypasses
    both degree rules with a constant vector. Unpacks as ``(model, losses)``;
    ``a_hat`` is the propagator matching the final weights.
    """
    x = np.asarray(x, dtype=np.float64)
    train_mask = np.asarray(train_mask, dtype=np.int64)
    if train_mask.size == 0:
        raise ValueError("training mask is empty")
    prop = graph if isinstance(graph, T.SparsePropagator) else to_propagator_with_self_loops(graph)
    deg_ctr = degree_centrality(prop)
    rng = np.random.default_rng(cfg.seed)
    dynamic = fixed_degrees is None and cfg.degree_kind == GRANDE
    a_hat = None if dynamic else diffusion_operator(model, x, prop, cfg, deg_ctr, fixed_degrees)
    losses = []
    for epoch in range(1, cfg.epochs + 1):
        if dynamic:
            a_hat = diffusion_operator(model, x, prop, cfg, deg_ctr)
        for p in model.params():
            p.zero_grad()
        z, cache = model.forward(x, a_hat, training=True, rng=rng)
        loss, grad_z = T.cross_entropy_masked(z, labels, train_mask)
        if not np.isfinite(loss):
            raise TrainingDivergenceError(epoch, loss)
        model.backward(cache, grad_z)
        for p in model.params():
            T.adam_step(p, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
        losses.append(loss)
    if dynamic:
        a_hat = diffusion_operator(model, x, prop, cfg, deg_ctr)
    return TrainResult(model, losses, a_hat)


def predict(model, x, a_hat):
    z, _ = model.forward(np.asarray(x, dtype=np.float64), a_hat, training=False)
    return np.argmax(z, axis=1)
