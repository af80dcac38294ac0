"""Node sampling and subnetwork training on top of the ridge regression.

The workflow mirrors a lottery-ticket search over the complete dictionary of
ridge functions g((a.x - b) mod p):

1. ingest labeled examples into an empirical distribution and label average,
2. solve the ridge regression for the rescaled weight table u over all
   p**(D+1) candidate nodes,
3. form the optimized sampling distribution
   prob(a, b) = |u(a,b)|^2 / (|u(a,b)|^2 + Delta) / Z,
4. draw node parameters, deduplicate them into a set, and
5. train the weights of the sampled subnetwork by weighted least squares.

The ridge solution uses the closed form u = R (P_hat + lambda I)^{-1} y_bar,
which follows from the orthonormal columns of the dense ridge operator when
the ridgelet equals the activation; a dense linear-system solve of the same
normal equations is kept as the generic path and as the oracle for the fast
one.  The regression objective is

    J(u) = sum_x p_hat(x) |f(x) - net_u(x)|^2 + lambda * ||u||_2^2,
    net_u(x) = p**(-D/2) * sum_{a,b} u(a,b) g((a.x - b) mod p),

and the returned u is stationary for it (gradient below 1e-8 in sup norm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import zp_core
from .errors import (
    DegenerateDistribution,
    DimensionError,
    InconsistentLabels,
    InvalidHyperparameter,
    NoData,
    NoNodes,
    TooLargeForDense,
)
from .transforms import (
    ActivationPair,
    GridFunction,
    RidgeletCoeffs,
    _slice_apply,
    ensure_real,
    ridgelet_synthesize,
)

#: Duplicate inputs may disagree in their labels by at most this much.
LABEL_TOL = 1e-9
#: Ridge jitter added to the Gram matrix when training subnetworks.
GRAM_JITTER = 1e-10


# ---------------------------------------------------------------------------
# Dataset ingestion
# ---------------------------------------------------------------------------


@dataclass
class EmpiricalData:
    """Empirical input distribution and label average on Z_p^D.

    ``p_hat`` holds the fraction of examples at each grid point and
    ``y_bar`` the per-point label sum divided by the total example count,
    so y_bar = p_hat * f wherever the labels are consistent.
    """

    p: int
    d: int
    p_hat: GridFunction
    y_bar: GridFunction
    m: int

    def __post_init__(self):
        self.p = zp_core.require_prime(self.p)
        self.d = int(self.d)
        for name, grid in (("p_hat", self.p_hat), ("y_bar", self.y_bar)):
            if grid.p != self.p or grid.d != self.d:
                raise DimensionError(f"{name} does not live on Z_{self.p}^{self.d}")
        weights = ensure_real(self.p_hat.values, what="p_hat")
        if np.any(weights < -1e-15):
            raise ValueError("p_hat has negative entries")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"p_hat sums to {weights.sum()!r}, not 1")
        labels = self.y_bar.values
        if np.any(np.abs(labels[weights == 0]) > 0):
            raise ValueError("y_bar must vanish outside the support of p_hat")

    @property
    def weights(self) -> np.ndarray:
        return ensure_real(self.p_hat.values, what="p_hat")

    @property
    def target(self) -> np.ndarray:
        """Label values f on the support of p_hat, zero elsewhere."""
        w = self.weights
        y = ensure_real(self.y_bar.values, what="y_bar")
        out = np.zeros_like(y)
        np.divide(y, w, out=out, where=w > 0)
        return out


def ingest_dataset(rows, p: int, d: int) -> EmpiricalData:
    """Aggregate (x, y) examples into an :class:`EmpiricalData`.

    ``x`` may be an integer (d = 1) or a length-d coordinate sequence.
    Duplicate inputs must agree in their labels to within 1e-9.
    """
    p = zp_core.require_prime(p)
    d = int(d)
    rows = list(rows)
    if not rows:
        raise NoData("dataset is empty")
    size = p**d
    counts = np.zeros(size, dtype=np.int64)
    sums = np.zeros(size, dtype=np.float64)
    lo = np.full(size, np.inf)
    hi = np.full(size, -np.inf)
    for x, y in rows:
        coords = np.atleast_1d(np.asarray(x, dtype=np.int64))
        if coords.shape != (d,):
            raise DimensionError(f"input {x!r} is not a point of Z_{p}^{d}")
        if np.any((coords < 0) | (coords >= p)):
            raise ValueError(f"input {x!r} outside Z_{p}^{d}")
        idx = zp_core.linear_index(coords, p)
        y = float(y)
        counts[idx] += 1
        sums[idx] += y
        lo[idx] = min(lo[idx], y)
        hi[idx] = max(hi[idx], y)
    seen = counts > 0
    spread = hi[seen] - lo[seen]
    if np.any(spread > LABEL_TOL):
        worst = int(np.flatnonzero(seen)[np.argmax(spread)])
        raise InconsistentLabels(
            f"labels at linear index {worst} differ by {spread.max():.3e}"
        )
    m = len(rows)
    p_hat = GridFunction(p, d, counts / m)
    y_bar = GridFunction(p, d, sums / m)
    return EmpiricalData(p, d, p_hat, y_bar, m)


def load_dataset_csv(path, p: int, d: int) -> EmpiricalData:
    """Read a dataset file with header x0,...,x{D-1},y."""
    expected = [f"x{k}" for k in range(d)] + ["y"]
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().replace(" ", "")
        if header.split(",") != expected:
            raise ValueError(f"{path}: expected header {','.join(expected)}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            rows.append(([int(c) for c in parts[:d]], float(parts[d])))
    return ingest_dataset(rows, p, d)


# ---------------------------------------------------------------------------
# Ridge regression over the full node dictionary
# ---------------------------------------------------------------------------


@dataclass
class RidgeSolution:
    """Rescaled node weights u with the hyperparameter and diagnostics.

    ``gamma`` is the squared l2 norm of u; ``objective`` the value of the
    regression objective J at the solution.
    """

    u: RidgeletCoeffs
    lam: float
    gamma: float
    objective: float

    def __post_init__(self):
        norm_sq = float(np.vdot(self.u.values, self.u.values).real)
        if abs(self.gamma - norm_sq) > 1e-10 * max(1.0, norm_sq):
            raise ValueError(f"gamma {self.gamma!r} != ||u||^2 {norm_sq!r}")


def _activation_operator(pair: ActivationPair, d: int) -> np.ndarray:
    """Dense isometry built from the activation profile g."""
    table = zp_core.ridge_index_table(pair.p, d)
    return pair.p ** (-d / 2.0) * pair.g[table]


def predict_solution(sol: RidgeSolution, pair: ActivationPair) -> np.ndarray:
    """Network output net_u on the whole grid for a ridge solution."""
    return ridgelet_synthesize(sol.u, pair).values


def ridge_objective(u_values, data: EmpiricalData, pair: ActivationPair, lam: float) -> float:
    """Objective J(u): weighted squared error plus lambda * ||u||^2."""
    u = RidgeletCoeffs(data.p, data.d, np.asarray(u_values, dtype=np.complex128))
    pred = ridgelet_synthesize(u, pair).values
    resid = data.target - pred
    fit = float(np.sum(data.weights * np.abs(resid) ** 2))
    return fit + float(lam) * float(np.vdot(u.values, u.values).real)


def ridge_gradient(u_values, data: EmpiricalData, pair: ActivationPair, lam: float) -> np.ndarray:
    """Gradient of :func:`ridge_objective` with respect to u (complex form)."""
    u = RidgeletCoeffs(data.p, data.d, np.asarray(u_values, dtype=np.complex128))
    pred = ridgelet_synthesize(u, pair).values
    weighted = data.weights * (pred - data.target)
    back = _slice_apply(weighted.astype(np.complex128), data.p, data.d, pair.g_hat)
    return 2.0 * (back + lam * u.values)


def solve_ridge(
    data: EmpiricalData, pair: ActivationPair, lam: float, path: str = "fast"
) -> RidgeSolution:
    """Minimize J over the full node dictionary.

    fast
        Exploits the orthonormal columns of the ridge operator:
        u = analyze[h] with h(x) = p_hat(x) f(x) / (p_hat(x) + lambda)
        applied elementwise.  Requires the pair to have r = g.
    generic
        Forms the p**(d+1) x p**(d+1) normal-equation system densely and
        solves it.  Works for r != g as well (the solution depends on the
        activation only) but is size-guarded.

    Both paths agree to 1e-8 relative wherever both run.
    """
    lam = float(lam)
    if lam <= 0:
        raise InvalidHyperparameter(f"lambda must be positive, got {lam!r}")
    if data.p != pair.p:
        raise DimensionError(f"modulus mismatch: data {data.p}, pair {pair.p}")
    p, d = data.p, data.d
    if path == "fast":
        if not pair.self_paired:
            raise ValueError("fast path requires the ridgelet to equal the activation")
        h = data.y_bar.values / (data.weights + lam)
        u_values = _slice_apply(h, p, d, pair.r_hat)
    elif path == "generic":
        rows = p ** (d + 1)
        if rows * rows > zp_core.max_dense_entries():
            raise TooLargeForDense(
                f"generic ridge solve needs a {rows}x{rows} system; "
                "use the fast path or raise RIDGELAB_DENSE_LIMIT"
            )
        op = _activation_operator(pair, d)
        y = ensure_real(data.y_bar.values, what="y_bar")
        system = (op * data.weights) @ op.T
        system[np.diag_indices_from(system)] += lam
        u_values = np.linalg.solve(system, op @ y).astype(np.complex128)
    else:
        raise ValueError(f"path must be 'fast' or 'generic', got {path!r}")
    u = RidgeletCoeffs(p, d, u_values)
    gamma = float(np.vdot(u.values, u.values).real)
    objective = ridge_objective(u.values, data, pair, lam)
    return RidgeSolution(u=u, lam=lam, gamma=gamma, objective=objective)


def empirical_risk(data: EmpiricalData, pair: ActivationPair, net) -> float:
    """Weighted squared prediction error of a subnetwork or ridge solution."""
    if isinstance(net, Subnetwork):
        pred = _design_matrix(data, pair, net.nodes) @ net.weights
        resid = data.target[data.weights > 0] - pred
        return float(np.sum(data.weights[data.weights > 0] * np.abs(resid) ** 2))
    if isinstance(net, RidgeSolution):
        resid = data.target - predict_solution(net, pair)
        return float(np.sum(data.weights * np.abs(resid) ** 2))
    raise TypeError(f"cannot evaluate risk of {type(net).__name__}")


# ---------------------------------------------------------------------------
# Optimized node-sampling distribution
# ---------------------------------------------------------------------------


@dataclass
class OptimizedDistribution:
    """Sampling weights prob(a,b) = |u|^2 / (|u|^2 + Delta) / Z over nodes."""

    p: int
    d: int
    probs: np.ndarray
    delta: float
    z: float

    def __post_init__(self):
        self.probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if self.probs.shape != (self.p ** (self.d + 1),):
            raise DimensionError("distribution length differs from the node grid")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {self.probs.sum()!r}")


def optimized_distribution(sol: RidgeSolution, big_delta: float) -> OptimizedDistribution:
    """Distribution favoring nodes whose squared weight dominates Delta."""
    big_delta = float(big_delta)
    if big_delta <= 0:
        raise InvalidHyperparameter(f"Delta must be positive, got {big_delta!r}")
    w2 = np.abs(sol.u.values) ** 2
    if not np.any(w2 > 0):
        raise DegenerateDistribution("all node weights vanish")
    raw = w2 / (w2 + big_delta)
    z = float(raw.sum())
    return OptimizedDistribution(sol.u.p, sol.u.d, raw / z, big_delta, z)


def optimized_distribution_via_state(
    sol: RidgeSolution, big_delta: float, gamma: float | None = None
) -> OptimizedDistribution:
    """Same distribution computed through the amplitude form.

    Builds the amplitudes sqrt(gamma) * u / sqrt(|u|^2 + Delta), squares and
    normalizes them.  Algebraically identical to
    :func:`optimized_distribution`; the two agree elementwise to 1e-12 and
    the pair of routes is kept as a mutual check.
    """
    big_delta = float(big_delta)
    if big_delta <= 0:
        raise InvalidHyperparameter(f"Delta must be positive, got {big_delta!r}")
    gamma = sol.gamma if gamma is None else float(gamma)
    if gamma <= 0:
        raise DegenerateDistribution("gamma must be positive")
    amps = math.sqrt(gamma) * sol.u.values / np.sqrt(np.abs(sol.u.values) ** 2 + big_delta)
    mass = np.abs(amps) ** 2
    total = float(mass.sum())
    if total == 0:
        raise DegenerateDistribution("all node weights vanish")
    return OptimizedDistribution(sol.u.p, sol.u.d, mass / total, big_delta, total / gamma)


# ---------------------------------------------------------------------------
# Sample-count formulas for the decay class
# ---------------------------------------------------------------------------


@dataclass
class DecayClassParams:
    """Derived sampling parameters for targets with |u_j| <= alpha j^-(1+beta).

    ``big_delta`` is the squared closed form (alpha * (n_eps + 1)^-(1+beta))^2;
    ``big_delta_unsquared`` exposes the same expression without the final
    square.  The two differ by orders of magnitude and quoted values in the
    wild ambiguously mean either one, so both are surfaced and callers must
    choose explicitly.
    """

    alpha: float
    beta: float
    epsilon: float
    delta_fail: float
    n_eps: float
    big_delta: float
    big_delta_unsquared: float
    n_samples: int


def sampling_parameters(
    epsilon: float, delta_fail: float, alpha: float, beta: float
) -> DecayClassParams:
    """Sampling budget guaranteeing coverage of all high-weight nodes.

    With n_eps = (alpha / (beta sqrt(epsilon)))^(1/beta), returns

        big_delta = (alpha (n_eps+1)^-(1+beta))^2
        n_samples = ceil(2 (ceil(n_eps) + c) ln(ceil(n_eps)/delta)),
        c = (n_eps+1)^(2+2 beta) / ((1+2 beta) n_eps^(1+2 beta)),

    ceilings applied exactly as written.  Sampling n_samples times from the
    optimized distribution then covers every node with squared weight at
    least big_delta with probability at least 1 - delta_fail.
    """
    for key, val in (
        ("epsilon", epsilon),
        ("delta_fail", delta_fail),
        ("alpha", alpha),
        ("beta", beta),
    ):
        if float(val) <= 0:
            raise InvalidHyperparameter(f"{key} must be positive, got {val!r}")
    if not 0 < delta_fail < 1:
        raise InvalidHyperparameter(f"delta_fail must lie in (0, 1), got {delta_fail!r}")
    epsilon, delta_fail = float(epsilon), float(delta_fail)
    alpha, beta = float(alpha), float(beta)

    n_eps = (alpha / (beta * math.sqrt(epsilon))) ** (1.0 / beta)
    root = alpha * (n_eps + 1.0) ** (-(1.0 + beta))
    correction = (n_eps + 1.0) * ((n_eps + 1.0) / n_eps) ** (1.0 + 2.0 * beta)
    bulk = math.ceil(n_eps) + correction / (1.0 + 2.0 * beta)
    n_samples = math.ceil(2.0 * bulk * math.log(math.ceil(n_eps) / delta_fail))
    return DecayClassParams(
        alpha=alpha,
        beta=beta,
        epsilon=epsilon,
        delta_fail=delta_fail,
        n_eps=n_eps,
        big_delta=root**2,
        big_delta_unsquared=root,
        n_samples=int(n_samples),
    )


def high_weight_set(sol: RidgeSolution, big_delta: float) -> set:
    """Nodes (a..., b) whose squared weight reaches big_delta."""
    if float(big_delta) <= 0:
        raise InvalidHyperparameter("Delta must be positive")
    w2 = np.abs(sol.u.values) ** 2
    p, d = sol.u.p, sol.u.d
    return {
        zp_core.coords_from_linear(i, p, d + 1)
        for i in np.flatnonzero(w2 >= float(big_delta))
    }


# ---------------------------------------------------------------------------
# Node sampling
# ---------------------------------------------------------------------------


def _alias_table(probs: np.ndarray):
    # Vose construction: every cell keeps its own index with probability
    # accept[i], otherwise falls through to alias[i].
    k = probs.shape[0]
    accept = probs * k
    alias = np.arange(k, dtype=np.int64)
    small = [i for i in range(k) if accept[i] < 1.0]
    large = [i for i in range(k) if accept[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        alias[s] = l
        accept[l] -= 1.0 - accept[s]
        (small if accept[l] < 1.0 else large).append(l)
    accept[np.asarray(large + small, dtype=np.int64)] = 1.0
    return np.minimum(accept, 1.0), alias


def sample_indices(probs, n: int, seed, backend: str = "alias") -> np.ndarray:
    """n independent draws of linear node indices from ``probs``.

    ``backend="alias"`` uses an exact alias table; ``backend="rejection"``
    uses rejection sampling against a uniform proposal.  Both target the
    identical distribution and are deterministic for a given seed.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise DimensionError("probability vector must be a nonempty 1-D array")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {probs.sum()!r}")
    n = int(n)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    rng = np.random.default_rng(seed)
    k = probs.shape[0]
    if backend == "alias":
        accept, alias = _alias_table(probs)
        idx = rng.integers(0, k, size=n)
        keep = rng.random(n) < accept[idx]
        return np.where(keep, idx, alias[idx])
    if backend == "rejection":
        cap = float(probs.max())
        out = np.empty(n, dtype=np.int64)
        filled = 0
        while filled < n:
            batch = max(64, 2 * (n - filled))
            cand = rng.integers(0, k, size=batch)
            kept = cand[rng.random(batch) * cap < probs[cand]]
            take = min(n - filled, kept.shape[0])
            out[filled : filled + take] = kept[:take]
            filled += take
        return out
    raise ValueError(f"backend must be 'alias' or 'rejection', got {backend!r}")


def sample_nodes(
    dist: OptimizedDistribution, n: int, seed, backend: str = "alias"
) -> set:
    """Deduplicated set of node parameters from n independent draws."""
    draws = sample_indices(dist.probs, n, seed, backend)
    return {zp_core.coords_from_linear(int(i), dist.p, dist.d + 1) for i in set(draws.tolist())}


# ---------------------------------------------------------------------------
# Subnetwork training
# ---------------------------------------------------------------------------


@dataclass
class Subnetwork:
    """Trained sparse network: node parameters, weights, achieved risk."""

    p: int
    d: int
    nodes: tuple
    weights: np.ndarray
    risk: float


def _design_matrix(data: EmpiricalData, pair: ActivationPair, nodes) -> np.ndarray:
    support = np.flatnonzero(data.weights > 0)
    coords = zp_core.all_coords(data.p, data.d)[support]
    node_arr = np.asarray(nodes, dtype=np.int64)
    a_part = node_arr[:, : data.d]
    b_part = node_arr[:, data.d]
    phases = (coords @ a_part.T - b_part[None, :]) % data.p
    return pair.g[phases]


def train_subnetwork(data: EmpiricalData, pair: ActivationPair, nodes) -> Subnetwork:
    """Weighted least-squares fit of the node weights for a fixed node set.

    Solves the normal equations with a 1e-10 ridge jitter on the Gram matrix
    to absorb linearly dependent node draws; the sampled problem is an
    unconstrained convex quadratic, so the direct solve is exact up to that
    jitter.
    """
    nodes = sorted(set(tuple(int(c) for c in node) for node in nodes))
    if not nodes:
        raise NoNodes("subnetwork training needs at least one node")
    for node in nodes:
        if len(node) != data.d + 1 or any(not 0 <= c < data.p for c in node):
            raise ValueError(f"node {node!r} outside Z_{data.p}^{data.d + 1}")
    design = _design_matrix(data, pair, nodes)
    w = data.weights[data.weights > 0]
    y = data.target[data.weights > 0]
    gram = design.T @ (w[:, None] * design)
    gram[np.diag_indices_from(gram)] += GRAM_JITTER
    weights = np.linalg.solve(gram, design.T @ (w * y))
    resid = y - design @ weights
    risk = float(np.sum(w * resid**2))
    return Subnetwork(data.p, data.d, tuple(nodes), weights, risk)
