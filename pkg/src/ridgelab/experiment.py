"""Experiment harness: risk sweeps, verification report, delimited output.

A run builds the ridge solution once, then for every repetition and sample
count draws node sets from the optimized distribution (and from the uniform
distribution over all p**(D+1) nodes as the random-features baseline), trains
each subnetwork by least squares, and records the achieved empirical risk.

Per-run randomness is derived from the master seed by a documented splitting
rule: the seed sequence for a run is (master_seed, repetition, n, method
code), so results are reproducible per run regardless of execution order.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import lottery, qsim, transforms, zp_core
from .errors import ConfigError, TooLargeForDense

_METHOD_CODES = {"optimized": 0, "uniform": 1}

RUNS_HEADER = ["n", "method", "repetition", "risk", "nodes_used", "seed"]
SUMMARY_HEADER = ["n", "method", "mean_risk", "std_risk"]


# ---------------------------------------------------------------------------
# Bundled profiles and targets
# ---------------------------------------------------------------------------


def ramp_profile(p: int) -> np.ndarray:
    """Rectified ramp: x on the lower half of Z_p, zero on the upper half."""
    x = np.arange(p, dtype=np.float64)
    return np.where(x <= (p - 1) // 2, x, 0.0)


def tanh_profile(p: int, gain: float = 10.0) -> np.ndarray:
    """Saturating profile tanh(gain * x / p) on Z_p."""
    x = np.arange(p, dtype=np.float64)
    return np.tanh(gain * x / p)


def sine_target(p: int) -> np.ndarray:
    """Two-period sine sin(4 pi x / p), scaled to unit l2 norm."""
    x = np.arange(p, dtype=np.float64)
    f = np.sin(4.0 * np.pi * x / p)
    return f / np.linalg.norm(f)


def tanh_target(p: int, gain: float = 10.0) -> np.ndarray:
    """Saturating target tanh(gain * x / p), scaled to unit l2 norm."""
    f = tanh_profile(p, gain)
    return f / np.linalg.norm(f)


def raw_profile(name: str, p: int) -> np.ndarray:
    """Resolve an activation/ridgelet enum or file: path to a raw profile."""
    if name == "ramp-relu":
        return ramp_profile(p)
    if name == "tanh10":
        return tanh_profile(p)
    if name.startswith("file:"):
        file_p, file_d, values = transforms.load_values_csv(name[5:])
        if file_p != p or file_d != 1:
            raise ConfigError("activation", f"{name[5:]} is not a length-{p} profile")
        return transforms.ensure_real(values, what="activation profile")
    raise ConfigError("activation", f"unknown activation {name!r}")


def build_pair(name: str, p: int, ridgelet: str | None = None) -> transforms.ActivationPair:
    g_raw = raw_profile(name, p)
    r_raw = raw_profile(ridgelet, p) if ridgelet else None
    return transforms.ActivationPair.build(g_raw, r_raw)


def build_data(cfg: "ExperimentConfig") -> lottery.EmpiricalData:
    """Empirical data for the configured target.

    Bundled targets enumerate one example per grid point, which makes the
    empirical distribution exactly uniform; file targets are ingested from a
    dataset CSV with header x0,...,x{D-1},y.
    """
    if cfg.target.startswith("file:"):
        return lottery.load_dataset_csv(cfg.target[5:], cfg.p, cfg.d)
    if cfg.d != 1:
        raise ConfigError("target", f"target {cfg.target!r} is defined for d = 1 only")
    if cfg.target == "sine4pi":
        f = sine_target(cfg.p)
    elif cfg.target == "tanh-target":
        f = tanh_target(cfg.p)
    else:
        raise ConfigError("target", f"unknown target {cfg.target!r}")
    rows = [((x,), float(f[x])) for x in range(cfg.p)]
    return lottery.ingest_dataset(rows, cfg.p, cfg.d)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """All scalars of a risk-sweep run; defaults reproduce the bundled study."""

    p: int = 127
    d: int = 1
    target: str = "sine4pi"
    activation: str = "ramp-relu"
    lam: float = 1e-4
    big_delta: float = 5.5e-5
    epsilon: float = 5e-2
    delta_fail: float = 0.05
    alpha: float = 4e21
    beta: float = 5.0
    n_grid: tuple = tuple(range(4, 121, 4))
    repetitions: int = 20
    seed: int = 0
    sampler: str = "alias"
    baseline: str = "uniform"

    def validate(self) -> "ExperimentConfig":
        if not zp_core.is_prime(self.p):
            raise ConfigError("p", f"{self.p} is not prime")
        if self.d < 1:
            raise ConfigError("d", "dimension must be at least 1")
        for key in ("lam", "big_delta", "epsilon", "alpha", "beta"):
            if float(getattr(self, key)) <= 0:
                raise ConfigError(key, "must be positive")
        if not 0 < self.delta_fail < 1:
            raise ConfigError("delta_fail", "must lie in (0, 1)")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(n <= 0 for n in grid):
            raise ConfigError("n_grid", "sample counts must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid", "sample counts must be strictly increasing")
        if self.repetitions < 1:
            raise ConfigError("repetitions", "need at least one repetition")
        if self.sampler not in ("alias", "rejection"):
            raise ConfigError("sampler", f"unknown sampler {self.sampler!r}")
        if self.baseline not in ("uniform", "none"):
            raise ConfigError("baseline", f"unknown baseline {self.baseline!r}")
        if not (self.target.startswith("file:") or self.target in ("sine4pi", "tanh-target")):
            raise ConfigError("target", f"unknown target {self.target!r}")
        if not self.target.startswith("file:") and self.d != 1:
            raise ConfigError("target", f"target {self.target!r} is defined for d = 1 only")
        if not (self.activation.startswith("file:") or self.activation in ("ramp-relu", "tanh10")):
            raise ConfigError("activation", f"unknown activation {self.activation!r}")
        return replace(self, n_grid=grid)

    @property
    def methods(self) -> tuple:
        return ("optimized",) if self.baseline == "none" else ("optimized", "uniform")


@dataclass
class RunRecord:
    """One trained subnetwork: sweep position, achieved risk, provenance."""

    n: int
    method: str
    repetition: int
    risk: float
    nodes_used: int
    seed: int


@dataclass
class SummaryRow:
    n: int
    method: str
    mean_risk: float
    std_risk: float


# ---------------------------------------------------------------------------
# The sweep
# ---------------------------------------------------------------------------


def _run_seed(master: int, repetition: int, n: int, method: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        [int(master), int(repetition), int(n), _METHOD_CODES[method]]
    )


def summarize(records) -> list:
    """Mean and unbiased standard deviation per (n, method).

    With a single repetition the unbiased deviation is undefined and is
    reported as 0.0.
    """
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.n, rec.method), []).append(rec.risk)
    rows = []
    for (n, method) in sorted(groups, key=lambda k: (k[0], _METHOD_CODES[k[1]])):
        risks = np.asarray(groups[(n, method)], dtype=np.float64)
        std = float(np.std(risks, ddof=1)) if risks.size > 1 else 0.0
        rows.append(SummaryRow(n, method, float(risks.mean()), std))
    return rows


def run_experiment(cfg: ExperimentConfig):
    """Run the full sweep; returns (records, summary, distribution).

    Deterministic for a given configuration and seed.  The returned
    distribution is the materialized optimized sampling distribution, kept
    for the report output.
    """
    cfg = cfg.validate()
    pair = build_pair(cfg.activation, cfg.p)
    data = build_data(cfg)
    path = "fast" if pair.self_paired else "generic"
    sol = lottery.solve_ridge(data, pair, cfg.lam, path=path)
    dist = lottery.optimized_distribution(sol, cfg.big_delta)
    node_count = cfg.p ** (cfg.d + 1)
    uniform = np.full(node_count, 1.0 / node_count)

    records = []
    for rep in range(cfg.repetitions):
        for n in cfg.n_grid:
            for method in cfg.methods:
                seq = _run_seed(cfg.seed, rep, n, method)
                logged = int(seq.generate_state(1)[0])
                probs = dist.probs if method == "optimized" else uniform
                draws = lottery.sample_indices(probs, n, seq, backend=cfg.sampler)
                nodes = {
                    zp_core.coords_from_linear(int(i), cfg.p, cfg.d + 1)
                    for i in set(draws.tolist())
                }
                net = lottery.train_subnetwork(data, pair, nodes)
                records.append(
                    RunRecord(
                        n=n,
                        method=method,
                        repetition=rep,
                        risk=net.risk,
                        nodes_used=len(nodes),
                        seed=logged,
                    )
                )
    return records, summarize(records), dist


# ---------------------------------------------------------------------------
# Report output
# ---------------------------------------------------------------------------


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def emit_outputs(records, summary, out_dir, dist=None, figures: bool = True) -> list:
    """Write runs.csv, summary.csv, plotdata.csv, distribution.csv, figures.

    Floats are written with repr so identical runs produce byte-identical
    files.  Returns the list of written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    runs_path = os.path.join(out_dir, "runs.csv")
    _write_csv(
        runs_path,
        RUNS_HEADER,
        [
            [r.n, r.method, r.repetition, repr(r.risk), r.nodes_used, r.seed]
            for r in records
        ],
    )
    written.append(runs_path)

    summary_path = os.path.join(out_dir, "summary.csv")
    _write_csv(
        summary_path,
        SUMMARY_HEADER,
        [[s.n, s.method, repr(s.mean_risk), repr(s.std_risk)] for s in summary],
    )
    written.append(summary_path)

    methods = sorted({s.method for s in summary}, key=_METHOD_CODES.get)
    by_key = {(s.n, s.method): s for s in summary}
    plot_path = os.path.join(out_dir, "plotdata.csv")
    header = ["n"]
    for m in methods:
        header += [f"{m}_mean", f"{m}_std"]
    plot_rows = []
    for n in sorted({s.n for s in summary}):
        row = [n]
        for m in methods:
            s = by_key.get((n, m))
            row += [repr(s.mean_risk), repr(s.std_risk)] if s else ["", ""]
        plot_rows.append(row)
    _write_csv(plot_path, header, plot_rows)
    written.append(plot_path)

    if dist is not None:
        dist_path = os.path.join(out_dir, "distribution.csv")
        transforms.save_values_csv(dist_path, dist.p, dist.d, dist.probs)
        written.append(dist_path)

    if figures:
        from . import plots

        if summary:
            fig_path = os.path.join(out_dir, "risk_curves.png")
            plots.render_risk_curves(summary, fig_path)
            written.append(fig_path)
        if dist is not None:
            heat_path = os.path.join(out_dir, "distribution.png")
            plots.render_distribution(dist.probs, dist.p, dist.d, heat_path)
            written.append(heat_path)
    return written


def read_runs_csv(path) -> list:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(
                RunRecord(
                    n=int(row["n"]),
                    method=row["method"],
                    repetition=int(row["repetition"]),
                    risk=float(row["risk"]),
                    nodes_used=int(row["nodes_used"]),
                    seed=int(row["seed"]),
                )
            )
    return records


# ---------------------------------------------------------------------------
# Verification sweep
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    p: int
    d: int
    name: str
    value: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.value <= self.tolerance


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list:
        out = []
        for c in self.checks:
            flag = "ok" if c.ok else "FAIL"
            out.append(
                f"p={c.p} d={c.d} {c.name:<22s} max residual {c.value:.3e} "
                f"(tol {c.tolerance:.0e}) {flag}"
            )
        out.append(f"total time {self.elapsed:.2f} s")
        return out


def verify_all(p_list, d_list, seed: int = 0) -> VerifyReport:
    """Cross-check the composed identities on a sweep of (p, d) grids.

    Runs reconstruction, the slice identity, isometry, the register pipeline
    against its dense oracle, fast-versus-generic ridge agreement, and the
    two routes to the optimized distribution.  Primality and size guards run
    before any computation.
    """
    for p in p_list:
        zp_core.require_prime(p)
    cases = [
        (int(p), int(d))
        for p in p_list
        for d in d_list
        if int(p) ** (int(d) + 1) <= 100_000
    ]
    if not cases:
        raise ValueError("no (p, d) case within the p**(d+1) <= 1e5 budget")
    rng = np.random.default_rng(seed)
    report = VerifyReport()
    start = time.perf_counter()
    for p, d in cases:
        ramp = transforms.ActivationPair.build(ramp_profile(p))
        mixed = transforms.ActivationPair.build(ramp_profile(p), tanh_profile(p))

        recon = 0.0
        for pair in (ramp, mixed):
            for _ in range(5):
                f = transforms.GridFunction(p, d, rng.standard_normal(p**d))
                coeffs = transforms.ridgelet_analyze(f, pair)
                back = transforms.ridgelet_synthesize(coeffs, pair).values / pair.c_gr
                recon = max(
                    recon,
                    float(np.max(np.abs(back - f.values)) / np.max(np.abs(f.values))),
                )
        report.checks.append(CheckResult(p, d, "reconstruction", recon, 1e-9))

        slice_res = 0.0
        for _ in range(3):
            f = transforms.GridFunction(p, d, rng.standard_normal(p**d))
            slice_res = max(slice_res, transforms.fourier_slice_check(f, ramp))
        report.checks.append(CheckResult(p, d, "slice-identity", slice_res, 1e-9))

        op = qsim.build_r_dense(ramp, d)
        iso = 0.0
        for _ in range(5):
            f = rng.standard_normal(p**d)
            iso = max(iso, abs(np.linalg.norm(op.apply(f)) / np.linalg.norm(f) - 1.0))
        report.checks.append(CheckResult(p, d, "isometry-norm", iso, 1e-10))
        # Gram check is O(p**(3d+1)) flops with a p**d square result; skip it
        # when either would dominate the budget.
        gram_ok = (
            p ** (3 * d + 1) <= 2_000_000_000
            and (p**d) ** 2 <= zp_core.max_dense_entries()
        )
        if gram_ok:
            gram_dev = float(
                np.max(np.abs(op.matrix.T @ op.matrix - np.eye(p**d)))
            )
            report.checks.append(CheckResult(p, d, "isometry-gram", gram_dev, 1e-10))

        qrt_dev = 0.0
        for _ in range(5):
            psi = qsim.QuditState.from_values(
                p, d, rng.standard_normal(p**d) + 1j * rng.standard_normal(p**d)
            )
            out = qsim.qrt_apply(psi, ramp)
            qrt_dev = max(qrt_dev, float(np.linalg.norm(out.amps - op.apply(psi.amps))))
        report.checks.append(CheckResult(p, d, "pipeline-vs-dense", qrt_dev, 1e-10))

        f = rng.standard_normal(p**d)
        f /= np.linalg.norm(f)
        rows = [(zp_core.coords_from_linear(i, p, d), float(f[i])) for i in range(p**d)]
        data = lottery.ingest_dataset(rows, p, d)
        fast = lottery.solve_ridge(data, ramp, 1e-2, path="fast")
        try:
            generic = lottery.solve_ridge(data, ramp, 1e-2, path="generic")
        except TooLargeForDense:
            generic = None
        if generic is not None:
            scale = float(np.max(np.abs(generic.u.values)))
            ridge_dev = float(
                np.max(np.abs(fast.u.values - generic.u.values)) / scale
            )
            report.checks.append(CheckResult(p, d, "ridge-fast-vs-dense", ridge_dev, 1e-8))

        dist_a = lottery.optimized_distribution(fast, 1e-4)
        dist_b = lottery.optimized_distribution_via_state(fast, 1e-4)
        dist_dev = float(np.max(np.abs(dist_a.probs - dist_b.probs)))
        report.checks.append(CheckResult(p, d, "distribution-routes", dist_dev, 1e-12))

        stage_dev = 0.0 if qsim.qrt_stage_count(d) == d + 3 else 1.0
        report.checks.append(CheckResult(p, d, "stage-count", stage_dev, 0.5))
    report.elapsed = time.perf_counter() - start
    return report
