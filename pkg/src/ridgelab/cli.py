"""Command-line surface.

Subcommands:

experiment   run the risk sweep and write the report files
qrt-verify   compare the register pipeline against its dense oracle
verify-all   run the composed-identity checks over a (p, d) sweep
params       print the decay-class sampling parameters
transform    analyze or synthesize a grid/coefficient CSV file

Exit codes: 0 success, 1 tolerance breach, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import experiment, lottery, qsim, transforms, zp_core
from .errors import (
    ConfigError,
    InvalidHyperparameter,
    NotPrime,
    RidgelabError,
    TooLargeForDense,
)

#: Oracle deviation allowed by qrt-verify before it reports a breach.
QRT_TOL = 1e-10


def _parse_int_list(text: str) -> tuple:
    # raises ValueError so both argparse and the config-file reader can
    # translate failures into their own error paths
    return tuple(int(part) for part in text.split(",") if part.strip())


_CONFIG_FIELDS = {
    "p": int,
    "d": int,
    "target": str,
    "activation": str,
    "lam": float,
    "big_delta": float,
    "epsilon": float,
    "delta_fail": float,
    "alpha": float,
    "beta": float,
    "n_grid": _parse_int_list,
    "repetitions": int,
    "seed": int,
    "sampler": str,
    "baseline": str,
}

_KEY_ALIASES = {"lambda": "lam"}


def parse_config_file(path) -> dict:
    """Read a flat ``key = value`` file; keys mirror the experiment flags."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}", "expected key = value")
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            key = _KEY_ALIASES.get(key, key)
            if key not in _CONFIG_FIELDS:
                raise ConfigError(key, "unknown configuration key")
            try:
                values[key] = _CONFIG_FIELDS[key](val.strip())
            except ValueError as exc:
                raise ConfigError(key, f"cannot parse {val.strip()!r}") from exc
    return values


def _build_config(args) -> experiment.ExperimentConfig:
    merged = {}
    if args.config:
        merged.update(parse_config_file(args.config))
    for key in _CONFIG_FIELDS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    try:
        cfg = experiment.ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from exc
    return cfg.validate()


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def cmd_experiment(args) -> int:
    cfg = _build_config(args)
    records, summary, dist = experiment.run_experiment(cfg)
    written = experiment.emit_outputs(
        records, summary, args.out_dir, dist=dist, figures=not args.no_figures
    )
    for path in written:
        print(path)
    last_n = max(s.n for s in summary)
    for s in summary:
        if s.n == last_n:
            print(f"n={s.n} {s.method}: mean risk {s.mean_risk:.3e} (std {s.std_risk:.3e})")
    return 0


def cmd_qrt_verify(args) -> int:
    p = zp_core.require_prime(args.p)
    if args.d < 1:
        raise ConfigError("d", "dimension must be at least 1")
    pair = experiment.build_pair("ramp-relu", p)
    op = qsim.build_r_dense(pair, args.d)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        raw = rng.standard_normal(p**args.d) + 1j * rng.standard_normal(p**args.d)
        state = qsim.QuditState.from_values(p, args.d, raw)
        out = qsim.qrt_apply(state, pair)
        worst = max(worst, float(np.linalg.norm(out.amps - op.apply(state.amps))))
    print(f"max oracle deviation over {args.trials} states: {worst:.3e} (tol {QRT_TOL:.0e})")
    for d in range(1, args.d + 1):
        print(f"stage count d={d}: {qsim.qrt_stage_count(d)}")
    if worst > QRT_TOL:
        print("tolerance breach", file=sys.stderr)
        return 1
    return 0


def cmd_verify_all(args) -> int:
    report = experiment.verify_all(args.p_list, args.d_list, seed=args.seed)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1


def cmd_params(args) -> int:
    params = lottery.sampling_parameters(args.epsilon, args.delta_fail, args.alpha, args.beta)
    print(f"epsilon    = {params.epsilon!r}")
    print(f"delta_fail = {params.delta_fail!r}")
    print(f"alpha      = {params.alpha!r}")
    print(f"beta       = {params.beta!r}")
    print(f"n_eps      = {params.n_eps:.6e}")
    print(f"big_delta (squared closed form)   = {params.big_delta:.6e}")
    print(f"big_delta (unsquared variant)     = {params.big_delta_unsquared:.6e}")
    print(
        "note: the two big_delta values differ by the final square; "
        "pick one explicitly when configuring an experiment."
    )
    print(f"n_samples  = {params.n_samples}")
    return 0


def cmd_transform(args) -> int:
    p, d, values = transforms.load_values_csv(args.infile)
    pair = experiment.build_pair(args.activation, p, args.ridgelet)
    if args.mode == "analyze":
        f = transforms.GridFunction(p, d, values)
        out = transforms.ridgelet_analyze(f, pair)
        transforms.save_coeffs_csv(out, args.out)
    else:
        if len(values) != p ** (d + 1):
            raise ConfigError("in", f"{args.infile} does not hold a coefficient table")
        w = transforms.RidgeletCoeffs(p, d, values)
        out = transforms.ridgelet_synthesize(w, pair)
        transforms.save_grid_csv(out, args.out)
    print(args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ridgelab",
        description="Discrete ridge transforms, their register pipeline, and node-sampling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run the risk sweep and write reports")
    exp.add_argument("--config", help="flat key = value file; flags override it")
    exp.add_argument("--out-dir", default="ridgelab-results")
    exp.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    exp.add_argument("--p", type=int)
    exp.add_argument("--d", type=int)
    exp.add_argument("--target", help="sine4pi | tanh-target | file:<dataset.csv>")
    exp.add_argument("--activation", help="ramp-relu | tanh10 | file:<profile.csv>")
    exp.add_argument("--lambda", dest="lam", type=float)
    exp.add_argument("--big-delta", dest="big_delta", type=float)
    exp.add_argument("--epsilon", type=float)
    exp.add_argument("--delta-fail", dest="delta_fail", type=float)
    exp.add_argument("--alpha", type=float)
    exp.add_argument("--beta", type=float)
    exp.add_argument("--n-grid", dest="n_grid", type=_parse_int_list)
    exp.add_argument("--repetitions", type=int)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--sampler", choices=["alias", "rejection"])
    exp.add_argument("--baseline", choices=["uniform", "none"])
    exp.set_defaults(func=cmd_experiment)

    qrt = sub.add_parser("qrt-verify", help="pipeline vs dense oracle")
    qrt.add_argument("--p", type=int, required=True)
    qrt.add_argument("--d", type=int, required=True)
    qrt.add_argument("--trials", type=int, default=20)
    qrt.add_argument("--seed", type=int, default=0)
    qrt.set_defaults(func=cmd_qrt_verify)

    ver = sub.add_parser("verify-all", help="composed-identity checks over a sweep")
    ver.add_argument("--p-list", dest="p_list", type=_parse_int_list, default=(3, 5, 7))
    ver.add_argument("--d-list", dest="d_list", type=_parse_int_list, default=(1, 2))
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify_all)

    par = sub.add_parser("params", help="decay-class sampling parameters")
    par.add_argument("--epsilon", type=float, required=True)
    par.add_argument("--delta-fail", dest="delta_fail", type=float, default=0.05)
    par.add_argument("--alpha", type=float, required=True)
    par.add_argument("--beta", type=float, required=True)
    par.set_defaults(func=cmd_params)

    tra = sub.add_parser("transform", help="analyze/synthesize a CSV file")
    tra.add_argument("--in", dest="infile", required=True)
    tra.add_argument("--mode", choices=["analyze", "synthesize"], required=True)
    tra.add_argument("--out", required=True)
    tra.add_argument("--activation", default="ramp-relu")
    tra.add_argument("--ridgelet", default=None)
    tra.set_defaults(func=cmd_transform)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, NotPrime, InvalidHyperparameter, TooLargeForDense) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        path = getattr(exc, "filename", None)
        where = f" ({path})" if path else ""
        print(f"io error: {exc}{where}", file=sys.stderr)
        return 2
    except RidgelabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
