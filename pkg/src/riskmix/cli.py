"""Command-line experiment runner.

Subcommands:

  sweep      both mixture curves (quantile and distribution) over matrix
             powers k, every requested engine, CSV output
  figure5    the non-monotone counterexample setting (RA engine) with a
             monotonicity verdict
  pmerge     p-value merging constant for an exponent and weight vector
  portfolio  worst-case portfolio risk for weights over a common margin
  jm         Bernoulli joint-mixability check with construction

CSV columns: k, kind, engine, value, exactness, converged, betaStar,
wallTimeMs.  A sidecar JSON file (<out>.meta.json) echoes the config,
seed and package versions.  Exit codes: 0 success, 2 config error,
3 at least one engine row failed to converge (rows are still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np
import scipy

from . import __version__
from .applications import PMergeSpec, bernoulli_jm, p_merge_constant, portfolio_worst_case
from .bounds import BoundResult, Exactness, Method, OptimizerOptions, worst_case_es, worst_case_var
from .distributions import MarginVector, from_config
from .mixtures import distribution_mixture, matrix_from_config, matrix_power, quantile_mixture
from .rearrangement import DEFAULT_N, discretize_tail, rearrange

_ENGINES = ("dual", "ra", "es")
_CSV_COLUMNS = ("k", "kind", "engine", "value", "exactness", "converged", "betaStar", "wallTimeMs")

FIGURE5_CONFIG = {
    "margins": [
        {"family": "binomial", "m": 10, "q": 0.1},
        {"family": "gamma", "shape": 5.0, "theta": 1.0},
        {"family": "weibull", "theta": 1.0, "shape": 5.0},
    ],
    "matrix": {"kind": "convex_identity_uniform", "a": 0.8, "n": 3},
    "kList": [0, 1, 2, 4, 6, 8, 10],
    "p": 0.01,
    "engines": ["ra"],
    "raN": DEFAULT_N,
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    margins: MarginVector
    matrix: "object"
    k_list: tuple[int, ...]
    p: float
    engines: tuple[str, ...]
    ra_n: int
    optimizer: OptimizerOptions
    seed: int

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        try:
            margins = MarginVector([from_config(m) for m in raw["margins"]])
            matrix = matrix_from_config(raw.get("matrix", raw.get("lambda")))
            k_list = tuple(int(k) for k in raw["kList"])
            p = float(raw["p"])
            engines = tuple(raw.get("engines", ["dual"]))
            ra_n = int(raw.get("raN", DEFAULT_N))
            seed = int(raw.get("seed", 42))
            opt_raw = dict(raw.get("optimizer", {}))
            opt_raw.setdefault("seed", seed)
            optimizer = OptimizerOptions.from_config(opt_raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc
        if not k_list:
            raise ConfigError("kList must be nonempty")
        if any(k < 0 for k in k_list):
            raise ConfigError("kList entries must be nonnegative")
        if not 0.0 < p < 1.0:
            raise ConfigError("p must lie in (0,1)")
        if not engines or any(e not in _ENGINES for e in engines):
            raise ConfigError(f"engines must be a nonempty subset of {_ENGINES}")
        return ExperimentConfig(margins, matrix, k_list, p, engines, ra_n, optimizer, seed)


def _format_value(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def _run_engine(cfg: ExperimentConfig, margins: MarginVector, engine: str) -> dict:
    t0 = time.perf_counter()
    try:
        if engine == "dual":
            res = worst_case_var(cfg.p, margins, cfg.optimizer)
        elif engine == "es":
            res = BoundResult(
                value=worst_case_es(cfg.p, margins),
                method=Method.COMONOTONIC_ES,
                exactness=Exactness.EXACT,
            )
        else:
            q = discretize_tail(cfg.p, margins, cfg.ra_n)
            value, _, _ = rearrange(q, seed=cfg.seed)
            res = BoundResult(value=value, method=Method.RA_LOWER, exactness=Exactness.LOWER_BOUND)
        row = {
            "value": _format_value(res.value),
            "exactness": res.exactness.value,
            "converged": str(res.converged).lower(),
            "betaStar": ";".join(repr(b) for b in res.beta_star) if res.beta_star else "",
        }
    except Exception as exc:  # keep the sweep alive; surface the failure in the row
        row = {"value": "nan", "exactness": f"error:{exc}", "converged": "false", "betaStar": ""}
    row["wallTimeMs"] = f"{(time.perf_counter() - t0) * 1e3:.3f}"
    return row


def run_sweep(cfg: ExperimentConfig) -> list[dict]:
    """One row per (k, mixture kind, engine), in deterministic order."""
    rows = []
    for k in cfg.k_list:
        lam_k = matrix_power(cfg.matrix, k)
        mixed = {
            "quantile": quantile_mixture(lam_k, cfg.margins),
            "distribution": distribution_mixture(lam_k, cfg.margins),
        }
        for kind, margins in mixed.items():
            for engine in cfg.engines:
                row = {"k": str(k), "kind": kind, "engine": engine}
                row.update(_run_engine(cfg, margins, engine))
                rows.append(row)
    return rows


def run_figure5(cfg: ExperimentConfig) -> tuple[list[dict], bool]:
    """RA sweep of the quantile-mixture curve plus a non-monotonicity verdict."""
    rows = run_sweep(cfg)
    curve = [
        (int(r["k"]), float(r["value"]))
        for r in rows
        if r["kind"] == "quantile" and r["engine"] == "ra" and r["value"] not in ("nan", "inf")
    ]
    curve.sort()
    tol = 1e-6 * max((abs(v) for _, v in curve), default=1.0)
    non_monotone = any(v1 < v0 - tol for (_, v0), (_, v1) in zip(curve, curve[1:]))
    return rows, non_monotone


def _write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def _write_meta(path, raw_config: dict, seed: int, extra: dict | None = None) -> None:
    meta = {
        "config": raw_config,
        "seed": seed,
        "versions": {
            "riskmix": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
    }
    meta.update(extra or {})
    with open(str(path) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


# ----------------------------------------------------------------------
# argument handling
# ----------------------------------------------------------------------


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _apply_overrides(raw: dict, args) -> dict:
    raw = dict(raw)
    if args.seed is not None:
        raw["seed"] = args.seed
    if getattr(args, "engines", None):
        raw["engines"] = [e.strip() for e in args.engines.split(",") if e.strip()]
    return raw


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc


def _sweep_command(args, figure5: bool) -> int:
    raw = _load_config(args.config) if args.config else (FIGURE5_CONFIG if figure5 else None)
    if raw is None:
        raise ConfigError("sweep needs --config")
    raw = _apply_overrides(raw, args)
    cfg = ExperimentConfig.from_dict(raw)
    extra = {}
    if figure5:
        rows, verdict = run_figure5(cfg)
        extra["nonMonotoneDetected"] = verdict
        if not args.quiet:
            print(f"nonMonotoneDetected: {verdict}")
    else:
        rows = run_sweep(cfg)
    _write_csv(rows, args.out)
    _write_meta(args.out, raw, cfg.seed, extra)
    if getattr(args, "plot", False):
        from .plotting import plot_sweep

        png = str(args.out).rsplit(".", 1)[0] + ".png"
        plot_sweep(args.out, png)
        if not args.quiet:
            print(f"figure written to {png}")
    if not args.quiet:
        print(f"{len(rows)} rows written to {args.out}")
    failed = [r for r in rows if r["converged"] == "false" or r["value"] == "nan"]
    return 3 if failed else 0


def _pmerge_command(args) -> int:
    weights = _parse_floats(args.weights)
    try:
        spec = PMergeSpec(args.r, weights)
        value = p_merge_constant(
            spec,
            OptimizerOptions(seed=args.seed if args.seed is not None else 42),
            cross_check=args.cross_check,
        )
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(str(exc)) from exc
    print(repr(value) if args.quiet else f"a(r={args.r}, w={weights}) = {value!r}")
    return 0


def _portfolio_command(args) -> int:
    raw = _load_config(args.config)
    raw = _apply_overrides(raw, args)
    try:
        base = from_config(raw["base"])
        res = portfolio_worst_case(
            float(raw["p"]),
            base,
            raw["weights"],
            OptimizerOptions.from_config(raw.get("optimizer", {"seed": raw.get("seed", 42)})),
            risk=raw.get("risk", "var"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad portfolio config: {exc}") from exc
    print(
        f"value={res.value!r} exactness={res.exactness.value} "
        f"converged={str(res.converged).lower()}"
    )
    return 0 if res.converged else 3

def _jm_command(args) -> int:
    q = _parse_floats(args.q)
    try:
        cert = bernoulli_jm(q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not cert.feasible:
        print("feasible=false")
        return 0
    arcs = " ".join(f"[{s:.12g},{s:.12g}+{l:.12g})" for s, l in cert.arcs)
    print(f"feasible=true center={cert.center:.12g} arcs={arcs}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="riskmix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_engines=True):
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--quiet", action="store_true")
        if with_engines:
            p.add_argument("--engines", default=None, help="comma list from dual,ra,es")

    ps = sub.add_parser("sweep", help="mixture curves over matrix powers")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out", required=True)
    ps.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    add_common(ps)

    pf = sub.add_parser("figure5", help="non-monotone quantile-mixture counterexample")
    pf.add_argument("--config", default=None, help="defaults to the built-in setting")
    pf.add_argument("--out", required=True)
    pf.add_argument("--plot", action="store_true")
    add_common(pf)

    pm = sub.add_parser("pmerge", help="p-value merging constant")
    pm.add_argument("--r", type=float, required=True)
    pm.add_argument("--weights", required=True, help="comma list on the simplex")
    pm.add_argument("--cross-check", action="store_true")
    add_common(pm, with_engines=False)

    pp = sub.add_parser("portfolio", help="worst-case portfolio risk")
    pp.add_argument("--config", required=True)
    add_common(pp, with_engines=False)

    pj = sub.add_parser("jm", help="Bernoulli joint mixability")
    pj.add_argument("--q", required=True, help="comma list of Bernoulli parameters")
    add_common(pj, with_engines=False)

    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            return _sweep_command(args, figure5=False)
        if args.command == "figure5":
            return _sweep_command(args, figure5=True)
        if args.command == "pmerge":
            return _pmerge_command(args)
        if args.command == "portfolio":
            return _portfolio_command(args)
        if args.command == "jm":
            return _jm_command(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
