"""Worst-case risk bounds over all dependence structures.

Given margins F_1, ..., F_n and a level p, the worst-case VaR of the sum
X_1 + ... + X_n over every joint distribution with those margins admits
the dual representation

    inf over beta in B_n of
        sum_i  (1/((1-p)(1-beta)))
               * int_{p + (1-p)(beta - beta_i)}^{1 - (1-p) beta_i} q_i(u) du

with B_n = {beta in [0,1)^n : sum beta_i < 1} and beta = sum beta_i.  The
infimum is the exact worst case when all p-tails have densities in a
common monotone class; otherwise it is an upper bound.  Worst-case ES
needs no optimization: it is attained by the comonotonic coupling and
equals the sum of marginal ES values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .distributions import INF, MarginClass, MarginVector, _check_prob

_BETA_SLACK = 1e-12
_HUGE = 1e300  # finite stand-in for +inf inside the simplex search
_AGREE_RTOL = 1e-4


class Method(Enum):
    DUAL_EXACT = "dualExact"
    DUAL_UPPER_BOUND = "dualUpperBound"
    COMONOTONIC_ES = "comonotonicES"
    ANALYTIC_PARETO = "analyticPareto"
    RA_LOWER = "raLower"


class Exactness(Enum):
    EXACT = "exact"
    UPPER_BOUND = "upperBound"
    LOWER_BOUND = "lowerBound"


@dataclass(frozen=True)
class BetaVector:
    """Point of B_n: each coordinate in [0,1), coordinates summing below 1."""

    beta: tuple[float, ...]

    def __init__(self, beta: Sequence[float]):
        beta = tuple(float(b) for b in beta)
        if not beta:
            raise ValueError("empty beta vector")
        if any(not 0.0 <= b < 1.0 for b in beta):
            raise ValueError("beta coordinates must lie in [0,1)")
        if sum(beta) > 1.0 - _BETA_SLACK:
            raise ValueError(f"beta coordinates sum to {sum(beta)!r}, need < 1")
        object.__setattr__(self, "beta", beta)

    @property
    def total(self) -> float:
        return sum(self.beta)

    def __len__(self):
        return len(self.beta)

    def __iter__(self):
        return iter(self.beta)


@dataclass(frozen=True)
class OptimizerOptions:
    restarts: int = 20
    seed: int = 42
    max_evals: int = 5000
    tol: float = 1e-10

    @staticmethod
    def from_config(spec: dict | None) -> "OptimizerOptions":
        spec = spec or {}
        return OptimizerOptions(
            restarts=int(spec.get("restarts", 20)),
            seed=int(spec.get("seed", 42)),
            max_evals=int(spec.get("max_evals", 5000)),
            tol=float(spec.get("tol", 1e-10)),
        )


@dataclass(frozen=True)
class BoundResult:
    value: float
    method: Method
    exactness: Exactness
    beta_star: BetaVector | None = None
    evaluations: int = 0
    converged: bool = True


def dual_objective(p: float, margins: MarginVector, beta) -> float:
    """Evaluate the dual bound at a fixed beta; +inf if any tail diverges.

    p may be 0, which turns the expression into the worst-case essential
    infimum of the sum (the limit of the VaR bound as p drops to 0).
    """
    if not isinstance(beta, BetaVector):
        beta = BetaVector(beta)
    if len(beta) != len(margins):
        raise ValueError(f"beta has {len(beta)} coordinates for {len(margins)} margins")
    p = float(p)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0,1), got {p!r}")
    total_beta = beta.total
    scale = (1.0 - p) * (1.0 - total_beta)
    acc = 0.0
    for m, b_i in zip(margins, beta):
        lo = p + (1.0 - p) * (total_beta - b_i)
        hi = 1.0 - (1.0 - p) * b_i
        lo = min(max(lo, 0.0), hi)  # guard float noise at the B_n boundary
        piece = m.quantile_integral(lo, hi)
        if math.isinf(piece):
            return INF
        acc += piece
    return acc / scale


def worst_case_es(p: float, margins: MarginVector) -> float:
    """sum_i ES_p(F_i): the comonotonic coupling attains the ES worst case."""
    _check_prob(p)
    total = 0.0
    for m in margins:
        es = m.expected_shortfall(p)
        if math.isinf(es):
            return INF
        total += es
    return total


def pareto_var_bounds(p: float, alpha: float, theta) -> tuple[float, float]:
    """Analytic sandwich for worst-case VaR of Pareto margins, alpha > 1:

        sum(theta)/(1-p)^(1/alpha)  <=  value  <=  alpha/(alpha-1) * lower.
    """
    _check_prob(p)
    if alpha <= 1.0:
        raise ValueError("the analytic Pareto sandwich needs alpha > 1 (finite mean)")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0.0):
        raise ValueError("theta must be positive")
    lower = float(theta.sum()) / (1.0 - p) ** (1.0 / alpha)
    return lower, alpha / (alpha - 1.0) * lower


# ----------------------------------------------------------------------
# the dual optimizer
# ----------------------------------------------------------------------


def _beta_from_z(z: np.ndarray) -> np.ndarray:
    """Softmax over (z, 0): maps R^n onto the open simplex interior of B_n."""
    m = max(float(np.max(z)), 0.0)
    e = np.exp(z - m)
    return e / (e.sum() + math.exp(-m))

def _z_from_beta(beta: np.ndarray) -> np.ndarray:
    slack = 1.0 - float(np.sum(beta))
    return np.log(np.maximum(beta, 1e-300) / slack)


def worst_case_var(
    p: float, margins: MarginVector, opts: OptimizerOptions | None = None
) -> BoundResult:
    """Minimize the dual objective over B_n (multi-start Nelder-Mead).

    The search runs in an unconstrained parameterization (softmax with an
    explicit slack coordinate), so every iterate is feasible.  Starts:
    the exact boundary point beta = 0 (evaluated directly, not iterated),
    a near-zero interior point, the best symmetric point beta_i = c/n
    over a c-grid, and seeded random simplex points.  The reported value
    is the best over all starts; exactness is 'exact' precisely when the
    p-tails share a monotone density class.
    """
    p = float(p)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0,1), got {p!r}")
    opts = opts or OptimizerOptions()
    n = len(margins)

    evals = 0

    def objective_beta(beta: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        total = float(beta.sum())
        if total > 1.0 - 1e-9:  # pull extreme iterates back inside B_n
            beta = beta * ((1.0 - 1e-9) / total)
        val = dual_objective(p, margins, BetaVector(beta))
        return _HUGE if math.isinf(val) else val

    def objective_z(z: np.ndarray) -> float:
        return objective_beta(_beta_from_z(z))

    # ---- structured candidates ----------------------------------------
    candidates: list[tuple[float, np.ndarray]] = []  # (value, beta)
    zero = np.zeros(n)
    v0 = objective_beta(zero)
    if v0 < _HUGE:
        candidates.append((v0, zero))

    starts: list[np.ndarray] = [_z_from_beta(np.full(n, 1e-6))]
    c_grid = np.linspace(0.0, 0.995, 41)[1:]
    sym_vals = [objective_beta(np.full(n, c / n)) for c in c_grid]
    c_best = float(c_grid[int(np.argmin(sym_vals))])
    starts.append(np.full(n, math.log(c_best / (n * (1.0 - c_best)))))

    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.restarts):
        u = rng.dirichlet(np.ones(n + 1))
        starts.append(np.log(np.maximum(u[:n], 1e-12) / max(u[n], 1e-12)))

    # ---- refine each start --------------------------------------------
    start_results: list[tuple[float, np.ndarray]] = []
    for z0 in starts:
        f0 = objective_z(z0)
        res = minimize(
            objective_z,
            z0,
            method="Nelder-Mead",
            options={
                "maxfev": opts.max_evals,
                "xatol": 1e-10,
                "fatol": opts.tol * (1.0 + abs(f0)),
                "initial_simplex": _initial_simplex(z0),
            },
        )
        beta = _beta_from_z(np.asarray(res.x, dtype=float))
        start_results.append((float(res.fun), beta))
        candidates.append((float(res.fun), beta))

    best_val, best_beta = min(candidates, key=lambda t: t[0])
    if float(best_beta.sum()) > 1.0 - 1e-9:
        best_beta = best_beta * ((1.0 - 1e-9) / float(best_beta.sum()))

    # agreement across independent routes is the convergence evidence
    scale = max(1.0, abs(best_val))
    close = [v for v, _ in candidates if v - best_val <= _AGREE_RTOL * scale]
    converged = len(close) >= 2 and best_val < _HUGE

    tail_class = margins.tail_density_class(p) if p > 0.0 else margins.density_class()
    exact = tail_class in (MarginClass.ALL_DECREASING, MarginClass.ALL_INCREASING)
    return BoundResult(
        value=INF if best_val >= _HUGE else best_val,
        method=Method.DUAL_EXACT if exact else Method.DUAL_UPPER_BOUND,
        exactness=Exactness.EXACT if exact else Exactness.UPPER_BOUND,
        beta_star=BetaVector(best_beta),
        evaluations=evals,
        converged=converged,
    )


def _initial_simplex(z0: np.ndarray) -> np.ndarray:
    n = z0.size
    simplex = np.tile(z0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += 0.25 if z0[i] <= 0 else -0.25
    return simplex


def essential_infimum_worst_case(
    margins: MarginVector, opts: OptimizerOptions | None = None
) -> BoundResult:
    """Worst-case essential infimum of the sum: the p -> 0 limit of the
    VaR bound, computed by running the dual optimization at p = 0."""
    return worst_case_var(0.0, margins, opts)
