"""Applications: p-value merging constants, portfolio bounds, joint mixability.

The merging constant a_{r,w} makes the weighted power mean of arbitrary
dependent p-values a precise p-variable.  It reduces to a worst-case
essential infimum of a sum with known margins, which the dual optimizer
computes directly at p = 0:

    r < 0:  margins Pareto(-1/r, w_i);            a = s^(-1/r)
    r = 0:  margins w_i * Exponential(1);         a = exp(s)
    r > 0:  margins -(w_i * P^r), P uniform;      a = (-s)^(-1/r)

where s is the worst-case essential infimum of the margin sum.  For
r > 0 the sum is negated so the same machinery applies (the essential
infimum of -X is minus the essential supremum of X).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bounds import BoundResult, OptimizerOptions, worst_case_es, worst_case_var
from .distributions import (
    Distribution,
    Exponential,
    MarginVector,
    Pareto,
    PointMass,
    PowerFunction,
    affine,
    is_decreasing_eligible,
)
from .mixtures import check_weights

_INTEGER_TOL = 1e-12


# ----------------------------------------------------------------------
# p-value merging
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PMergeSpec:
    """Weighted power-mean p-value merger: exponent r and simplex weights."""

    r: float
    weights: tuple[float, ...]

    def __init__(self, r: float, weights):
        r = float(r)
        if not math.isfinite(r):
            raise ValueError("only finite exponents are supported (limits are not implemented)")
        w = check_weights(weights)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "weights", tuple(float(x) for x in w))


def p_merge_margins(spec: PMergeSpec) -> MarginVector:
    """Margins of the transformed p-variables w_i * P_i^r (negated for r > 0)."""
    r = spec.r
    if r < 0.0:
        ms = [Pareto(-1.0 / r, w) if w > 0 else PointMass(0.0) for w in spec.weights]
    elif r == 0.0:
        # w * log(1/P) is exponential with rate 1/w
        ms = [Exponential(1.0 / w) if w > 0 else PointMass(0.0) for w in spec.weights]
    else:
        ms = [
            affine(PowerFunction(1.0 / r), scale=w).negated() if w > 0 else PointMass(0.0)
            for w in spec.weights
        ]
    return MarginVector(ms)


def _to_constant(r: float, s: float) -> float:
    if r < 0.0:
        return s ** (-1.0 / r)
    if r == 0.0:
        return math.exp(s)
    return (-s) ** (-1.0 / r)


def p_merge_constant(
    spec: PMergeSpec, opts: OptimizerOptions | None = None, cross_check: bool = False
) -> float:
    """The precise merging constant a_{r,w}.

    Computed from the dual objective at p = 0.  With cross_check=True the
    small-p route (worst-case VaR at p = 1e-3, 1e-4, 1e-5) is evaluated
    as an independent oracle; a relative discrepancy above 1e-3 raises a
    warning rather than failing, since the small-p route carries its own
    optimizer error.
    """
    if len(spec.weights) == 1:
        return 1.0  # a single p-variable needs no correction
    margins = p_merge_margins(spec)
    res = worst_case_var(0.0, margins, opts)
    if not math.isfinite(res.value):
        raise ArithmeticError("worst-case essential infimum diverged")
    a = _to_constant(spec.r, res.value)
    if cross_check:
        probe = [worst_case_var(q, margins, opts).value for q in (1e-3, 1e-4, 1e-5)]
        a_probe = _to_constant(spec.r, probe[-1])
        if abs(a_probe - a) > 1e-3 * max(1.0, abs(a)):
            warnings.warn(
                f"p->0 cross-check disagrees: {a!r} (p=0) vs {a_probe!r} (p=1e-5)",
                RuntimeWarning,
            )
    return a


# ----------------------------------------------------------------------
# portfolio diversification under dependence uncertainty
# ----------------------------------------------------------------------


def portfolio_worst_case(
    p: float,
    base: Distribution,
    weights,
    opts: OptimizerOptions | None = None,
    risk: str = "var",
) -> BoundResult:
    """Worst-case risk of a weighted portfolio of identically distributed
    positions with unknown dependence: margins (w_1 X, ..., w_n X)."""
    w = check_weights(weights)
    if w.size < 2:
        raise ValueError("a portfolio needs at least two weights")
    margins = MarginVector(
        [base.scaled(float(x)) if x > 0.0 else PointMass(0.0) for x in w]
    )
    if risk == "var":
        return worst_case_var(p, margins, opts)
    if risk == "es":
        from .bounds import Exactness, Method

        value = worst_case_es(p, margins)
        return BoundResult(value=value, method=Method.COMONOTONIC_ES, exactness=Exactness.EXACT)
    raise ValueError(f"unknown risk measure {risk!r}")


# ----------------------------------------------------------------------
# joint mixability
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class JMCertificate:
    """Outcome of a joint-mixability check, with a construction if feasible.

    ``arcs`` are (start, length) pairs on the unit circle; for a feasible
    Bernoulli tuple the arcs cover every point exactly ``center`` times,
    which realizes the constant sum.
    """

    feasible: bool
    center: float | None = None
    arcs: tuple[tuple[float, float], ...] | None = None

    def coverage(self, u: float) -> int:
        """Number of arcs covering u in [0,1) (arcs wrap around 1)."""
        if self.arcs is None:
            raise ValueError("no construction available")
        u = u % 1.0
        count = 0
        for start, length in self.arcs:
            if (u - start) % 1.0 < length - 1e-15 or length >= 1.0:
                count += 1
        return count


def bernoulli_jm(q) -> JMCertificate:
    """Joint mixability of Bernoulli(q_1), ..., Bernoulli(q_n).

    Feasible exactly when the parameters sum to an integer; the witness
    lays consecutive arcs of lengths q_i around the unit circle, so a
    uniform point on the circle is covered by exactly sum(q_i) arcs.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise ValueError("need a nonempty vector of probabilities")
    if np.any(q < 0.0) or np.any(q > 1.0):
        raise ValueError("Bernoulli parameters must lie in [0,1]")
    total = float(q.sum())
    center = round(total)
    if abs(total - center) > _INTEGER_TOL:
        return JMCertificate(feasible=False)
    arcs = []
    start = 0.0
    for length in q:
        arcs.append((start % 1.0, float(length)))
        start += float(length)
    return JMCertificate(feasible=True, center=float(center), arcs=tuple(arcs))


def mean_length_jm_check(margins: MarginVector) -> bool:
    """Joint mixability of margins with decreasing densities on finite
    supports: true iff the means cover the longest support length,

        sum_i (mu_i - lo_i)  >=  max_i (b_i - lo_i),

    after shifting each support to start at 0 (mixability is unaffected
    by location shifts)."""
    shifted_means = []
    lengths = []
    for m in margins:
        lo, hi = m.support()
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("mean-length check needs bounded supports")
        if not is_decreasing_eligible(m.density_class()):
            raise ValueError(
                "mean-length check applies to decreasing densities only; "
                f"got {m.density_class().value} for {m!r}"
            )
        shifted_means.append(m.mean() - lo)
        lengths.append(hi - lo)
    return sum(shifted_means) >= max(lengths)
