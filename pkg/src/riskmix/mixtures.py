"""Mixing margin vectors through doubly stochastic matrices.

Two distinct operations live here.  A distribution mixture replaces each
margin by a convex combination of the marginal cdfs (row-wise through a
matrix), while a quantile mixture combines the marginal quantile
functions instead.  The two coincide only in degenerate cases; their
divergent effect on worst-case risk bounds is the point of the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    _BISECT_REL_TOL,
    _MAX_BISECT,
    INF,
    Bernoulli,
    DensityClass,
    Distribution,
    MarginVector,
    Pareto,
    PointMass,
    is_decreasing_eligible,
    is_increasing_eligible,
)

_MATRIX_TOL = 1e-12


@dataclass(frozen=True)
class DoublyStochasticMatrix:
    """Square matrix with nonnegative entries and unit row and column sums.

    Matrices failing validation (tolerance 1e-12 on each row/column sum)
    are rejected outright; nothing is renormalized.
    """

    entries: np.ndarray

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"need a square matrix, got shape {a.shape}")
        if a.shape[0] < 2:
            raise ValueError("doubly stochastic matrices here have n >= 2")
        if np.any(a < 0.0):
            raise ValueError("matrix has negative entries")
        rows = a.sum(axis=1)
        cols = a.sum(axis=0)
        if np.max(np.abs(rows - 1.0)) > _MATRIX_TOL:
            raise ValueError(f"row sums deviate from 1 by {np.max(np.abs(rows - 1.0)):.3g}")
        if np.max(np.abs(cols - 1.0)) > _MATRIX_TOL:
            raise ValueError(f"column sums deviate from 1 by {np.max(np.abs(cols - 1.0)):.3g}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def row(self, i: int) -> np.ndarray:
        return self.entries[i]

    def __matmul__(self, other):
        if isinstance(other, DoublyStochasticMatrix):
            return DoublyStochasticMatrix(self.entries @ other.entries)
        return self.entries @ np.asarray(other, dtype=float)

    @staticmethod
    def identity(n: int) -> "DoublyStochasticMatrix":
        return DoublyStochasticMatrix(np.eye(n))

    @staticmethod
    def uniform(n: int) -> "DoublyStochasticMatrix":
        return DoublyStochasticMatrix(np.full((n, n), 1.0 / n))

    @staticmethod
    def convex_identity_uniform(a: float, n: int) -> "DoublyStochasticMatrix":
        """a * I_n + (1 - a) * (1/n)_{n x n} for a in [0, 1]."""
        if not 0.0 <= a <= 1.0:
            raise ValueError("mixing coefficient must lie in [0,1]")
        return DoublyStochasticMatrix(a * np.eye(n) + (1.0 - a) * np.full((n, n), 1.0 / n))


def matrix_power(lam: DoublyStochasticMatrix, k: int) -> DoublyStochasticMatrix:
    """lam^k with lam^0 = identity; the result is revalidated."""
    if k < 0 or int(k) != k:
        raise ValueError("matrix power needs a nonnegative integer exponent")
    return DoublyStochasticMatrix(np.linalg.matrix_power(lam.entries, int(k)))


def matrix_from_config(spec: dict) -> DoublyStochasticMatrix:
    """Build a matrix from its JSON description.

    Supported kinds: ``{"kind": "convex_identity_uniform", "a": 0.8, "n": 3}``
    and ``{"kind": "explicit", "rows": [[...], ...]}``.
    """
    kind = spec.get("kind")
    if kind == "convex_identity_uniform":
        return DoublyStochasticMatrix.convex_identity_uniform(float(spec["a"]), int(spec["n"]))
    if kind == "explicit":
        return DoublyStochasticMatrix(spec["rows"])
    raise ValueError(f"unknown matrix kind {kind!r}")


def check_weights(weights, tol: float = _MATRIX_TOL) -> np.ndarray:
    """Validate a simplex weight vector; returns it as an ndarray."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-d vector")
    if np.any(w < 0.0):
        raise ValueError("weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > tol:
        raise ValueError(f"weights sum to {float(w.sum())!r}, not 1")
    return w


# ----------------------------------------------------------------------
# distribution mixtures (convex combinations of cdfs)
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class MixtureDistribution(Distribution):
    """Convex combination of cdfs: F = sum_j w_j F_j.

    Quantiles come from bisection of the mixed cdf, bracketed by the
    extreme component quantiles.  Quantile integrals avoid quadrature of
    the implicit quantile entirely: with x_a = q(a), x_b = q(b),

        int_a^b q(u) du = (b-1) x_b - (a-1) x_a + sum_j w_j S_j(x_a, x_b),

    where S_j is the component's closed-form survival integral.  The
    right-hand side is first-order insensitive to bisection error in x_a
    and x_b, so the result inherits the components' accuracy.
    """

    components: tuple[Distribution, ...]
    weights: tuple[float, ...]

    def __init__(self, components, weights):
        components = tuple(components)
        w = check_weights(weights)
        if len(components) != w.size:
            raise ValueError("component/weight length mismatch")
        keep = [(c, float(x)) for c, x in zip(components, w) if x > 0.0]
        if not keep:
            raise ValueError("all mixture weights are zero")
        object.__setattr__(self, "components", tuple(c for c, _ in keep))
        object.__setattr__(self, "weights", tuple(x for _, x in keep))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = sum(w * np.asarray(c.cdf(x), dtype=float) for c, w in zip(self.components, self.weights))
        return out if np.ndim(x) else float(out)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = sum(w * np.asarray(c.sf(x), dtype=float) for c, w in zip(self.components, self.weights))
        return out if np.ndim(x) else float(out)

    def _quantile(self, p):
        return self._invert(p, strict=False)

    def _upper_quantile(self, p):
        if not self.atoms():
            return self._invert(p, strict=False)
        return self._invert(p, strict=True)

    def cdf_scalar(self, x: float) -> float:
        return sum(w * c.cdf_scalar(x) for c, w in zip(self.components, self.weights))

    def _invert(self, p, strict: bool):
        qs = [c.upper_quantile(p) if strict else c.quantile(p) for c in self.components]
        lo, hi = min(qs), max(qs)
        if lo == hi:
            return lo

        def hit(x: float) -> bool:
            c = self.cdf_scalar(x)
            return c > p if strict else c >= p

        for _ in range(_MAX_BISECT):
            mid = 0.5 * (lo + hi)
            if hit(mid):
                hi = mid
            else:
                lo = mid
            if hi - lo <= _BISECT_REL_TOL * max(1.0, abs(hi)):
                break
        return hi

    def _stop_loss_between(self, x0, x1):
        return sum(w * c.stop_loss_between(x0, x1) for c, w in zip(self.components, self.weights))

    def _quantile_integral(self, a, b):
        lo, hi = self.support()
        if b == 1.0 and math.isinf(hi):
            m = self.mean()
            if math.isinf(m):
                return INF
            return m - (self._quantile_integral(0.0, a) if a > 0.0 else 0.0)
        x_b = hi if b == 1.0 else self.quantile(b)
        if a == 0.0:
            if math.isinf(lo):
                raise ValueError("quantile integral from 0 needs a bounded-below support")
            x_a = lo
        else:
            x_a = self.quantile(a)
        return (b - 1.0) * x_b - (a - 1.0) * x_a + self.stop_loss_between(x_a, x_b)

    def mean(self):
        total = 0.0
        for c, w in zip(self.components, self.weights):
            m = c.mean()
            if math.isinf(m):
                return INF
            total += w * m
        return total

    def support(self):
        los, his = zip(*(c.support() for c in self.components))
        return (min(los), max(his))

    def atoms(self):
        pts = sorted({a for c in self.components for a in c.atoms()})
        return tuple(pts)

    def density_class(self):
        return self._class_on_tail(None)

    def tail_density_class(self, p):
        return self._class_on_tail(self.quantile(p))

    def _class_on_tail(self, x_p):
        """Monotonicity of the mixed density beyond x_p (whole support if None).

        A mixture density is decreasing past x_p when every component is,
        and no component's support begins after x_p (its density would
        jump up from zero there).  Symmetrically for increasing with
        right endpoints.  Atoms past x_p rule out a density altogether.
        """
        classes = []
        for c, w in zip(self.components, self.weights):
            lo, hi = c.support()
            if x_p is not None and hi <= x_p and not any(a > x_p for a in c.atoms()):
                continue  # exhausted before the tail starts
            if any(a > (x_p if x_p is not None else -INF) for a in c.atoms()):
                return DensityClass.UNKNOWN
            if x_p is None or float(c.cdf(x_p)) <= 0.0:
                classes.append((c.density_class(), lo, hi))
            else:
                u = min(float(c.cdf(x_p)), 1.0 - 1e-15)
                classes.append((c.tail_density_class(u), lo, hi))
        if not classes:
            return DensityClass.UNKNOWN
        cut = -INF if x_p is None else x_p
        if all(is_decreasing_eligible(k) for k, _, _ in classes) and all(
            lo <= max(cut, min(l for _, l, _ in classes)) for _, lo, _ in classes
        ):
            if all(k is DensityClass.CONSTANT for k, _, _ in classes):
                los = {lo for _, lo, _ in classes}
                his = {hi for _, _, hi in classes}
                if len(los) == 1 and len(his) == 1:
                    return DensityClass.CONSTANT
            return DensityClass.DECREASING
        if all(is_increasing_eligible(k) for k, _, _ in classes):
            his = {hi for _, _, hi in classes}
            if len(his) == 1:
                return DensityClass.INCREASING
        return DensityClass.UNKNOWN


def mixture_of(weights, components) -> Distribution:
    """Convex combination of cdfs, collapsed to a closed form when one exists."""
    w = check_weights(weights)
    components = tuple(components)
    if len(components) != w.size:
        raise ValueError("component/weight length mismatch")
    keep = [(c, float(x)) for c, x in zip(components, w) if x > 0.0]
    if len(keep) == 1:
        return keep[0][0]
    if all(isinstance(c, Bernoulli) for c, _ in keep):
        return Bernoulli(sum(x * c.q for c, x in keep))
    if all(isinstance(c, PointMass) for c, _ in keep) and len({c.x for c, _ in keep}) == 1:
        return keep[0][0]
    return MixtureDistribution([c for c, _ in keep], [x for _, x in keep])


# ----------------------------------------------------------------------
# quantile mixtures (convex combinations of quantile functions)
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class QuantileCombination(Distribution):
    """Nonnegative combination of quantile functions: q = sum_j c_j q_j.

    Coefficients need not sum to one, so the same type also represents
    comonotonic sums (all coefficients 1).  The cdf is recovered by
    bisection in probability space, using that q is nondecreasing.
    """

    terms: tuple[tuple[float, Distribution], ...]

    def __init__(self, terms):
        terms = tuple((float(c), d) for c, d in terms)
        if not terms:
            raise ValueError("empty quantile combination")
        if any(c < 0.0 for c, _ in terms):
            raise ValueError("coefficients must be nonnegative")
        terms = tuple((c, d) for c, d in terms if c > 0.0)
        if not terms:
            raise ValueError("all coefficients are zero")
        object.__setattr__(self, "terms", terms)

    def _quantile(self, p):
        return sum(c * d.quantile(p) for c, d in self.terms)

    def _upper_quantile(self, p):
        return sum(c * d.upper_quantile(p) for c, d in self.terms)

    def _quantile_integral(self, a, b):
        total = 0.0
        for c, d in self.terms:
            piece = d.quantile_integral(a, b)
            if math.isinf(piece):
                return INF
            total += c * piece
        return total

    def mean(self):
        return self.quantile_integral(0.0, 1.0)

    def cdf(self, x):
        if np.ndim(x):
            return np.array([self.cdf(float(v)) for v in np.asarray(x, dtype=float)])
        x = float(x)
        lo, hi = self.support()
        if x < lo:
            return 0.0
        if x >= hi:
            return 1.0
        # F(x) = measure{u : q(u) <= x}; bisect the monotone q in u-space
        a, b = 0.0, 1.0
        for _ in range(_MAX_BISECT):
            m = 0.5 * (a + b)
            if self._quantile(m) <= x:
                a = m
            else:
                b = m
            if b - a <= 1e-15:
                break
        return a

    def support(self):
        lo = 0.0
        hi = 0.0
        for c, d in self.terms:
            l, h = d.support()
            lo += c * l
            hi += c * h
        return (lo, hi)

    def atoms(self):
        if any(not d.atoms() for _, d in self.terms):
            # a continuous term makes the combined quantile strictly
            # increasing (the families here have no density gaps)
            return ()
        # purely discrete combinations have piecewise-constant quantiles;
        # read the atom values off the plateau midpoints
        cuts = {0.0, 1.0}
        for _, d in self.terms:
            for a in d.atoms():
                cuts.add(float(d.cdf(a)))
        cuts = sorted(cuts)
        vals = []
        for u0, u1 in zip(cuts[:-1], cuts[1:]):
            if u1 > u0:
                vals.append(self._quantile(0.5 * (u0 + u1)))
        return tuple(sorted(set(vals)))

    def density_class(self):
        return _combine_classes([d.density_class() for _, d in self.terms])

    def tail_density_class(self, p):
        # the p-tail of a quantile combination is the combination of p-tails
        return _combine_classes([d.tail_density_class(p) for _, d in self.terms])


def _combine_classes(classes) -> DensityClass:
    if all(k is DensityClass.CONSTANT for k in classes):
        return DensityClass.CONSTANT
    if all(is_decreasing_eligible(k) for k in classes):
        return DensityClass.DECREASING
    if all(is_increasing_eligible(k) for k in classes):
        return DensityClass.INCREASING
    return DensityClass.UNKNOWN


def quantile_combination(coeffs, components) -> Distribution:
    """sum_j c_j q_j as a distribution, collapsed where a closed form exists."""
    coeffs = [float(c) for c in coeffs]
    components = tuple(components)
    if len(coeffs) != len(components):
        raise ValueError("coefficient/component length mismatch")
    keep = [(c, d) for c, d in zip(coeffs, components) if c > 0.0]
    if any(c < 0.0 for c, _ in zip(coeffs, components)):
        raise ValueError("coefficients must be nonnegative")
    if not keep:
        return PointMass(0.0)
    if len(keep) == 1 and keep[0][0] == 1.0:
        return keep[0][1]
    if all(isinstance(d, Pareto) for _, d in keep):
        alphas = {d.alpha for _, d in keep}
        if len(alphas) == 1:
            return Pareto(keep[0][1].alpha, sum(c * d.theta for c, d in keep))
    if all(isinstance(d, PointMass) for _, d in keep):
        return PointMass(sum(c * d.x for c, d in keep))
    from .distributions import Uniform

    if all(isinstance(d, Uniform) for _, d in keep):
        return Uniform(sum(c * d.a for c, d in keep), sum(c * d.b for c, d in keep))
    return QuantileCombination(keep)


# ----------------------------------------------------------------------
# matrix application to margin vectors
# ----------------------------------------------------------------------


def distribution_mixture(lam: DoublyStochasticMatrix, margins: MarginVector) -> MarginVector:
    """Row-wise cdf mixture: component i has cdf sum_j lam[i,j] F_j."""
    _check_dims(lam, margins)
    return MarginVector([mixture_of(lam.row(i), margins.margins) for i in range(lam.n)])


def quantile_mixture(lam: DoublyStochasticMatrix, margins: MarginVector) -> MarginVector:
    """Row-wise quantile mixture: component i has quantile sum_j lam[i,j] q_j.

    Margins that are all Pareto with a common alpha collapse exactly to
    Pareto components with mixed scale parameters.
    """
    _check_dims(lam, margins)
    return MarginVector(
        [quantile_combination(lam.row(i), margins.margins) for i in range(lam.n)]
    )


def _check_dims(lam: DoublyStochasticMatrix, margins: MarginVector) -> None:
    if lam.n != len(margins):
        raise ValueError(f"matrix is {lam.n}x{lam.n} but there are {len(margins)} margins")
