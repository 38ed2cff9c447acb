"""Parametric marginal distributions with exact quantiles, cdfs and tail integrals.

Every family exposes the same small surface: ``cdf``, ``quantile`` (left
quantile, inf{x: F(x) >= p}), ``upper_quantile`` (strict version),
``quantile_integral`` (integral of the quantile function over a
probability interval, closed form wherever one exists), ``mean``,
``expected_shortfall`` and density-monotonicity metadata.  Values are plain
floats; infinite means and divergent tail integrals are reported as
``math.inf`` rather than raised.

All objects are immutable and all operations pure, so they can be shared
freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import special as sp

INF = math.inf

# cdf values are resolved to this relative tolerance when a quantile has to
# be inverted numerically
_BISECT_REL_TOL = 1e-12
_MAX_BISECT = 200


class DensityClass(Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"
    CONSTANT = "constant"  # admissible as either monotone class
    UNKNOWN = "unknown"


def is_decreasing_eligible(c: DensityClass) -> bool:
    return c in (DensityClass.DECREASING, DensityClass.CONSTANT)


def is_increasing_eligible(c: DensityClass) -> bool:
    return c in (DensityClass.INCREASING, DensityClass.CONSTANT)


class MarginClass(Enum):
    ALL_DECREASING = "allDecreasing"
    ALL_INCREASING = "allIncreasing"
    MIXED = "mixed/unknown"


def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie in (0,1), got {p!r}")
    return p


def _check_interval(a: float, b: float) -> tuple[float, float]:
    a, b = float(a), float(b)
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError(f"need 0 <= a <= b <= 1, got a={a!r}, b={b!r}")
    return a, b


class Distribution:
    """Base class; concrete families override the closed-form pieces."""

    # ---- surface every family provides -------------------------------

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, p: float) -> float:
        """Left quantile inf{x : cdf(x) >= p} for p in (0,1)."""
        p = _check_prob(p)
        return self._quantile(p)

    def _quantile(self, p: float) -> float:
        return self._bisect_quantile(p, strict=False)

    def upper_quantile(self, p: float) -> float:
        """Strict quantile inf{x : cdf(x) > p}; differs from quantile at atoms."""
        p = _check_prob(p)
        return self._upper_quantile(p)

    def _upper_quantile(self, p: float) -> float:
        if not self.atoms():
            return self._quantile(p)
        return self._bisect_quantile(p, strict=True)

    def quantile_integral(self, a: float, b: float) -> float:
        """integral_a^b quantile(u) du; +inf when the tail is non-integrable."""
        a, b = _check_interval(a, b)
        if a == b:
            return 0.0
        return self._quantile_integral(a, b)

    def _quantile_integral(self, a: float, b: float) -> float:
        return _quantile_integral_quadrature(self, a, b)

    def mean(self) -> float:
        """E[X]; math.inf when the mean does not exist finitely."""
        return self.quantile_integral(0.0, 1.0)

    def has_finite_mean(self) -> bool:
        return math.isfinite(self.mean())

    def expected_shortfall(self, p: float) -> float:
        p = _check_prob(p)
        return self.quantile_integral(p, 1.0) / (1.0 - p)

    def cdf_scalar(self, x: float) -> float:
        """Pure-float cdf for hot bisection loops; same values as cdf."""
        return float(self.cdf(x))

    def sf(self, x):
        """Survival function 1 - cdf(x); overridden where the direct form is
        more accurate near the tail."""
        out = 1.0 - np.asarray(self.cdf(x), dtype=float)
        return out if out.ndim else float(out)

    def stop_loss_between(self, x0: float, x1: float) -> float:
        """integral_{x0}^{x1} sf(x) dx (x0 <= x1), closed form per family.

        Together with two quantile evaluations this reconstructs quantile
        integrals of mixtures exactly:
        int_a^b q(u) du = (b-1) q(b) - (a-1) q(a) + int_{q(a)}^{q(b)} sf dx.
        """
        if x1 < x0:
            raise ValueError("need x0 <= x1")
        if x0 == x1:
            return 0.0
        return self._stop_loss_between(x0, x1)

    def _stop_loss_between(self, x0: float, x1: float) -> float:
        return _adaptive_simpson(lambda x: float(self.sf(x)), x0, x1)

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def atoms(self) -> tuple[float, ...]:
        """Locations of point masses (empty for continuous families)."""
        return ()

    def density_class(self) -> DensityClass:
        return DensityClass.UNKNOWN

    def tail_density_class(self, p: float) -> DensityClass:
        """Monotonicity class of the p-tail distribution's density.

        Looser than density_class: a unimodal density has a decreasing
        p-tail as soon as quantile(p) is past the mode.
        """
        return self.density_class()

    # ---- transforms ---------------------------------------------------

    def shifted(self, x: float) -> "Distribution":
        return affine(self, shift=float(x), scale=1.0)

    def scaled(self, lam: float) -> "Distribution":
        return affine(self, shift=0.0, scale=float(lam))

    def p_tail(self, p: float) -> "Distribution":
        """Distribution of quantile(U) for U uniform on [p, 1]."""
        p = _check_prob(p)
        return TailDistribution(self, p)

    def negated(self) -> "Distribution":
        """Distribution of -X (continuous distributions only)."""
        if self.atoms():
            raise ValueError("negation is only supported for continuous distributions")
        return NegatedDistribution(self)

    # ---- numeric helpers ----------------------------------------------

    def _quantile_bracket(self, p: float) -> tuple[float, float]:
        lo, hi = self.support()
        if math.isinf(lo):
            lo = -1.0
            while self.cdf_scalar(lo) >= p:
                lo *= 2.0
                if lo < -1e300:
                    break
        if math.isinf(hi):
            hi = max(1.0, 2.0 * abs(lo))
            while self.cdf_scalar(hi) < p:
                hi *= 2.0
                if hi > 1e300:
                    break
        return float(lo), float(hi)

    def _bisect_quantile(self, p: float, strict: bool) -> float:
        lo, hi = self._quantile_bracket(p)
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


def _quantile_integral_quadrature(d: Distribution, a: float, b: float) -> float:
    """Adaptive Simpson of the quantile over [a, b] in probability space.

    Endpoint singularities (u -> 0 or 1 on unbounded support) are handled
    by shrinking panels geometrically toward the endpoint.
    """
    lo, hi = d.support()
    total = 0.0
    if a == 0.0 and math.isinf(lo):
        raise ValueError("quantile integral from 0 needs a bounded-below support")
    if b == 1.0:
        if math.isinf(hi):
            # geometric panels toward 1; declare divergence if partial sums blow up
            t = 1e-3
            total += _adaptive_simpson(lambda u: d.quantile(u), a, 1.0 - t)
            while t > 1e-15:
                piece = _adaptive_simpson(lambda u: d.quantile(u), 1.0 - t, 1.0 - t / 8.0)
                total += piece
                if not math.isfinite(total) or total > 1e280:
                    return INF
                t /= 8.0
            # remaining mass below 1e-15 is negligible for integrable tails,
            # but a non-integrable tail keeps growing: probe once more
            if d.quantile(1.0 - 1e-15) * 1e-15 > max(1e-8, 1e-10 * abs(total)):
                tail_probe = _adaptive_simpson(
                    lambda u: d.quantile(u), 1.0 - 1e-15, 1.0 - 1e-18
                )
                total += tail_probe
                if tail_probe > max(1.0, abs(total)):
                    return INF
            return total
        b_eff = 1.0
        return total + _adaptive_simpson(lambda u: d.quantile(min(u, 1 - 1e-16)), a, b_eff)
    return total + _adaptive_simpson(lambda u: d.quantile(u), a, b)


def _adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 40) -> float:
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + _simpson_rec(
        f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1
    )


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Pareto(Distribution):
    """cdf 1 - (theta/x)^alpha on [theta, inf)."""

    alpha: float
    theta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.theta <= 0:
            raise ValueError("Pareto requires alpha > 0 and theta > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x >= self.theta, 1.0 - (self.theta / np.maximum(x, self.theta)) ** self.alpha, 0.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        if x <= self.theta:
            return 0.0
        return 1.0 - (self.theta / x) ** self.alpha

    def _quantile(self, p):
        return self.theta * (1.0 - p) ** (-1.0 / self.alpha)

    def _quantile_integral(self, a, b):
        al, th = self.alpha, self.theta
        if b == 1.0 and al <= 1.0:
            return INF
        if al == 1.0:
            return th * (math.log1p(-a) - math.log1p(-b))
        c = 1.0 - 1.0 / al
        ub = 0.0 if b == 1.0 else (1.0 - b) ** c
        return th / c * ((1.0 - a) ** c - ub)

    def mean(self):
        if self.alpha <= 1.0:
            return INF
        return self.alpha * self.theta / (self.alpha - 1.0)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x >= self.theta, (self.theta / np.maximum(x, self.theta)) ** self.alpha, 1.0)
        return out if out.ndim else float(out)

    def _stop_loss_between(self, x0, x1):
        al, th = self.alpha, self.theta
        total = 0.0
        if x0 < th:
            total += min(x1, th) - x0
            x0 = th
        if x1 <= x0:
            return total
        if al == 1.0:
            return total + th * (math.log(x1) - math.log(x0))
        return total + th**al / (1.0 - al) * (x1 ** (1.0 - al) - x0 ** (1.0 - al))

    def support(self):
        return (self.theta, INF)

    def density_class(self):
        return DensityClass.DECREASING

    def p_tail(self, p):
        p = _check_prob(p)
        return Pareto(self.alpha, self.theta * (1.0 - p) ** (-1.0 / self.alpha))


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("Uniform requires b > a")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        return min(max((x - self.a) / (self.b - self.a), 0.0), 1.0)

    def _quantile(self, p):
        return self.a + (self.b - self.a) * p

    def _quantile_integral(self, a, b):
        return self.a * (b - a) + 0.5 * (self.b - self.a) * (b * b - a * a)

    def mean(self):
        return 0.5 * (self.a + self.b)

    def _stop_loss_between(self, x0, x1):
        total = 0.0
        if x0 < self.a:
            total += min(x1, self.a) - x0
            x0 = self.a
        lo, hi = x0, min(x1, self.b)
        if hi > lo:
            w = self.b - self.a
            total += ((self.b - lo) ** 2 - (self.b - hi) ** 2) / (2.0 * w)
        return total

    def support(self):
        return (self.a, self.b)

    def density_class(self):
        return DensityClass.CONSTANT

    def p_tail(self, p):
        p = _check_prob(p)
        return Uniform(self.a + (self.b - self.a) * p, self.b)


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("Exponential requires rate > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        return -math.expm1(-self.rate * x) if x > 0.0 else 0.0

    def _quantile(self, p):
        return -math.log1p(-p) / self.rate

    def _quantile_integral(self, a, b):
        def anti(u):  # antiderivative of -log(1-u)
            if u == 1.0:
                return 1.0
            return (1.0 - u) * math.log1p(-u) + u

        return (anti(b) - anti(a)) / self.rate

    def mean(self):
        return 1.0 / self.rate

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)
        return out if out.ndim else float(out)

    def _stop_loss_between(self, x0, x1):
        total = 0.0
        if x0 < 0.0:
            total += min(x1, 0.0) - x0
            x0 = 0.0
        if x1 <= x0:
            return total
        return total + (math.exp(-self.rate * x0) - math.exp(-self.rate * x1)) / self.rate

    def support(self):
        return (0.0, INF)

    def density_class(self):
        return DensityClass.DECREASING


@dataclass(frozen=True)
class Gamma(Distribution):
    """Gamma(shape, scale); density is decreasing iff shape <= 1."""

    shape: float
    scale: float

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("Gamma requires shape > 0 and scale > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = sp.gammainc(self.shape, np.maximum(x, 0.0) / self.scale)
        out = np.where(x > 0, out, 0.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        return float(sp.gammainc(self.shape, x / self.scale)) if x > 0.0 else 0.0

    def _quantile(self, p):
        return self.scale * sp.gammaincinv(self.shape, p)

    def _quantile_integral(self, a, b):
        # int x dF = shape*scale * F_{shape+1}(x)
        xa = 0.0 if a == 0.0 else self._quantile(a) / self.scale
        xb = INF if b == 1.0 else self._quantile(b) / self.scale
        fb = 1.0 if b == 1.0 else sp.gammainc(self.shape + 1.0, xb)
        fa = sp.gammainc(self.shape + 1.0, xa)
        return self.shape * self.scale * (fb - fa)

    def mean(self):
        return self.shape * self.scale

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, sp.gammaincc(self.shape, np.maximum(x, 0.0) / self.scale), 1.0)
        return out if out.ndim else float(out)

    def _stop_loss_between(self, x0, x1):
        # d/dx [x sf(x)] = sf(x) - x f(x), so int sf = [x sf] + int x f dx
        total = 0.0
        if x0 < 0.0:
            total += min(x1, 0.0) - x0
            x0 = 0.0
        if x1 <= x0:
            return total
        k, s = self.shape, self.scale
        mean_part = k * s * (sp.gammainc(k + 1.0, x1 / s) - sp.gammainc(k + 1.0, x0 / s))
        return total + x1 * float(self.sf(x1)) - x0 * float(self.sf(x0)) + mean_part

    def support(self):
        return (0.0, INF)

    def density_class(self):
        if self.shape <= 1.0:
            return DensityClass.DECREASING
        return DensityClass.UNKNOWN

    def tail_density_class(self, p):
        if self.shape <= 1.0:
            return DensityClass.DECREASING
        mode = (self.shape - 1.0) * self.scale
        if self.quantile(p) >= mode:
            return DensityClass.DECREASING
        return DensityClass.UNKNOWN


@dataclass(frozen=True)
class Weibull(Distribution):
    """Weibull(scale, shape); cdf 1 - exp(-(x/scale)^shape)."""

    scale: float
    shape: float

    def __post_init__(self):
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("Weibull requires shape > 0 and scale > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, -np.expm1(-((np.maximum(x, 0.0) / self.scale) ** self.shape)), 0.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        return -math.expm1(-((x / self.scale) ** self.shape)) if x > 0.0 else 0.0

    def _quantile(self, p):
        return self.scale * (-math.log1p(-p)) ** (1.0 / self.shape)

    def _quantile_integral(self, a, b):
        # substitute t = -log(1-u): integral = scale * int t^{1/shape} e^{-t} dt
        k = 1.0 + 1.0 / self.shape
        ta = -math.log1p(-a)
        tb = INF if b == 1.0 else -math.log1p(-b)
        fb = 1.0 if b == 1.0 else sp.gammainc(k, tb)
        return self.scale * math.gamma(k) * (fb - sp.gammainc(k, ta))

    def mean(self):
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, np.exp(-((np.maximum(x, 0.0) / self.scale) ** self.shape)), 1.0)
        return out if out.ndim else float(out)

    def _stop_loss_between(self, x0, x1):
        total = 0.0
        if x0 < 0.0:
            total += min(x1, 0.0) - x0
            x0 = 0.0
        if x1 <= x0:
            return total
        k = 1.0 + 1.0 / self.shape
        t0, t1 = (x0 / self.scale) ** self.shape, (x1 / self.scale) ** self.shape
        mean_part = self.scale * math.gamma(k) * (sp.gammainc(k, t1) - sp.gammainc(k, t0))
        return total + x1 * math.exp(-t1) - x0 * math.exp(-t0) + mean_part

    def support(self):
        return (0.0, INF)

    def density_class(self):
        if self.shape <= 1.0:
            return DensityClass.DECREASING
        return DensityClass.UNKNOWN

    def tail_density_class(self, p):
        if self.shape <= 1.0:
            return DensityClass.DECREASING
        mode = self.scale * ((self.shape - 1.0) / self.shape) ** (1.0 / self.shape)
        if self.quantile(p) >= mode:
            return DensityClass.DECREASING
        return DensityClass.UNKNOWN


@dataclass(frozen=True)
class LogNormal(Distribution):
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("LogNormal requires sigma > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x > 0, sp.ndtr((np.log(np.maximum(x, 1e-320)) - self.mu) / self.sigma), 0.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        return float(sp.ndtr((math.log(x) - self.mu) / self.sigma))

    def _quantile(self, p):
        return math.exp(self.mu + self.sigma * sp.ndtri(p))

    def _quantile_integral(self, a, b):
        # partial expectation: int_{-inf}^{z} e^{mu + sigma t} dPhi(t)
        za = -INF if a == 0.0 else sp.ndtri(a)
        zb = INF if b == 1.0 else sp.ndtri(b)
        m = math.exp(self.mu + 0.5 * self.sigma**2)
        return m * (sp.ndtr(zb - self.sigma) - sp.ndtr(za - self.sigma))

    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x > 0, sp.ndtr(-(np.log(np.maximum(x, 1e-320)) - self.mu) / self.sigma), 1.0)
        return out if out.ndim else float(out)

    def _stop_loss_between(self, x0, x1):
        total = 0.0
        if x0 <= 0.0:
            total += min(x1, 0.0) - x0
            x0 = 0.0
        if x1 <= x0:
            return total
        z0 = -INF if x0 == 0.0 else (math.log(x0) - self.mu) / self.sigma
        z1 = (math.log(x1) - self.mu) / self.sigma
        m = math.exp(self.mu + 0.5 * self.sigma**2)
        mean_part = m * (sp.ndtr(z1 - self.sigma) - sp.ndtr(z0 - self.sigma))
        return total + x1 * float(self.sf(x1)) - x0 * float(self.sf(x0)) + mean_part

    def support(self):
        return (0.0, INF)

    def tail_density_class(self, p):
        mode = math.exp(self.mu - self.sigma**2)
        if self.quantile(p) >= mode:
            return DensityClass.DECREASING
        return DensityClass.UNKNOWN


@dataclass(frozen=True)
class PowerFunction(Distribution):
    """cdf x^c on [0, 1]; decreasing density iff c <= 1."""

    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("PowerFunction requires c > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.clip(x, 0.0, 1.0) ** self.c
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        return min(max(x, 0.0), 1.0) ** self.c

    def _quantile(self, p):
        return p ** (1.0 / self.c)

    def _quantile_integral(self, a, b):
        e = 1.0 + 1.0 / self.c
        return (b**e - a**e) / e

    def mean(self):
        return self.c / (self.c + 1.0)

    def _stop_loss_between(self, x0, x1):
        total = 0.0
        if x0 < 0.0:
            total += min(x1, 0.0) - x0
            x0 = 0.0
        lo, hi = x0, min(x1, 1.0)
        if hi > lo:
            e = self.c + 1.0
            total += (hi - lo) - (hi**e - lo**e) / e
        return total

    def support(self):
        return (0.0, 1.0)

    def density_class(self):
        if self.c < 1.0:
            return DensityClass.DECREASING
        if self.c == 1.0:
            return DensityClass.CONSTANT
        return DensityClass.INCREASING


@dataclass(frozen=True)
class PointMass(Distribution):
    x: float

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        out = np.where(y >= self.x, 1.0, 0.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, y: float) -> float:
        return 1.0 if y >= self.x else 0.0

    def _quantile(self, p):
        return self.x

    def _upper_quantile(self, p):
        return self.x

    def _quantile_integral(self, a, b):
        return self.x * (b - a)

    def mean(self):
        return self.x

    def _stop_loss_between(self, x0, x1):
        return max(0.0, min(x1, self.x) - x0)

    def support(self):
        return (self.x, self.x)

    def atoms(self):
        return (self.x,)

    def p_tail(self, p):
        _check_prob(p)
        return self


class _DiscreteOnIntegers(Distribution):
    """Shared machinery for Bernoulli/Binomial: atoms at 0..m with exact
    plateau arithmetic for quantiles and quantile integrals."""

    _values: np.ndarray  # sorted support
    _cdf_table: np.ndarray  # cdf at each support point

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._values, x, side="right")
        padded = np.concatenate(([0.0], self._cdf_table))
        out = padded[idx]
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        idx = int(np.searchsorted(self._values, x, side="right"))
        return float(self._cdf_table[idx - 1]) if idx > 0 else 0.0

    def _quantile(self, p):
        k = int(np.searchsorted(self._cdf_table, p, side="left"))
        return float(self._values[min(k, len(self._values) - 1)])

    def _upper_quantile(self, p):
        k = int(np.searchsorted(self._cdf_table, p, side="right"))
        return float(self._values[min(k, len(self._values) - 1)])

    def _quantile_integral(self, a, b):
        # quantile is piecewise constant: value v_k on (cdf[k-1], cdf[k]]
        total = 0.0
        prev = 0.0
        for v, c in zip(self._values, self._cdf_table):
            lo = max(a, prev)
            hi = min(b, c)
            if hi > lo:
                total += v * (hi - lo)
            prev = c
            if prev >= b:
                break
        return total

    def _stop_loss_between(self, x0, x1):
        # survival function is a step function with jumps at the atoms
        cuts = [x0] + [float(v) for v in self._values if x0 < v < x1] + [x1]
        return sum(
            (hi - lo) * (1.0 - float(self.cdf(lo))) for lo, hi in zip(cuts[:-1], cuts[1:])
        )

    def support(self):
        return (float(self._values[0]), float(self._values[-1]))

    def atoms(self):
        return tuple(float(v) for v in self._values)


@dataclass(frozen=True)
class Binomial(_DiscreteOnIntegers):
    m: int
    q: float
    _values: np.ndarray = field(init=False, repr=False, compare=False)
    _cdf_table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1 or int(self.m) != self.m:
            raise ValueError("Binomial requires a positive integer m")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("Binomial requires q in [0,1]")
        m, q = int(self.m), self.q
        pmf = np.array([math.comb(m, k) * q**k * (1 - q) ** (m - k) for k in range(m + 1)])
        cdf = np.minimum(np.cumsum(pmf), 1.0)
        cdf[-1] = 1.0
        object.__setattr__(self, "_values", np.arange(m + 1, dtype=float))
        object.__setattr__(self, "_cdf_table", cdf)

    def mean(self):
        return self.m * self.q


@dataclass(frozen=True)
class Bernoulli(_DiscreteOnIntegers):
    q: float
    _values: np.ndarray = field(init=False, repr=False, compare=False)
    _cdf_table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("Bernoulli requires q in [0,1]")
        object.__setattr__(self, "_values", np.array([0.0, 1.0]))
        object.__setattr__(self, "_cdf_table", np.array([1.0 - self.q, 1.0]))

    def mean(self):
        return self.q


# ----------------------------------------------------------------------
# wrappers
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class AffineDistribution(Distribution):
    """shift + scale * X for scale > 0."""

    base: Distribution
    shift: float
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("AffineDistribution requires scale > 0 (scale 0 is a PointMass)")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self.base.cdf((x - self.shift) / self.scale)
        return out if np.ndim(out) else float(out)

    def cdf_scalar(self, x: float) -> float:
        return self.base.cdf_scalar((x - self.shift) / self.scale)

    def _quantile(self, p):
        return self.shift + self.scale * self.base.quantile(p)

    def _upper_quantile(self, p):
        return self.shift + self.scale * self.base.upper_quantile(p)

    def _quantile_integral(self, a, b):
        return self.shift * (b - a) + self.scale * self.base.quantile_integral(a, b)

    def mean(self):
        m = self.base.mean()
        return INF if math.isinf(m) else self.shift + self.scale * m

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = self.base.sf((x - self.shift) / self.scale)
        return out if np.ndim(out) else float(out)

    def _stop_loss_between(self, x0, x1):
        s = self.scale
        return s * self.base.stop_loss_between((x0 - self.shift) / s, (x1 - self.shift) / s)

    def support(self):
        lo, hi = self.base.support()
        return (self.shift + self.scale * lo, self.shift + self.scale * hi)

    def atoms(self):
        return tuple(self.shift + self.scale * a for a in self.base.atoms())

    def density_class(self):
        return self.base.density_class()

    def tail_density_class(self, p):
        return self.base.tail_density_class(p)

    def p_tail(self, p):
        _check_prob(p)
        return affine(self.base.p_tail(p), self.shift, self.scale)


def affine(base: Distribution, shift: float = 0.0, scale: float = 1.0) -> Distribution:
    """shift + scale * X with scale >= 0; collapses scale == 0 to a point mass
    and merges nested affine wrappers."""
    if scale < 0:
        raise ValueError("scale factor must be nonnegative")
    if scale == 0.0:
        return PointMass(shift)
    if shift == 0.0 and scale == 1.0:
        return base
    if isinstance(base, AffineDistribution):
        return AffineDistribution(base.base, shift + scale * base.shift, scale * base.scale)
    if isinstance(base, Pareto):
        if shift == 0.0:
            return Pareto(base.alpha, scale * base.theta)
    if isinstance(base, Uniform):
        return Uniform(shift + scale * base.a, shift + scale * base.b)
    if isinstance(base, PointMass):
        return PointMass(shift + scale * base.x)
    if isinstance(base, Exponential) and shift == 0.0:
        return Exponential(base.rate / scale)
    return AffineDistribution(base, shift, scale)


@dataclass(frozen=True)
class TailDistribution(Distribution):
    """Distribution of quantile(U) for U uniform on [p, 1]."""

    base: Distribution
    p: float

    def cdf(self, x):
        out = (np.asarray(self.base.cdf(x), dtype=float) - self.p) / (1.0 - self.p)
        out = np.clip(out, 0.0, 1.0)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        return min(max((self.base.cdf_scalar(x) - self.p) / (1.0 - self.p), 0.0), 1.0)

    def _quantile(self, u):
        return self.base.quantile(self.p + (1.0 - self.p) * u)

    def _quantile_integral(self, a, b):
        p = self.p
        return self.base.quantile_integral(p + (1.0 - p) * a, p + (1.0 - p) * b) / (1.0 - p)

    def sf(self, x):
        out = np.minimum(np.asarray(self.base.sf(x), dtype=float) / (1.0 - self.p), 1.0)
        return out if out.ndim else float(out)

    def _stop_loss_between(self, x0, x1):
        qp = self.base.quantile(self.p)
        total = 0.0
        if x0 < qp:
            total += min(x1, qp) - x0
            x0 = qp
        if x1 > x0:
            total += self.base.stop_loss_between(x0, x1) / (1.0 - self.p)
        return total

    def support(self):
        lo_p = self.base.quantile(self.p)
        return (lo_p, self.base.support()[1])

    def atoms(self):
        lo = self.base.quantile(self.p)
        return tuple(a for a in self.base.atoms() if a >= lo)

    def density_class(self):
        return self.base.tail_density_class(self.p)

    def tail_density_class(self, q):
        return self.base.tail_density_class(self.p + (1.0 - self.p) * q)


@dataclass(frozen=True)
class NegatedDistribution(Distribution):
    """-X for a continuous X (quantile convention needs no atom bookkeeping)."""

    base: Distribution

    def cdf(self, x):
        out = 1.0 - np.asarray(self.base.cdf(-np.asarray(x, dtype=float)), dtype=float)
        return out if out.ndim else float(out)

    def cdf_scalar(self, x: float) -> float:
        return 1.0 - self.base.cdf_scalar(-x)

    def _quantile(self, p):
        return -self.base.quantile(1.0 - p)

    def _quantile_integral(self, a, b):
        return -self.base.quantile_integral(1.0 - b, 1.0 - a)

    def mean(self):
        m = self.base.mean()
        return INF if math.isinf(m) else -m

    def sf(self, x):
        out = np.asarray(self.base.cdf(-np.asarray(x, dtype=float)), dtype=float)
        return out if out.ndim else float(out)

    def _stop_loss_between(self, x0, x1):
        return (x1 - x0) - self.base.stop_loss_between(-x1, -x0)

    def support(self):
        lo, hi = self.base.support()
        return (-hi, -lo)

    def density_class(self):
        c = self.base.density_class()
        if c is DensityClass.DECREASING:
            return DensityClass.INCREASING
        if c is DensityClass.INCREASING:
            return DensityClass.DECREASING
        return c

    def tail_density_class(self, p):
        # the p-tail of -X mirrors the lower (1-p)-part of X; only a globally
        # monotone density gives a definite answer
        return self.density_class()


# ----------------------------------------------------------------------
# margin vectors and the comonotonic sum
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class MarginVector:
    """Ordered tuple of n >= 2 marginal distributions."""

    margins: tuple[Distribution, ...]

    def __init__(self, margins: Sequence[Distribution]):
        margins = tuple(margins)
        if len(margins) < 2:
            raise ValueError("a margin vector needs n >= 2 components")
        for m in margins:
            if not isinstance(m, Distribution):
                raise TypeError(f"not a Distribution: {m!r}")
        object.__setattr__(self, "margins", margins)

    def __len__(self):
        return len(self.margins)

    def __iter__(self):
        return iter(self.margins)

    def __getitem__(self, i):
        return self.margins[i]

    @property
    def n(self) -> int:
        return len(self.margins)

    def density_class(self) -> MarginClass:
        return _aggregate_class(m.density_class() for m in self.margins)

    def tail_density_class(self, p: float) -> MarginClass:
        return _aggregate_class(m.tail_density_class(p) for m in self.margins)

    def has_finite_means(self) -> bool:
        return all(m.has_finite_mean() for m in self.margins)


def _aggregate_class(classes) -> MarginClass:
    classes = list(classes)
    if all(is_decreasing_eligible(c) for c in classes):
        return MarginClass.ALL_DECREASING
    if all(is_increasing_eligible(c) for c in classes):
        return MarginClass.ALL_INCREASING
    return MarginClass.MIXED


def comonotonic_sum(margins: MarginVector | Sequence[Distribution]) -> Distribution:
    """Distribution whose quantile is the pointwise sum of the margins' quantiles."""
    ms = tuple(margins)
    if len(ms) < 2:
        raise ValueError("comonotonic sum needs n >= 2 margins")
    if all(isinstance(m, PointMass) for m in ms):
        return PointMass(sum(m.x for m in ms))
    if all(isinstance(m, Pareto) for m in ms):
        alphas = {m.alpha for m in ms}
        if len(alphas) == 1:
            return Pareto(ms[0].alpha, sum(m.theta for m in ms))
    if all(isinstance(m, Uniform) for m in ms):
        return Uniform(sum(m.a for m in ms), sum(m.b for m in ms))
    from .mixtures import QuantileCombination

    return QuantileCombination(tuple((1.0, m) for m in ms))


# ----------------------------------------------------------------------
# config grammar
# ----------------------------------------------------------------------

_FAMILY_KEYS = {
    "pareto": ("alpha", "theta"),
    "uniform": ("a", "b"),
    "gamma": ("shape", "theta"),
    "weibull": ("theta", "shape"),
    "lognormal": ("mu", "sigma"),
    "binomial": ("m", "q"),
    "bernoulli": ("q",),
    "pointmass": ("x",),
    "exponential": ("rate",),
    "powerfunction": ("c",),
}


def from_config(spec: dict) -> Distribution:
    """Build a distribution from its JSON description.

    Example: ``{"family": "pareto", "alpha": 3.0, "theta": 1.0,
    "shift": 0.0, "scale": 1.0}``.  ``shift`` and ``scale`` are the optional
    location/scale wrappers and default to 0 and 1.
    """
    if "family" not in spec:
        raise ValueError("distribution spec needs a 'family' key")
    family = str(spec["family"]).lower()
    if family not in _FAMILY_KEYS:
        raise ValueError(f"unknown distribution family {family!r}")
    keys = _FAMILY_KEYS[family]
    missing = [k for k in keys if k not in spec]
    if missing:
        raise ValueError(f"family {family!r} needs keys {list(keys)}, missing {missing}")
    args = [spec[k] for k in keys]
    ctor = {
        "pareto": Pareto,
        "uniform": Uniform,
        "gamma": lambda shape, theta: Gamma(shape, theta),
        "weibull": lambda theta, shape: Weibull(theta, shape),
        "lognormal": LogNormal,
        "binomial": lambda m, q: Binomial(int(m), q),
        "bernoulli": Bernoulli,
        "pointmass": PointMass,
        "exponential": Exponential,
        "powerfunction": PowerFunction,
    }[family]
    d = ctor(*args)
    return affine(d, shift=float(spec.get("shift", 0.0)), scale=float(spec.get("scale", 1.0)))
