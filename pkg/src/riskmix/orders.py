"""Majorization, Birkhoff decomposition and grid-based stochastic orders.

The order checks are sound on the supplied grid only: a ``True`` answer
certifies the defining inequality at every grid point, nothing between
them.  The default grid mixes equally spaced probabilities with
geometrically refined points near 0 and 1 to catch tail behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .distributions import Distribution
from .mixtures import DoublyStochasticMatrix

_SUM_TOL = 1e-10
_RESIDUAL_TOL = 1e-10
_SUPPORT_TOL = 1e-12


def default_grid(n_uniform: int = 512, n_tail: int = 64) -> np.ndarray:
    """Evaluation grid in (0,1): equally spaced core plus geometric tails."""
    core = np.linspace(0.0, 1.0, n_uniform + 2)[1:-1]
    tail = 10.0 ** np.linspace(-12, -2, n_tail)
    return np.unique(np.concatenate([core, tail, 1.0 - tail]))


# ----------------------------------------------------------------------
# majorization
# ----------------------------------------------------------------------


def majorizes(lam: Sequence[float], gam: Sequence[float]) -> bool:
    """True iff gam is majorized by lam (gam is 'more averaged').

    Both vectors must have the same length and sum.  The check compares
    partial sums of the decreasingly sorted vectors.
    """
    lam = np.asarray(lam, dtype=float)
    gam = np.asarray(gam, dtype=float)
    if lam.shape != gam.shape or lam.ndim != 1:
        raise ValueError("vectors must be 1-d of equal length")
    if abs(lam.sum() - gam.sum()) > _SUM_TOL:
        raise ValueError(f"sums differ: {lam.sum()!r} vs {gam.sum()!r}")
    ls = np.cumsum(np.sort(lam)[::-1])
    gs = np.cumsum(np.sort(gam)[::-1])
    return bool(np.all(gs <= ls + _SUM_TOL))


def majorization_matrix(lam: Sequence[float], gam: Sequence[float]) -> DoublyStochasticMatrix:
    """A doubly stochastic L with gam = L @ lam, when gam is majorized by lam.

    Built from at most n-1 T-transforms (two-coordinate averaging steps)
    on the sorted vectors, then conjugated back by the sorting
    permutations.
    """
    lam = np.asarray(lam, dtype=float)
    gam = np.asarray(gam, dtype=float)
    if not majorizes(lam, gam):
        raise ValueError("no doubly stochastic matrix exists: majorization fails")
    n = lam.size

    def perm_matrix(order):
        p = np.zeros((n, n))
        p[np.arange(n), order] = 1.0
        return p

    order_g = np.argsort(-gam, kind="stable")
    y = gam[order_g]
    x = lam.copy()
    mat = np.eye(n)  # running product mapping lam to the current x

    for _ in range(2 * n):
        # keep x sorted descending so the first mismatched coordinate is
        # positive (a prefix-sum consequence of majorization); permutation
        # matrices fold into the accumulated product
        order = np.argsort(-x, kind="stable")
        if np.any(order != np.arange(n)):
            x = x[order]
            mat = perm_matrix(order) @ mat
        diff = x - y
        if np.max(np.abs(diff)) <= _SUM_TOL:
            break
        j = int(np.argmax(diff > _SUM_TOL))
        rest = np.nonzero(diff[j + 1 :] < -_SUM_TOL)[0]
        if diff[j] <= _SUM_TOL or rest.size == 0:
            raise AssertionError("T-transform bookkeeping lost the majorization invariant")
        k = j + 1 + int(rest[0])
        delta = min(x[j] - y[j], y[k] - x[k])
        t = 1.0 - delta / (x[j] - x[k])
        step = np.eye(n)
        step[j, j] = step[k, k] = t
        step[j, k] = step[k, j] = 1.0 - t
        x = step @ x
        mat = step @ mat
    else:
        raise ValueError("T-transform sequence failed to converge")

    # mat maps lam to sorted gam; undo the gam sort
    full = perm_matrix(order_g).T @ mat
    result = DoublyStochasticMatrix(full)
    if np.max(np.abs(result.entries @ lam - gam)) > 1e-9:
        raise AssertionError("constructed matrix does not map lam to gam")
    return result


# ----------------------------------------------------------------------
# Birkhoff decomposition
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BirkhoffDecomposition:
    """Convex combination of permutation matrices reproducing a matrix."""

    terms: tuple[tuple[float, tuple[int, ...]], ...]

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.terms)

    def reconstruct(self) -> np.ndarray:
        n = len(self.terms[0][1])
        out = np.zeros((n, n))
        for w, perm in self.terms:
            out[np.arange(n), list(perm)] += w
        return out

    def __str__(self) -> str:
        lines = ["weight      permutation"]
        for w, perm in self.terms:
            lines.append(f"{w:<10.6g}  {perm}")
        return "\n".join(lines)


def birkhoff(lam: DoublyStochasticMatrix) -> BirkhoffDecomposition:
    """Greedy Birkhoff decomposition into permutation matrices.

    Each step finds a permutation supported on the positive entries of
    the residual (an assignment maximizing the product of entries, so the
    bottleneck entry stays as large as the matrix allows), subtracts the
    minimal entry along it, and repeats until the residual is below
    1e-10.  At most (n-1)^2 + 1 terms result.
    """
    res = np.array(lam.entries, dtype=float)
    n = res.shape[0]
    terms = []
    for _ in range((n - 1) ** 2 + 1):
        scale = float(res.sum()) / n
        if scale < _RESIDUAL_TOL:
            break
        cost = np.where(res > _SUPPORT_TOL, -np.log(np.maximum(res, _SUPPORT_TOL)), 1e6)
        rows, cols = linear_sum_assignment(cost)
        if np.any(res[rows, cols] <= _SUPPORT_TOL):
            raise ValueError("no permutation fits the positive support; input is not doubly stochastic enough")
        w = float(res[rows, cols].min())
        perm = tuple(int(c) for c in cols[np.argsort(rows)])
        terms.append((w, perm))
        res[rows, cols] -= w
        res[res < 0.0] = 0.0
    leftover = float(res.sum()) / n
    if leftover >= _RESIDUAL_TOL:
        raise ValueError(f"decomposition left residual mass {leftover:.3g}")
    total = sum(w for w, _ in terms)
    terms = [(w / total, perm) for w, perm in terms]
    dec = BirkhoffDecomposition(tuple(terms))
    if np.max(np.abs(dec.reconstruct() - lam.entries)) > _RESIDUAL_TOL:
        raise AssertionError("reconstruction drifted beyond tolerance")
    return dec


def sinkhorn(matrix, iterations: int = 200, tol: float = 1e-13) -> np.ndarray:
    """Scale a positive matrix to doubly stochastic form.

    Alternates row and column normalizations; iterates past `iterations`
    only if the sums have not yet settled to `tol`.  Returns a plain
    array (wrap in DoublyStochasticMatrix to validate).
    """
    a = np.array(matrix, dtype=float)
    if np.any(a <= 0.0):
        raise ValueError("Sinkhorn scaling needs strictly positive entries")
    for i in range(max(iterations, 5000)):
        a /= a.sum(axis=1, keepdims=True)
        a /= a.sum(axis=0, keepdims=True)
        if i >= iterations - 1:
            dev = max(
                float(np.max(np.abs(a.sum(axis=1) - 1.0))),
                float(np.max(np.abs(a.sum(axis=0) - 1.0))),
            )
            if dev <= tol:
                break
    return a


# ----------------------------------------------------------------------
# stochastic and convex order (grid-certified)
# ----------------------------------------------------------------------


def stochastic_order_leq(f: Distribution, g: Distribution, grid=None) -> bool:
    """True iff quantile_f(u) <= quantile_g(u) at every grid point."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise ValueError("grid must be nonempty and lie in (0,1)")
    for u in grid:
        qf, qg = f.quantile(float(u)), g.quantile(float(u))
        if qf > qg + 1e-12 * max(1.0, abs(qg)):
            return False
    return True


def convex_order_leq(f: Distribution, g: Distribution, grid=None) -> bool:
    """True iff ES_p(f) <= ES_p(g) at every grid point (means must agree).

    This is the expected-shortfall characterization of the convex order,
    restricted to the grid; infinite means are rejected.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise ValueError("grid must be nonempty and lie in (0,1)")
    mf, mg = f.mean(), g.mean()
    if not (math.isfinite(mf) and math.isfinite(mg)):
        raise ValueError("convex order comparison needs finite means")
    if abs(mf - mg) > 1e-8:
        raise ValueError(f"means differ beyond tolerance: {mf!r} vs {mg!r}")
    for p in grid:
        if f.expected_shortfall(float(p)) > g.expected_shortfall(float(p)) + 1e-9:
            return False
    return True
