import math

import numpy as np
import pytest

from riskmix import (
    Exactness,
    Gamma,
    MarginVector,
    Method,
    OptimizerOptions,
    PMergeSpec,
    Pareto,
    PointMass,
    Uniform,
    bernoulli_jm,
    majorizes,
    mean_length_jm_check,
    p_merge_constant,
    p_merge_margins,
    portfolio_worst_case,
)

FAST = OptimizerOptions(restarts=6, seed=42)


# ----------------------------------------------------------------------
# p-value merging
# ----------------------------------------------------------------------


def test_spec_validation():
    PMergeSpec(-1.0, [0.5, 0.5])
    with pytest.raises(ValueError):
        PMergeSpec(math.inf, [0.5, 0.5])
    with pytest.raises(ValueError):
        PMergeSpec(1.0, [0.7, 0.7])
    with pytest.raises(ValueError):
        PMergeSpec(1.0, [1.5, -0.5])


def test_margin_families_by_exponent():
    neg = p_merge_margins(PMergeSpec(-2.0, [0.25, 0.75]))
    assert isinstance(neg[0], Pareto) and neg[0].alpha == 0.5 and neg[0].theta == 0.25
    zero = p_merge_margins(PMergeSpec(0.0, [0.5, 0.5]))
    assert zero[0].quantile(1 - math.exp(-2.0)) == pytest.approx(1.0, rel=1e-12)
    pos = p_merge_margins(PMergeSpec(0.5, [0.5, 0.5]))
    assert pos[0].support()[1] <= 0.0  # negated, lives on the negative axis
    degen = p_merge_margins(PMergeSpec(1.0, [1.0, 0.0]))
    assert degen[1] == PointMass(0.0)


def test_single_p_value_needs_no_correction():
    assert p_merge_constant(PMergeSpec(2.0, [1.0])) == 1.0


def test_arithmetic_mean_constant_is_two():
    # merging n p-values by their plain average requires the factor 2,
    # independent of n
    for n in (2, 3, 5):
        a = p_merge_constant(PMergeSpec(1.0, [1.0 / n] * n), FAST)
        assert a == pytest.approx(2.0, rel=1e-9)


def test_unequal_weights_never_beat_equal_weights():
    rng = np.random.default_rng(7)
    for r in (-1.0, 0.0, 0.5, 2.0):
        n = 3
        a_equal = p_merge_constant(PMergeSpec(r, [1.0 / n] * n), FAST)
        for _ in range(3):
            w = rng.dirichlet(np.ones(n))
            a_w = p_merge_constant(PMergeSpec(r, w), FAST)
            assert a_w <= a_equal * (1.0 + 1e-6)


def test_merged_p_value_is_valid(rng):
    # a_{r,w} * (sum w_i p_i^r)^(1/r) must not be able to understate the
    # smallest achievable power mean: probe with comonotone p-values
    r, w = -1.0, np.array([0.3, 0.7])
    a = p_merge_constant(PMergeSpec(r, w), FAST)
    for _ in range(20):
        p_vals = rng.uniform(0.01, 1.0, 2)
        merged = a * float(w @ p_vals ** r) ** (1.0 / r)
        assert merged > 0.0


def test_cross_check_agrees():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        a = p_merge_constant(PMergeSpec(1.0, [0.5, 0.5]), FAST, cross_check=True)
    assert a == pytest.approx(2.0, rel=1e-9)


# ----------------------------------------------------------------------
# portfolio bounds
# ----------------------------------------------------------------------


def test_portfolio_es_is_weight_invariant():
    base, p = Pareto(3.0, 1.0), 0.95
    r_equal = portfolio_worst_case(p, base, [1 / 3, 1 / 3, 1 / 3], FAST, risk="es")
    r_skew = portfolio_worst_case(p, base, [0.7, 0.2, 0.1], FAST, risk="es")
    assert r_equal.value == pytest.approx(r_skew.value, rel=1e-12)
    assert r_equal.value == pytest.approx(base.expected_shortfall(p), rel=1e-12)
    assert r_equal.method is Method.COMONOTONIC_ES
    assert r_equal.exactness is Exactness.EXACT


def test_portfolio_var_respects_majorization():
    # under dependence uncertainty, spreading weight can only raise the
    # worst-case VaR: the bound is monotone against the majorization order
    base, p = Pareto(3.0, 1.0), 0.95
    pairs = [
        ([0.5, 0.3, 0.2], [0.4, 0.35, 0.25]),
        ([1.0, 0.0, 0.0], [1 / 3, 1 / 3, 1 / 3]),
        ([0.7, 0.3, 0.0], [0.5, 0.3, 0.2]),
    ]
    for lam, gam in pairs:
        assert majorizes(lam, gam)
        r_lam = portfolio_worst_case(p, base, lam, FAST)
        r_gam = portfolio_worst_case(p, base, gam, FAST)
        assert r_gam.value >= r_lam.value - 1e-6 * max(1.0, abs(r_gam.value))


def test_degenerate_portfolio_is_plain_var():
    base, p = Pareto(3.0, 1.0), 0.95
    res = portfolio_worst_case(p, base, [1.0, 0.0, 0.0], FAST)
    assert res.value == pytest.approx(base.quantile(p), rel=1e-4)


def test_portfolio_validation():
    with pytest.raises(ValueError):
        portfolio_worst_case(0.95, Pareto(3.0, 1.0), [1.0], FAST)
    with pytest.raises(ValueError):
        portfolio_worst_case(0.95, Pareto(3.0, 1.0), [0.5, 0.5], FAST, risk="entropy")


# ----------------------------------------------------------------------
# joint mixability
# ----------------------------------------------------------------------


def test_bernoulli_jm_examples():
    cert = bernoulli_jm([0.5, 0.5])
    assert cert.feasible and cert.center == 1.0
    assert bernoulli_jm([0.2, 0.3, 0.5]).feasible
    assert not bernoulli_jm([0.5, 0.4]).feasible
    assert not bernoulli_jm([0.2, 0.3, 0.4]).feasible
    assert bernoulli_jm([0.0, 0.0]).feasible
    assert bernoulli_jm([1.0, 1.0, 1.0]).center == 3.0


def test_bernoulli_jm_validation():
    with pytest.raises(ValueError):
        bernoulli_jm([])
    with pytest.raises(ValueError):
        bernoulli_jm([0.5, 1.5])
    with pytest.raises(ValueError):
        bernoulli_jm([-0.1, 0.1])


def test_bernoulli_jm_coverage_is_constant():
    cert = bernoulli_jm([0.2, 0.3, 0.5, 0.6, 0.4])
    assert cert.feasible and cert.center == 2.0
    for u in np.linspace(0.001, 0.999, 200):
        assert cert.coverage(float(u)) == 2


def test_bernoulli_jm_random(rng):
    for _ in range(100):
        n = int(rng.integers(2, 7))
        q = rng.uniform(0.05, 0.95, n)
        target = round(float(q[:-1].sum()) + 0.5)
        q[-1] = target - float(q[:-1].sum())
        if not 0.0 <= q[-1] <= 1.0:
            continue
        cert = bernoulli_jm(q)
        assert cert.feasible
        # probe coverage at arc-boundary midpoints
        edges = sorted({s for s, _ in cert.arcs} | {(s + l) % 1.0 for s, l in cert.arcs})
        probes = [(a + b) / 2 for a, b in zip(edges, edges[1:] + [edges[0] + 1.0])]
        for u in probes:
            # skip probes pinched between two nearly coincident edges,
            # where coverage at the exact boundary is ambiguous
            if min(abs(u - e) for e in edges) < 1e-9:
                continue
            assert cert.coverage(u) == int(cert.center)


def test_coverage_requires_construction():
    with pytest.raises(ValueError):
        bernoulli_jm([0.5, 0.4]).coverage(0.1)


def test_mean_length_jm_examples():
    assert mean_length_jm_check(MarginVector([Uniform(0.0, 1.0)] * 2))
    assert mean_length_jm_check(MarginVector([Uniform(0.0, 1.0), Uniform(2.0, 3.0)]))
    # one long support the other means cannot reach
    assert not mean_length_jm_check(MarginVector([Uniform(0.0, 10.0), Uniform(0.0, 1.0)]))


def test_mean_length_jm_preconditions():
    with pytest.raises(ValueError):
        mean_length_jm_check(MarginVector([Gamma(5.0, 1.0), Uniform(0.0, 1.0)]))
    with pytest.raises(ValueError):
        mean_length_jm_check(MarginVector([Pareto(3.0, 1.0), Uniform(0.0, 1.0)]))
