import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskmix import (
    Bernoulli,
    Binomial,
    DensityClass,
    Exponential,
    Gamma,
    LogNormal,
    MarginClass,
    MarginVector,
    Pareto,
    PointMass,
    PowerFunction,
    Uniform,
    Weibull,
    affine,
    comonotonic_sum,
    from_config,
)
from conftest import quantile_integral_oracle, stop_loss_oracle

CONTINUOUS = [
    Pareto(3.0, 2.0),
    Pareto(0.5, 1.0),
    Uniform(-1.0, 4.0),
    Exponential(0.7),
    Gamma(5.0, 1.3),
    Gamma(1.0, 2.0),
    Weibull(1.0, 5.0),
    Weibull(1.0, 0.5),
    LogNormal(0.2, 1.1),
    PowerFunction(0.4),
    PowerFunction(2.5),
]

DISCRETE = [Binomial(10, 0.1), Bernoulli(0.3), PointMass(1.5)]


@pytest.mark.parametrize("d", CONTINUOUS, ids=repr)
def test_quantile_cdf_roundtrip(d):
    for p in (1e-6, 0.01, 0.3, 0.5, 0.9, 0.999):
        q = d.quantile(p)
        assert float(d.cdf(q)) == pytest.approx(p, abs=1e-10)


@pytest.mark.parametrize("d", CONTINUOUS + DISCRETE, ids=repr)
def test_cdf_scalar_matches_cdf(d, rng):
    lo, hi = d.support()
    xs = rng.uniform(lo - 1.0 if math.isfinite(lo) else -5.0, min(hi, 50.0) + 1.0, 60)
    for x in xs:
        assert d.cdf_scalar(float(x)) == pytest.approx(float(d.cdf(float(x))), abs=1e-14)


@pytest.mark.parametrize("d", CONTINUOUS, ids=repr)
def test_quantile_integral_against_quadrature(d, rng):
    for _ in range(4):
        a, b = np.sort(rng.uniform(0.005, 0.995, 2))
        if b - a < 1e-3:
            continue
        exact = d.quantile_integral(a, b)
        assert exact == pytest.approx(quantile_integral_oracle(d, a, b), abs=1e-7, rel=1e-9)


@pytest.mark.parametrize("d", CONTINUOUS, ids=repr)
def test_stop_loss_against_quadrature(d, rng):
    q05, q95 = d.quantile(0.05), d.quantile(0.95)
    for _ in range(3):
        x0, x1 = np.sort(rng.uniform(q05, q95, 2))
        assert d.stop_loss_between(x0, x1) == pytest.approx(
            stop_loss_oracle(d, x0, x1), abs=1e-8, rel=1e-8
        )


def test_bounds_checking():
    d = Pareto(3.0, 1.0)
    for bad in (0.0, 1.0, -0.5, 1.2):
        with pytest.raises(ValueError):
            d.quantile(bad)
    with pytest.raises(ValueError):
        d.quantile_integral(0.6, 0.4)
    with pytest.raises(ValueError):
        Pareto(-1.0, 1.0)
    with pytest.raises(ValueError):
        Uniform(1.0, 1.0)
    with pytest.raises(ValueError):
        Binomial(0, 0.5)


def test_pareto_closed_forms():
    d = Pareto(3.0, 2.0)
    p = 0.95
    assert d.quantile(p) == pytest.approx(2.0 * 0.05 ** (-1 / 3), rel=1e-14)
    # ES_p = alpha*theta / ((alpha-1) (1-p)^(1/alpha))
    assert d.expected_shortfall(p) == pytest.approx(3 * 2 / (2 * 0.05 ** (1 / 3)), rel=1e-12)
    assert d.mean() == pytest.approx(3.0, rel=1e-12)


def test_infinite_mean_tail():
    d = Pareto(0.5, 1.0)
    assert d.mean() == math.inf
    assert d.quantile_integral(0.5, 1.0) == math.inf
    assert d.expected_shortfall(0.9) == math.inf
    assert not d.has_finite_mean()
    # finite away from the endpoint
    assert math.isfinite(d.quantile_integral(0.1, 0.9))


def test_means_match_known_formulas():
    assert Gamma(5.0, 1.3).mean() == pytest.approx(6.5, rel=1e-12)
    assert Weibull(2.0, 0.5).mean() == pytest.approx(2.0 * math.gamma(3.0), rel=1e-10)
    assert LogNormal(0.2, 1.1).mean() == pytest.approx(math.exp(0.2 + 1.1**2 / 2), rel=1e-10)
    assert Uniform(-1.0, 4.0).mean() == pytest.approx(1.5, abs=1e-12)
    assert Exponential(0.7).mean() == pytest.approx(1 / 0.7, rel=1e-12)
    assert PowerFunction(0.4).mean() == pytest.approx(0.4 / 1.4, rel=1e-12)
    assert Binomial(10, 0.1).mean() == pytest.approx(1.0, abs=1e-12)


def test_left_quantile_convention_at_atoms():
    d = Bernoulli(0.3)  # P(X=0) = 0.7
    assert d.quantile(0.7) == 0.0  # inf{x : F(x) >= 0.7}
    assert d.upper_quantile(0.7) == 1.0  # strict inequality jumps past the atom
    assert d.quantile(0.70001) == 1.0
    b = Binomial(10, 0.1)
    c1 = float(b.cdf(1.0))
    assert b.quantile(c1) == 1.0 and b.upper_quantile(c1) == 2.0


def test_discrete_quantile_integral_is_exact_plateau_sum():
    b = Binomial(10, 0.1)
    # integral over the whole unit interval is the mean
    assert b.quantile_integral(0.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    # sub-plateau pieces
    c0 = float(b.cdf(0.0))
    assert b.quantile_integral(0.0, c0) == 0.0
    assert b.quantile_integral(c0, float(b.cdf(1.0))) == pytest.approx(
        float(b.cdf(1.0)) - c0, abs=1e-14
    )


def test_affine_collapses():
    assert affine(Pareto(3.0, 1.0), scale=0.0) == PointMass(0.0)
    assert affine(Pareto(3.0, 1.0), scale=2.0) == Pareto(3.0, 2.0)
    assert affine(Uniform(0.0, 1.0), shift=1.0, scale=3.0) == Uniform(1.0, 4.0)
    assert affine(Exponential(2.0), scale=4.0) == Exponential(0.5)
    with pytest.raises(ValueError):
        affine(Pareto(3.0, 1.0), scale=-1.0)
    d = affine(Gamma(2.0, 1.0), shift=1.0, scale=2.0)
    assert d.quantile(0.5) == pytest.approx(1.0 + 2.0 * Gamma(2.0, 1.0).quantile(0.5), rel=1e-12)
    assert d.mean() == pytest.approx(1.0 + 2.0 * 2.0, rel=1e-10)


def test_negation():
    d = Exponential(1.0).negated()
    assert d.quantile(0.25) == pytest.approx(-Exponential(1.0).quantile(0.75), rel=1e-12)
    assert d.mean() == pytest.approx(-1.0, rel=1e-10)
    assert d.density_class() is DensityClass.INCREASING
    with pytest.raises(ValueError):
        Bernoulli(0.5).negated()


def test_p_tail():
    base = Gamma(5.0, 1.0)
    t = base.p_tail(0.9)
    assert t.quantile(0.5) == pytest.approx(base.quantile(0.95), rel=1e-12)
    assert t.mean() == pytest.approx(base.expected_shortfall(0.9), rel=1e-10)
    # p-tail of a Pareto is a rescaled Pareto
    pt = Pareto(2.0, 1.0).p_tail(0.75)
    assert isinstance(pt, Pareto)
    assert pt.theta == pytest.approx(0.25 ** (-0.5), rel=1e-14)


def test_density_classes():
    assert Pareto(3.0, 1.0).density_class() is DensityClass.DECREASING
    assert Exponential(1.0).density_class() is DensityClass.DECREASING
    assert Gamma(1.0, 2.0).density_class() is DensityClass.DECREASING
    assert Weibull(1.0, 0.5).density_class() is DensityClass.DECREASING
    assert Uniform(0.0, 1.0).density_class() is DensityClass.CONSTANT
    assert PowerFunction(2.5).density_class() is DensityClass.INCREASING
    # unimodal families are unknown globally but decreasing past the mode
    for d in (Gamma(5.0, 1.0), Weibull(1.0, 5.0), LogNormal(0.0, 1.0)):
        assert d.density_class() is DensityClass.UNKNOWN
        assert d.tail_density_class(0.95) is DensityClass.DECREASING
    # before the mode the tail still contains the hump
    assert Gamma(5.0, 1.0).tail_density_class(0.01) is DensityClass.UNKNOWN


def test_margin_vector_classes():
    md = MarginVector([Pareto(3.0, 1.0), Exponential(1.0), Uniform(0.0, 1.0)])
    assert md.density_class() is MarginClass.ALL_DECREASING
    assert md.tail_density_class(0.9) is MarginClass.ALL_DECREASING
    mixed = MarginVector([Pareto(3.0, 1.0), PowerFunction(2.0)])
    assert mixed.density_class() is MarginClass.MIXED
    bumped = MarginVector([Gamma(5.0, 1.0), Weibull(1.0, 5.0)])
    assert bumped.density_class() is MarginClass.MIXED
    assert bumped.tail_density_class(0.95) is MarginClass.ALL_DECREASING
    with pytest.raises(ValueError):
        MarginVector([Pareto(3.0, 1.0)])


def test_comonotonic_sum_specializations():
    s = comonotonic_sum([Pareto(3.0, 1.0), Pareto(3.0, 2.0)])
    assert s == Pareto(3.0, 3.0)
    u = comonotonic_sum([Uniform(0.0, 1.0), Uniform(1.0, 2.0)])
    assert u == Uniform(1.0, 3.0)
    pm = comonotonic_sum([PointMass(1.0), PointMass(2.0)])
    assert pm == PointMass(3.0)
    g = comonotonic_sum([Gamma(2.0, 1.0), Exponential(1.0)])
    assert g.quantile(0.7) == pytest.approx(
        Gamma(2.0, 1.0).quantile(0.7) + Exponential(1.0).quantile(0.7), rel=1e-12
    )


def test_from_config_round_trips():
    cases = [
        ({"family": "pareto", "alpha": 3.0, "theta": 1.0}, Pareto(3.0, 1.0)),
        ({"family": "uniform", "a": 0.0, "b": 2.0}, Uniform(0.0, 2.0)),
        ({"family": "gamma", "shape": 5.0, "theta": 1.0}, Gamma(5.0, 1.0)),
        ({"family": "weibull", "theta": 1.0, "shape": 5.0}, Weibull(1.0, 5.0)),
        ({"family": "lognormal", "mu": 0.0, "sigma": 1.0}, LogNormal(0.0, 1.0)),
        ({"family": "binomial", "m": 10, "q": 0.1}, Binomial(10, 0.1)),
        ({"family": "bernoulli", "q": 0.2}, Bernoulli(0.2)),
        ({"family": "pointmass", "x": 1.0}, PointMass(1.0)),
        ({"family": "exponential", "rate": 2.0}, Exponential(2.0)),
        ({"family": "powerfunction", "c": 0.5}, PowerFunction(0.5)),
    ]
    for spec, expected in cases:
        assert from_config(spec) == expected
    shifted = from_config({"family": "pareto", "alpha": 3.0, "theta": 1.0, "scale": 2.0})
    assert shifted == Pareto(3.0, 2.0)
    with pytest.raises(ValueError):
        from_config({"family": "cauchy"})
    with pytest.raises(ValueError):
        from_config({"family": "pareto", "alpha": 3.0})
    with pytest.raises(ValueError):
        from_config({"alpha": 3.0})


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(0.2, 10.0),
    theta=st.floats(0.1, 10.0),
    p=st.floats(1e-4, 1 - 1e-4),
)
def test_pareto_quantile_inverts_cdf(alpha, theta, p):
    d = Pareto(alpha, theta)
    assert float(d.cdf(d.quantile(p))) == pytest.approx(p, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(0.0, 0.99),
    width=st.floats(1e-3, 1.0),
)
def test_quantile_integral_additivity(a, width):
    b = min(a + width, 1.0)
    mid = 0.5 * (a + b)
    d = Gamma(2.0, 1.5)
    whole = d.quantile_integral(a, b)
    parts = d.quantile_integral(a, mid) + d.quantile_integral(mid, b)
    assert whole == pytest.approx(parts, abs=1e-10, rel=1e-10)
