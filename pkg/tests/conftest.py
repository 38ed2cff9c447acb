import numpy as np
import pytest
from scipy.integrate import quad


def quantile_integral_oracle(dist, a, b, **kw):
    """Independent quadrature of the quantile function (scipy QUADPACK)."""
    val, _ = quad(lambda u: dist.quantile(u), a, b, limit=400, **kw)
    return val


def stop_loss_oracle(dist, x0, x1, **kw):
    """Independent quadrature of the survival function."""
    val, _ = quad(lambda x: float(dist.sf(x)), x0, x1, limit=400, **kw)
    return val


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
