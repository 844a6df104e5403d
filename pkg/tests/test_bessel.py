import math

import numpy as np
import pytest
from scipy import special

from morreylab.bessel import SWITCH, bessel_j, bessel_ratio


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 1.5, 2.0, 3.25])
def test_matches_scipy(nu):
    x = np.concatenate([np.linspace(0, 40, 2001), [SWITCH - 1e-9, SWITCH, 150.0, 1000.0]])
    assert np.max(np.abs(bessel_j(nu, x) - special.jv(nu, x))) < 1e-12


def test_half_integer_closed_form():
    x = np.linspace(0.1, 30, 300)
    assert np.allclose(bessel_j(0.5, x), np.sqrt(2 / (math.pi * x)) * np.sin(x), atol=1e-13)


def test_ratio_limit_and_values():
    assert bessel_ratio(1.5, [0.0])[0] == pytest.approx(2**-1.5 / math.gamma(2.5))
    t = np.array([1e-8, 0.5, 20.0])
    assert np.allclose(bessel_ratio(1.5, t), special.jv(1.5, t) / t**1.5, rtol=1e-10)


def test_domain_errors():
    with pytest.raises(ValueError):
        bessel_j(-1.0, [1.0])
    with pytest.raises(ValueError):
        bessel_j(1.0, [-1.0])
