import math

import pytest

from thermokernel.errors import ToleranceNotMet
from thermokernel.quadrature import adaptive_simpson


def test_polynomials_exact():
    assert adaptive_simpson(lambda x: x**2, 0.0, 3.0) == pytest.approx(9.0, abs=1e-12)
    assert adaptive_simpson(lambda x: 1.0, -1.0, 1.0) == pytest.approx(2.0, abs=1e-14)


def test_log_integrand():
    # integral of 1/x over [1, 2] is ln 2
    got = adaptive_simpson(lambda x: 1.0 / x, 1.0, 2.0, tol=1e-12)
    assert got == pytest.approx(math.log(2.0), abs=1e-11)


def test_zero_length_interval():
    assert adaptive_simpson(math.exp, 0.7, 0.7) == 0.0


def test_reversed_bounds_negate():
    fwd = adaptive_simpson(math.exp, 0.0, 1.0)
    assert adaptive_simpson(math.exp, 1.0, 0.0) == pytest.approx(-fwd, abs=1e-13)


def test_knots_handle_kinks():
    f = lambda x: abs(x - 0.5)
    got = adaptive_simpson(f, 0.0, 1.0, tol=1e-12, knots=(0.5,))
    assert got == pytest.approx(0.25, abs=1e-12)


def test_tolerance_not_met():
    # a needle the refinement cap cannot resolve at an absurd tolerance
    needle = lambda x: 1.0 / (1e-12 + (x - 0.37123) ** 2)
    with pytest.raises(ToleranceNotMet):
        adaptive_simpson(needle, 0.0, 1.0, tol=1e-16, max_depth=6)
