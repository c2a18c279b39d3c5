import math

import numpy as np
import pytest
from scipy.special import airy as scipy_airy

from rmtlab.airy import AI0, AIP0, SERIES_LEFT, SERIES_RIGHT, airy, airy_arrays
from rmtlab.errors import DomainError

# reference values computed once with 30-digit arithmetic
FROZEN = [
    (-20.0, -0.17640612707798469, 0.89286285673647124),
    (-10.0, 0.040241238486443191, 0.99626504413279006),
    (-7.0, 0.18428083525050564, -0.77100816841012655),
    (-6.5, -0.2380203019971158, -0.67495249251320217),
    (-5.0, 0.35076100902411432, 0.32719281855444314),
    (-1.0, 0.53556088329235212, -0.010160567116645209),
    (0.0, 0.35502805388781724, -0.2588194037928068),
    (1.0, 0.13529241631288142, -0.15914744129679321),
    (2.5, 0.01572592338047049, -0.02625088103590323),
    (6.0, 9.9476943602528896e-6, -2.4765200397034955e-5),
    (6.5, 2.7958823432049136e-6, -7.2319314666017926e-6),
    (10.0, 1.1047532552898686e-10, -3.5206336767389236e-10),
    (25.0, 8.1160268246913867e-38, -4.066089337243281e-37),
]


@pytest.mark.parametrize("x, ai, aip", FROZEN)
def test_frozen_values(x, ai, aip):
    v = airy(x)
    assert v.ai == pytest.approx(ai, rel=1e-9, abs=1e-12)
    assert v.aip == pytest.approx(aip, rel=1e-9, abs=1e-12)


def test_origin_constants():
    assert AI0 == pytest.approx(0.3550280538878172, abs=1e-15)
    assert AIP0 == pytest.approx(-0.2588194037928068, abs=1e-15)


def test_against_scipy_on_dense_grid():
    x = np.linspace(-30, 30, 6001)
    ai, aip = airy_arrays(x)
    ref_ai, ref_aip, _, _ = scipy_airy(x)
    assert np.max(np.abs(ai - ref_ai)) < 1e-10
    # Ai' grows like |x|^(1/4) on the oscillatory side
    assert np.max(np.abs(aip - ref_aip) / (1 + np.abs(x) ** 0.25)) < 1e-10


def test_continuity_at_switch_points():
    for x0 in (SERIES_LEFT, SERIES_RIGHT):
        lo = airy(x0 - 1e-12)
        hi = airy(x0 + 1e-12)
        assert abs(lo.ai - hi.ai) < 1e-10
        assert abs(lo.aip - hi.aip) < 1e-10


def test_positive_and_decreasing():
    x = np.linspace(0, 30, 3001)
    ai, aip = airy_arrays(x)
    assert np.all(ai > 0)
    assert np.all(np.diff(ai) < 0)
    assert np.all(aip < 0)


def test_ode_residual():
    # Ai'' = x Ai checked with a central difference of Ai'
    h = 1e-4
    for x in (-12.0, -3.0, 0.5, 4.0):
        d2 = (airy(x + h).aip - airy(x - h).aip) / (2 * h)
        assert d2 == pytest.approx(x * airy(x).ai, abs=1e-7)


def test_wronskian_with_bi():
    x = np.linspace(-8, 4, 25)
    ai, aip = airy_arrays(x)
    _, _, bi, bip = scipy_airy(x)
    assert np.allclose(ai * bip - aip * bi, 1 / math.pi, atol=1e-9)


def test_shape_handling():
    ai, aip = airy_arrays(np.zeros((2, 3)))
    assert ai.shape == (2, 3) and aip.shape == (2, 3)
    assert isinstance(airy_arrays(0.0)[0], float | np.floating)


@pytest.mark.parametrize("x", [30.5, -31.0, float("nan"), float("inf")])
def test_domain(x):
    with pytest.raises(DomainError):
        airy(x)
