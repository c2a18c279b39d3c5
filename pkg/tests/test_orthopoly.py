import math

import numpy as np
import pytest

from rmtlab.errors import InvalidParameterError
from rmtlab.orthopoly import (
    CACHE_ENV,
    QuadratureConfig,
    build_recurrence,
    cache_dir,
    cd_kernel,
    coupled_N,
    eval_weighted_poly,
    kernel_diagonal,
    kernel_direct_sum,
    weighted_polys,
)
from rmtlab.potential import critical_quartic, gaussian
from rmtlab.quadrature import composite_gauss


def independent_rule(lo=-4.0, hi=4.0):
    # a rule unrelated to the one used to build the tables
    return composite_gauss(lo, hi, 37, 31)


def test_hermite_recurrence():
    tab = build_recurrence(gaussian(), 1.0, 40, cache=False)
    k = np.arange(1, 41)
    assert np.max(np.abs(tab.beta[1:] - k)) < 1e-12
    assert np.max(np.abs(tab.alpha)) < 1e-12
    assert tab.beta[0] == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)


@pytest.mark.parametrize("N", [2.0, 7.5, 40.0])
def test_scaled_hermite(N):
    tab = build_recurrence(gaussian(), N, 30, cache=False)
    assert np.allclose(tab.beta[1:], np.arange(1, 31) / N, rtol=1e-12)


def test_weighted_poly_values():
    tab = build_recurrence(gaussian(), 2.0, 5, cache=False)
    # weight exp(-x^2): phi_0 = pi^(-1/4) exp(-x^2/2), phi_1 = sqrt(2) x phi_0
    assert eval_weighted_poly(tab, gaussian(), 0, 0.0) == pytest.approx(math.pi**-0.25, abs=1e-14)
    x = np.array([-1.0, 0.3, 2.0])
    phi1 = eval_weighted_poly(tab, gaussian(), 1, x)
    assert np.allclose(phi1, math.sqrt(2) * x * math.pi**-0.25 * np.exp(-(x**2) / 2), atol=1e-14)
    assert cd_kernel(tab, gaussian(), 1, 0.0, 0.0) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-14)


def test_orthonormality_independent_rule():
    p = critical_quartic()
    tab = build_recurrence(p, 30.0, 30, cache=False)
    x, w = independent_rule()
    phi = weighted_polys(tab, p, 30, x)
    G = (phi * w) @ phi.T
    assert np.max(np.abs(G - np.eye(31))) < 1e-12


@pytest.mark.parametrize("n, L", [(20, 0.0), (40, 1.0), (80, 0.0), (80, -1.0)])
def test_trace(n, L):
    p = critical_quartic()
    tab = build_recurrence(p, coupled_N(n, L), n, QuadratureConfig(panels=max(48, n // 4 + 1)), cache=False)
    x, w = independent_rule()
    total = float(np.sum(w * kernel_diagonal(tab, p, n, x)))
    assert abs(total - n) / n < 1e-6


@pytest.mark.parametrize("n", [1, 5, 12, 20])
def test_cd_equals_direct_sum(n):
    p = critical_quartic()
    tab = build_recurrence(p, float(n), n, cache=False)
    g = np.linspace(-2.2, 2.2, 23)
    X, Y = np.meshgrid(g, g + 0.013)
    assert np.max(np.abs(cd_kernel(tab, p, n, X, Y) - kernel_direct_sum(tab, p, n, X, Y))) < 1e-8
    d = kernel_diagonal(tab, p, n, g)
    assert np.max(np.abs(d - kernel_direct_sum(tab, p, n, g, g))) < 1e-8


def test_confluent_switch_is_continuous():
    p = critical_quartic()
    tab = build_recurrence(p, 20.0, 20, cache=False)
    x = 0.4
    for d in (1e-3, 1e-5, 1e-9, 0.0):
        assert cd_kernel(tab, p, 20, x - d, x + d) == pytest.approx(kernel_direct_sum(tab, p, 20, x, x), abs=1e-5)


def test_reproducing_property():
    p = critical_quartic()
    tab = build_recurrence(p, 16.0, 16, cache=False)
    z, w = independent_rule()
    xs = np.array([-1.0, 0.2, 1.3])
    Kx = cd_kernel(tab, p, 16, xs[:, None], z[None, :])
    lhs = (Kx * w) @ Kx.T
    rhs = cd_kernel(tab, p, 16, xs[:, None], xs[None, :])
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_density_limit():
    p = critical_quartic()
    n = 80
    tab = build_recurrence(p, float(n), n, QuadratureConfig(panels=60), cache=False)
    x = np.array([-1.0, 1.0, 1.5])
    dens = x**2 * np.sqrt(4 - x**2) / (2 * math.pi)
    assert np.max(np.abs(kernel_diagonal(tab, p, n, x) / n - dens)) < 0.02


def test_coupled_N():
    assert coupled_N(8, 0.0) == 8.0
    assert coupled_N(8, 1.0) == pytest.approx(8 / 1.25)
    n = 80
    N = coupled_N(n, 0.7)
    assert n ** (2 / 3) * (n / N - 1) == pytest.approx(0.7, abs=1e-12)
    with pytest.raises(InvalidParameterError):
        coupled_N(8, -5.0)


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "env"))
    assert cache_dir() == tmp_path / "env"
    assert cache_dir(tmp_path / "arg") == tmp_path / "arg"
    p = critical_quartic()
    first = build_recurrence(p, 10.5, 10)
    files = list((tmp_path / "env").glob("rec_*.txt"))
    assert len(files) == 1
    again = build_recurrence(p, 10.5, 10)
    assert np.array_equal(first.alpha, again.alpha)
    assert np.array_equal(first.beta, again.beta)
    assert again.log_beta0 == first.log_beta0
    build_recurrence(p, 10.5, 10, cache_path=tmp_path / "arg")
    assert len(list((tmp_path / "arg").glob("rec_*.txt"))) == 1


def test_corrupt_cache_is_rebuilt(tmp_path):
    p = gaussian()
    build_recurrence(p, 3.0, 6, cache_path=tmp_path)
    (f,) = tmp_path.glob("rec_*.txt")
    f.write_text("garbage\n")
    tab = build_recurrence(p, 3.0, 6, cache_path=tmp_path)
    assert np.allclose(tab.beta[1:], np.arange(1, 7) / 3.0, rtol=1e-12)


def test_no_cache_writes_nothing(tmp_path):
    build_recurrence(gaussian(), 3.0, 6, cache=False, cache_path=tmp_path)
    assert not list(tmp_path.iterdir())


def test_validation():
    p = gaussian()
    with pytest.raises(InvalidParameterError):
        build_recurrence(p, 1.0, 0, cache=False)
    with pytest.raises(InvalidParameterError):
        build_recurrence(p, -1.0, 5, cache=False)
    with pytest.raises(InvalidParameterError):
        build_recurrence(p, 1.0, 400, QuadratureConfig(panels=4, order=24), cache=False)
    tab = build_recurrence(p, 1.0, 5, cache=False)
    with pytest.raises(InvalidParameterError):
        eval_weighted_poly(tab, critical_quartic(), 1, 0.0)
    with pytest.raises(IndexError):
        cd_kernel(tab, p, 6, 0.0, 0.0)
