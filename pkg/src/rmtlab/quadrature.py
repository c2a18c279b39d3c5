"""Quadrature rules shared by the solvers."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def composite_gauss(a: float, b: float, panels: int, order: int):
    """Composite Gauss-Legendre rule with ``panels`` equal panels."""
    edges = np.linspace(a, b, panels + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(lo, hi, order)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def arcsine_nodes(a: float, b: float, n: int):
    """Nodes and weights for  int_a^b f(x) dx / (pi sqrt((b-x)(x-a))).

    With x = m + r cos(theta) the weight becomes d(theta)/pi, and the midpoint
    rule in theta (Gauss-Chebyshev) is exact for polynomials of degree < 2n.
    """
    theta = (np.arange(n) + 0.5) * np.pi / n
    m, r = 0.5 * (a + b), 0.5 * (b - a)
    return m + r * np.cos(theta), np.full(n, 1.0 / n)


def semicircle_nodes(a: float, b: float, n: int):
    """Nodes and weights for  int_a^b f(x) sqrt((b-x)(x-a)) dx  (Gauss-Chebyshev 2nd kind)."""
    k = np.arange(1, n + 1)
    theta = k * np.pi / (n + 1)
    m, r = 0.5 * (a + b), 0.5 * (b - a)
    w = np.pi / (n + 1) * np.sin(theta) ** 2 * r * r
    return m + r * np.cos(theta), w
