"""Airy function Ai and its derivative from Maclaurin series and asymptotics."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

X_MAX = 30.0
# series/asymptotic switch points, chosen so both sides stay below 1e-10 absolute
SERIES_LEFT = -7.0
SERIES_RIGHT = 6.0
_N_SERIES = 120
_N_ASYM = 40


class AiryValue(NamedTuple):
    ai: float
    aip: float


def _asym_coeffs(n: int):
    u = np.empty(n)
    v = np.empty(n)
    u[0] = v[0] = 1.0
    for k in range(1, n):
        # u_k = (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k) u_{k-1}
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -u[k] * (6 * k + 1) / (6 * k - 1)
    return u, v


_U, _V = _asym_coeffs(_N_ASYM)


def _series(x: np.ndarray):
    # Ai = AI0 f + AIP0 g, f = sum x^(3k) / ..., g = sum x^(3k+1) / ...
    x3 = x**3
    f = np.ones_like(x)
    g = x.copy()
    tf = np.ones_like(x)
    tg = x.copy()
    fp = np.zeros_like(x)
    gp = np.ones_like(x)
    tfp = np.zeros_like(x)
    tgp = np.ones_like(x)
    for k in range(1, _N_SERIES):
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        f = f + tf
        g = g + tg
        # termwise derivatives of f and g
        if k == 1:
            tfp = x**2 / 2.0
            tgp = x**3 / 3.0
        else:
            tfp = tfp * x3 / ((3 * k - 3) * (3 * k - 1))
            tgp = tgp * x3 / ((3 * k - 2) * (3 * k))
        fp = fp + tfp
        gp = gp + tgp
        if np.all(np.abs(tf) + np.abs(tg) < 1e-18 * (np.abs(f) + np.abs(g))):
            break
    return AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp


def _truncated(coef: np.ndarray, z: np.ndarray, sign: float):
    """Sum sign^k c_k z^-k truncated at the smallest term (z>0)."""
    total = np.zeros_like(z)
    term_prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    zp = np.ones_like(z)
    for k in range(len(coef)):
        term = coef[k] / zp
        active &= np.abs(term) < np.abs(term_prev)
        total = total + np.where(active, sign**k * term, 0.0)
        term_prev = np.where(active, term, term_prev)
        zp = zp * z
    return total


def _asym_pos(x: np.ndarray):
    z = 2.0 / 3.0 * x**1.5
    e = np.exp(-z) / (2.0 * math.sqrt(math.pi))
    ai = e * x**-0.25 * _truncated(_U, z, -1.0)
    aip = -e * x**0.25 * _truncated(_V, z, -1.0)
    return ai, aip


def _asym_neg(x: np.ndarray):
    y = -x
    z = 2.0 / 3.0 * y**1.5
    # P, Q: even and odd parts with alternating signs
    pu = _alt_sum(_U, z, 0)
    qu = _alt_sum(_U, z, 1)
    pv = _alt_sum(_V, z, 0)
    qv = _alt_sum(_V, z, 1)
    ph = z + math.pi / 4.0
    amp = 1.0 / math.sqrt(math.pi)
    ai = amp * y**-0.25 * (np.sin(ph) * pu - np.cos(ph) * qu)
    aip = -amp * y**0.25 * (np.cos(ph) * pv + np.sin(ph) * qv)
    return ai, aip


def _alt_sum(coef: np.ndarray, z: np.ndarray, parity: int):
    total = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    prev = np.full_like(z, np.inf)
    sign = 1.0
    for k in range(parity, len(coef), 2):
        term = coef[k] / z**k
        active &= np.abs(term) < prev
        total = total + np.where(active, sign * term, 0.0)
        prev = np.where(active, np.abs(term), prev)
        sign = -sign
    return total


def airy_arrays(x):
    """Vectorised (Ai, Ai') on |x| <= 30."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xa) > X_MAX) or not np.all(np.isfinite(xa)):
        raise DomainError(f"Airy evaluator is valid for |x| <= {X_MAX}")
    ai = np.empty_like(xa)
    aip = np.empty_like(xa)
    mid = (xa >= SERIES_LEFT) & (xa <= SERIES_RIGHT)
    pos = xa > SERIES_RIGHT
    neg = xa < SERIES_LEFT
    if mid.any():
        ai[mid], aip[mid] = _series(xa[mid])
    if pos.any():
        ai[pos], aip[pos] = _asym_pos(xa[pos])
    if neg.any():
        ai[neg], aip[neg] = _asym_neg(xa[neg])
    if np.ndim(x) == 0:
        return ai[0], aip[0]
    return ai.reshape(np.shape(x)), aip.reshape(np.shape(x))


def airy(x: float) -> AiryValue:
    ai, aip = airy_arrays(float(x))
    return AiryValue(float(ai), float(aip))
