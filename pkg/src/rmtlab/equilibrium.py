"""One-cut (signed) equilibrium measures for polynomial fields V/t.

The Stieltjes transform of the measure is written as

    G(z) = V'(z)/(2t) - h(z) sqrt((z-a)(z-b)),

with ``h`` a polynomial of degree deg V - 2.  Requiring G(z) = 1/z + O(z^-2)
fixes the endpoints a, b and the coefficients of ``h`` algebraically, so the
density h(x) sqrt((x-a)(b-x)) / pi is available in closed form.  Where ``h``
dips below zero the measure is signed; no positivity is imposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import comb

from .errors import (
    AccuracyError,
    DegenerateSupportError,
    DomainError,
    NoOneCutSolutionError,
    NotCriticalError,
)
from .potential import Potential, eval_Vp
from .quadrature import arcsine_nodes, gauss_legendre, semicircle_nodes

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50


@dataclass(frozen=True)
class Support:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DegenerateSupportError(f"support needs a < b, got [{self.a}, {self.b}]")

    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def radius(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Signed one-cut equilibrium measure of V/t.

    ``poly_part`` holds the monomial coefficients of h, so that
    q_t(z) = h(z)^2 (z-a)(z-b) and psi_t(x) = h(x) sqrt((x-a)(b-x)) / pi.
    """

    potential: Potential
    t: float
    support: Support
    poly_part: tuple[float, ...]
    mass_check: float
    iterations: int = 0

    @property
    def h(self) -> np.ndarray:
        return np.asarray(self.poly_part)

    def eval_h(self, x, deriv: int = 0):
        c = P.polyder(self.h, deriv) if deriv else self.h
        return P.polyval(x, c)

    def q(self, z):
        return q_t(self, z)

    def density(self, x):
        return density_psi_t(self, x)


def _binom_half(n: int) -> np.ndarray:
    """Coefficients of (1 - w)^(-1/2) = sum_k C(2k,k)/4^k w^k, k < n."""
    k = np.arange(n)
    return comb(2 * k, k) / 4.0**k


def _inv_root_series(a: float, b: float, n: int):
    """Series of z/sqrt((z-a)(z-b)) in w = 1/z, with partial derivatives in a and b."""
    al = _binom_half(n)
    k = np.arange(n)
    pa = al * a**k
    pb = al * b**k
    # d/da (al_k a^k) = al_k k a^(k-1)
    dpa = np.zeros(n)
    dpb = np.zeros(n)
    dpa[1:] = al[1:] * k[1:] * a ** (k[1:] - 1)
    dpb[1:] = al[1:] * k[1:] * b ** (k[1:] - 1)
    c = np.convolve(pa, pb)[:n]
    dca = np.convolve(dpa, pb)[:n]
    dcb = np.convolve(pa, dpb)[:n]
    return c, dca, dcb


def _endpoint_residual(v: np.ndarray, a: float, b: float):
    """Residual of the two endpoint conditions and its Jacobian in (a, b).

    With V'(z)/(2t) = sum_j v_j z^j, the z^-1 coefficient of V'/(2t R) must vanish
    and the z^-2 coefficient must equal one.
    """
    d = len(v)
    c, dca, dcb = _inv_root_series(a, b, d + 1)
    F = np.array([v @ c[:d], v @ c[1 : d + 1] - 1.0])
    J = np.array(
        [[v @ dca[:d], v @ dcb[:d]], [v @ dca[1 : d + 1], v @ dcb[1 : d + 1]]]
    )
    return F, J


def _poly_part(v: np.ndarray, a: float, b: float) -> np.ndarray:
    d = len(v)
    c, _, _ = _inv_root_series(a, b, d)
    # h_m = sum_{j >= m+1} v_j c_{j-m-1}
    return np.array([sum(v[j] * c[j - m - 1] for j in range(m + 1, d)) for m in range(d - 1)])


def _initial_endpoints(p: Potential, v: np.ndarray) -> tuple[float, float]:
    coef = p.coefficients
    if p.degree == 4 and coef[1] == 0.0 and coef[3] == 0.0:
        # quartic family (g/4)x^4 + (t/2)x^2: exact critical endpoints +-2 g^(-1/4)
        g = 4.0 * coef[4]
        r = 2.0 * g**-0.25
        return -r, r
    roots = P.polyroots(p.deriv_coef)
    real = roots[np.abs(roots.imag) < 1e-9].real
    m0 = float(real[np.argmin(P.polyval(real, p.coef))]) if real.size else 0.0

    def second(r):
        return _endpoint_residual(v, m0 - r, m0 + r)[0][1]

    lo, hi = 1e-3, 1.0
    while second(hi) < 0 and hi < 1e6:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if second(mid) < 0:
            lo = mid
        else:
            hi = mid
    return m0 - hi, m0 + hi


def solve_one_cut(
    p: Potential,
    t: float = 1.0,
    *,
    tol: float = NEWTON_TOL,
    maxiter: int = NEWTON_MAXITER,
    init: tuple[float, float] | None = None,
) -> EquilibriumMeasure:
    """Endpoints and density polynomial of the one-cut signed measure of V/t.

    Damped Newton on the two endpoint conditions; the remaining coefficients
    of the density polynomial follow by expansion at infinity.

    Raises
    ------
    NoOneCutSolutionError
        If Newton does not reach ``tol`` within ``maxiter`` iterations.
    DegenerateSupportError
        If the support collapses.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    v = p.deriv_coef / (2.0 * t)
    a, b = init if init is not None else _initial_endpoints(p, v)
    F, J = _endpoint_residual(v, a, b)
    res = float(np.max(np.abs(F)))
    it = 0
    while res > tol:
        if it >= maxiter:
            raise NoOneCutSolutionError(
                f"Newton did not converge for {p!r}, t={t}: residual {res:.3e} after {it} iterations"
            )
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            raise NoOneCutSolutionError(f"singular Jacobian at a={a}, b={b}") from None
        lam = 1.0
        while True:
            na, nb = a + lam * step[0], b + lam * step[1]
            if nb - na > 0:
                nF, nJ = _endpoint_residual(v, na, nb)
                nres = float(np.max(np.abs(nF)))
                if nres < res or lam < 1e-6:
                    break
            lam *= 0.5
            if lam < 1e-10:
                raise NoOneCutSolutionError(f"line search failed at a={a}, b={b}")
        a, b, F, J, res = na, nb, nF, nJ, nres
        it += 1
    if b - a < 1e-10 * max(1.0, abs(a) + abs(b)):
        raise DegenerateSupportError(f"support [{a}, {b}] has collapsed")
    h = _poly_part(v, a, b)
    sup = Support(float(a), float(b))
    x, w = semicircle_nodes(a, b, 64)
    mass = float(w @ P.polyval(x, h)) / math.pi
    return EquilibriumMeasure(p, float(t), sup, tuple(float(c) for c in h), mass, it)


def q_t(em: EquilibriumMeasure, z):
    """q_t(z) = h(z)^2 (z-a)(z-b); entire for polynomial V."""
    a, b = em.support.a, em.support.b
    z = np.asarray(z)
    return em.eval_h(z) ** 2 * (z - a) * (z - b)


def _root(a, b, x):
    return np.sqrt(np.clip((x - a) * (b - x), 0.0, None))


def density_psi_t(em: EquilibriumMeasure, x):
    """Density of the signed measure, analytically continued through zeros of h.

    The sign follows h, so near a critical point the value is negative for t < 1,
    zero at t = 1 and positive for t > 1.
    """
    a, b = em.support.a, em.support.b
    xa = np.asarray(x, dtype=float)
    scale = 1e-12 * (b - a)
    if np.any((xa < a - scale) | (xa > b + scale)):
        raise DomainError(f"x outside support [{a}, {b}]")
    out = em.eval_h(xa) * _root(a, b, xa) / math.pi
    return float(out) if out.ndim == 0 else out


def density_derivatives(em: EquilibriumMeasure, x: float) -> tuple[float, float, float]:
    """(psi, psi', psi'') at an interior point, from the factored form."""
    a, b = em.support.a, em.support.b
    if not a < x < b:
        raise DomainError(f"x={x} not interior to [{a}, {b}]")
    g = (x - a) * (b - x)
    g1 = a + b - 2.0 * x
    g2 = -2.0
    r = math.sqrt(g)
    r1 = g1 / (2.0 * r)
    r2 = (2.0 * g * g2 - g1 * g1) / (4.0 * g**1.5)
    h0, h1, h2 = (float(em.eval_h(x, k)) for k in range(3))
    return (
        h0 * r / math.pi,
        (h1 * r + h0 * r1) / math.pi,
        (h2 * r + 2.0 * h1 * r1 + h0 * r2) / math.pi,
    )


def w_S(sup: Support, x):
    """Arcsine density 1/(pi sqrt((b-x)(x-a))) of the equilibrium measure of [a, b]."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= sup.a) | (xa >= sup.b)):
        raise DomainError(f"x outside open interval ({sup.a}, {sup.b})")
    out = 1.0 / (math.pi * np.sqrt((sup.b - xa) * (xa - sup.a)))
    return float(out) if out.ndim == 0 else out


def buyarov_rakhmanov_check(p: Potential, x: float, dt: float = 1e-3):
    """Central difference of t*psi_t(x) at t = 1 against w_{S_V}(x).

    Returns
    -------
    (fd_value, w_value)
    """
    up = solve_one_cut(p, 1.0 + dt)
    dn = solve_one_cut(p, 1.0 - dt)
    base = solve_one_cut(p, 1.0)
    fd = (up.t * density_psi_t(up, x) - dn.t * density_psi_t(dn, x)) / (up.t - dn.t)
    return float(fd), w_S(base.support, x)


def divided_difference(coef: np.ndarray, x: float, y):
    """(P(x) - P(y)) / (x - y) for a polynomial P, without the 0/0 at y = x."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    for k in range(1, len(coef)):
        if coef[k] == 0.0:
            continue
        # sum_{i+j=k-1} x^i y^j
        acc = np.zeros_like(y)
        for i in range(k):
            acc = acc + x**i * y ** (k - 1 - i)
        out = out + coef[k] * acc
    return out


def psiV_identity_check(p: Potential, x: float, n_nodes: int = 64, em: EquilibriumMeasure | None = None):
    """Density from the one-cut solve versus the arcsine-weighted integral formula.

    rhs = (1/(2 pi^2)) / w_S(x) * int (V'(x)-V'(y))/(x-y) d omega_S(y), with the
    arcsine integral done in the angle variable.
    """
    em = em if em is not None else solve_one_cut(p, 1.0)
    sup = em.support
    if not sup.a < x < sup.b:
        raise DomainError(f"x={x} not interior to the support")
    vp = p.deriv_coef

    def integral(n):
        y, w = arcsine_nodes(sup.a, sup.b, n)
        return float(w @ divided_difference(vp, x, y))

    i1, i2 = integral(n_nodes), integral(2 * n_nodes)
    if abs(i1 - i2) > 1e-12 * max(1.0, abs(i2)):
        raise AccuracyError(f"arcsine quadrature not converged: {i1} vs {i2}")
    rhs = i2 / (2.0 * math.pi**2 * w_S(sup, x))
    return float(density_psi_t(em, x)), rhs


@dataclass(frozen=True)
class CriticalData:
    x_star: float
    psiV_second: float
    c: float
    w_at_xstar: float
    L: float
    s: float


def find_critical_points(em: EquilibriumMeasure, tol: float = 1e-7) -> list[float]:
    """Interior points where the density has a double zero."""
    h = em.h
    if len(h) < 3:
        return []
    roots = P.polyroots(P.polyder(h))
    a, b = em.support.a, em.support.b
    out = []
    for r in roots:
        if abs(r.imag) > 1e-6:
            continue
        x = float(r.real)
        if a < x < b and abs(P.polyval(x, h)) < tol:
            out.append(x)
    return sorted(out)


def critical_constants(
    p: Potential,
    x_star: float,
    L: float = 0.0,
    *,
    tol: float = 1e-8,
    em: EquilibriumMeasure | None = None,
) -> CriticalData:
    """Scaling constants c = pi psi''/8 and s = L pi c^(-1/3) w_S(x*)."""
    em = em if em is not None else solve_one_cut(p, 1.0)
    try:
        psi0, psi1, psi2 = density_derivatives(em, x_star)
    except DomainError as exc:
        raise NotCriticalError(str(exc)) from None
    if abs(psi0) > tol or abs(psi1) > tol or psi2 <= tol:
        raise NotCriticalError(
            f"x*={x_star} is not an interior quadratic zero: psi={psi0:.3e}, psi'={psi1:.3e}, psi''={psi2:.3e}"
        )
    c = math.pi * psi2 / 8.0
    w = w_S(em.support, x_star)
    s = L * math.pi * c ** (-1.0 / 3.0) * w
    return CriticalData(float(x_star), float(psi2), float(c), float(w), float(L), float(s))


def _deflate_double_zero(h: np.ndarray, x_star: float) -> np.ndarray:
    quot, rem = P.polydiv(h, P.polyfromroots([x_star, x_star]))
    if np.max(np.abs(rem), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(h))):
        raise NotCriticalError(f"density polynomial has no double zero at {x_star}")
    return quot


def conformal_map_radius(em: EquilibriumMeasure, x_star: float) -> float:
    k = _deflate_double_zero(em.h, x_star)
    dist = [x_star - em.support.a, em.support.b - x_star]
    if len(k) > 1:
        dist.extend(np.abs(P.polyroots(k) - x_star))
    return 0.5 * float(min(dist))


def conformal_map_f(
    p: Potential, x_star: float, z, *, em: EquilibriumMeasure | None = None, n_nodes: int = 40
):
    """f(z) = [(3/4) int_{x*}^z (-q_V(y))^(1/2) dy]^(1/3) near x*.

    The integrand is h(y) sqrt((y-a)(b-y)) with h(y) = (y-x*)^2 k(y); pulling
    out (z-x*)^3 leaves a nonvanishing factor whose principal cube root makes f
    real and increasing on the real axis.
    """
    em = em if em is not None else solve_one_cut(p, 1.0)
    k = _deflate_double_zero(em.h, x_star)
    radius = conformal_map_radius(em, x_star)
    zc = np.asarray(z, dtype=complex)
    if np.any(np.abs(zc - x_star) >= radius):
        raise DomainError(f"z outside disk of radius {radius:.4g} around x*={x_star}")
    a, b = em.support.a, em.support.b
    tau, wt = gauss_legendre(0.0, 1.0, n_nodes)
    d = zc[..., None] - x_star
    y = x_star + d * tau
    integrand = tau**2 * P.polyval(y, k) * np.sqrt((y - a) * (b - y))
    ratio = 0.75 * (integrand @ wt)
    out = (zc - x_star) * ratio ** (1.0 / 3.0)
    return complex(out) if out.ndim == 0 else out
