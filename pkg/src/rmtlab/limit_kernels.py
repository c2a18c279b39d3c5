"""Limiting kernels: sine, Airy and the critical Painleve II kernel.

The critical kernel is available in two independent forms.  The ratio form
uses the psi-functions at the requested s only,

    K(u, v; s) = (Phi1(u) Phi2(v) - Phi2(u) Phi1(v)) / (pi (u - v)),

while the integral form accumulates the s-derivative of the kernel,

    K(u, v; s) = (1/pi) int_{-inf}^{s} Phi1(u) Phi1(v) + Phi2(u) Phi2(v) dsigma,

over sigma from a lower truncation point.  Agreement of the two forms is the
main self-check of the psi-function machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .airy import AiryValue, airy, airy_arrays
from .errors import DomainError, TruncationError
from .painleve2 import HastingsMcLeodSolution, psi_grid, solve_hastings_mcleod
from .quadrature import gauss_legendre

__all__ = [
    "AiryValue",
    "airy",
    "k_bulk",
    "k_edge",
    "CritKernelContext",
    "IntegralResult",
    "k_crit",
    "k_crit_grid",
    "k_crit_diagonal_rate",
    "k_crit_integral",
    "k_crit_integral_grid",
]

# lower end of the sigma integration; the integrand for |u| <= 3 is below
# 1e-15 there (its decay sets in only once sigma < -2 u^2)
SIGMA_MIN = -30.0
# |u - v| below this is treated as the diagonal
CONFLUENT_EPS = 1e-6
U_MAX = 4.0


def k_bulk(u, v):
    """Sine kernel sin(pi(u-v)) / (pi(u-v)), equal to 1 on the diagonal."""
    d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    out = np.sinc(d)
    return float(out) if out.ndim == 0 else out


def k_edge(u, v):
    """Airy kernel (Ai(u)Ai'(v) - Ai'(u)Ai(v)) / (u - v).

    The diagonal uses Ai'(u)^2 - u Ai(u)^2, which follows from Ai'' = x Ai.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    au, apu = airy_arrays(u)
    av, apv = airy_arrays(v)
    d = u - v
    diag = np.abs(d) < CONFLUENT_EPS
    m = 0.5 * (u + v)
    am, apm = airy_arrays(m)
    with np.errstate(invalid="ignore", divide="ignore"):
        off = (au * apv - apu * av) / d
    out = np.where(diag, apm**2 - m * am**2, off)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CritKernelContext:
    """Hastings-McLeod data and integration settings for K^crit at fixed s.

    Attributes
    ----------
    hm : HastingsMcLeodSolution
        Must cover ``[sigma_min, s]``.
    s : float
        Painleve variable.
    sigma_min : float
        Lower truncation of the sigma integral.
    panel : float
        Panel width of the composite Gauss rule in sigma.
    order : int
        Gauss points per panel.
    tail_tol : float
        Largest admissible bound on the neglected tail.
    """

    hm: HastingsMcLeodSolution
    s: float
    sigma_min: float = SIGMA_MIN
    panel: float = 1.0
    order: int = 12
    tail_tol: float = 1e-6

    def __post_init__(self):
        if not self.hm.s_min <= self.s <= self.hm.s_max:
            raise DomainError(f"s = {self.s} outside the solved interval [{self.hm.s_min}, {self.hm.s_max}]")
        if self.sigma_min < self.hm.s_min or self.sigma_min >= self.s:
            raise DomainError("sigma_min must lie in the solved interval and below s")

    @classmethod
    def create(cls, s: float, sigma_min: float = SIGMA_MIN, **kwargs) -> "CritKernelContext":
        """Solve Hastings-McLeod on [sigma_min, 6] and wrap it."""
        hm = solve_hastings_mcleod(min(sigma_min, -10.0), 6.0)
        return cls(hm, float(s), sigma_min=sigma_min, **kwargs)

    def at(self, s: float) -> "CritKernelContext":
        """Same solution and settings at another s."""
        return CritKernelContext(self.hm, float(s), self.sigma_min, self.panel, self.order, self.tail_tol)


def _check_u(values):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if np.any(np.abs(arr) > U_MAX):
        raise DomainError(f"|u| must not exceed {U_MAX}")
    return arr


def k_crit_grid(ctx: CritKernelContext, us, vs):
    """Ratio form of K^crit on the tensor grid us x vs (shape (len(us), len(vs)))."""
    us = _check_u(us)
    vs = _check_u(vs)
    pts, inv = np.unique(np.concatenate([us, vs]), return_inverse=True)
    p1, p2, d1, d2 = (a[0] for a in psi_grid(ctx.hm, pts, [ctx.s], derivatives=True))
    iu, iv = inv[: us.size], inv[us.size :]
    a1, a2 = p1[iu][:, None], p2[iu][:, None]
    b1, b2 = p1[iv][None, :], p2[iv][None, :]
    d = us[:, None] - vs[None, :]
    diag_vals = (p2 * d1 - p1 * d2) / math.pi
    diag = np.abs(d) < CONFLUENT_EPS
    with np.errstate(invalid="ignore", divide="ignore"):
        off = (a1 * b2 - a2 * b1) / (math.pi * d)
    return np.where(diag, diag_vals[iu][:, None], off)


def k_crit(ctx: CritKernelContext, u: float, v: float) -> float:
    """Ratio form of K^crit(u, v; s) with the analytic confluent diagonal."""
    return float(k_crit_grid(ctx, [u], [v])[0, 0])


def k_crit_diagonal_rate(ctx: CritKernelContext, u) -> np.ndarray:
    """d/ds K^crit(u, u; s) = (Phi1(u)^2 + Phi2(u)^2) / pi."""
    us = _check_u(u)
    p1, p2 = psi_grid(ctx.hm, us, [ctx.s])
    return (p1[0] ** 2 + p2[0] ** 2) / math.pi


class IntegralResult(NamedTuple):
    """Integral-form kernel values and the bound on the neglected tail.

    ``values`` has shape (len(s_values), len(us), len(vs)).
    """

    values: np.ndarray
    tail_bound: float


def _sigma_rule(sigma_min: float, s_values: np.ndarray, panel: float, order: int):
    """Composite Gauss nodes on [sigma_min, max(s)] with every s as a breakpoint."""
    top = float(np.max(s_values))
    n = max(1, int(math.ceil((top - sigma_min) / panel - 1e-12)))
    edges = np.unique(np.concatenate([sigma_min + panel * np.arange(n), [top], s_values]))
    xs, ws, owner = [], [], []
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        x, w = gauss_legendre(lo, hi, order)
        xs.append(x)
        ws.append(w)
        owner.append(np.full(order, j))
    return edges, np.concatenate(xs), np.concatenate(ws), np.concatenate(owner)


def _tail_bound(sig: np.ndarray, mag: np.ndarray, sigma_min: float, span: float = 3.0) -> float:
    """Bound int_{-inf}^{sigma_min} mag by an exponential fitted near sigma_min."""
    sel = (sig <= sigma_min + span) & (mag > 0)
    if sel.sum() < 2:
        return 0.0 if not np.any(mag[sig <= sigma_min + span]) else math.inf
    x = sig[sel]
    y = np.log(mag[sel])
    rate, _ = np.polyfit(x - sigma_min, y, 1)
    # envelope: the largest sample near sigma_min pulled back with the fitted rate
    peak = float(np.max(y - rate * (x - sigma_min)))
    if rate <= 0:
        return math.inf
    return math.exp(peak) / rate


def k_crit_integral_grid(ctx: CritKernelContext, us, vs, s_values=None) -> IntegralResult:
    """Integral form of K^crit on us x vs for each s in ``s_values`` (default ctx.s).

    All s share one set of sigma nodes, so a sweep over s costs one psi sweep.

    Raises
    ------
    TruncationError
        If the fitted tail below ``sigma_min`` exceeds ``ctx.tail_tol``.
    """
    us = _check_u(us)
    vs = _check_u(vs)
    s_values = np.atleast_1d(np.asarray(ctx.s if s_values is None else s_values, dtype=float))
    if np.any(s_values <= ctx.sigma_min) or np.any(s_values > ctx.hm.s_max):
        raise DomainError("every s must lie in (sigma_min, s_max of the solution]")
    pts, inv = np.unique(np.concatenate([us, vs]), return_inverse=True)
    iu, iv = inv[: us.size], inv[us.size :]
    edges, sig, w, owner = _sigma_rule(ctx.sigma_min, s_values, ctx.panel, ctx.order)
    p1, p2 = psi_grid(ctx.hm, pts, sig)
    mag = np.max(p1**2 + p2**2, axis=1)
    tail = _tail_bound(sig, mag, ctx.sigma_min) / math.pi
    if tail > ctx.tail_tol:
        raise TruncationError(
            f"tail bound {tail:.1e} below sigma_min = {ctx.sigma_min} exceeds {ctx.tail_tol:.1e}; "
            "lower sigma_min"
        )
    # per-panel integrals of Phi(u).Phi(v), then cumulative sums up to each s
    f = p1[:, iu, None] * p1[:, None, iv] + p2[:, iu, None] * p2[:, None, iv]
    npan = edges.size - 1
    panels = np.zeros((npan,) + f.shape[1:])
    np.add.at(panels, owner, w[:, None, None] * f)
    cum = np.concatenate([np.zeros((1,) + f.shape[1:]), np.cumsum(panels, axis=0)])
    idx = np.searchsorted(edges, s_values)
    return IntegralResult(cum[idx] / math.pi, tail)


def k_crit_integral(ctx: CritKernelContext, u: float, v: float) -> float:
    """Integral form of K^crit(u, v; s)."""
    return float(k_crit_integral_grid(ctx, [u], [v]).values[0, 0, 0])
