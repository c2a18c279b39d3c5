"""Orthonormal polynomials for the weight exp(-N V(x)) and their kernel.

The recurrence coefficients come from the discretized Stieltjes procedure:
Lanczos with full reorthogonalization applied to diag(x_i) with starting
vector sqrt(w_i exp(-N V(x_i))) on a composite Gauss rule.  Weighted
functions phi_k = exp(-N V / 2) p_k are evaluated by running the three-term
recurrence on the weighted values themselves, with a per-point running
scale so that neither the polynomial nor the exponential over/underflows.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InstabilityError, InvalidParameterError
from .potential import Potential, eval_V, eval_Vp
from .quadrature import composite_gauss

__all__ = [
    "QuadratureConfig",
    "RecurrenceTable",
    "build_recurrence",
    "cache_dir",
    "eval_weighted_poly",
    "weighted_polys",
    "cd_kernel",
    "kernel_direct_sum",
    "kernel_diagonal",
    "coupled_N",
]

log = logging.getLogger(__name__)

CACHE_ENV = "RMTLAB_CACHE_DIR"
# exp(-N (V(R) - min V)) below 1e-30 at the ends of the quadrature interval
_LOG_CUTOFF = 30.0 * math.log(10.0)
# mass of every p_k^2 allowed in the outermost panel of each side
_EDGE_MASS = 1e-26
_RESCALE = 1e100


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss rule used to discretize the weight.

    ``panels * order`` must be at least ``4 * n_max``.
    """

    panels: int = 48
    order: int = 24

    @property
    def nodes(self) -> int:
        return self.panels * self.order


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    """Recurrence coefficients of the orthonormal polynomials p_{k,N}.

    The monic polynomials obey pi_{k+1} = (x - alpha_k) pi_k - beta_k pi_{k-1},
    and ``beta[0]`` is the total mass of exp(-N V).  ``log_beta0`` carries the
    same number in logarithmic form, which is what evaluation uses.
    """

    N: float
    alpha: np.ndarray
    beta: np.ndarray
    n_max: int
    log_beta0: float
    coefficients: tuple[float, ...]
    half_width: float
    nodes: int

    def __post_init__(self):
        if self.alpha.shape != (self.n_max + 1,) or self.beta.shape != (self.n_max + 1,):
            raise ValueError("alpha and beta need n_max + 1 entries")
        if not np.all(self.beta[1:] > 0):
            raise InstabilityError("recurrence table has non-positive beta")

    def matches(self, p: Potential) -> bool:
        return tuple(p.coefficients) == self.coefficients


def coupled_N(n: int, L: float) -> float:
    """Real N with n^(2/3) (n/N - 1) = L, that is N = n / (1 + L n^(-2/3))."""
    denom = 1.0 + L * n ** (-2.0 / 3.0)
    if denom <= 0:
        raise InvalidParameterError(f"L = {L} too negative for n = {n}")
    return n / denom


def cache_dir(override=None) -> Path:
    """Cache directory: explicit argument, then $RMTLAB_CACHE_DIR, then ~/.cache/rmtlab."""
    if override is not None:
        return Path(override)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "rmtlab"


def _cache_key(p: Potential, N: float, n_max: int, quad: QuadratureConfig) -> str:
    text = repr((tuple(p.coefficients), float(N), int(n_max), quad.panels, quad.order))
    return hashlib.sha256(text.encode()).hexdigest()[:24]


def _write_cache(path: Path, tab: RecurrenceTable, quad: QuadratureConfig) -> None:
    lines = [
        f"# coefficients = {' '.join(repr(c) for c in tab.coefficients)}",
        f"# N = {tab.N!r}",
        f"# n_max = {tab.n_max}",
        f"# panels = {quad.panels}",
        f"# order = {quad.order}",
        f"# log_beta0 = {tab.log_beta0!r}",
        f"# half_width = {tab.half_width!r}",
        "k,alpha,beta",
    ]
    lines += [f"{k},{a!r},{b!r}" for k, (a, b) in enumerate(zip(tab.alpha.tolist(), tab.beta.tolist()))]
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def _read_cache(path: Path, p: Potential, N: float, n_max: int, quad: QuadratureConfig):
    header = {}
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            header[key.strip()] = val.strip()
        elif line and line[0].isdigit():
            rows.append([float(v) for v in line.split(",")])
    coeffs = tuple(float(v) for v in header["coefficients"].split())
    if (
        coeffs != tuple(p.coefficients)
        or float(header["N"]) != float(N)
        or int(header["n_max"]) != n_max
        or int(header["panels"]) != quad.panels
        or int(header["order"]) != quad.order
    ):
        return None
    data = np.array(rows)
    return RecurrenceTable(
        N=float(N),
        alpha=data[:, 1],
        beta=data[:, 2],
        n_max=n_max,
        log_beta0=float(header["log_beta0"]),
        coefficients=coeffs,
        half_width=float(header["half_width"]),
        nodes=quad.nodes,
    )


def _initial_half_width(p: Potential, N: float) -> tuple[float, float]:
    """Centre of the weight and R with N (V - min V) > 30 ln 10 beyond centre +- R."""
    crit = np.roots(p.deriv_coef[::-1])
    crit = crit[np.abs(crit.imag) < 1e-9].real
    vmin_x = float(crit[np.argmin(eval_V(p, crit))]) if crit.size else 0.0
    vmin = float(eval_V(p, vmin_x))
    extremes = [vmin_x]
    for sign in (1.0, -1.0):
        x = vmin_x
        step = 0.5
        # walk outward until the weight is below the cutoff for good
        while N * (eval_V(p, x) - vmin) < _LOG_CUTOFF or sign * eval_Vp(p, x) <= 0:
            x += sign * step
            step *= 1.2
        extremes.append(x)
    R = 0.5 * (max(extremes) - min(extremes))
    centre = 0.5 * (max(extremes) + min(extremes))
    return centre, R


def _lanczos(x: np.ndarray, w: np.ndarray, n_max: int):
    """Jacobi matrix entries of the discrete measure sum w_i delta_{x_i}."""
    m = x.size
    Q = np.zeros((n_max + 1, m))
    alpha = np.zeros(n_max + 1)
    beta = np.zeros(n_max + 1)
    total = w.sum()
    q = np.sqrt(w / total)
    Q[0] = q
    b_prev = 0.0
    q_prev = np.zeros(m)
    for k in range(n_max + 1):
        v = x * q - b_prev * q_prev
        alpha[k] = q @ v
        if k == n_max:
            break
        v -= alpha[k] * q
        # two passes of full reorthogonalization
        for _ in range(2):
            v -= Q[: k + 1].T @ (Q[: k + 1] @ v)
        b = math.sqrt(v @ v)
        if not b > 1e-13 * (abs(alpha[k]) + b_prev + 1.0):
            raise InstabilityError(
                f"beta_{k + 1} lost positivity; increase the number of quadrature nodes"
            )
        beta[k + 1] = b * b
        q_prev, q, b_prev = q, v / b, b
        Q[k + 1] = q
    return alpha, beta, Q, total


def build_recurrence(
    p: Potential,
    N: float,
    n_max: int,
    quad: QuadratureConfig | None = None,
    *,
    cache: bool = True,
    cache_path=None,
) -> RecurrenceTable:
    """Recurrence coefficients for exp(-N V) up to degree n_max.

    Parameters
    ----------
    p : Potential
    N : float
        Positive weight parameter; need not be an integer.
    n_max : int
        Highest index for which alpha_k, beta_k are produced.
    quad : QuadratureConfig, optional
        Discretization; needs at least ``4 * n_max`` nodes.
    cache : bool
        Read and write the text cache (see :func:`cache_dir`).
    cache_path : path-like, optional
        Cache directory overriding the environment variable.

    Raises
    ------
    InstabilityError
        If some beta_k is not positive, i.e. the rule is too coarse.
    """
    quad = quad or QuadratureConfig()
    if n_max < 1:
        raise InvalidParameterError("n_max must be at least 1")
    if not (N > 0 and math.isfinite(N)):
        raise InvalidParameterError(f"N must be positive, got {N}")
    if quad.nodes < 4 * n_max:
        raise InvalidParameterError(f"need at least {4 * n_max} quadrature nodes, got {quad.nodes}")
    path = cache_dir(cache_path) / f"rec_{_cache_key(p, N, n_max, quad)}.txt"
    if cache and path.exists():
        try:
            tab = _read_cache(path, p, N, n_max, quad)
            if tab is not None:
                return tab
        except (OSError, ValueError, KeyError):
            log.warning("ignoring unreadable cache file %s", path)

    centre, R = _initial_half_width(p, N)
    for _ in range(12):
        x, w = composite_gauss(centre - R, centre + R, quad.panels, quad.order)
        expo = -N * eval_V(p, x)
        shift = float(expo.max())
        wt = w * np.exp(expo - shift)
        alpha, beta, Q, total = _lanczos(x, wt, n_max)
        # the highest polynomials spread furthest; make sure they still fit
        edge = np.concatenate([np.arange(quad.order), np.arange(x.size - quad.order, x.size)])
        if np.max(np.sum(Q[:, edge] ** 2, axis=1)) < _EDGE_MASS:
            break
        R *= 1.3
    else:
        raise InstabilityError("could not contain the orthonormal functions in the quadrature interval")
    log_beta0 = math.log(total) + shift
    beta[0] = math.exp(log_beta0) if log_beta0 < 700 else math.inf
    tab = RecurrenceTable(
        N=float(N),
        alpha=alpha,
        beta=beta,
        n_max=n_max,
        log_beta0=log_beta0,
        coefficients=tuple(p.coefficients),
        half_width=R,
        nodes=quad.nodes,
    )
    if cache:
        try:
            _write_cache(path, tab, quad)
        except OSError as exc:
            log.warning("could not write cache file %s: %s", path, exc)
    return tab


def _run(tab: RecurrenceTable, p: Potential, n: int, x, derivative: bool):
    """phi_0..phi_n (and derivatives) at x, shape (n + 1, len(x))."""
    if not tab.matches(p):
        raise InvalidParameterError("recurrence table was built for a different potential")
    if not 0 <= n <= tab.n_max:
        raise IndexError(f"index {n} outside 0..{tab.n_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a, b = tab.alpha, np.sqrt(tab.beta)
    phi = np.zeros((n + 1, x.size))
    dphi = np.zeros_like(phi)
    logscale = np.zeros(x.size)
    # phi_0 without its exponential factor, which is restored at the end
    phi[0] = 1.0
    dphi[0] = -0.5 * tab.N * eval_Vp(p, x)
    for k in range(n):
        prev = phi[k - 1] if k else 0.0
        dprev = dphi[k - 1] if k else 0.0
        bk = b[k] if k else 0.0
        phi[k + 1] = ((x - a[k]) * phi[k] - bk * prev) / b[k + 1]
        if derivative:
            dphi[k + 1] = ((x - a[k]) * dphi[k] + phi[k] - bk * dprev) / b[k + 1]
        big = np.abs(phi[k + 1]) > _RESCALE
        if big.any():
            phi[: k + 2, big] /= _RESCALE
            dphi[: k + 2, big] /= _RESCALE
            logscale[big] += math.log(_RESCALE)
    factor = np.exp(logscale - 0.5 * tab.N * eval_V(p, x) - 0.5 * tab.log_beta0)
    return phi * factor, dphi * factor


def weighted_polys(tab: RecurrenceTable, p: Potential, n: int, x, derivative: bool = False):
    """All phi_k(x), k = 0..n, as an array of shape (n + 1, len(x)); with derivatives if asked."""
    phi, dphi = _run(tab, p, n, x, derivative)
    return (phi, dphi) if derivative else phi


def eval_weighted_poly(tab: RecurrenceTable, p: Potential, k: int, x):
    """phi_k(x) = exp(-N V(x)/2) p_{k,N}(x)."""
    phi, _ = _run(tab, p, k, x, False)
    out = phi[k]
    return float(out[0]) if np.ndim(x) == 0 else out


def kernel_diagonal(tab: RecurrenceTable, p: Potential, n: int, x):
    """K_{n,N}(x, x) from the confluent Christoffel-Darboux formula."""
    if not 1 <= n <= tab.n_max:
        raise IndexError(f"n = {n} outside 1..{tab.n_max}")
    phi, dphi = _run(tab, p, n, x, True)
    out = math.sqrt(tab.beta[n]) * (dphi[n] * phi[n - 1] - dphi[n - 1] * phi[n])
    return float(out[0]) if np.ndim(x) == 0 else out


def cd_kernel(tab: RecurrenceTable, p: Potential, n: int, x, y, confluent_tol: float | None = None):
    """K_{n,N}(x, y) by the Christoffel-Darboux formula.

    ``x`` and ``y`` broadcast against each other.  Where |x - y| is below
    ``confluent_tol`` (default 1e-6 times the width of the quadrature
    interval over 4, a proxy for the support length) the derivative form is
    used at the midpoint.
    """
    if not 1 <= n <= tab.n_max:
        raise IndexError(f"n = {n} outside 1..{tab.n_max}")
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x = x.ravel()
    y = y.ravel()
    tol = 1e-6 * 0.5 * tab.half_width if confluent_tol is None else confluent_tol
    px = _run(tab, p, n, x, False)[0]
    py = _run(tab, p, n, y, False)[0]
    d = x - y
    with np.errstate(invalid="ignore", divide="ignore"):
        out = math.sqrt(tab.beta[n]) * (px[n] * py[n - 1] - px[n - 1] * py[n]) / d
    near = np.abs(d) < tol
    if near.any():
        out[near] = kernel_diagonal(tab, p, n, 0.5 * (x[near] + y[near]))
    out = out.reshape(shape)
    return float(out) if scalar else out


def kernel_direct_sum(tab: RecurrenceTable, p: Potential, n: int, x, y):
    """K_{n,N}(x, y) = sum_{k<n} phi_k(x) phi_k(y), the defining sum."""
    if not 1 <= n <= tab.n_max:
        raise IndexError(f"n = {n} outside 1..{tab.n_max}")
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    px = _run(tab, p, n - 1, x.ravel(), False)[0]
    py = _run(tab, p, n - 1, y.ravel(), False)[0]
    out = np.sum(px * py, axis=0).reshape(x.shape)
    return float(out) if scalar else out
