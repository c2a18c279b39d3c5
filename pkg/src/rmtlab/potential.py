"""Polynomial external fields V(x) = sum_k c_k x^k."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InvalidParameterError


@dataclass(frozen=True)
class Potential:
    """Confining polynomial potential in the monomial basis.

    Parameters
    ----------
    coefficients : sequence of float
        ``coefficients[k]`` multiplies ``x**k``. Trailing zeros are stripped.
    """

    coefficients: tuple[float, ...]
    name: str = field(default="", compare=False)

    def __init__(self, coefficients: Sequence[float], name: str = ""):
        c = [float(v) for v in coefficients]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if not c or not all(math.isfinite(v) for v in c):
            raise InvalidParameterError("coefficient list must be non-empty and finite")
        deg = len(c) - 1
        if deg < 2 or deg % 2 or c[-1] <= 0:
            raise InvalidParameterError(
                f"need even degree >= 2 with positive leading coefficient, got {c}"
            )
        object.__setattr__(self, "coefficients", tuple(c))
        object.__setattr__(self, "name", name)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def coef(self) -> np.ndarray:
        return np.asarray(self.coefficients)

    @property
    def deriv_coef(self) -> np.ndarray:
        return P.polyder(self.coef)

    def is_even(self) -> bool:
        return all(v == 0.0 for v in self.coefficients[1::2])

    def __call__(self, x):
        return eval_V(self, x)

    def __repr__(self):
        if self.name:
            return f"Potential({self.name})"
        return f"Potential({list(self.coefficients)})"


def eval_V(p: Potential, x):
    return P.polyval(x, p.coef)


def eval_Vp(p: Potential, x):
    return P.polyval(x, p.deriv_coef)


def eval_Vpp(p: Potential, x):
    return P.polyval(x, P.polyder(p.coef, 2))


def critical_t(g: float) -> float:
    """Quadratic coefficient at which the quartic density closes at the origin."""
    if g <= 0:
        raise InvalidParameterError(f"g must be positive, got {g}")
    return -2.0 * math.sqrt(g)


def quartic_family(g: float, t_param: float) -> Potential:
    """V(x) = (g/4) x^4 + (t/2) x^2."""
    if not g > 0:
        raise InvalidParameterError(f"g must be positive, got {g}")
    return Potential([0.0, 0.0, t_param / 2.0, 0.0, g / 4.0], name=f"quartic(g={g:g}, t={t_param:g})")


def is_critical_quartic(g: float, t_param: float, rtol: float = 1e-12) -> bool:
    tc = critical_t(g)
    return abs(t_param - tc) <= rtol * abs(tc)


def critical_quartic(g: float = 1.0) -> Potential:
    return quartic_family(g, critical_t(g))


def gaussian() -> Potential:
    """V(x) = x^2 / 2, semicircle on [-2, 2]."""
    return Potential([0.0, 0.0, 0.5], name="gaussian")


def parse_potential(text: str) -> Potential:
    """Parse ``gaussian``, ``quartic:g,t``, ``quartic-critical[:g]`` or a coefficient list.

    >>> parse_potential("quartic:1,-2").coefficients
    (0.0, 0.0, -1.0, 0.0, 0.25)
    """
    s = text.strip()
    low = s.lower()
    if low == "gaussian":
        return gaussian()
    if low.startswith("quartic-critical"):
        _, _, rest = s.partition(":")
        return critical_quartic(float(rest) if rest.strip() else 1.0)
    if low.startswith("quartic"):
        _, _, rest = s.partition(":")
        try:
            g, t = (float(v) for v in rest.split(","))
        except ValueError:
            raise InvalidParameterError(f"expected quartic:g,t, got {text!r}") from None
        return quartic_family(g, t)
    body = s.strip("[]()")
    try:
        coeffs = [float(v) for v in body.replace(",", " ").split()]
    except ValueError:
        raise InvalidParameterError(f"cannot parse potential {text!r}") from None
    return Potential(coeffs)
