"""Plain ``key = value`` configuration files for the command line.

Blank lines and lines starting with ``#`` are ignored; keys other than
``N`` are case-insensitive and may use ``-`` or ``_``.  Recognized keys:

========== ==========================================================
potential  ``gaussian``, ``quartic:g,t``, ``quartic-critical[:g]`` or
           a coefficient list ``c0, c1, ...``
L          double-scaling parameter
n_list     comma-separated sizes, e.g. ``20, 40, 80``
n, N       size and weight parameter for ``kernel-finite``
t          field strength for ``equilibrium``
grid       ``lo:hi:m`` (m x m tensor grid) or ``u v; u v; ...`` pairs
x_ref      reference point
edge       ``right`` or ``left``
c_edge     fixed edge constant (default: fitted)
s          Painleve variable for the limiting kernels
which      ``bulk``, ``edge``, ``crit`` or ``crit-integral``
s_min      lower end of the Painleve II interval
s_max      upper end of the Painleve II interval
sigma_min  lower end of the sigma integral
zeta       comma-separated zeta values for psi output
tol        solver tolerance
points     number of sample points
cache_dir  recurrence cache directory
output     output path (stdout when absent)
========== ==========================================================
"""

from __future__ import annotations

from pathlib import Path

from .errors import InvalidParameterError

KNOWN_KEYS = frozenset(
    {
        "potential",
        "L",
        "n_list",
        "n",
        "big_n",
        "t",
        "grid",
        "x_ref",
        "edge",
        "c_edge",
        "s",
        "which",
        "s_min",
        "s_max",
        "sigma_min",
        "zeta",
        "tol",
        "points",
        "cache_dir",
        "output",
    }
)


def normalize_key(key: str) -> str:
    k = key.strip().replace("-", "_")
    # N and n differ only by case; keep them apart
    if k == "N":
        return "big_n"
    if k in ("L", "l"):
        return "L"
    return k.lower()


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines into a dict of strings."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidParameterError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        k = normalize_key(key)
        if k not in KNOWN_KEYS:
            raise InvalidParameterError(f"{source}:{lineno}: unknown key {key.strip()!r}")
        out[k] = value.strip()
    return out


def read_config(path) -> dict[str, str]:
    p = Path(path)
    return parse_config_text(p.read_text(), str(p))


def parse_int_list(text: str) -> tuple[int, ...]:
    parts = [v for v in text.replace(",", " ").split() if v]
    try:
        return tuple(int(v) for v in parts)
    except ValueError:
        raise InvalidParameterError(f"expected integers, got {text!r}") from None


def parse_float_list(text: str) -> tuple[float, ...]:
    parts = [v for v in text.replace(",", " ").split() if v]
    try:
        return tuple(float(v) for v in parts)
    except ValueError:
        raise InvalidParameterError(f"expected numbers, got {text!r}") from None


def parse_grid(text: str) -> tuple[tuple[float, float], ...]:
    """``lo:hi:m`` for an m x m tensor grid, or ``u v; u v; ...`` for explicit pairs."""
    from .harness import tensor_grid

    t = text.strip()
    if ":" in t:
        try:
            lo, hi, m = t.split(":")
            return tensor_grid(float(lo), float(hi), int(m))
        except ValueError:
            raise InvalidParameterError(f"grid must be lo:hi:m, got {text!r}") from None
    pairs = []
    for chunk in t.split(";"):
        if not chunk.strip():
            continue
        vals = parse_float_list(chunk)
        if len(vals) != 2:
            raise InvalidParameterError(f"grid pair needs two numbers, got {chunk!r}")
        pairs.append((vals[0], vals[1]))
    return tuple(pairs)


def grid_axis(text: str) -> tuple[float, ...]:
    """Axis of a ``lo:hi:m`` specification."""
    import numpy as np

    try:
        lo, hi, m = text.split(":")
        return tuple(float(v) for v in np.linspace(float(lo), float(hi), int(m)))
    except ValueError:
        raise InvalidParameterError(f"expected lo:hi:m, got {text!r}") from None
