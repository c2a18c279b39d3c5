"""Command line entry point ``rmtlab``.

Every subcommand accepts ``--config FILE`` with ``key = value`` lines (see
:mod:`rmtlab.config`); explicit flags take precedence over the file.  Output
is CSV preceded by a block of ``#`` header lines, written to ``--output`` or
standard output.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .config import grid_axis, parse_float_list, parse_grid, parse_int_list, read_config
from .equilibrium import density_psi_t, q_t, solve_one_cut
from .errors import RmtlabError
from .harness import (
    ExperimentConfig,
    bulk_experiment,
    double_scaling_experiment,
    edge_experiment,
    format_report,
    tensor_grid,
)
from .limit_kernels import CritKernelContext, SIGMA_MIN, k_bulk, k_crit_grid, k_crit_integral_grid, k_edge
from .orthopoly import build_recurrence, cd_kernel, coupled_N
from .painleve2 import psi_grid, solve_hastings_mcleod
from .potential import parse_potential


def _fmt(x: float) -> str:
    return repr(float(x))


def _csv(header: dict, columns: Sequence[str], rows) -> str:
    lines = [f"# {k} = {v}" for k, v in header.items()]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


class _Settings:
    """Flag values falling back to the config file, then to defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = read_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None, conv=str):
        val = getattr(self.args, key, None)
        if val is not None:
            return val
        if key in self.file:
            return conv(self.file[key])
        return default


def _write(text: str, settings: _Settings) -> None:
    out = settings.get("output")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_equilibrium(st: _Settings) -> str:
    p = parse_potential(st.get("potential", "quartic-critical"))
    t = st.get("t", 1.0, float)
    em = solve_one_cut(p, t)
    a, b = em.support.a, em.support.b
    grid = st.get("grid", None)
    x = np.array(grid_axis(grid)) if grid is not None else np.linspace(a, b, st.get("points", 201, int))
    inside = (x >= a) & (x <= b)
    psi = np.zeros_like(x)
    psi[inside] = density_psi_t(em, x[inside])
    q = np.real(q_t(em, x))
    header = {
        "command": "equilibrium",
        "potential": repr(p),
        "t": _fmt(t),
        "a": _fmt(a),
        "b": _fmt(b),
        "mass_check": _fmt(em.mass_check),
    }
    return _csv(header, ["x", "psi_t", "q_t"], zip(x, psi, q))


def cmd_kernel_finite(st: _Settings) -> str:
    p = parse_potential(st.get("potential", "gaussian"))
    n = st.get("n", 20, int)
    L = st.get("L", 0.0, float)
    N = st.get("big_n", None, float)
    if N is None:
        N = coupled_N(n, L)
    grid = st.get("grid", None)
    if grid is None:
        em = solve_one_cut(p, 1.0)
        xs = np.linspace(em.support.a, em.support.b, 21)
    else:
        xs = np.array(grid_axis(grid))
    tab = build_recurrence(p, N, n, cache_path=st.get("cache_dir"))
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    K = cd_kernel(tab, p, n, X, Y)
    header = {"command": "kernel-finite", "potential": repr(p), "n": n, "N": _fmt(N)}
    return _csv(header, ["x", "y", "K"], zip(X.ravel(), Y.ravel(), K.ravel()))


def cmd_painleve(st: _Settings) -> str:
    s_min = st.get("s_min", -10.0, float)
    s_max = st.get("s_max", 6.0, float)
    tol = st.get("tol", 1e-8, float)
    hm = solve_hastings_mcleod(s_min, s_max, tol)
    zeta = st.get("zeta", None)
    header = {"command": "painleve", "s_min": _fmt(hm.s_min), "s_max": _fmt(hm.s_max), "tol": _fmt(tol)}
    if zeta is None:
        return _csv(header, ["s", "q", "qp"], zip(hm.s_grid, hm.q, hm.qp))
    zs = np.array(parse_float_list(zeta) if isinstance(zeta, str) else zeta)
    s = st.get("s", 0.0, float)
    p1, p2 = psi_grid(hm, zs, [s])
    header["s"] = _fmt(s)
    return _csv(header, ["zeta", "phi1", "phi2"], zip(zs, p1[0], p2[0]))


def cmd_kernel_limit(st: _Settings) -> str:
    which = st.get("which", "crit")
    axis = np.array(grid_axis(st.get("grid", "-2:2:9")))
    U, V = np.meshgrid(axis, axis, indexing="ij")
    header = {"command": "kernel-limit", "which": which}
    if which == "bulk":
        K = k_bulk(U, V)
    elif which == "edge":
        K = k_edge(U, V)
    elif which in ("crit", "crit-integral"):
        s = st.get("s", 0.0, float)
        sigma_min = st.get("sigma_min", SIGMA_MIN, float)
        ctx = CritKernelContext.create(s, sigma_min=sigma_min)
        header["s"] = _fmt(s)
        if which == "crit":
            K = k_crit_grid(ctx, axis, axis)
        else:
            res = k_crit_integral_grid(ctx, axis, axis)
            K = res.values[0]
            header["sigma_min"] = _fmt(sigma_min)
            header["tail_bound"] = _fmt(res.tail_bound)
    else:
        raise RmtlabError(f"unknown kernel {which!r}")
    return _csv(header, ["u", "v", "K"], zip(U.ravel(), V.ravel(), np.ravel(K)))


def _grid(st: _Settings):
    g = st.get("grid", None)
    return parse_grid(g) if g is not None else tensor_grid()


def cmd_verify_bulk(st: _Settings) -> str:
    p = parse_potential(st.get("potential", "gaussian"))
    rep = bulk_experiment(
        p,
        st.get("x_ref", 0.0, float),
        st.get("n_list", (20, 40, 60), parse_int_list),
        grid=_grid(st),
        cache_dir=st.get("cache_dir"),
    )
    return format_report(rep)


def cmd_verify_edge(st: _Settings) -> str:
    p = parse_potential(st.get("potential", "gaussian"))
    rep = edge_experiment(
        p,
        st.get("n_list", (20, 40, 80), parse_int_list),
        side=st.get("edge", "right"),
        c_edge=st.get("c_edge", None, float),
        grid=_grid(st),
        cache_dir=st.get("cache_dir"),
    )
    return format_report(rep)


def cmd_verify_critical(st: _Settings) -> str:
    cfg = ExperimentConfig(
        potential=st.get("potential", "quartic-critical"),
        L=st.get("L", 0.0, float),
        n_list=st.get("n_list", (20, 40, 80), parse_int_list),
        grid=_grid(st),
        x_ref=st.get("x_ref", None, float),
        cache_dir=st.get("cache_dir"),
    )
    return format_report(double_scaling_experiment(cfg))


COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "kernel-finite": cmd_kernel_finite,
    "painleve": cmd_painleve,
    "kernel-limit": cmd_kernel_limit,
    "verify-bulk": cmd_verify_bulk,
    "verify-edge": cmd_verify_edge,
    "verify-critical": cmd_verify_critical,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmtlab", description="Equilibrium measures and kernel universality checks.")
    parser.add_argument("--version", action="version", version=f"rmtlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="file with key = value lines")
        sp.add_argument("--output", "-o", help="output path (default stdout)")
        return sp

    sp = add("equilibrium", "density of the equilibrium measure on its support")
    sp.add_argument("--potential")
    sp.add_argument("--t", type=float)
    sp.add_argument("--points", type=int, help="samples across the support when no grid is given")
    sp.add_argument("--grid", help="lo:hi:m axis in x")

    sp = add("kernel-finite", "Christoffel-Darboux kernel K_{n,N}(x, y) on a grid")
    sp.add_argument("--potential")
    sp.add_argument("--n", type=int)
    sp.add_argument("--N", dest="big_n", type=float, help="weight parameter (default from L)")
    sp.add_argument("--L", type=float)
    sp.add_argument("--grid", help="lo:hi:m axis in x")
    sp.add_argument("--cache-dir", dest="cache_dir")

    sp = add("painleve", "Hastings-McLeod table, or psi-functions with --zeta")
    sp.add_argument("--s-min", dest="s_min", type=float)
    sp.add_argument("--s-max", dest="s_max", type=float)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--zeta", type=parse_float_list, help="comma-separated zeta values")
    sp.add_argument("--s", type=float, help="s for the psi-functions")

    sp = add("kernel-limit", "limiting kernels on a tensor grid")
    sp.add_argument("--which", choices=["bulk", "edge", "crit", "crit-integral"])
    sp.add_argument("--grid", help="lo:hi:m axis in u")
    sp.add_argument("--s", type=float)
    sp.add_argument("--sigma-min", dest="sigma_min", type=float)

    for name, text in (
        ("verify-bulk", "sine-kernel universality experiment"),
        ("verify-edge", "Airy-kernel universality experiment"),
        ("verify-critical", "double-scaling experiment at a critical point"),
    ):
        sp = add(name, text)
        sp.add_argument("--potential")
        sp.add_argument("--n-list", dest="n_list", type=parse_int_list)
        sp.add_argument("--grid", help="lo:hi:m tensor grid or 'u v; u v' pairs")
        sp.add_argument("--cache-dir", dest="cache_dir")
        if name == "verify-bulk":
            sp.add_argument("--x-ref", dest="x_ref", type=float)
        if name == "verify-edge":
            sp.add_argument("--edge", choices=["right", "left"])
            sp.add_argument("--c-edge", dest="c_edge", type=float)
        if name == "verify-critical":
            sp.add_argument("--L", type=float)
            sp.add_argument("--x-ref", dest="x_ref", type=float)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        st = _Settings(args)
        text = COMMANDS[args.command](st)
        _write(text, st)
    except (RmtlabError, OSError) as exc:
        print(f"rmtlab {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
