"""Command-line interface: ``bskop <command> [options]``.

Exit codes: 0 success, 2 usage or parse error, 3 regime violation
(``n <= 2r``), 4 term budget exceeded, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from bskop.basis import OperatorParams
from bskop.bounds import (
    THEOREMS,
    chain_holds,
    compute_a_nr,
    compute_b_r,
    compute_m_r,
    default_sweep,
    geometric_degrees,
    verify_theorem,
)
from bskop.bsk_operator import (
    DEFAULT_BUDGET,
    BSKOperator,
    central_second_moment,
    moment_first,
    moment_second,
)
from bskop.convergence import emit_report, resolve_function, run_convergence
from bskop.errors import BSKError, BudgetExceededError, RegimeError
from bskop.fields import catalog
from bskop.moduli import DEFAULT_RADII, ModulusGrid, compute_modulus
from bskop.quadrature import QuadratureRule

EXIT_USAGE, EXIT_REGIME, EXIT_BUDGET, EXIT_IO = 2, 3, 4, 5

MODULUS_KINDS = {
    "omega": "omega_lp",
    "tau": "tau",
    "local": "local",
    "sobolev": "sobolev_seminorm",
    "kfunc": "kfunctional_upper",
}
THEOREM_ALIASES = {"tau": "tau_estimate", "smooth": "smooth_estimate",
                   "omega": "omega_estimate", "lpnorm": "lp_norm_bound"}


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _geom(text: str) -> list[int]:
    start, _, stop = text.partition(":")
    return geometric_degrees(int(start), int(stop))


def _add_common(p: argparse.ArgumentParser, sweep: bool = False):
    p.add_argument("--d", type=int, default=1, help="dimension (default 1)")
    p.add_argument("--r", type=int, default=0, help="shift parameter r (default 0)")
    p.add_argument("--func", default="pr1",
                   help="catalog name (one, pr<j>, sq<j>, prod, exp, cos, step[<j>][@a], "
                        "kink[<j>][@a]) or expr:<expression>")
    p.add_argument("--quad-order", type=int, default=8, help="Gauss-Legendre order per cell")
    p.add_argument("--grid", type=int, default=None,
                   help="sup/integration points per axis for moduli (default 257 in 1-D)")
    p.add_argument("--out", default=None, help="write output to this file")
    if sweep:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--n-list", type=_ints, default=None, help="comma-separated degrees")
        g.add_argument("--n-geom", type=_geom, default=None, help="start:stop, doubling")
    else:
        p.add_argument("--n", type=int, default=10, help="degree n (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bskop", description="Brass-Stancu-Kantorovich operators on the unit hypercube"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="operator value K(f; x) at a point")
    _add_common(p)
    p.add_argument("--x", type=_floats, required=True, help="comma-separated point")

    p = sub.add_parser("moments", help="closed-form moments against brute force")
    _add_common(p)
    p.add_argument("--x", type=_floats, required=True, help="comma-separated point")

    p = sub.add_parser("modulus", help="omega, local, tau, sobolev or kfunc value")
    _add_common(p)
    p.add_argument("--kind", choices=sorted(MODULUS_KINDS), default="omega")
    p.add_argument("--delta", type=float, default=0.1, help="step delta (t for kfunc)")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--x", type=_floats, default=None, help="center for --kind local")

    p = sub.add_parser("bounds", help="A_{n,r}, M_r, B_r table")
    _add_common(p, sweep=True)

    p = sub.add_parser("converge", help="convergence sweep report")
    _add_common(p, sweep=True)
    p.add_argument("--p", type=_floats, default=[1.0], help="comma-separated p values")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("verify", help="theorem bound-ratio report")
    _add_common(p, sweep=True)
    p.add_argument("--theorem", choices=sorted(THEOREM_ALIASES) + list(THEOREMS),
                   default="tau")
    p.add_argument("--p", type=float, default=1.0)
    return parser


def _grid(args) -> ModulusGrid:
    base = ModulusGrid.default(args.d)
    if args.grid is None:
        return base
    return ModulusGrid(args.grid, base.h_points, args.grid, base.order)


def _degrees(args) -> list[int]:
    if args.n_list:
        return args.n_list
    if args.n_geom:
        return args.n_geom
    return default_sweep(args.d)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_eval(args) -> str:
    f = resolve_function(args.func, args.d)
    params = OperatorParams(args.n, args.r, args.d)
    op = BSKOperator(params, QuadratureRule.gauss_legendre(args.quad_order))
    value = op.apply(f, args.x)
    return f"{value:.17g}\n"


def _cmd_moments(args) -> str:
    params = OperatorParams(args.n, args.r, args.d)
    params.require_strict()
    op = BSKOperator(params, QuadratureRule.gauss_legendre(args.quad_order))
    lines = ["axis,first_closed,first_operator,second_closed,second_operator,central"]
    for i in range(1, args.d + 1):
        lines.append(",".join([
            str(i),
            f"{moment_first(params, i, args.x):.17g}",
            f"{op.apply(catalog(f'pr{i}', args.d), args.x):.17g}",
            f"{moment_second(params, i, args.x):.17g}",
            f"{op.apply(catalog(f'sq{i}', args.d), args.x):.17g}",
            f"{central_second_moment(params, i, args.x):.17g}",
        ]))
    lines.append(f"constant,{op.apply(catalog('one', args.d), args.x):.17g}")
    return "\n".join(lines) + "\n"


def _cmd_modulus(args) -> str:
    f = resolve_function(args.func, args.d)
    report = compute_modulus(MODULUS_KINDS[args.kind], f, args.delta, args.p, _grid(args),
                             x=args.x, radii=DEFAULT_RADII)
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def _cmd_bounds(args) -> str:
    lines = ["n,r,d,a_nr,m_r,b_r,a_le_b_over_n1"]
    m_r, b_r = compute_m_r(args.r, args.d), compute_b_r(args.r)
    for n in _degrees(args):
        params = OperatorParams(n, args.r, args.d)
        lines.append(f"{n},{args.r},{args.d},{compute_a_nr(params):.17g},{m_r:.17g},"
                     f"{b_r:.17g},{str(chain_holds(params)).lower()}")
    return "\n".join(lines) + "\n"


def _cmd_converge(args) -> str:
    f = resolve_function(args.func, args.d)
    report = run_convergence(f, args.r, _degrees(args), args.p, args.quad_order, _grid(args),
                             budget=args.budget)
    return emit_report(report, args.format)


def _cmd_verify(args) -> str:
    f = resolve_function(args.func, args.d)
    theorem = THEOREM_ALIASES.get(args.theorem, args.theorem)
    report = verify_theorem(theorem, f, args.r, _degrees(args), args.p, _grid(args),
                            QuadratureRule.gauss_legendre(args.quad_order))
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


COMMANDS = {
    "eval": _cmd_eval,
    "moments": _cmd_moments,
    "modulus": _cmd_modulus,
    "bounds": _cmd_bounds,
    "converge": _cmd_converge,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.out)
    except RegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BSKError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
