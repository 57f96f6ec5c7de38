"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 computation error, 3 golden-table mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import OperatorPoly
from .golden import OPERATOR as GOLDEN_OPERATOR
from .golden import ROWS as GOLDEN_ROWS
from .kernels import TABLE, TABLE_KERNELS, InsufficientOrderError, KernelError, kernel_from_name
from .numeric import (
    GridError,
    NumericalAccuracyError,
    cohen_distribution,
    pair,
    state_from_spec,
    trace_expectation,
)
from .parser import OPERATOR, PHASE, ParseError, detect_mode, parse
from .transforms import observable_image, quantize, state_from_image, state_image

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_GOLDEN = 0, 1, 2, 3
PAIR_TOLERANCE = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# subcommand -> (input mode, map)
SYMBOLIC = {
    "map": (OPERATOR, observable_image),
    "quantize": (PHASE, quantize),
    "state-map": (OPERATOR, state_image),
    "state-unmap": (PHASE, state_from_image),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--kernel", help="kernel name (see `kernels`) or custom:<file>")
    common.add_argument("--lambda", dest="lam", help="rational scale for p-function/q-function")
    common.add_argument("--order", type=int, help="series truncation order (default: degree + 2)")
    common.add_argument("--output", choices=("text", "json", "csv"), default="text")
    common.add_argument("--hbar", type=float, help="numeric hbar (symbolic if omitted)")

    grid = _Parser(add_help=False)
    grid.add_argument("--state", default="gaussian:sigma=1", help="gaussian:..., oscillator:n=<k>, or a q,re,im CSV")
    grid.add_argument("--n", type=int, default=256, help="grid points per axis (power of two)")
    grid.add_argument("--span", type=float, default=8.0, help="grid covers [-span, span)")
    grid.add_argument("--out", help="write the result to this file")

    parser = _Parser(prog="cohenmap", description="Exact operator <-> phase-space maps for Cohen kernels.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("map", "operator -> phase-space symbol (observable)"),
        ("quantize", "phase-space symbol -> operator (observable)"),
        ("state-map", "density operator -> distribution"),
        ("state-unmap", "distribution -> density operator"),
        ("roundtrip", "map forward and back, report exact equality"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("expr")
    sub.add_parser("kernels", parents=[common], help="list the kernel catalog")
    sub.add_parser("table", parents=[common], help="reproduce the qh^2*ph^2 reference images")
    sub.add_parser("dist", parents=[common, grid], help="sample F(q, p) on a grid")
    p = sub.add_parser("pair", parents=[common, grid], help="compare tr(rho G) with the phase-space integral")
    p.add_argument("--op", required=True, help="operator expression in qh, ph")
    return parser


def _kernel(args, required: bool = True):
    if args.kernel is None:
        if required:
            raise UsageError("--kernel is required")
        return None
    lam = None
    if args.lam is not None:
        try:
            lam = Fraction(args.lam)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--lambda needs a rational number, got {args.lam!r}") from None
    try:
        return kernel_from_name(args.kernel, lam)
    except (KernelError, OSError) as exc:
        raise UsageError(str(exc)) from None


def _parse(text: str, mode: str):
    try:
        return parse(text, mode)
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from None


def _numeric_text(poly, hbar: float) -> str:
    values = poly.evaluate_coefficients(hbar)
    if not values:
        return "0"
    names = ("qh", "ph") if isinstance(poly, OperatorPoly) else ("q", "p")
    parts = []
    for (n, m) in sorted(values, reverse=True):
        factors = [f"({values[n, m]:.17g})"]
        factors += [f"{x}^{k}" for x, k in zip(names, (n, m)) if k]
        parts.append("*".join(factors))
    return " + ".join(parts)


def _poly_csv(poly, hbar: Optional[float]) -> str:
    if hbar is not None:
        rows = ["n,m,re,im"]
        for (n, m), v in sorted(poly.evaluate_coefficients(hbar).items(), reverse=True):
            rows.append(f"{n},{m},{v.real:.17g},{v.imag:.17g}")
        return "\n".join(rows)
    rows = ["n,m,hbar_pow,twopi_pow,re,im"]
    for (n, m), c in poly.items():
        for (hp, tp), value in c.items():
            rows.append(f"{n},{m},{hp},{tp},{value.re},{value.im}")
    return "\n".join(rows)


def _emit(args, kernel, result_text, result_json=None, csv_text=None):
    if args.output == "json":
        doc = {
            "subcommand": args.command,
            "kernel": kernel.name if kernel is not None else None,
            "input": getattr(args, "expr", None) or getattr(args, "op", None),
            "result": result_json if result_json is not None else result_text,
            "metadata": {"hbar_symbolic": args.hbar is None},
        }
        if args.hbar is not None:
            doc["metadata"]["hbar"] = args.hbar
        text = json.dumps(doc, indent=2, sort_keys=False)
    elif args.output == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = result_text
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _render(poly, hbar: Optional[float]) -> str:
    return poly.render() if hbar is None else _numeric_text(poly, hbar)


def cmd_symbolic(args) -> int:
    kernel = _kernel(args)
    mode, fn = SYMBOLIC[args.command]
    poly = _parse(args.expr, mode)
    result = fn(poly, kernel, args.order)
    _emit(args, kernel, _render(result, args.hbar), csv_text=_poly_csv(result, args.hbar))
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    kernel = _kernel(args)
    mode = detect_mode(args.expr)
    poly = _parse(args.expr, mode)
    if mode == OPERATOR:
        image = observable_image(poly, kernel, args.order)
        back = quantize(image, kernel, args.order)
    else:
        image = quantize(poly, kernel, args.order)
        back = observable_image(image, kernel, args.order)
    exact = back == poly
    status = "EXACT" if exact else "MISMATCH"
    lines = [status]
    if not exact:
        lines.append(f"image: {image.render()}")
        lines.append(f"back:  {back.render()}")
    _emit(
        args,
        kernel,
        "\n".join(lines),
        {"status": status, "image": image.render(), "back": back.render()},
    )
    return EXIT_OK if exact else EXIT_COMPUTE


def cmd_kernels(args) -> int:
    rows = []
    for spec in TABLE_KERNELS:
        name, closed, dist, rule = TABLE[spec.variant]
        rows.append(
            {
                "name": name,
                "variant": spec.variant,
                "f": closed,
                "distribution": dist,
                "rule": rule,
                "marginal": spec.marginal,
            }
        )
    if args.output == "text":
        width = max(len(r["name"]) for r in rows)
        text = "\n".join(
            f"{r['name']:<{width}}  marginal={'yes' if r['marginal'] else 'no ':<3}  f={r['f']}  "
            f"[{r['distribution']}; {r['rule']}]"
            for r in rows
        )
    else:
        text = "name,variant,f,distribution,rule,marginal\n" + "\n".join(
            f"{r['name']},{r['variant']},\"{r['f']}\",\"{r['distribution']}\",\"{r['rule']}\",{r['marginal']}"
            for r in rows
        )
    _emit(args, None, text, rows, csv_text=text)
    return EXIT_OK


def golden_report(only: Optional[str] = None) -> tuple[list[str], bool]:
    """Live images of the reference operator for each golden row, with a diff flag."""
    op = parse(GOLDEN_OPERATOR, OPERATOR)
    lines, ok = [], True
    for name, _, expected in GOLDEN_ROWS:
        kernel = kernel_from_name(name)
        if only is not None and kernel != only:
            continue
        got = observable_image(op, kernel).render()
        if got == expected:
            lines.append(f"{name:<12} {got}")
        else:
            ok = False
            lines.append(f"{name:<12} {got}  != expected {expected}")
    return lines, ok


def cmd_table(args) -> int:
    kernel = _kernel(args, required=False)
    if kernel is not None and kernel.name not in {row[0] for row in GOLDEN_ROWS}:
        raise UsageError(f"no reference row for kernel {kernel.name!r}")
    lines, ok = golden_report(kernel)
    header = f"images of {GOLDEN_OPERATOR}"
    _emit(args, kernel, "\n".join([header] + lines), {"rows": lines, "match": ok})
    if not ok:
        print("golden table mismatch", file=sys.stderr)
        return EXIT_GOLDEN
    return EXIT_OK


def _state(args):
    try:
        return state_from_spec(args.state, args.n, args.span, 1.0 if args.hbar is None else args.hbar)
    except GridError as exc:
        raise UsageError(str(exc)) from None


def cmd_dist(args) -> int:
    kernel = _kernel(args)
    state = _state(args)
    grid = cohen_distribution(state, kernel)
    csv_text = grid.to_csv().rstrip("\n")
    if args.output == "json":
        summary = {
            "n_q": grid.F.shape[0],
            "n_p": grid.F.shape[1],
            "q_min": grid.q_min,
            "dq": grid.dq,
            "p_min": grid.p_min,
            "dp": grid.dp,
            "norm": float(grid.F.sum().real * grid.dq * grid.dp),
            "regularized": grid.regularized,
        }
        _emit(args, kernel, csv_text, summary)
    else:
        _emit(args, kernel, csv_text, csv_text=csv_text)
    return EXIT_OK


def cmd_pair(args) -> int:
    kernel = _kernel(args)
    G = _parse(args.op, OPERATOR)
    state = _state(args)
    g = observable_image(G, kernel, args.order)
    grid = cohen_distribution(state, kernel)
    lhs = trace_expectation(state, G)
    rhs = pair(grid, g)
    diff = abs(lhs - rhs)
    ok = diff <= PAIR_TOLERANCE * (1 + abs(lhs))
    result = {
        "trace": [lhs.real, lhs.imag],
        "phase_space": [rhs.real, rhs.imag],
        "difference": diff,
        "tolerance": PAIR_TOLERANCE,
        "agree": ok,
    }
    text = "\n".join(
        [
            f"trace        {lhs.real:.12g} {lhs.imag:+.12g}i",
            f"phase-space  {rhs.real:.12g} {rhs.imag:+.12g}i",
            f"difference   {diff:.3e}",
            f"tolerance    {PAIR_TOLERANCE:g}*(1+|trace|)",
            "AGREE" if ok else "DISAGREE",
        ]
    )
    _emit(args, kernel, text, result, csv_text=(
        "trace_re,trace_im,phase_re,phase_im,difference\n"
        f"{lhs.real!r},{lhs.imag!r},{rhs.real!r},{rhs.imag!r},{diff!r}"
    ))
    return EXIT_OK if ok else EXIT_COMPUTE


COMMANDS = {
    "map": cmd_symbolic,
    "quantize": cmd_symbolic,
    "state-map": cmd_symbolic,
    "state-unmap": cmd_symbolic,
    "roundtrip": cmd_roundtrip,
    "kernels": cmd_kernels,
    "table": cmd_table,
    "dist": cmd_dist,
    "pair": cmd_pair,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.hbar is not None and not args.hbar > 0:
            raise UsageError("--hbar must be positive")
        if args.order is not None and args.order < 0:
            raise UsageError("--order must be nonnegative")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cohenmap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InsufficientOrderError, KernelError, GridError, NumericalAccuracyError) as exc:
        print(f"cohenmap: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"cohenmap: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
