"""Command line front end.

    loopdecomp decompose --n 2 --torsion 3^2,5,3
    loopdecomp wedge     --n 3 --torsion 7
    loopdecomp ah        --n 3 --p 5
    loopdecomp hm        --summands "P^3(3),S^3" --p 3
    loopdecomp tangent   --n 2 --r 3

Exit status: 0 when every certificate passes, 1 for bad input, 2 when a
certificate fails (the first failing degree and both coefficients are printed).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from sympy import isprime

from . import __version__
from .decomp import (
    DecompositionResult,
    TorsionInput,
    decompose,
    loop_skeleton_wedge_decomposition,
    skeleton_decomposition,
    sphere_bundle_decomposition,
)
from .dga import ah_model_V, dga_homology_dims, poly_dims
from .errors import (
    EvenExponentOne,
    ExpansionTooLarge,
    InvalidInput,
    LoopDecompError,
    NotPrime,
    ParseError,
)
from .hilton_milnor import geometric_route, hm_expansion, hm_factors, letter_degrees, lyndon_route
from .series import DEFAULT_BOUND
from .spaces import RATIONAL, Wedge, nf_cells, parse_expr, render

EXIT_OK, EXIT_INPUT, EXIT_CERTIFICATE = 0, 1, 2


@dataclass(frozen=True)
class TorsionSpec:
    odd: tuple  # ((p, r), ...)
    even: tuple  # (r, ...)


_ITEM_RE = re.compile(r"\s*(\d+)(?:\s*\^\s*(\d+))?\s*")


def parse_torsion_spec(s: str) -> TorsionSpec:
    """Parse ``"3^2,5,3,2^2"``: comma-separated ``p`` or ``p^r``."""
    if not s or not s.strip():
        raise ParseError("empty torsion specification", 0)
    odd, even = [], []
    pos = 0
    for chunk in s.split(","):
        m = _ITEM_RE.fullmatch(chunk)
        if not m:
            stripped = chunk.strip()
            offset = pos + chunk.index(stripped) if stripped else pos
            if stripped.upper() == "Z":
                raise InvalidInput("free summands in H^{2n}(M; Z) are not supported; only torsion is handled")
            bad = next((i for i, ch in enumerate(chunk) if not (ch.isdigit() or ch in " ^")), None)
            raise ParseError(f"expected p or p^r, got {stripped!r}", pos + bad if bad is not None else offset)
        p = int(m.group(1))
        r = int(m.group(2)) if m.group(2) is not None else 1
        if r < 1:
            raise ParseError(f"exponent must be >= 1 in {chunk.strip()!r}", pos + m.start(2))
        if not isprime(p):
            raise NotPrime(f"{p} is not prime (write prime powers as p^r, e.g. 2^2 for 4)")
        if p == 2:
            if r == 1:
                raise EvenExponentOne("2-primary torsion must have exponent >= 2; Z/2 is not supported")
            even.append(r)
        else:
            odd.append((p, r))
        pos += len(chunk) + 1
    return TorsionSpec(tuple(odd), tuple(even))


# reports


def _prime_label(p) -> str:
    return "Q" if p == RATIONAL else str(p)


def result_to_json(result: DecompositionResult, echo: dict) -> dict:
    W = result.complement
    if isinstance(W, Wedge):
        summands = [render(c) for c in W.children]
    else:
        summands = [] if render(W) == "*" else [render(W)]
    factors = result.loop_factors
    factor_list = [render(c) for c in getattr(factors, "children", (factors,))]
    return {
        "input": echo,
        "subject": result.subject,
        "decomposition": render(factors),
        "factors": factor_list,
        "complement": {"expression": render(W), "summands": summands, "truncated": result.complement_truncated},
        "fibration": None
        if result.fibration is None
        else {
            "fibre": render(result.fibration.fibre),
            "total": result.fibration.total,
            "base": result.fibration.base,
            "fibre_map": result.fibration.fibre_map,
            "projection": result.fibration.projection,
        },
        "certificate": [
            {
                "prime": _prime_label(c.prime),
                "route": c.route,
                "bound": c.bound,
                "pass": c.passed,
                "mismatch": None if c.mismatch is None else list(c.mismatch),
                "note": c.note,
            }
            for c in result.certificate
        ],
        "verified": result.verified,
        "bound": result.bound,
        "notes": list(result.notes),
    }


def result_to_text(result: DecompositionResult, extra: Sequence[str] = ()) -> str:
    lines = [result.render()]
    lines.extend(extra)
    W = result.complement
    if result.fibration is not None:
        lines.append(f"fibration: {result.fibration.describe()}")
    if render(W) != "*":
        flag = " (truncated)" if result.complement_truncated else ""
        lines.append(f"complement{flag}: {render(W)}")
    if result.certificate:
        status = "all pass" if result.verified else "FAILED"
        lines.append(f"certificate (N={result.bound}): {len(result.certificate)} checks, {status}")
        lines.extend("  " + c.describe() for c in result.certificate)
    else:
        lines.append("certificate: skipped (--no-verify)")
    lines.extend(f"note: {n}" for n in result.notes)
    return "\n".join(lines)


def _emit(payload: dict, text: str, fmt: str, out):
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        out.write(text + "\n")


def _failure_message(result: DecompositionResult) -> Optional[str]:
    bad = result.first_failure()
    if bad is None:
        return None
    d, a, b = bad.mismatch
    return f"certificate failed: p={_prime_label(bad.prime)} route {bad.route}: degree {d}: {a} != {b}"


# subcommands


def _torsion_input(args) -> TorsionInput:
    spec = parse_torsion_spec(args.torsion)
    return TorsionInput(args.n, spec.odd, spec.even)


def _check_degree(args):
    if args.max_degree < 4 * args.n - 2:
        raise InvalidInput(f"--max-degree must be at least 4n-2 = {4 * args.n - 2}")


def _echo(args, **extra) -> dict:
    echo = {"subcommand": args.command, "max_degree": args.max_degree}
    echo.update(extra)
    return echo


def _run_decomposition(args, result: DecompositionResult, echo: dict, out, extra=()) -> int:
    _emit(result_to_json(result, echo), result_to_text(result, extra), args.format, out)
    message = _failure_message(result) if args.verify else None
    if message:
        print(message, file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_decompose(args, out) -> int:
    inp = _torsion_input(args)
    _check_degree(args)
    result = decompose(inp, args.max_degree, args.verify)
    sk = skeleton_decomposition(inp)
    extra = [f"skeleton: M_{2 * inp.n} ~ {render(sk.skeleton)}", f"m = {sk.m}, A = {render(sk.A)}"]
    echo = _echo(args, n=inp.n, torsion=inp.describe())
    return _run_decomposition(args, result, echo, out, extra)


def cmd_wedge(args, out) -> int:
    inp = _torsion_input(args)
    if inp.even:
        raise InvalidInput("the wedge identity is implemented for odd torsion only")
    _check_degree(args)
    result = loop_skeleton_wedge_decomposition(inp, args.max_degree, args.verify)
    echo = _echo(args, n=inp.n, torsion=inp.describe())
    return _run_decomposition(args, result, echo, out)


def cmd_tangent(args, out) -> int:
    _check_degree(args)
    result = sphere_bundle_decomposition(args.n, args.r, args.max_degree, args.verify)
    return _run_decomposition(args, result, _echo(args, n=args.n, r=args.r), out)


def cmd_ah(args, out) -> int:
    if not isprime(args.p):
        raise NotPrime(f"{args.p} is not prime")
    N = args.max_degree
    D = ah_model_V(args.n, args.p, args.r)
    dims = dga_homology_dims(D, N)
    poly = poly_dims(2 * args.n - 2, 2 * args.n - 1, N)
    diff = dims.first_difference(poly)
    payload = {
        "input": _echo(args, n=args.n, p=args.p, r=args.r),
        "generators": [[name, deg] for name, deg in D.generators],
        "homology": list(dims.coeffs),
        "polynomial": list(poly.coeffs),
        "pass": diff is None,
        "mismatch": None if diff is None else list(diff),
    }
    text = "\n".join(
        [
            f"H_*(Om (P^{2 * args.n}({args.p ** args.r}) u e^{4 * args.n - 1}); F_{args.p}) via T(x,y,z; dz=[x,y])",
            "homology:   " + " ".join(map(str, dims.coeffs)),
            "polynomial: " + " ".join(map(str, poly.coeffs)),
            "match" if diff is None else "MISMATCH",
        ]
    )
    _emit(payload, text, args.format, out)
    if diff is not None:
        print(f"certificate failed: degree {diff[0]}: {diff[1]} != {diff[2]}", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_hm(args, out) -> int:
    try:
        summands = [parse_expr(s) for s in args.summands.split(",")]
    except LoopDecompError as exc:
        raise InvalidInput(str(exc)) from exc
    N = args.max_degree
    degs = letter_degrees(summands)
    factors = hm_factors(summands, N)
    try:
        expansion = render(hm_expansion(summands, N))
    except ExpansionTooLarge:
        expansion = None
    geo = geometric_route(summands, args.p, N)
    lyn = lyndon_route(summands, args.p, N)
    diff = geo.first_difference(lyn)
    payload = {
        "input": _echo(args, summands=[render(s) for s in summands], p=_prime_label(args.p)),
        "letter_degrees": degs,
        "factors": [
            {
                "content": list(f.content),
                "weight": f.weight,
                "count": f.count,
                "smash": [[render(c), k] for c, k in nf_cells(f.smash)],
            }
            for f in factors
        ],
        "expansion": expansion,
        "geometric": list(geo.coeffs),
        "lyndon": list(lyn.coeffs),
        "pass": diff is None,
    }
    lhs = "Om (" + " v ".join(f"Sg {render(s)}" if len(summands) > 1 else render(s) for s in summands) + ")"
    lines = [f"{lhs} ~ {expansion if expansion is not None else f'{sum(f.count for f in factors)} factors'}"]
    lines.append(f"series p={_prime_label(args.p)} to degree {N}: " + ("match" if diff is None else "MISMATCH"))
    _emit(payload, "\n".join(lines), args.format, out)
    if diff is not None:
        print(f"certificate failed: degree {diff[0]}: {diff[1]} != {diff[2]}", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


COMMANDS = {"decompose": cmd_decompose, "wedge": cmd_wedge, "ah": cmd_ah, "hm": cmd_hm, "tangent": cmd_tangent}


def _prime_arg(text: str):
    return RATIONAL if text.upper() == "Q" else int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopdecomp", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--max-degree", type=int, default=DEFAULT_BOUND, help="degree bound N (default %(default)s)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    for name, help_text in (
        ("decompose", "decompose Omega M from the torsion of H^{2n}(M; Z)"),
        ("wedge", "decompose Omega (M_2n v S^{4n-1})"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--torsion", required=True, help="comma separated p or p^r, e.g. 3^2,5,3")
        p.add_argument("--no-verify", dest="verify", action="store_false", help="skip the certificate")
        common(p)

    p = sub.add_parser("tangent", help="Omega of the mod-2^r tangent bundle of S^{2n}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--no-verify", dest="verify", action="store_false")
    common(p)

    p = sub.add_parser("ah", help="homology of the Adams-Hilton model of P^{2n}(p^r) u e^{4n-1}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    common(p)

    p = sub.add_parser("hm", help="Hilton-Milnor factors of Om (Sg A_1 v ... v Sg A_k)")
    p.add_argument("--summands", required=True, help='comma separated expressions, e.g. "P^3(3),S^3"')
    p.add_argument("--p", type=_prime_arg, required=True, help="prime, or Q for rational")
    common(p)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for failed certificates
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return COMMANDS[args.command](args, out)
    except LoopDecompError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
