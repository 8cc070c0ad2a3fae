"""Command line interface: padic-transport <command> ...

Exit codes: 0 success, 2 parse error, 3 precondition violation,
4 precision exhaustion, 5 uniqueness failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import ParseError, TransportError
from .logring import plog, render_kst
from .padic import PadicContext, is_prime


def _prime(text):
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, payload: dict, lines):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)


def _matrix_lines(mat):
    return ["  [" + ", ".join(row) + "]" for row in mat]


def cmd_plog(args):
    ctx = PadicContext(args.prime, args.precision)
    value = plog(ctx(args.x))
    text = render_kst(value)
    _emit(args, {"x": args.x, "prime": args.prime, "precision": args.precision, "plog": text}, [text])


def cmd_transport(args):
    from .transport import CurveSpec, TransportEngine
    from .parser import parse_connection

    spec = parse_connection(_read(args.connection))
    p = args.prime or spec.prime
    if p is None:
        raise ParseError("no prime given (use --prime or the file's 'prime' field)")
    precision = args.precision or spec.precision or 20
    curve = CurveSpec.from_spec(spec, p)
    eng = TransportEngine(curve, precision)
    res = eng.transport(args.x0, args.x1, args.level)
    lines = [f"transport {args.x0} -> {args.x1}  (p = {p}, O(p^{precision}), level {res.level})", f"path: {res.path}"]
    lines += _matrix_lines(res.render())
    _emit(args, res.as_dict(), lines)


def cmd_polylog(args):
    from .transport import polylog

    value = polylog(args.k, args.z, args.prime, args.precision, base=args.base)
    text = render_kst(value)
    payload = {"k": args.k, "z": args.z, "prime": args.prime, "precision": args.precision, "value": text}
    _emit(args, payload, [text])


def cmd_integrate(args):
    from .transport import iterated_integral, parse_word

    word = parse_word(args.word)
    value = iterated_integral(word, args.x0, args.x1, args.prime, args.precision)
    text = render_kst(value)
    payload = {
        "word": [w.render() for w in word],
        "from": args.x0,
        "to": args.x1,
        "prime": args.prime,
        "precision": args.precision,
        "value": text,
    }
    _emit(args, payload, [text])


def cmd_phimod(args):
    from .phimod import analyze, parse_module

    m = parse_module(_read(args.module), args.precision)
    report = analyze(m)
    lines = [f"{k}: {v}" for k, v in report.items()]
    _emit(args, report, lines)


def cmd_tower(args):
    from .padic import render_padic
    from .phimod import canonical_element, parse_tower

    tower = parse_tower(_read(args.file), args.precision)
    can = canonical_element(tower)
    payload = {"dimensions": can.dimensions, "element": [render_padic(c) for c in can.element]}
    lines = [f"dim L_i: {can.dimensions}", "canonical element:"] + ["  " + x for x in payload["element"]]
    _emit(args, payload, lines)


def cmd_fcrystal(args):
    from .frobenius import FCrystal, FrobLift, check_horizontality, phi_on_psi, relation_holds, solve_frobenius_structure
    from .connection import LogConnection
    from .parser import parse_connection
    from .padic import render_padic
    from .transport import CurveSpec

    text = _read(args.connection)
    spec = parse_connection(text)
    raw = json.loads(text) if text.strip().startswith("{") else {}
    p = args.prime or spec.prime
    if p is None:
        raise ParseError("no prime given (use --prime or the file's 'prime' field)")
    precision = args.precision or spec.precision or 20
    order = args.order or precision + 5
    ctx = PadicContext(p, precision)
    conn = LogConnection.from_spec(spec, Fraction(0), ctx, order)
    if spec.frobenius_lift is not None:
        lift = FrobLift.from_polynomial(spec.frobenius_lift.num * _inverse_const(spec.frobenius_lift.den), ctx, order)
    else:
        lift = FrobLift.standard(ctx, order)
    if "phi0" in raw:
        phi0 = [[ctx(str(x)) for x in row] for row in raw["phi0"]]
    else:
        weights = CurveSpec.from_spec(spec, p).weights
        phi0 = [[ctx(p) ** weights[i] if i == j else ctx.zero() for j in range(conn.rank)] for i in range(conn.rank)]
    phi = solve_frobenius_structure(conn, lift, phi0)
    cr = FCrystal(conn, phi, lift)
    deficit = check_horizontality(cr)
    psi = phi_on_psi(cr)
    show = lambda m: [[render_padic(c) for c in row] for row in m]
    report = {
        "prime": p,
        "precision": precision,
        "horizontality_deficit": deficit,
        "phi_psi": show(psi.matrix),
        "N_psi": show(psi.psi.N_psi),
        "relation_N_phi_eq_p_phi_N": relation_holds(psi),
    }
    lines = [f"horizontality deficit: {deficit}", "phi on nearby cycles:"]
    lines += _matrix_lines(report["phi_psi"])
    lines += ["N on nearby cycles:"] + _matrix_lines(report["N_psi"])
    lines.append(f"N phi = p phi N: {report['relation_N_phi_eq_p_phi_N']}")
    _emit(args, report, lines)


def _inverse_const(den):
    if den.degree != 0:
        raise ParseError("frobenius_lift must be a polynomial")
    return Fraction(1) / den.c[0]


def build_parser():
    ap = argparse.ArgumentParser(prog="padic-transport", description="p-adic canonical transport tools")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, prime_required=True, precision_default=20):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--prime", type=_prime, required=prime_required)
        sp.add_argument("--precision", type=int, default=precision_default)

    sp = sub.add_parser("plog", help="the branch Log x in K_st")
    common(sp)
    sp.add_argument("x")
    sp.set_defaults(func=cmd_plog)

    sp = sub.add_parser("transport", help="canonical transport of a connection file")
    common(sp, prime_required=False, precision_default=None)
    sp.add_argument("--connection", required=True)
    sp.add_argument("--from", dest="x0", required=True)
    sp.add_argument("--to", dest="x1", required=True)
    sp.add_argument("--level", type=int, default=None)
    sp.set_defaults(func=cmd_transport)

    sp = sub.add_parser("polylog", help="Li_k(z) normalized at a base point near 0")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--base", default=None, help="base point in the disk of 0 (default p)")
    sp.add_argument("z")
    sp.set_defaults(func=cmd_polylog)

    sp = sub.add_parser("integrate", help="iterated integral of a word of forms")
    common(sp)
    sp.add_argument("--word", required=True)
    sp.add_argument("--from", dest="x0", required=True)
    sp.add_argument("--to", dest="x1", required=True)
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("phimod", help="analyse a (phi, N)-module file")
    common(sp, prime_required=False, precision_default=30)
    sp.add_argument("--module", required=True)
    sp.add_argument("--analyze", action="store_true")
    sp.set_defaults(func=cmd_phimod)

    sp = sub.add_parser("tower", help="canonical element of a tower of (phi, N)-modules")
    common(sp, prime_required=False, precision_default=30)
    sp.add_argument("--file", required=True)
    sp.set_defaults(func=cmd_tower)

    sp = sub.add_parser("fcrystal", help="Frobenius structure of a connection at 0")
    common(sp, prime_required=False, precision_default=None)
    sp.add_argument("--connection", required=True)
    sp.add_argument("--check", action="store_true")
    sp.add_argument("--order", type=int, default=None)
    sp.set_defaults(func=cmd_fcrystal)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        args.func(args)
    except TransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ZeroDivisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
