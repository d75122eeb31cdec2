"""Command-line driver: ``fracnodal <subcommand> [options]``.

Options may also come from a JSON file (``--config``); flags given on the
command line override it.  Exit codes: 0 pass, 1 check failure, 2 usage
error, 3 numerical failure.  ``FRACNODAL_THREADS`` caps BLAS threads.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class CheckFailure(Exception):
    """Carries a JSON-able report for a failed check."""

    def __init__(self, report):
        super().__init__("check failed")
        self.report = report


# -- output ------------------------------------------------------------------
def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.17g}"


def dumps(obj, indent=1, _lvl=0):
    """JSON with floats at 17 significant digits and sorted keys."""
    import numpy as np

    pad = " " * (indent * (_lvl + 1))
    end = " " * (indent * _lvl)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _lvl + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _lvl + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text, out_dir, name):
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        (Path(out_dir) / name).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


# -- parsing helpers -----------------------------------------------------------
def rational(text):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def ratfloat(text):
    return float(rational(text))


def floats(text):
    try:
        return [float(Fraction(v)) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


def parse_radii(spec):
    """'geometric:rmax,rmin,count' or a comma list."""
    import numpy as np

    if isinstance(spec, (list, tuple)):
        return np.sort(np.asarray(spec, float))
    if spec.startswith("geometric:"):
        parts = floats(spec.split(":", 1)[1])
        if len(parts) != 3 or parts[2] < 2 or not 0 < parts[1] < parts[0]:
            raise UsageError(f"radii: expected geometric:rmax,rmin,count, got {spec!r}")
        return np.sort(np.geomspace(parts[0], parts[1], int(parts[2])))
    r = floats(spec)
    if not r or min(r) <= 0:
        raise UsageError(f"radii: radii must be positive, got {spec!r}")
    return np.sort(np.asarray(r))


def build_field(spec, a):
    """Field from a spec string.

    poly:even:K, poly:odd:K       planar families
    poly:quasi:K                  y|y|^{-a} times the degree-K symmetric solution for 2 - a
    harmonic:K                    Re (x + iy)^K (a = 0 only)
    corpus:NAME                   a corpus entry
    json:PATH                     a polynomial written by ``fracnodal poly``
    """
    from .corpus import build_corpus, get_entry, harmonic_planar
    from .fields import LaField, as_field
    from .poly import ParityError, planar_even, planar_odd, poly_from_json

    kind, _, rest = spec.partition(":")
    try:
        if kind == "poly":
            fam, _, k = rest.partition(":")
            k = int(k)
            if fam == "even":
                return as_field(planar_even(k, a), a)
            if fam == "odd":
                return as_field(planar_odd(k, a), a)
            if fam == "quasi":
                return LaField(float(a), 1, odd=planar_even(k, 2 - a))
            raise UsageError(f"field: unknown family {fam!r}")
        if kind == "harmonic":
            if a != 0:
                raise UsageError("field: harmonic:K needs a = 0")
            return as_field(harmonic_planar(int(rest)), a)
        if kind == "corpus":
            e = get_entry(build_corpus(a, solver=rest.startswith("grid_"), sharm=False), rest)
            f = e.field()
            return f if isinstance(f, LaField) else f.as_field()
        if kind == "json":
            p, head = poly_from_json(Path(rest).read_text())
            return as_field(p, a)
    except (ParityError, KeyError, ValueError) as exc:
        raise UsageError(f"field: {exc}") from exc
    raise UsageError(f"field: cannot parse {spec!r}")


def parse_datum(spec):
    """poly:c0,c1,...  or  bump:center,width,amp."""
    from .extension import BoundaryDatum, bump_datum

    kind, _, rest = spec.partition(":")
    vals = floats(rest) if rest else []
    if kind == "poly" and vals:
        return BoundaryDatum.polynomial(vals)
    if kind == "bump":
        return bump_datum(*vals) if vals else bump_datum()
    raise UsageError(f"datum: cannot parse {spec!r}")


# -- subcommands ---------------------------------------------------------------
def cmd_poly(args):
    from .poly import (MultiPoly, apply_La, garofalo_extend, planar_even, planar_odd, poly_to_json,
                       ParityError)

    a = args.a
    try:
        if args.family == "even":
            p = planar_even(args.k, a)
        elif args.family == "odd":
            p = planar_odd(args.k, a)
        else:
            if not args.monomial:
                raise UsageError("monomial: required for --family extension")
            exps = [int(v) for v in args.monomial.split(",")]
            p = garofalo_extend(MultiPoly.monomial(tuple(exps) + (0,)), a)
    except ParityError as exc:
        raise UsageError(f"k: {exc}") from exc
    doc = json.loads(poly_to_json(p, a))
    if args.verify:
        res = apply_La(p, a)
        doc["residual"] = "0" if res.is_zero() else str(res)
        _emit(dumps(doc), args.out, "poly.json")
        if not res.is_zero():
            raise CheckFailure(doc)
        return
    _emit(dumps(doc), args.out, "poly.json")


def cmd_report(args):
    from .extension import FracParam, dtn_constant, gamma_closed
    from .quadrature import ball_measure_const, sphere_measure_const

    a = float(args.a)
    s = (1 - a) / 2
    doc = {"n": args.n, "a": args.a, "s": s,
           "sphere_measure": sphere_measure_const(args.n, a), "ball_measure": ball_measure_const(args.n, a),
           "C_ns": FracParam(s, args.n).C, "gamma_ns": gamma_closed(args.n, s),
           "dtn_constant": dtn_constant(args.n, s)}
    _emit(dumps(doc), args.out, "report.json")


def cmd_extend(args):
    from .extension import poisson_extend

    datum = parse_datum(args.datum)
    rows = []
    for x in args.x:
        for y in args.y:
            v, err = poisson_extend(datum, x, y, args.s, with_error=True)
            rows.append({"x": x, "y": y, "value": v, "error": err})
    _emit(dumps({"datum": args.datum, "s": args.s, "points": rows}), args.out, "extend.json")


def cmd_check_frac(args):
    from .extension import dtn, frac_laplacian_direct

    datum = parse_datum(args.datum)
    rows, worst = [], 0.0
    for x in args.x:
        d1, e1 = dtn(datum, x, args.s, with_error=True)
        d2, e2 = frac_laplacian_direct(datum, x, args.s, with_error=True)
        rel = abs(d1 - d2) / max(abs(d2), args.floor)
        worst = max(worst, rel)
        rows.append({"x": x, "dtn": d1, "dtn_error": e1, "direct": d2, "direct_error": e2, "rel": rel})
    doc = {"datum": args.datum, "s": args.s, "points": rows, "max_rel": worst, "tol": args.tol,
           "pass": worst <= args.tol}
    _emit(dumps(doc), args.out, "check_frac.json")
    if not doc["pass"]:
        raise CheckFailure(doc)


def cmd_solve(args):
    import numpy as np

    from .solver import GridDomain, max_principle_holds, residual_norm, solve_extension

    a = args.a
    if args.data.startswith("recipe:"):
        from .corpus import build_corpus, get_entry

        e = get_entry(build_corpus(a, solver=True, sharm=False, solver_N=args.N, seed=args.seed), args.data[7:])
        data, parity = e.recipe
    else:
        data = build_field(args.data, a)
        parity = args.parity
    dom = GridDomain.square(args.N, args.n, args.L, args.H)
    fld = solve_extension(data, parity, float(a), dom, tol=args.tol, method=args.method)
    doc = {"header": fld.header(), "residual": residual_norm(fld), "max_principle": max_principle_holds(fld),
           "value_range": [float(np.min(fld.values)), float(np.max(fld.values))]}
    if not args.out:
        sys.stdout.write(dumps(doc) + "\n")
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fld.save(out / "field.csv", "csv")
    fld.save(out / "field.bin", "bin")
    (out / "solve.json").write_text(dumps(doc) + "\n")


def cmd_frequency(args):
    import numpy as np

    from .blowup import tangent_map_fit
    from .monotonicity import almgren, monneau, monotonicity_report, weiss

    u = build_field(args.field, args.a)
    X0 = np.asarray(args.X0 or [0.0] * (u.n + 1), float)
    radii = parse_radii(args.radii)
    prof = almgren(u, X0, radii)
    k = args.k if args.k is not None else round(float(prof.limit()), 6)
    W = weiss(u, X0, k, radii).W
    try:
        parity = "symmetric" if u.even is not None else "antisymmetric"
        p = tangent_map_fit(u, X0, k, parity)
        ref = p.polynomial
        from .fields import LaField
        pf = LaField(u.a, u.n, ref, None) if parity == "symmetric" else LaField(u.a, u.n, None, ref)
        M = monneau(u, X0, pf, k, radii).M
    except Exception:
        M = np.full(len(radii), np.nan)
    lines = ["r,H,E,N,W_k,M"]
    for row in zip(prof.radii, prof.H, prof.E, prof.N, W, M):
        lines.append(",".join(fmt_float(v) for v in row))
    rep = monotonicity_report(prof.radii, prof.N, args.tol)
    verdict = {"monotone": rep["monotone"], "max_violation": rep["max_violation"], "k": k,
               "N_limit": float(prof.limit())}
    if args.out:
        _emit("\n".join(lines), args.out, "frequency.csv")
        _emit(dumps(verdict), args.out, "verdict.json")
    else:
        sys.stdout.write("\n".join(lines) + "\n" + dumps(verdict) + "\n")
    if not rep["monotone"]:
        raise CheckFailure(verdict)


def cmd_blowup(args):
    from .blowup import classify_point

    u = build_field(args.field, args.a)
    pts = args.X0 or [[0.0] * (u.n + 1)]
    out = [classify_point(u, p).to_json() for p in pts]
    _emit(dumps(out if len(out) > 1 else out[0]), args.out, "blowup.json")


def cmd_nodal(args):
    from .nodal import crossing_count, extract_nodal, measure_boxcount

    u = build_field(args.field, args.a)
    if u.n != 1:
        raise UsageError("field: nodal geometry works on planar fields (n = 1)")
    ns = extract_nodal(u, args.R * 1.02, args.N)
    box = measure_boxcount(u, args.R, (args.N // 4 | 1, args.N // 2 | 1, args.N))
    cro = crossing_count(u, args.R)
    doc = {"field": args.field, "R": args.R, "box_count": box.value, "box_count_extrapolated": box.extrapolated,
           "minkowski": box.extra["minkowski"], "crofton": cro.value, "max_crossings_per_line":
           cro.extra.get("max_per_line")}
    if not args.out:
        sys.stdout.write(dumps(doc) + "\n")
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ns.to_csv(out / "segments.csv")
    ns.to_gnuplot(out / "nodal.dat")
    (out / "measure.json").write_text(dumps(doc) + "\n")


def cmd_construct1d(args):
    import numpy as np

    from .sharm1d import construct_order, evaluate, verify_order

    s = float(args.s)
    td = construct_order(args.order, s, complement=args.complement)
    rep = verify_order(td, args.order, s)
    xs = np.linspace(-args.extent, args.extent, args.samples)
    doc = {"order": args.order, "s": args.s, "g": [f"{c.numerator}/{c.denominator}" for c in td.coeffs],
           "slope": rep["slope"], "frac_max_rel": rep["frac_max_rel"],
           "pass": bool(abs(rep["slope"] - 2 * args.order) <= 0.05 and rep["frac_max_rel"] <= 1e-5)}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        vals = evaluate(td, xs)
        (out / "u.csv").write_text("x,u\n" + "".join(f"{fmt_float(x)},{fmt_float(v)}\n" for x, v in zip(xs, vals)))
        (out / "report.json").write_text(dumps(doc) + "\n")
    else:
        sys.stdout.write(dumps(doc) + "\n")
    if not doc["pass"]:
        raise CheckFailure(doc)


def cmd_corpus(args):
    from .corpus import build_corpus

    C = build_corpus(args.a, args.max_degree, solver=args.verb == "dump" and args.solver, sharm=True, seed=args.seed)
    if args.verb == "list":
        _emit("\n".join(f"{e.name}\t{e.kind}\tn={e.n}" for e in C), args.out, "corpus.txt")
    else:
        _emit(dumps([e.summary() for e in C]), args.out, "corpus.json")


def cmd_acceptance(args):
    from .acceptance import run_acceptance

    which = [int(v) for v in args.criteria.split(",")] if args.criteria else None
    res = run_acceptance(which, [Fraction(v) for v in args.a_values.split(",")], args.solver_N)
    lines = [r.line() for r in res]
    if args.out:
        _emit(dumps([{"criterion": r.number, "title": r.title, "pass": r.passed, "detail": r.detail} for r in res]),
              args.out, "acceptance.json")
    sys.stdout.write("\n".join(lines) + "\n")
    if not all(r.passed for r in res):
        raise CheckFailure({"failed": [r.number for r in res if not r.passed]})


# -- parser ----------------------------------------------------------------------
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values; flags override it")
    common.add_argument("--seed", type=int, default=0, help="seed for any randomised step")
    P = argparse.ArgumentParser(prog="fracnodal", description=__doc__.splitlines()[0])
    sub = P.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        sp.add_argument("--out", help="output directory (default: stdout)")
        return sp

    sp = add("poly", cmd_poly, "exact L_a-harmonic polynomials")
    sp.add_argument("--family", choices=["even", "odd", "extension"], default="even")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--a", type=rational, default=Fraction(0))
    sp.add_argument("--monomial", help="x exponents for --family extension, e.g. 1,1")
    sp.add_argument("--verify", action="store_true")

    sp = add("report", cmd_report, "weighted measure and extension constants")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--a", type=rational, default=Fraction(0))

    sp = add("extend", cmd_extend, "Poisson extension of 1-D data")
    sp.add_argument("--datum", default="bump:0,1,1")
    sp.add_argument("--s", type=ratfloat, default=0.5)
    sp.add_argument("--x", type=floats, default=[0.0])
    sp.add_argument("--y", type=floats, default=[0.5])

    sp = add("check-frac", cmd_check_frac, "Dirichlet-to-Neumann map against the singular integral")
    sp.add_argument("--datum", default="bump:0.2,1,1")
    sp.add_argument("--s", type=ratfloat, default=0.5)
    sp.add_argument("--x", type=floats, default=[0.0, 0.3])
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.add_argument("--floor", type=float, default=1e-6, help="denominator floor for relative errors (absolute scale near zero)")

    sp = add("solve", cmd_solve, "finite-volume solve of div(|y|^a grad v) = 0")
    sp.add_argument("--data", default="poly:even:4", help="field spec or recipe:NAME")
    sp.add_argument("--a", type=rational, default=Fraction(0))
    sp.add_argument("--parity", choices=["symmetric", "antisymmetric"], default="symmetric")
    sp.add_argument("--N", type=int, default=129)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--L", type=float, default=1.0)
    sp.add_argument("--H", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--method", choices=["cg", "direct"], default="cg")

    sp = add("frequency", cmd_frequency, "Almgren, Weiss and Monneau profiles")
    sp.add_argument("--field", default="poly:even:2")
    sp.add_argument("--a", type=rational, default=Fraction(0))
    sp.add_argument("--X0", type=floats)
    sp.add_argument("--radii", default="geometric:0.5,0.0039,8")
    sp.add_argument("--k", type=float)
    sp.add_argument("--tol", type=float, default=1e-6)

    sp = add("blowup", cmd_blowup, "order, tangent map and stratum at nodal points")
    sp.add_argument("--field", default="poly:even:2")
    sp.add_argument("--a", type=rational, default=Fraction(0))
    sp.add_argument("--X0", type=floats, action="append")

    sp = add("nodal", cmd_nodal, "nodal set extraction and length")
    sp.add_argument("--field", default="poly:even:2")
    sp.add_argument("--a", type=rational, default=Fraction(0))
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--N", type=int, default=401)

    sp = add("construct1d", cmd_construct1d, "1-D s-harmonic function of prescribed order")
    sp.add_argument("--order", type=int, default=2)
    sp.add_argument("--s", type=rational, default=Fraction(1, 2))
    sp.add_argument("--complement", action="store_true")
    sp.add_argument("--extent", type=float, default=2.0)
    sp.add_argument("--samples", type=int, default=401)

    sp = add("corpus", cmd_corpus, "list or dump the named test corpus")
    sp.add_argument("verb", choices=["list", "dump"])
    sp.add_argument("--a", type=rational, default=Fraction(0))
    sp.add_argument("--max-degree", type=int, default=6)
    sp.add_argument("--solver", action="store_true", help="include solver entries in dump (solves grids)")

    sp = add("acceptance", cmd_acceptance, "run the acceptance suite")
    sp.add_argument("--criteria", help="comma list, default all")
    sp.add_argument("--a-values", default="-1/2,1/3")
    sp.add_argument("--solver-N", type=int, default=129)
    return P


def _apply_config(parser, argv):
    """Parse once for --config, merge its values as defaults, then parse again."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config: top level must be an object")
    sp = parser._subparsers._group_actions[0].choices[args.cmd]
    known = {a.dest: a for a in sp._actions}
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok[2:].split("=")[0].replace("-", "_"))
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest in ("cmd", "subcommand"):
            continue
        if dest not in known:
            raise UsageError(f"config.{key}: unknown field for '{args.cmd}'")
        if dest in explicit:
            continue
        act = known[dest]
        try:
            if act.type is not None and not isinstance(val, bool):
                val = act.type(",".join(str(v) for v in val) if isinstance(val, list) and act.type is floats
                               else str(val))
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"config.{key}: {exc}") from exc
        if act.choices and val not in act.choices:
            raise UsageError(f"config.{key}: must be one of {sorted(act.choices)}")
        setattr(args, dest, val)
    return args


def _validate(args):
    for k, v in vars(args).items():
        if ("tol" in k or k == "floor") and v is not None and not v > 0:
            raise UsageError(f"{k}: tolerances must be positive")
    for k in ("N", "samples"):
        if getattr(args, k, None) is not None and getattr(args, k) < 3:
            raise UsageError(f"{k}: must be at least 3")
    if hasattr(args, "a") and args.a is not None and not -1 < args.a < 1:
        raise UsageError("a: must lie in (-1, 1)")
    if hasattr(args, "s") and not 0 < float(args.s) < 1:
        raise UsageError("s: must lie in (0, 1)")


def _set_threads():
    n = os.environ.get("FRACNODAL_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _join_negative_values(argv):
    """'--a -1/2' -> '--a=-1/2' so that argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok.startswith("--") and "=" not in tok and nxt and nxt.startswith("-") and len(nxt) > 1 \
                and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None):
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    _set_threads()
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        _validate(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return EXIT_USAGE if exc.code else EXIT_OK
    from .blowup import NotANodalPoint
    from .extension import DivergentIntegral
    from .monotonicity import DegenerateSphere
    from .solver import IterativeFailure

    try:
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except CheckFailure:
        return EXIT_CHECK
    except (DegenerateSphere, DivergentIntegral, IterativeFailure, NotANodalPoint, ArithmeticError,
            np_linalg_error()) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_NUMERIC
    return EXIT_OK


def np_linalg_error():
    import numpy as np

    return np.linalg.LinAlgError


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
