"""Command-line front end: deterministic JSON reports over the workbench.

Exact values serialize as decimal-string rationals, complex numbers as
["re","im"] strings; identical configuration yields byte-identical output.
Exit status: 0 on success, 1 when an asserted identity fails, 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import cohomology, hypergeom, ktheory, qde, qkz, stokes
from .ring import LaurentMatrix, LaurentPoly
from .ktheory import BraidWord


class MathFailure(Exception):
    """An asserted identity failed beyond tolerance."""


# -- serialization -----------------------------------------------------------------


def _complex_json(w: complex) -> list[str]:
    w = complex(w)
    return [repr(w.real), repr(w.imag)]


def to_jsonable(obj):
    if isinstance(obj, LaurentPoly):
        return obj.to_json()
    if isinstance(obj, LaurentMatrix):
        return [[to_jsonable(obj[i, j]) for j in range(obj.cols)] for i in range(obj.rows)]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(row) for row in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, stokes.SectorId):
        return {"kind": obj.kind, "k": obj.k}
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, complex):
        return _complex_json(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)


def emit(report: dict, path: str | None) -> None:
    text = json.dumps(to_jsonable(report), sort_keys=True, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


# -- argument parsing ---------------------------------------------------------------


def parse_z(text: str, n: int):
    """Comma-separated parameters; exact Fractions when every entry is
    rational, complex numbers otherwise."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise ValueError(f"expected {n} parameters, got {len(parts)}")
    try:
        return tuple(Fraction(p) for p in parts)
    except ValueError:
        return tuple(complex(p.replace(" ", "")) for p in parts)


_CLASS_TOKEN = re.compile(r"^[0-9XZy\s\+\-\*/\(\)\^]*$")


def parse_kclass_expr(text: str, n: int) -> LaurentPoly:
    """Tiny expression syntax for Laurent polynomials in X, Z1..Zn
    (also O(i) for line-bundle classes); ^ means power."""
    text = text.strip()
    m = re.fullmatch(r"O\((-?\d+)\)", text)
    if m:
        return ktheory.KClass.line_bundle(n, int(m.group(1))).to_laurent()
    expr = text.replace("^", "**")
    if not _CLASS_TOKEN.match(expr.replace("**", "^").replace("Z", "y")):
        raise ValueError(f"unsupported characters in class expression {text!r}")
    vs = ktheory.xz_vars(n)
    names = {"X": LaurentPoly.variable(vs, "X")}
    for i in range(1, n + 1):
        names[f"Z{i}"] = LaurentPoly.variable(vs, f"Z{i}")
    try:
        value = eval(expr, {"__builtins__": {}}, names)  # noqa: S307 - guarded charset
    except Exception as exc:
        raise ValueError(f"cannot parse class expression {text!r}: {exc}") from exc
    if isinstance(value, int):
        value = LaurentPoly.constant(vs, value)
    if not isinstance(value, LaurentPoly):
        raise ValueError(f"expression {text!r} is not a Laurent polynomial")
    return value


def parse_word(text: str) -> BraidWord:
    if not text:
        return BraidWord(())
    return BraidWord(tuple(int(t) for t in text.split(",")))


def parse_sector(text: str) -> stokes.SectorId:
    kind, _, k = text.partition(":")
    mapping = {"vp": "Vprime", "vpp": "Vdprime"}
    if kind not in mapping:
        raise ValueError("sector must be vp:K or vpp:K")
    return stokes.SectorId(mapping[kind], int(k or 0))


def load_config(path: str) -> dict:
    """Flat key = value lines; '#' comments allowed; flags win on conflict."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            if not _:
                raise ValueError(f"bad config line: {line!r}")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _named_basis(name: str, k: int, n: int):
    if name == "beilinson":
        return ktheory.beilinson_basis(n)
    if name in ("Q", "Qp", "Qpp", "Qpt", "Qppt"):
        return ktheory.structured_basis(name, k, n)
    raise ValueError(f"unknown basis {name!r}")


def _default_precision():
    val = os.environ.get("PROJQDE_PRECISION", "double")
    return val if val == "double" else int(val)


def _context(z, n) -> cohomology.NumericContext:
    return cohomology.NumericContext(
        tuple(complex(w) for w in z), precision=_default_precision()
    )


# -- commands -----------------------------------------------------------------------


def cmd_gram(args) -> dict:
    basis = _named_basis(args.basis, args.k, args.n)
    if args.word:
        basis = ktheory.braid_act(parse_word(args.word), basis)
    g = ktheory.gram_matrix(basis)
    return {
        "n": args.n,
        "basis": args.basis,
        "labels": list(basis.labels),
        "gram": g,
        "unitriangular": g.is_upper_unitriangular(),
    }


def cmd_mutate(args) -> dict:
    n = args.n
    e = ktheory.kclass_from_laurent(parse_kclass_expr(args.pivot, n), n)
    f = ktheory.kclass_from_laurent(parse_kclass_expr(args.target, n), n)
    out = ktheory.mutate(args.side, e, f)
    return {"n": n, "side": args.side, "result": out.to_json()}


def cmd_braid(args) -> dict:
    n = args.n
    if args.name:
        word = ktheory.braid_constants(args.name, n)
    else:
        word = parse_word(args.word)
    basis = _named_basis(args.basis, args.k, n)
    image = ktheory.braid_act(word, basis)
    return {
        "n": n,
        "word": word.to_json(),
        "labels": list(image.labels),
        "elements": [e.to_json() for e in image.elements],
        "exceptional": image.is_exceptional(),
    }


def cmd_dioph_check(args) -> dict:
    n = args.n
    basis = _named_basis(args.basis, args.k, n)
    if args.word:
        basis = ktheory.braid_act(parse_word(args.word), basis)
    g = ktheory.gram_matrix(basis)
    residual = ktheory.dioph_residual(g, n)
    report = {"n": n, "basis": args.basis, "char_poly_residual_zero": residual.is_zero()}
    if n == 3:
        report["markov_residuals_zero"] = [
            r.is_zero() for r in ktheory.markov_residuals_rank3(g)
        ]
    if n == 4:
        report["markov_residuals_zero"] = [
            r.is_zero() for r in ktheory.markov_residuals_rank4(g)
        ]
    if not residual.is_zero():
        raise MathFailure("canonical characteristic polynomial constraint violated")
    return report


def cmd_solve_qde(args) -> dict:
    n = args.n
    z = parse_z(args.z, n)
    _context(z, n)  # resonance guard
    q = complex(args.q)
    if args.solution == "levelt":
        sol = qde.levelt_series(n, z, args.order)
    else:
        sol = qde.topological_series(n, z, args.order)
    res = qde.ode_residual(sol, q, n, [complex(w) for w in z])
    report = {
        "n": n,
        "solution": args.solution,
        "q": complex(q),
        "order": args.order,
        "matrix": sol.matrix(q),
        "ode_residual": res,
    }
    if res > args.tol:
        raise MathFailure(f"qDE residual {res} above tolerance {args.tol}")
    return report


def cmd_qkz(args) -> dict:
    n = args.n
    z = [complex(w) for w in parse_z(args.z, n)]
    m = qkz.qkz_operator(args.i, complex(args.q), z, basis=args.basis)
    return {"n": n, "i": args.i, "basis": args.basis, "matrix": m}


def cmd_qkz_check(args) -> dict:
    n = args.n
    ctx = _context(parse_z(args.z, n), n)
    q = complex(args.q)
    Q = parse_kclass_expr(args.cls, n)
    residuals = {}
    for i in range(1, n + 1):
        residuals[f"shift_{i}"] = hypergeom.solution_qkz_residual(Q, i, q, ctx, args.order)
    sol = hypergeom.psi_Q(Q, ctx, args.order)
    residuals["ode"] = hypergeom.solution_ode_residual(sol, q)
    worst = max(residuals.values())
    if worst > args.tol:
        raise MathFailure(f"difference residual {worst} above tolerance {args.tol}")
    return {"n": n, "q": q, "residuals": residuals}


def cmd_psi(args) -> dict:
    n = args.n
    ctx = _context(parse_z(args.z, n), n)
    q = complex(args.q)
    Q = parse_kclass_expr(args.cls, n)
    sol = hypergeom.psi_Q(Q, ctx, args.order)
    restr = sol.restrictions(q)
    report = {
        "n": n,
        "q": q,
        "restrictions": restr,
        "x_coords": sol.x_coords(q),
    }
    if args.oracle == "contour":
        oracle = hypergeom.contour_oracle(Q, q, ctx).to_vector()
        dev = float(np.max(np.abs(oracle - restr)) / np.max(np.abs(restr)))
        report["oracle_restrictions"] = oracle
        report["oracle_deviation"] = dev
        if dev > args.tol:
            raise MathFailure(f"contour oracle deviation {dev} above tolerance {args.tol}")
    return report


def cmd_b_check(args) -> dict:
    n = args.n
    ctx = _context(parse_z(args.z, n), n)
    rep = hypergeom.b_theorem_check(args.k, ctx, args.order)
    rep = dict(rep)
    if rep["deviation"] > args.tol:
        raise MathFailure(
            f"comparison-matrix deviation {rep['deviation']} above tolerance {args.tol}"
        )
    return rep


def cmd_stokes(args) -> dict:
    n = args.n
    sector = parse_sector(args.sector)
    rep = stokes.gram_stokes_check(sector, n)
    report = {
        "n": n,
        "sector": sector,
        "s1": rep["s1"],
        "s2": rep["s2"],
        "gram": rep["gram"],
        "identities": {
            key: rep[key]
            for key in (
                "stokes_is_dual_gram",
                "stokes_is_gram",
                "dagger_pair",
                "char_poly",
                "formal_monodromy",
            )
        },
    }
    if not all(report["identities"].values()):
        raise MathFailure("a Stokes identity failed")
    if args.z:
        ctx = _context(parse_z(args.z, n), n)
        report["normalization"] = stokes.stokes_normalization(sector, ctx)
    return report


def cmd_formal_reduce(args) -> dict:
    n = args.n
    if args.z is None:
        if n != 2:
            raise ValueError("exact formal reduction is implemented for rank 2; pass --z")
        sol = stokes.formal_reduce_exact_rank2(args.order)
        return {
            "n": n,
            "order": args.order,
            "coeffs": [m for m in sol.coeffs],
            "gauge_orders_ok": stokes.gauge_substitution_residual_orders(sol, args.order),
        }
    z = [complex(w) for w in parse_z(args.z, n)]
    sol = stokes.formal_reduce_numeric(n, z, args.order)
    return {"n": n, "order": args.order, "coeffs": [np.asarray(c) for c in sol.coeffs]}


def cmd_roots_of_unity(args) -> dict:
    rep = stokes.roots_of_unity_suite(args.n)
    checks = [v for v in rep.values() if isinstance(v, bool)]
    if not all(checks):
        raise MathFailure("a root-of-unity identity failed")
    return rep


def cmd_dubrovin(args) -> dict:
    rep = dict(stokes.dubrovin_bridge(args.n))
    rep["antisymmetric_exact"] = stokes.antisymmetric_v_exact(args.n)
    if rep["residual"] > args.tol or not rep["antisymmetric_exact"]:
        raise MathFailure("isomonodromic bridge check failed")
    return rep


def cmd_verify_all(args) -> dict:
    """Aggregate verification at one rank; nonzero exit iff anything fails."""
    n = args.n
    results = {}
    basis = ktheory.beilinson_basis(n)
    g = ktheory.gram_matrix(basis)
    results["gram_unitriangular"] = g.is_upper_unitriangular()
    results["dioph_zero"] = ktheory.dioph_residual(g, n).is_zero()
    beta = ktheory.braid_constants("beta", n)
    results["sigma_equals_beta"] = (
        ktheory.braid_act(ktheory.braid_constants("sigma_odd", n), basis).elements
        == ktheory.braid_act(beta, basis).elements
    )
    z = tuple(Fraction(2 * m + (1 if m % 2 else 0), 2 * n + 1) for m in range(n))
    ctx = _context(z, n)
    order = 25 if args.fast else 40
    results["ode_residual"] = qde.ode_residual(
        qde.levelt_series(n, z, order), 0.3, n, [complex(w) for w in z]
    )
    if not args.fast:
        rep = hypergeom.b_theorem_check(0, ctx, order)
        results["b_theorem_deviation"] = rep["deviation"]
    sector = stokes.SectorId("Vprime", 0)
    srep = stokes.gram_stokes_check(sector, n)
    results["stokes_gram"] = srep["stokes_is_dual_gram"] and srep["stokes_is_gram"]
    failed = [
        k
        for k, v in results.items()
        if (isinstance(v, bool) and not v) or (isinstance(v, float) and v > 1e-6)
    ]
    if failed:
        raise MathFailure("verification failed: " + ", ".join(failed))
    return {"n": n, "results": results, "ok": True}


# -- dispatcher ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="projqde",
        description="equivariant qDE/qKZ workbench for projective space",
    )
    top.add_argument("--config", help="flat key = value file; flags win")
    top.add_argument("--output", help="write the JSON report to this path")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, order=40, tol=1e-6):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--order", type=int, default=order)
        p.add_argument("--tol", type=float, default=tol)

    p = sub.add_parser("gram", help="Gram matrix of a named or mutated basis")
    common(p)
    p.add_argument("--basis", default="beilinson")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--word", default="")
    p.set_defaults(fn=cmd_gram)

    p = sub.add_parser("mutate", help="left/right mutation of one class")
    common(p)
    p.add_argument("--side", choices=["left", "right"], required=True)
    p.add_argument("--pivot", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(fn=cmd_mutate)

    p = sub.add_parser("braid", help="act with a braid word on a named basis")
    common(p)
    p.add_argument("--basis", default="beilinson")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--word", default="")
    p.add_argument("--name", default="")
    p.set_defaults(fn=cmd_braid)

    p = sub.add_parser("dioph-check", help="canonical characteristic constraints")
    common(p)
    p.add_argument("--basis", default="beilinson")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--word", default="")
    p.set_defaults(fn=cmd_dioph_check)

    p = sub.add_parser("solve-qde", help="fundamental solutions at the regular point")
    common(p, tol=1e-8)
    p.add_argument("--z", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--solution", choices=["levelt", "top"], default="levelt")
    p.set_defaults(fn=cmd_solve_qde)

    p = sub.add_parser("qkz", help="shift-operator matrix")
    common(p)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--basis", choices=["g", "x"], default="x")
    p.set_defaults(fn=cmd_qkz)

    p = sub.add_parser("qkz-check", help="difference residuals of a solution")
    common(p, tol=1e-8)
    p.add_argument("--q", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--class", dest="cls", default="1")
    p.set_defaults(fn=cmd_qkz_check)

    p = sub.add_parser("psi", help="residue-series solution of a class")
    common(p, tol=1e-6)
    p.add_argument("--z", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--class", dest="cls", default="1")
    p.add_argument("--oracle", choices=["contour", "none"], default="none")
    p.set_defaults(fn=cmd_psi)

    p = sub.add_parser("b-check", help="comparison-matrix verification")
    common(p, tol=1e-6)
    p.add_argument("--z", required=True)
    p.add_argument("--k", type=int, default=0)
    p.set_defaults(fn=cmd_b_check)

    p = sub.add_parser("stokes", help="Stokes matrices and Gram identities")
    common(p)
    p.add_argument("--sector", required=True, help="vp:K or vpp:K")
    p.add_argument("--z", default="")
    p.set_defaults(fn=cmd_stokes)

    p = sub.add_parser("formal-reduce", help="formal gauge coefficients at infinity")
    common(p, order=4)
    p.add_argument("--z", default=None)
    p.set_defaults(fn=cmd_formal_reduce)

    p = sub.add_parser("roots-of-unity", help="degeneration suite")
    common(p)
    p.set_defaults(fn=cmd_roots_of_unity)

    p = sub.add_parser("dubrovin", help="bridge to the isomonodromic system")
    common(p, tol=1e-8)
    p.set_defaults(fn=cmd_dubrovin)

    p = sub.add_parser("verify-all", help="aggregate verification")
    common(p)
    p.add_argument("--fast", action="store_true")
    p.set_defaults(fn=cmd_verify_all)

    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args.config:
        try:
            conf = load_config(args.config)
        except (OSError, ValueError) as exc:
            sys.stderr.write(f"config error: {exc}\n")
            return 2
        # config entries become flags placed right after the subcommand, so
        # explicitly given flags (parsed later) win on conflict
        extra: list[str] = []
        for key, value in conf.items():
            if key in ("config", "output", "command"):
                continue
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    extra.append(flag)
            else:
                extra.extend([flag, value])
        idx = argv.index(args.command)
        try:
            args = parser.parse_args(argv[: idx + 1] + extra + argv[idx + 1 :])
        except SystemExit as exc:
            return 2 if exc.code not in (0, None) else 0
    try:
        report = args.fn(args)
    except MathFailure as exc:
        sys.stderr.write(f"FAILED: {exc}\n")
        return 1
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    emit(report, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
