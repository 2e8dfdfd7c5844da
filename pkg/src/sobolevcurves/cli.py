"""Command-line front end: parse a measure document, run one analysis, and
emit a machine-readable report.

Every command writes a report envelope {command, version, wallTimeSeconds,
warnings, payload}; the payload is deterministic for fixed input and flags
(keys sorted, no timestamps), so golden files can pin it byte for byte.
"""
from __future__ import annotations

import os


def _cap_threads() -> None:
    cap = os.environ.get("SOBOLEV_CURVE_THREADS")
    if cap:
        # BLAS pools read these at import, so they must be set before numpy
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                    "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
            os.environ.setdefault(var, cap)


_cap_threads()

import argparse
import io
import json
import math
import sys
import time
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from . import __version__
from .classify import (boundedness_verdict, classify_monotone_ac, classify_type_a,
                       classify_type_b, classify_type_c, esd,
                       structural_breakpoints)
from .curves import CurveError
from .kernel import check_c0, solve_kernel, stable_kernel_dim
from .measures import MeasureError, VectorialMeasure, parse_measure
from .orthopoly import (NumericsError, gram_matrix, multiplication_matrix,
                        ortho_basis, orthonormality_residual, poly_zeros,
                        verify_zero_bound)
from .quadrature import total_mass
from .weights import (ScalarMeasure, WeightAnalysis, admissibility,
                      hardy_constant, lambda_minus, lambda_plus)

COMMANDS = ("analyze", "kernel", "classify", "verdict", "orthopoly", "zeros",
            "verify-bound", "muckenhoupt")
CSV_COMMANDS = ("zeros", "verify-bound")


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep 2 for --strict only
        raise CLIError(message)


def _ranged(kind, lo, hi, name):
    def convert(text: str):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a {kind.__name__}")
        if not (lo <= v <= hi):
            raise argparse.ArgumentTypeError(f"{name} must lie in [{lo}, {hi}]")
        return v
    return convert


def build_parser() -> _Parser:
    parser = _Parser(prog="sobolevcurves",
                     description="weighted Sobolev spaces on curves: analyses "
                                 "and reports from measure documents")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
            ("analyze", "weight structure: manageable sets, regular sets, admissibility"),
            ("kernel", "kernel of the Sobolev seminorm"),
            ("classify", "type A/B/C, monotone route, sequential domination"),
            ("verdict", "boundedness verdict for multiplication by z"),
            ("orthopoly", "orthonormal Sobolev polynomials (p = 2)"),
            ("zeros", "zeros of the orthonormal polynomials"),
            ("verify-bound", "zeros against the truncated operator norm disk"),
            ("muckenhoupt", "two-weight Hardy functionals between consecutive orders")):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("input", help="measure document (JSON)")
        cmd.add_argument("-o", "--output", default=None, help="output path (default stdout)")
        cmd.add_argument("--tol", type=_ranged(float, 1e-15, 0.1, "--tol"),
                         default=1e-10, help="quadrature/refinement tolerance")
        cmd.add_argument("--N", type=_ranged(int, 1, 64, "--N"), default=64,
                         help="matrix truncation size")
        cmd.add_argument("--n-max", dest="n_max", type=_ranged(int, 1, 20, "--n-max"),
                         default=20, help="highest polynomial degree")
        cmd.add_argument("--depth", type=_ranged(int, 1, 40, "--depth"), default=12,
                         help="family truncation depth / grid refinement depth")
        cmd.add_argument("--strict", action="store_true",
                         help="exit 2 when the verdict is unknown")
        cmd.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


# -- serialization helpers ---------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


def _dump_payload(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2)


def _load_measure(path: str, depth: int) -> VectorialMeasure:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    if isinstance(doc, dict) and "family" in doc and "depth" not in doc["family"]:
        doc["family"]["depth"] = depth
    try:
        return parse_measure(doc)
    except (MeasureError, CurveError) as exc:
        raise CLIError(f"{path}: {exc}")


# -- command payloads ---------------------------------------------------------------

def _omega_json(om) -> dict:
    return {"full": om.full, "approximate": om.approximate,
            "arcs": [[float(a.t0), float(a.t1)] for a in om.arcs]}


def _cmd_analyze(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    analysis = WeightAnalysis(mu)
    adm = admissibility(analysis)
    omegas = {str(j): _omega_json(analysis.omega(j)) for j in range(mu.k + 1)}
    regular = {}
    for j in range(mu.k):
        reg = analysis.regular_set(j)
        regular[str(j)] = {
            "arcs": _omega_json(reg.arcs_union),
            "rightPoints": {f"{t:.12g}": v for t, v in sorted(reg.right_points.items())},
            "leftPoints": {f"{t:.12g}": v for t, v in sorted(reg.left_points.items())},
        }
    if adm.admissible == "unknown" or adm.strongly == "unknown":
        warnings.append("admissibility undecided on some component")
    return {"curve": mu.curve.to_json(), "p": _jsonable(mu.p), "k": mu.k,
            "totalMass": total_mass(mu),
            "breakpoints": structural_breakpoints(mu),
            "admissibility": {"admissible": adm.admissible, "strongly": adm.strongly,
                              "violations": adm.violations, "notes": adm.notes},
            "omega": omegas, "regularSets": regular}


def _cmd_kernel(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    analysis = WeightAnalysis(mu)
    result = solve_kernel(mu, analysis)
    if result.low_confidence:
        warnings.append("kernel dimension numerically delicate")
    basis = []
    for h in result.basis:
        basis.append({"pieces": [
            {"arc": [float(lam.a), float(lam.b)],
             "chartCenter": complex(lam.chart_center),
             "chartScale": complex(lam.chart_scale),
             "coeffs": list(coeffs)} for lam, coeffs in h.pieces if coeffs.size]})
    return {"dim": result.dim, "stableDim": stable_kernel_dim(result),
            "constantsApproximable": check_c0(result, analysis),
            "method": result.method, "lowConfidence": result.low_confidence,
            "exactDim": result.exact_dim,
            "singularValues": result.singular_values[-8:],
            "basis": basis}


def _cmd_classify(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    analysis = WeightAnalysis(mu)
    adm = admissibility(analysis)
    rep = esd(mu)
    payload = {"typeA": classify_type_a(analysis, adm).to_json(),
               "typeB": classify_type_b(analysis, adm).to_json(),
               "typeC": classify_type_c(analysis, adm).to_json(),
               "monotoneAC": classify_monotone_ac(mu).to_json(),
               "esd": rep.to_json()}
    payload["esd"]["closure"] = rep.closure.to_json()
    return payload


def _cmd_verdict(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    verdict = boundedness_verdict(mu)
    if verdict.verdict == "unknown":
        warnings.append("verdict unknown: no verified route decides")
    return verdict.to_json()


def _ortho(mu: VectorialMeasure, N: int, tol: float):
    gram = gram_matrix(mu, N, tol)
    ob = ortho_basis(gram)
    res = orthonormality_residual(mu, ob, tol)
    return gram, ob, res


def _cmd_orthopoly(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    gram, ob, res = _ortho(mu, args.n_max, args.tol)
    if res > 1e-8:
        warnings.append(f"orthonormality residual {res:.3g} above 1e-8")
    return {"basis": {"kind": ob.basis.kind, "center": complex(ob.basis.center),
                      "scale": float(ob.basis.scale)},
            "nMax": ob.N, "orthonormalityResidual": res,
            "norms": list(ob.norms),
            "coefficients": [list(ob.coeffs[: n + 1, n]) for n in range(ob.N + 1)],
            "gramConverged": gram.converged, "gramQuadError": gram.quad_error}


def _cmd_zeros(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    _, ob, res = _ortho(mu, args.n_max, args.tol)
    if res > 1e-8:
        warnings.append(f"orthonormality residual {res:.3g} above 1e-8")
    out = []
    for n in range(1, ob.N + 1):
        zs = poly_zeros(ob.coeffs[: n + 1, n], ob.basis)
        out.append({"degree": n, "zeros": [complex(z) for z in zs.zeros],
                    "residuals": zs.residuals, "reducedDegree": zs.reduced_degree,
                    "notes": zs.notes})
    return {"basis": {"kind": ob.basis.kind, "center": complex(ob.basis.center),
                      "scale": float(ob.basis.scale)},
            "zeroSets": out}


def _cmd_verify_bound(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    report = verify_zero_bound(mu, n_max=args.n_max, N=args.N,
                               quad_tol=args.tol)
    if not report.bound_ok:
        warnings.append("a zero escapes the truncated-norm disk")
    zero_sets = []
    for n in sorted(report.zeros):
        zs = report.zeros[n]
        zero_sets.append({"degree": n, "zeros": [complex(z) for z in zs.zeros],
                          "maxModulus": max((abs(z) for z in zs.zeros), default=0.0),
                          "residuals": zs.residuals})
    return {"N": report.N, "nMax": args.n_max, "sigmaMax": report.sigma_max,
            "history": [[n, s] for n, s in report.history],
            "tolerance": report.tol, "boundOk": report.bound_ok,
            "notes": report.notes, "zeroSets": zero_sets}


def _cmd_muckenhoupt(mu: VectorialMeasure, args, warnings: List[str]) -> dict:
    L = mu.curve.length
    pairs = []
    for j in range(mu.k):
        lower = ScalarMeasure.from_component(mu.component(j), 0.0, L)
        upper = ScalarMeasure.from_component(mu.component(j + 1), 0.0, L,
                                             with_atoms=False)
        plus = lambda_plus(lower, upper, 0.0, L, mu.p, levels=args.depth)
        minus = lambda_minus(lower, upper, 0.0, L, mu.p, levels=args.depth)
        for rep in (plus, minus):
            if rep.certificate in ("numeric-divergent", "grid-infinite"):
                warnings.append(f"orders ({j}, {j + 1}): divergence detected "
                                "numerically, not structurally")
        pairs.append({
            "orders": [j, j + 1],
            "lambdaPlus": {"value": plus.value, "witness": plus.witness,
                           "certificate": plus.certificate, "detail": plus.detail,
                           "history": plus.history[-6:],
                           "hardyConstant": hardy_constant(plus.value, mu.p)},
            "lambdaMinus": {"value": minus.value, "witness": minus.witness,
                            "certificate": minus.certificate, "detail": minus.detail,
                            "history": minus.history[-6:],
                            "hardyConstant": hardy_constant(minus.value, mu.p)},
        })
    return {"p": _jsonable(mu.p), "refinementDepth": args.depth, "pairs": pairs}


_DISPATCH = {"analyze": _cmd_analyze, "kernel": _cmd_kernel,
             "classify": _cmd_classify, "verdict": _cmd_verdict,
             "orthopoly": _cmd_orthopoly, "zeros": _cmd_zeros,
             "verify-bound": _cmd_verify_bound, "muckenhoupt": _cmd_muckenhoupt}


# -- CSV rendering ------------------------------------------------------------------

def _csv_text(command: str, payload: dict) -> str:
    buf = io.StringIO()
    buf.write("kind,index,x,y\n")
    for zs in payload.get("zeroSets", ()):
        for z in zs["zeros"]:
            buf.write(f"zero,{zs['degree']},{z[0]!r},{z[1]!r}\n")
    for n, s in payload.get("history", ()):
        buf.write(f"sigma,{n},{s!r},\n")
    return buf.getvalue()


def run(argv: Optional[List[str]] = None) -> Tuple[int, dict]:
    started = time.time()
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "csv" and args.command not in CSV_COMMANDS:
        raise CLIError("csv output is supported for zeros and verify-bound only")
    mu = _load_measure(args.input, args.depth)
    warnings: List[str] = []
    try:
        payload = _DISPATCH[args.command](mu, args, warnings)
    except (MeasureError, CurveError, NumericsError, ValueError) as exc:
        raise CLIError(f"{args.command}: {exc}")
    envelope = {"command": [args.command] + argv[1:],
                "version": __version__,
                "wallTimeSeconds": round(time.time() - started, 6),
                "warnings": warnings,
                "payload": _jsonable(payload)}
    if args.format == "csv":
        text = _csv_text(args.command, envelope["payload"])
    else:
        text = json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    code = 0
    if args.strict and args.command == "verdict" and payload.get("verdict") == "unknown":
        code = 2
    return code, envelope


def main(argv: Optional[List[str]] = None) -> int:
    try:
        code, _ = run(argv)
        return code
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
