"""Regenerate the measure corpus under corpus/.

Every member is designed by hand so that its verdict and kernel dimension
are known from the classification theory, not read back from the engine.
The script still runs the engine on each member and refuses to write a
corpus that disagrees with the design; that keeps the frozen manifest
honest without making the tests circular.

Usage: python3 scripts/build_corpus.py [--out DIR]
"""

import argparse
import json
import math
import pathlib
import sys
from fractions import Fraction

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from sobolevcurves import (
    Arc,
    Atom,
    Curve,
    MeasureComponent,
    MonotoneForm,
    PowerForm,
    VectorialMeasure,
    WeightPiece,
    boundedness_verdict,
    dyadic_counterexample,
    solve_kernel,
)

F = Fraction


def _seg(a, b):
    return Curve.segment(complex(a), complex(b), a_exact=(F(a), F(0)), b_exact=(F(b), F(0)))


def _leb(j, t0, t1):
    return MeasureComponent(j, [WeightPiece(Arc(F(t0), F(t1)), PowerForm(F(1)))], [])


def _power(j, t0, t1, al, ar, c=F(1)):
    return MeasureComponent(j, [WeightPiece(Arc(F(t0), F(t1)), PowerForm(c, F(al), F(ar)))], [])


def _circle():
    return Curve.full_circle(0, 1.0)


TAU = 2 * math.pi


def build_members():
    """Returns [(name, measure, design dict)]."""
    out = []

    def add(name, mu, verdict, dim, note):
        out.append((name, mu, {"verdict": verdict, "kernelDim": dim, "note": note}))

    # -- bounded members --------------------------------------------------
    add("legendre_k0", VectorialMeasure(_seg(-1, 1), F(2), [_leb(0, 0, 2)]),
        "bounded", 0, "k=0 Lebesgue; no derivative orders, kernel trivially 0")

    add("sobolev_leb_k1",
        VectorialMeasure(_seg(0, 1), F(2), [_leb(0, 0, 1), _leb(1, 0, 1)]),
        "bounded", 0, "both orders Lebesgue; constant top weight is monotone")

    add("jacobi_halves_k0",
        VectorialMeasure(_seg(0, 1), F(2), [_power(0, 0, 1, F(1, 2), F(1, 2))]),
        "bounded", 0, "k=0 with endpoint square-root decay")

    add("ramp_k2",
        VectorialMeasure(_seg(0, 1), F(2),
                         [_leb(0, 0, 1), _power(1, 0, 1, 1, 0), _power(2, 0, 1, 2, 0)]),
        "bounded", 0, "polynomial ramps at every order; full-mass order zero")

    add("atom_mix_k1",
        VectorialMeasure(_seg(0, 1), F(2),
                         [MeasureComponent(0,
                                           [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))],
                                           [Atom(F(1, 2), F(1, 3))]),
                          _leb(1, 0, 1)]),
        "bounded", 0, "Lebesgue plus an interior atom at order zero")

    add("circle_k0",
        VectorialMeasure(_circle(), F(2),
                         [MeasureComponent(0, [WeightPiece(Arc(0.0, TAU), PowerForm(1.0))], [])]),
        "bounded", 0, "closed curve, k=0 arc length")

    add("circle_k1",
        VectorialMeasure(_circle(), F(2),
                         [MeasureComponent(0, [WeightPiece(Arc(0.0, TAU), PowerForm(1.0))], []),
                          MeasureComponent(1, [WeightPiece(Arc(0.0, TAU), PowerForm(1.0))], [])]),
        "bounded", 0, "closed curve, both orders arc length; seam cut transfers")

    add("circle_gap_k1",
        VectorialMeasure(_circle(), F(2),
                         [MeasureComponent(0,
                                           [WeightPiece(Arc(0.0, TAU), PowerForm(1.0))],
                                           [Atom(1.0, 1.0)]),
                          MeasureComponent(1,
                                           [WeightPiece(Arc(0.0, math.pi), PowerForm(1.0))], [])]),
        "bounded", 0, "top weight covers half the circle; order zero has full mass")

    add("cusp_cubic_k1",
        VectorialMeasure(_seg(0, 1), F(2), [_leb(0, 0, 1), _power(1, 0, 1, 3, 0)]),
        "bounded", 0, "cubic vanishing of the top weight at one endpoint")

    add("cusp_sqrt_k1",
        VectorialMeasure(_seg(0, 1), F(2),
                         [_leb(0, 0, 1), _power(1, 0, 1, F(1, 2), F(1, 2))]),
        "bounded", 0, "square-root vanishing of the top weight at both endpoints")

    add("flat_k3",
        VectorialMeasure(_seg(-1, 1), F(2),
                         [_leb(0, 0, 2), _leb(1, 0, 2), _leb(2, 0, 2), _leb(3, 0, 2)]),
        "bounded", 0, "order three with every weight Lebesgue")

    add("exp_weight_k1",
        VectorialMeasure(_seg(0, 1), F(2),
                         [_leb(0, 0, 1),
                          MeasureComponent(1,
                                           [WeightPiece(Arc(F(0), F(1)),
                                                        MonotoneForm("exp(t)", "nondecreasing"))],
                                           [])]),
        "bounded", 0, "evaluator-backed increasing top weight")

    # -- members with nontrivial kernel -----------------------------------
    add("two_sided_dim2",
        VectorialMeasure(_seg(-1, 1), F(2),
                         [MeasureComponent(0, [], [Atom(F(1), F(1))]),
                          MeasureComponent(1, [], []),
                          _leb(2, 0, 1),
                          _leb(3, 1, 2)]),
        "unbounded", 2, "order-2 mass left of the midpoint atom, order-3 right of it")

    add("dyadic_window_k3",
        dyadic_counterexample(1).restrict([Arc(F(1, 16), F(1))]),
        "unbounded", 1, "dyadic family at depth 1 on the window [1/16, 1]")

    add("split_support_k1",
        VectorialMeasure(_seg(0, 1), F(2),
                         [MeasureComponent(0, [], [Atom(F(1, 5), F(1))]),
                          MeasureComponent(1,
                                           [WeightPiece(Arc(F(0), F(2, 5)), PowerForm(F(1))),
                                            WeightPiece(Arc(F(3, 5), F(1)), PowerForm(F(1)))],
                                           [])]),
        "unbounded", 1, "top weight split in two islands, atom only in the first")

    add("no_mass_cusp_k1",
        VectorialMeasure(_seg(0, 1), F(2),
                         [MeasureComponent(0, [], []), _power(1, 0, 1, 3, 0)]),
        "unbounded", 1, "order zero empty, so constants sit in the kernel")

    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None, help="output directory (default: corpus/)")
    args = ap.parse_args(argv)
    root = pathlib.Path(__file__).resolve().parent.parent
    out_dir = pathlib.Path(args.out) if args.out else root / "corpus"
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest = []
    failures = []
    for name, mu, design in build_members():
        verdict = boundedness_verdict(mu)
        result = solve_kernel(mu)
        checks = {
            "verdict": verdict.verdict == design["verdict"],
            "kernelDim": result.dim == design["kernelDim"],
        }
        if not all(checks.values()):
            failures.append((name, design, verdict.verdict, result.dim))
        doc = mu.to_json()
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        manifest.append({
            "file": path.name,
            "k": mu.k,
            "closed": mu.curve.closed,
            "rational": mu.is_exact,
            "expect": design,
        })
        flag = "ok" if all(checks.values()) else "MISMATCH"
        print(f"{name:20s} k={mu.k} verdict={verdict.verdict:9s} dim={result.dim}  [{flag}]")

    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"\nwrote {len(manifest)} measures + manifest to {out_dir}")
    if failures:
        for name, design, got_v, got_d in failures:
            print(f"  design mismatch in {name}: expected {design}, "
                  f"got verdict={got_v} dim={got_d}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
