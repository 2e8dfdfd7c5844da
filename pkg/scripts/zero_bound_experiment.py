"""Zero-containment experiment: largest zero modulus against the operator norm.

For each measure in the corpus (or a single measure file) this computes the
orthogonal polynomials q_1..q_n, their zeros, and the truncated
multiplication-operator norms sigma_max(M_N) for N in the doubling history.
Output is a plot-ready CSV on stdout:

    measure,series,index,value

where series is one of "max_zero" (index = polynomial degree) or "sigma"
(index = truncation size N).

Usage:
    python3 scripts/zero_bound_experiment.py [--n-max 20] [--N 64] [measure.json ...]
"""

import argparse
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from sobolevcurves import (NullPolynomialError, UnsupportedOperation,
                           parse_measure, verify_zero_bound)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("measures", nargs="*", help="measure JSON files (default: bounded corpus)")
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("--N", type=int, default=64)
    args = ap.parse_args(argv)

    root = pathlib.Path(__file__).resolve().parent.parent
    if args.measures:
        paths = [pathlib.Path(m) for m in args.measures]
    else:
        manifest = json.loads((root / "corpus" / "manifest.json").read_text())
        paths = [root / "corpus" / e["file"] for e in manifest
                 if e["expect"]["verdict"] == "bounded"]

    print("measure,series,index,value")
    for path in paths:
        mu = parse_measure(json.loads(path.read_text()))
        try:
            rep = verify_zero_bound(mu, n_max=args.n_max, N=args.N)
        except (NullPolynomialError, UnsupportedOperation) as exc:
            print(f"# {path.stem}: skipped ({exc})", file=sys.stderr)
            continue
        for zs in rep.zeros.values():
            if zs.zeros:
                print(f"{path.stem},max_zero,{zs.degree},"
                      f"{max(abs(z) for z in zs.zeros):.12g}")
        for n, s in rep.history:
            print(f"{path.stem},sigma,{n},{s:.12g}")
        if not rep.bound_ok:
            print(f"# {path.stem}: bound violated", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
