"""Measure classification and the boundedness verdict for multiplication by z.

Four verified routes feed the verdict; under any of them boundedness of the
multiplication operator is equivalent to triviality of the zero-norm kernel:

* "monotone-ac": derivative orders carry purely absolutely continuous
  measures with weights comparable to piecewise monotone functions.
* "type-B": strong admissibility plus piecewise-monotone-comparable weights.
* "type-A": a partition of the curve where every arc passes one of five
  certificates (vanishing weights, Muckenhoupt class of the top order,
  one-sided Hardy consistency with regular-set side conditions).
* "type-C": power-like endpoint behavior with a Muckenhoupt interior.

Without a verified route the kernel can still certify failure: a function
with zero Sobolev norm whose image under multiplication has positive norm
shows the operator does not descend to the quotient space.  An empty kernel
alone decides nothing and the verdict stays unknown.

Closed curves are classified through their seam-cut open model; curve
functions form an isometric multiplication-invariant subspace of the cut
model, so a bounded verdict transfers, while unbounded verdicts must be
certified on the closed curve itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .kernel import KernelResult, PiecewisePolynomial, solve_kernel
from .measures import (Arc, Atom, GeneralForm, MeasureComponent, MonotoneForm,
                       PowerForm, VectorialMeasure, WeightPiece, ZeroForm,
                       as_float)
from .orthopoly import sobolev_norm
from .quadrature import component_ac_mass, component_mass, integrate_piece, total_mass
from .weights import (AdmissibilityReport, RegularSet, Tri, WeightAnalysis,
                      admissibility, arc_consistency, one_sided_bp)

ROUTE_PRIORITY = ("monotone-ac", "type-B", "type-A", "type-C")


def _tol(curve) -> float:
    return 1e-12 * max(1.0, curve.length)


def _gate(*tris: Tri) -> Tri:
    if any(t == "no" for t in tris):
        return "no"
    if any(t == "unknown" for t in tris):
        return "unknown"
    return "yes"


def _cmp_exactish(a, b) -> int:
    """-1/0/+1 comparison, exact when both operands are rational."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        d = Fraction(a) - Fraction(b)
        return (d > 0) - (d < 0)
    fa, fb = as_float(a), as_float(b)
    if math.isclose(fa, fb, rel_tol=1e-12, abs_tol=1e-12):
        return 0
    return (fa > fb) - (fa < fb)


def measure_finite(mu: VectorialMeasure) -> Tri:
    """Total-mass finiteness; power pieces are finite by representation, so
    only evaluator-backed pieces need a numeric look."""
    for comp in mu.components:
        for pc in comp.nonzero_pieces():
            if isinstance(pc.form, (PowerForm, ZeroForm)):
                continue
            val, _ = integrate_piece(pc, n=128)
            if not math.isfinite(val) or val > 1e12:
                return "unknown"
    return "yes"


def structural_breakpoints(mu: VectorialMeasure, include_peaks: bool = True) -> List[float]:
    """Candidate partition points: piece boundaries, atoms, and interior
    critical points of doubly anchored power pieces (where monotonicity
    flips, so piecewise-monotone splits must happen there)."""
    L = mu.curve.length
    tol = _tol(mu.curve)
    pts = {0.0, L}
    for comp in mu.components:
        for pc in comp.pieces:
            pts.add(float(pc.t0))
            pts.add(float(pc.t1))
        for a in comp.atoms:
            pts.add(min(max(float(a.t), 0.0), L))
        if include_peaks:
            for pc in comp.nonzero_pieces():
                f = pc.form
                if isinstance(f, PowerForm):
                    al, ar = as_float(f.alpha_left), as_float(f.alpha_right)
                    if al * ar > 0:
                        a0, b0 = float(pc.t0), float(pc.t1)
                        pts.add((al * b0 + ar * a0) / (al + ar))
    out: List[float] = []
    for t in sorted(pts):
        if -tol <= t <= L + tol and (not out or t - out[-1] > tol):
            out.append(min(max(t, 0.0), L))
    out[-1] = L
    return out


def _has_unverifiable_forms(mu: VectorialMeasure) -> bool:
    return any(isinstance(pc.form, GeneralForm)
               for comp in mu.components for pc in comp.nonzero_pieces())


# -- type A -----------------------------------------------------------------------

@dataclass
class ArcCase:
    a: float
    b: float
    k_lo: int   # lowest order protected by regularity side conditions
    k_hi: int   # highest order with nonvanishing weight on the arc
    case: Optional[str]
    ok: bool
    details: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"arc": [self.a, self.b], "kLo": self.k_lo, "kHi": self.k_hi,
                "case": self.case, "ok": self.ok, "details": list(self.details)}


@dataclass
class TypeAReport:
    applies: Tri
    partition: List[float]
    arc_cases: List[ArcCase]
    failures: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"applies": self.applies, "partition": list(self.partition),
                "arcs": [c.to_json() for c in self.arc_cases],
                "failures": list(self.failures), "notes": list(self.notes)}


def _zero_on(comp: MeasureComponent, a: float, b: float) -> bool:
    return not comp.clipped_pieces(a, b)


def _bp_closed_arc(analysis: WeightAnalysis, j: int, a: float, b: float) -> Tri:
    """Muckenhoupt membership on the closed arc: interior coverage by the
    maximal manageable set plus one-sided tests at both ends."""
    comp = analysis.mu.component(j)
    om = analysis.omega(j)
    inner = om.covers_open_arc(a, b)
    r = one_sided_bp(comp, a, "right", analysis.p)
    l_ = one_sided_bp(comp, b, "left", analysis.p)
    if inner and r == "yes" and l_ == "yes":
        # sampled coverage is evidence, not proof
        return "unknown" if om.approximate else "yes"
    if r == "no" or l_ == "no" or (not inner and not om.approximate):
        return "no"
    return "unknown"


def _positive_near(comp: MeasureComponent, t: float, side: str, span: float) -> bool:
    """Certifies w > 0 a.e. on a one-sided neighborhood of t."""
    pc = comp.piece_at(t, side)
    if pc is None or pc.is_zero():
        return False
    if isinstance(pc.form, PowerForm):
        return True
    if isinstance(pc.form, MonotoneForm):
        # a sample certifies positivity only between t and the sample point
        # when the weight decreases away from t
        away_decreasing = (pc.form.direction == "nonincreasing") == (side == "right")
        if away_decreasing:
            probe = t + (1 if side == "right" else -1) * 0.25 * min(span, pc.length())
            return comp.weight_at(probe) > 0.0
    return False


def _consistent_all(analysis: WeightAnalysis, a: float, b: float,
                    k_lo: int, k_hi: int, side: str) -> Tuple[bool, List[str]]:
    mu = analysis.mu
    for j in range(k_lo + 1, k_hi + 1):
        rep = arc_consistency(mu.component(j), a, b, mu.p, side)
        if rep.verdict != "yes":
            return False, [f"w_{j} not {side}-consistent on [{a:.6g}, {b:.6g}]"
                           f" ({rep.verdict}, {rep.method})"]
    return True, []


def _try_arc_case(analysis: WeightAnalysis, a: float, b: float,
                  k_hi: int) -> ArcCase:
    """Assigns the least-restrictive passing certificate for one arc."""
    mu = analysis.mu
    k = mu.k
    if k_hi == 0:
        return ArcCase(a, b, 0, 0, "1", True, ["derivative weights vanish a.e."])
    bp = _bp_closed_arc(analysis, k_hi, a, b)
    if bp == "yes":
        return ArcCase(a, b, 0, k_hi, "2", True,
                       [f"w_{k_hi} Muckenhoupt on the closed arc"])
    attempts: List[str] = []
    for case, side in (("3", "right"), ("4", "left")):
        for k_lo in range(0, k_hi + 1):
            ok, why = _consistent_all(analysis, a, b, k_lo, k_hi, side)
            if not ok:
                attempts.extend(why if k_lo == 0 else [])
                continue
            if k_lo > 0:
                if k_lo >= k:
                    continue
                reg = analysis.regular_set(k_lo)
                end_ok = (reg.right_regular(a) if side == "right"
                          else reg.left_regular(b))
                if end_ok != "yes":
                    attempts.append(
                        f"case {case}: order-{k_lo} regularity fails at the "
                        f"{'left' if side == 'right' else 'right'} end")
                    continue
            return ArcCase(a, b, k_lo, k_hi, case, True,
                           [f"orders {k_lo + 1}..{k_hi} {side}-consistent"])
    for k_lo in range(0, k_hi + 1):
        got = _try_case5(analysis, a, b, k_lo, k_hi)
        if got is not None:
            return got
    details = attempts[:4] or ["no certificate applies"]
    return ArcCase(a, b, 0, k_hi, None, False, details)


def _try_case5(analysis: WeightAnalysis, a: float, b: float,
               k_lo: int, k_hi: int) -> Optional[ArcCase]:
    """Mixed-side consistency; the containment side condition admits the two
    one-sided sufficient fallbacks."""
    mu = analysis.mu
    sides: Dict[int, str] = {}
    for j in range(k_lo + 1, k_hi + 1):
        if arc_consistency(mu.component(j), a, b, mu.p, "right").verdict == "yes":
            sides[j] = "right"
        elif arc_consistency(mu.component(j), a, b, mu.p, "left").verdict == "yes":
            sides[j] = "left"
        else:
            return None
    if k_lo == 0:
        return ArcCase(a, b, 0, k_hi, "5", True,
                       [f"per-order sides {sides}"])
    reg = analysis.regular_set(k_lo - 1)
    if _regular_contains_closed(reg, a, b):
        return ArcCase(a, b, k_lo, k_hi, "5", True,
                       [f"per-order sides {sides}",
                        f"arc inside the order-{k_lo - 1} regular set"])
    span = b - a
    if all(s == "right" for s in sides.values()):
        if reg.right_regular(a) == "yes" and any(
                _positive_near(mu.component(j), a, "right", span)
                for j in range(k_lo + 1, k_hi + 1)):
            return ArcCase(a, b, k_lo, k_hi, "5", True,
                           ["one-sided fallback: all right-consistent, left end "
                            f"order-{k_lo - 1} regular, weight positive nearby"])
    if all(s == "left" for s in sides.values()):
        if reg.left_regular(b) == "yes" and any(
                _positive_near(mu.component(j), b, "left", span)
                for j in range(k_lo + 1, k_hi + 1)):
            return ArcCase(a, b, k_lo, k_hi, "5", True,
                           ["one-sided fallback: all left-consistent, right end "
                            f"order-{k_lo - 1} regular, weight positive nearby"])
    return None


def _regular_contains_closed(reg: RegularSet, a: float, b: float) -> bool:
    tol = _tol(reg.curve)
    keys = sorted({t for t in list(reg.right_points) + list(reg.left_points)
                   if a + tol < t < b - tol})
    cuts = [a] + keys + [b]
    if any(reg.point_in(t) != "yes" for t in cuts):
        return False
    return all(hi - lo <= tol or reg.arcs_union.covers_open_arc(lo, hi)
               for lo, hi in zip(cuts, cuts[1:]))


def classify_type_a(analysis: WeightAnalysis,
                    adm: Optional[AdmissibilityReport] = None) -> TypeAReport:
    mu = analysis.mu
    if mu.curve.closed:
        return TypeAReport("no", [], [], ["closed curve"],
                           ["classify the seam-cut model instead"])
    adm = adm or admissibility(analysis)
    fin = measure_finite(mu)
    gate = _gate(fin, adm.strongly)
    notes = [f"finite: {fin}", f"strongly admissible: {adm.strongly}"]
    if gate == "no":
        return TypeAReport("no", [], [], adm.violations[:3] or ["measure not finite"], notes)
    partition = structural_breakpoints(mu)
    arc_cases: List[ArcCase] = []
    failures: List[str] = []
    for a, b in zip(partition, partition[1:]):
        k_hi = max((j for j in range(1, mu.k + 1)
                    if not _zero_on(mu.component(j), a, b)), default=0)
        case = _try_arc_case(analysis, a, b, k_hi)
        arc_cases.append(case)
        if not case.ok:
            failures.append(f"[{a:.6g}, {b:.6g}]: " + "; ".join(case.details))
    if failures:
        applies = "unknown" if (_has_unverifiable_forms(mu) or gate == "unknown") else "no"
    else:
        applies = gate
    if applies == "yes" and _has_unverifiable_forms(mu):
        applies = "unknown"
        notes.append("evaluator-backed pieces: certificates rest on sampling")
    return TypeAReport(applies, partition, arc_cases, failures, notes)


# -- type B and the purely absolutely continuous route -----------------------------

@dataclass
class TypeBReport:
    applies: Tri
    per_order: Dict[int, List[dict]] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"applies": self.applies,
                "perOrder": {str(j): v for j, v in self.per_order.items()},
                "violations": list(self.violations), "notes": list(self.notes)}


@dataclass
class MonotoneACReport:
    applies: Tri
    per_order: Dict[int, List[dict]] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"applies": self.applies,
                "perOrder": {str(j): v for j, v in self.per_order.items()},
                "violations": list(self.violations), "notes": list(self.notes)}


def _monotone_partition(comp: MeasureComponent) -> Tuple[Tri, List[dict], List[str]]:
    """Piecewise-monotone comparability of one weight: every piece either
    carries an annotation or is a power piece, split at its critical point."""
    out: List[dict] = []
    violations: List[str] = []
    verdict: Tri = "yes"
    for pc in comp.pieces:
        a, b = float(pc.t0), float(pc.t1)
        f = pc.form
        if isinstance(f, ZeroForm):
            out.append({"arc": [a, b], "direction": "constant"})
        elif isinstance(f, MonotoneForm):
            if not f.comparable:
                violations.append(f"piece [{a:.6g}, {b:.6g}] not comparability-annotated")
                verdict = "unknown"
            out.append({"arc": [a, b], "direction": f.direction})
        elif isinstance(f, PowerForm):
            al, ar = as_float(f.alpha_left), as_float(f.alpha_right)
            note = " (smooth factor absorbed)" if f.smooth_expr else ""
            if al * ar > 0:
                t_star = (al * b + ar * a) / (al + ar)
                first = "nondecreasing" if al > 0 else "nonincreasing"
                second = "nonincreasing" if al > 0 else "nondecreasing"
                out.append({"arc": [a, t_star], "direction": first + note})
                out.append({"arc": [t_star, b], "direction": second + note})
            else:
                direction = ("nondecreasing" if al > 0 or ar < 0 else
                             "nonincreasing" if al < 0 or ar > 0 else "constant")
                out.append({"arc": [a, b], "direction": direction + note})
        else:
            violations.append(f"piece [{a:.6g}, {b:.6g}] has no usable structure")
            verdict = "unknown"
    return verdict, out, violations


def classify_type_b(analysis: WeightAnalysis,
                    adm: Optional[AdmissibilityReport] = None) -> TypeBReport:
    mu = analysis.mu
    if mu.curve.closed:
        return TypeBReport("no", {}, ["closed curve"],
                           ["classify the seam-cut model instead"])
    adm = adm or admissibility(analysis)
    fin = measure_finite(mu)
    notes = [f"finite: {fin}", f"strongly admissible: {adm.strongly}"]
    per: Dict[int, List[dict]] = {}
    violations: List[str] = []
    verdicts = [fin, adm.strongly]
    if adm.strongly == "no":
        violations.extend(adm.violations[:3])
    for j in range(1, mu.k + 1):
        v, ev, viol = _monotone_partition(mu.component(j))
        per[j] = ev
        violations.extend(f"order {j}: {s}" for s in viol)
        verdicts.append(v)
    return TypeBReport(_gate(*verdicts), per, violations, notes)


def classify_monotone_ac(mu: VectorialMeasure) -> MonotoneACReport:
    """Route needing no admissibility analysis: derivative orders purely
    absolutely continuous with piecewise-monotone-comparable weights."""
    fin = measure_finite(mu)
    notes = [f"finite: {fin}"]
    per: Dict[int, List[dict]] = {}
    violations: List[str] = []
    verdicts: List[Tri] = [fin]
    for j in range(1, mu.k + 1):
        comp = mu.component(j)
        if comp.atoms:
            violations.append(f"order {j} carries atoms")
            verdicts.append("no")
        v, ev, viol = _monotone_partition(comp)
        per[j] = ev
        violations.extend(f"order {j}: {s}" for s in viol)
        verdicts.append(v)
    return MonotoneACReport(_gate(*verdicts), per, violations, notes)


# -- type C -----------------------------------------------------------------------

@dataclass
class TypeCReport:
    applies: Tri
    a2: float = 0.0
    a3: float = 0.0
    end_cases: Dict[str, Dict[int, str]] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"applies": self.applies, "a2": self.a2, "a3": self.a3,
                "endCases": {side: {str(j): c for j, c in d.items()}
                             for side, d in self.end_cases.items()},
                "violations": list(self.violations), "notes": list(self.notes)}


def _curve_breakpoints(curve) -> List[float]:
    if curve.kind == "polyline":
        return [float(c) for c in curve.params["cumlen"][1:-1]]
    return []


def _endpoint_case(analysis: WeightAnalysis, j: int, end_t: float,
                   side: str, labels: Tuple[str, str, str, str]) -> Tuple[Optional[str], str]:
    """Routes one weight at one endpoint by its vanishing order against the
    Muckenhoupt threshold: below it the weight is Muckenhoupt near the end,
    at it the two-sided power sandwich holds, above it the shifted sandwich."""
    mu = analysis.mu
    comp = mu.component(j)
    pc = comp.piece_at(end_t, side)
    if pc is None or pc.is_zero():
        return labels[0], "weight vanishes near the end"
    f = pc.form
    if isinstance(f, MonotoneForm):
        if f.comparable:
            return labels[0], f"monotone ({f.direction})"
        return None, "monotone piece lacks the comparability annotation"
    if isinstance(f, PowerForm):
        alpha = pc.exponent_at(end_t, side)
        if alpha is None:
            alpha = 0
        if as_float(alpha) == 0:
            return labels[0], "no vanishing at the end (comparable to a constant)"
        p_minus_1 = (mu.p - 1) if isinstance(mu.p, (int, Fraction)) else as_float(mu.p) - 1.0
        cmp = _cmp_exactish(alpha, p_minus_1)
        if cmp < 0:
            return labels[1], f"exponent {as_float(alpha):.6g} below p - 1"
        if cmp == 0:
            return labels[2], "exponent equals p - 1 (two-sided power sandwich)"
        return labels[3], f"exponent {as_float(alpha):.6g} above p - 1"
    return None, "no structural form at the end"


def classify_type_c(analysis: WeightAnalysis,
                    adm: Optional[AdmissibilityReport] = None) -> TypeCReport:
    mu = analysis.mu
    if mu.curve.closed:
        return TypeCReport("no", violations=["closed curve"],
                           notes=["classify the seam-cut model instead"])
    adm = adm or admissibility(analysis)
    fin = measure_finite(mu)
    notes = [f"finite: {fin}", f"strongly admissible: {adm.strongly}"]
    gate = _gate(fin, adm.strongly)
    if gate == "no":
        return TypeCReport("no", violations=adm.violations[:3] or ["measure not finite"],
                           notes=notes)
    L = mu.curve.length
    tol = _tol(mu.curve)
    interior = sorted(t for t in set(structural_breakpoints(mu)) | set(_curve_breakpoints(mu.curve))
                      if tol < t < L - tol)
    a2 = interior[0] if interior else 0.5 * L
    a3 = interior[-1] if interior else 0.5 * L
    violations: List[str] = []
    verdicts: List[Tri] = [gate]
    om = analysis.omega(mu.k)
    if not om.covers_open_arc(0.0, L):
        violations.append("top-order weight not Muckenhoupt on the open curve")
        verdicts.append("unknown" if om.approximate else "no")
    elif om.approximate:
        notes.append("interior coverage certified only by sampling")
        verdicts.append("unknown")
    end_cases: Dict[str, Dict[int, str]] = {"left": {}, "right": {}}
    for j in range(1, mu.k + 1):
        for side_name, end_t, side, labels in (
                ("left", 0.0, "right", ("2.1", "2.2", "2.3", "2.4")),
                ("right", L, "left", ("3.1", "3.2", "3.3", "3.4"))):
            label, why = _endpoint_case(analysis, j, end_t, side, labels)
            if label is None:
                violations.append(f"order {j}, {side_name} end: {why}")
                verdicts.append("unknown")
            else:
                end_cases[side_name][j] = label
    return TypeCReport(_gate(*verdicts), a2, a3, end_cases, violations, notes)


# -- extended sequential domination -------------------------------------------------

@dataclass
class ESDReport:
    is_esd: Tri
    constant: float
    per_order: List[dict]
    closure: VectorialMeasure
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"isESD": self.is_esd,
                "constant": None if math.isinf(self.constant) else self.constant,
                "perOrder": list(self.per_order), "notes": list(self.notes)}


def _side_exponent(comp: MeasureComponent, t: float, side: str):
    pc = comp.piece_at(t, side)
    if pc is None or pc.is_zero():
        return None
    if isinstance(pc.form, PowerForm):
        e = pc.exponent_at(t, side)
        return 0 if e is None else e
    return "sampled"


def _dominates(num: MeasureComponent, den: MeasureComponent,
               mu: VectorialMeasure) -> Tuple[Tri, float, str]:
    """Whether num <= c * den as measures, with the best constant found."""
    tol = _tol(mu.curve)
    c = 0.0
    sampled = False
    for atom in num.atoms:
        match = [a for a in den.atoms if abs(float(a.t) - float(atom.t)) <= tol]
        if not match or as_float(match[0].mass) <= 0:
            return "no", math.inf, f"atom at t = {float(atom.t):.6g} has no matching atom below"
        c = max(c, as_float(atom.mass) / as_float(match[0].mass))
    den_bounds = sorted({float(pc.t0) for pc in den.pieces} | {float(pc.t1) for pc in den.pieces})
    for pc in num.nonzero_pieces():
        cuts = [t for t in den_bounds if float(pc.t0) + tol < t < float(pc.t1) - tol]
        frags = [pc]
        for t in cuts:
            frags = [h for fr in frags for h in
                     (fr.split(t) if float(fr.t0) + tol < t < float(fr.t1) - tol else (fr,))]
        for frag in frags:
            a, b = float(frag.t0), float(frag.t1)
            mid = 0.5 * (a + b)
            dpc = den.piece_at(mid, "right")
            if dpc is None or dpc.is_zero():
                return "no", math.inf, f"weight above a null weight on [{a:.6g}, {b:.6g}]"
            # symbolic endpoint comparison: the ratio blows up where the upper
            # order vanishes more slowly than the lower one
            for t, side in ((a, "right"), (b, "left")):
                en = _side_exponent(num, t, side)
                ed = _side_exponent(den, t, side)
                if en == "sampled" or ed == "sampled":
                    sampled = True
                    continue
                if en is None:
                    continue
                if _cmp_exactish(en, ed) < 0:
                    return "no", math.inf, (f"vanishing orders at t = {t:.6g}: "
                                            f"{as_float(en):.6g} above vs {as_float(ed):.6g} below")
            xs = [a + (b - a) * 0.5 * (1 - math.cos(math.pi * (i + 0.5) / 17))
                  for i in range(17)]
            for x in xs:
                wn, wd = num.weight_at(x), den.weight_at(x)
                if wn <= 0:
                    continue
                if wd <= 1e-300:
                    return "no", math.inf, f"null weight below at t = {x:.6g}"
                c = max(c, wn / wd)
    verdict: Tri = "yes"
    why = f"constant {c:.6g}" + (" (sampled)" if sampled else "")
    return verdict, c, why


def esd(mu: VectorialMeasure) -> ESDReport:
    """Sequential domination mu_{j+1} <= c mu_j down the orders, plus the
    tail-sum closure that always satisfies it."""
    per: List[dict] = []
    notes: List[str] = []
    cmax = 0.0
    verdicts: List[Tri] = []
    for j in range(mu.k):
        v, c, why = _dominates(mu.component(j + 1), mu.component(j), mu)
        per.append({"j": j, "verdict": v, "constant": None if math.isinf(c) else c,
                    "witness": why})
        verdicts.append(v)
        cmax = max(cmax, c)
    is_esd = _gate(*verdicts) if verdicts else "yes"
    if is_esd != "yes":
        cmax = math.inf
    return ESDReport(is_esd, cmax, per, esd_closure(mu), notes)


def _form_expr(pc: WeightPiece) -> str:
    f = pc.form
    if isinstance(f, PowerForm):
        parts = [repr(as_float(f.c))]
        al, ar = as_float(f.alpha_left), as_float(f.alpha_right)
        if al:
            parts.append(f"(t - {float(pc.t0)!r})**{al!r}")
        if ar:
            parts.append(f"({float(pc.t1)!r} - t)**{ar!r}")
        if f.smooth_expr:
            parts.append(f"({f.smooth_expr})")
        return " * ".join(parts)
    return f"({f.expr})"


def esd_closure(mu: VectorialMeasure) -> VectorialMeasure:
    """The tail-sum measure: order j gets mu_j + mu_{j+1} + ... + mu_k."""
    tol = _tol(mu.curve)
    comps: List[MeasureComponent] = []
    for j in range(mu.k + 1):
        tail = [mu.component(i) for i in range(j, mu.k + 1)]
        atoms: List[Atom] = []
        for comp in tail:
            for a in comp.atoms:
                hit = next((i for i, b in enumerate(atoms)
                            if abs(float(b.t) - float(a.t)) <= tol), None)
                if hit is None:
                    atoms.append(Atom(a.t, a.mass))
                else:
                    old = atoms[hit]
                    both_exact = all(isinstance(m, (int, Fraction))
                                     for m in (old.mass, a.mass))
                    mass = (Fraction(old.mass) + Fraction(a.mass) if both_exact
                            else as_float(old.mass) + as_float(a.mass))
                    atoms[hit] = Atom(old.t, mass)
        bounds: List[float] = []
        for comp in tail:
            for pc in comp.pieces:
                for t in (float(pc.t0), float(pc.t1)):
                    if not bounds or all(abs(t - s) > tol for s in bounds):
                        bounds.append(t)
        bounds.sort()
        pieces: List[WeightPiece] = []
        for a, b in zip(bounds, bounds[1:]):
            frags = [fr for comp in tail for fr in comp.clipped_pieces(a, b)]
            if not frags:
                continue
            if len(frags) == 1:
                pieces.append(frags[0])
            elif all(isinstance(fr.form, PowerForm) and not fr.form.smooth_expr
                     and as_float(fr.form.alpha_left) == 0
                     and as_float(fr.form.alpha_right) == 0 for fr in frags):
                both_exact = all(isinstance(fr.form.c, (int, Fraction)) for fr in frags)
                csum = (sum(Fraction(fr.form.c) for fr in frags) if both_exact
                        else sum(as_float(fr.form.c) for fr in frags))
                pieces.append(WeightPiece(frags[0].arc, PowerForm(csum)))
            else:
                expr = " + ".join(_form_expr(fr) for fr in frags)
                pieces.append(WeightPiece(frags[0].arc, GeneralForm(expr)))
        comps.append(MeasureComponent(j, pieces, atoms))
    return VectorialMeasure(mu.curve, mu.p, comps, truncation=mu.truncation)


# -- first-order kernel via regular components ---------------------------------------

def regular_components(analysis: WeightAnalysis) -> List[Tuple[float, float]]:
    """Connected components of the order-0 regular set, merging across
    interior points that belong through a one-sided verdict."""
    reg = analysis.regular_set(0)
    om = reg.arcs_union
    L = analysis.curve.length
    tol = _tol(analysis.curve)
    if om.full:
        return [(0.0, L)]
    spans: List[List[float]] = []
    arcs = []
    for arc in om.arcs:
        a, b = float(arc.t0), float(arc.t1)
        if analysis.curve.closed and b < a - tol:
            b += L  # wrapped arc unrolled past the seam
        arcs.append((a, b))
    for a, b in sorted(arcs):
        if spans and a - spans[-1][1] <= tol and reg.point_in(spans[-1][1] % L if analysis.curve.closed else spans[-1][1]) == "yes":
            spans[-1][1] = max(spans[-1][1], b)
        else:
            spans.append([a, b])
    if analysis.curve.closed and len(spans) > 1:
        first, last = spans[0], spans[-1]
        if (first[0] + L) - last[1] <= tol and reg.point_in(first[0] % L) == "yes":
            spans[0] = [last[0] - L, first[1]]
            spans.pop()
    return [(s[0], s[1]) for s in spans]


def prop_k1_kernel_dim(analysis: WeightAnalysis) -> int:
    """First-order characterization: kernel dimension equals the number of
    order-0 regular components carrying no value-measure mass (indicators of
    the massless components span the kernel)."""
    mu = analysis.mu
    if mu.k != 1:
        raise ValueError("characterization holds for first-order measures only")
    comps = regular_components(analysis)
    comp0 = mu.component(0)
    reg = analysis.regular_set(0)
    L = mu.curve.length
    tol = 1e-9 * max(1.0, L)
    n = 0
    for a, b in comps:
        if b <= L + _tol(mu.curve):
            mass = component_ac_mass(comp0, max(a, 0.0), min(b, L))
        else:
            mass = (component_ac_mass(comp0, max(a, 0.0), L)
                    + component_ac_mass(comp0, 0.0, b - L))
        for at in comp0.atoms:
            t = float(at.t)
            tt = t + L if mu.curve.closed and t < a - tol else t
            if a - tol <= tt <= b + tol and reg.point_in(t % L if mu.curve.closed else t) == "yes":
                mass += as_float(at.mass)
        if mass <= tol:
            n += 1
    return n


# -- verdict ---------------------------------------------------------------------

@dataclass
class KernelCertificate:
    element: PiecewisePolynomial
    power: int  # smallest r with a positive-norm image z^r h
    element_norm: float
    image_norm: float
    scale: float

    def to_json(self) -> dict:
        return {"power": self.power, "elementNorm": self.element_norm,
                "imageNorm": self.image_norm, "scale": self.scale}


@dataclass
class BoundednessVerdict:
    verdict: str  # "bounded" | "unbounded" | "unknown"
    theorem: Optional[str]
    kernel_dim: int
    routes: List[str] = field(default_factory=list)
    evidence: Dict[str, object] = field(default_factory=dict)
    certificate: Optional[KernelCertificate] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        ev = dict(self.evidence)
        ev["routes"] = list(self.routes)
        if self.notes:
            ev["notes"] = list(self.notes)
        if self.certificate is not None:
            ev["certificate"] = self.certificate.to_json()
        return {"verdict": self.verdict, "theorem": self.theorem,
                "kernelDim": self.kernel_dim, "evidence": ev}


def kernel_certificate(mu: VectorialMeasure, kern: Optional[KernelResult] = None,
                       analysis: Optional[WeightAnalysis] = None) -> Optional[KernelCertificate]:
    """A zero-norm function whose multiplication image has positive norm;
    its existence breaks well-definedness on the quotient unconditionally."""
    analysis = analysis or WeightAnalysis(mu)
    kern = kern or solve_kernel(mu, analysis)
    if kern.dim == 0 or not kern.basis:
        return None
    mass = total_mass(mu)
    scale = 1.0 + (mass if math.isfinite(mass) else 0.0)
    for power in range(1, 4):
        for h in kern.basis:
            hn = sobolev_norm(mu, h, analysis)
            if hn >= 1e-8 * scale:
                continue
            g = h
            for _ in range(power):
                g = g.times_z()
            gn = sobolev_norm(mu, g, analysis)
            if gn > 1e-6 * scale:
                return KernelCertificate(h, power, hn, gn, scale)
    return None


def seam_cut(mu: VectorialMeasure) -> VectorialMeasure:
    """The same measure data on the open model of a closed curve."""
    if not mu.curve.closed:
        return mu
    comps = [MeasureComponent(c.j, list(c.pieces), list(c.atoms)) for c in mu.components]
    return VectorialMeasure(mu.curve.cut(), mu.p, comps, truncation=mu.truncation)


def boundedness_verdict(mu: VectorialMeasure,
                        analysis: Optional[WeightAnalysis] = None,
                        kern: Optional[KernelResult] = None) -> BoundednessVerdict:
    if mu.curve.closed:
        return _closed_curve_verdict(mu)
    analysis = analysis or WeightAnalysis(mu)
    kern = kern or solve_kernel(mu, analysis)
    dim = kern.dim
    adm = admissibility(analysis)
    mac = classify_monotone_ac(mu)
    tb = classify_type_b(analysis, adm)
    ta = classify_type_a(analysis, adm)
    tc = classify_type_c(analysis, adm)
    reports = {"monotone-ac": mac, "type-B": tb, "type-A": ta, "type-C": tc}
    routes = [tag for tag in ROUTE_PRIORITY if reports[tag].applies == "yes"]
    evidence: Dict[str, object] = {
        "admissible": adm.admissible, "stronglyAdmissible": adm.strongly,
        "monotoneAC": mac.applies, "typeA": ta.applies, "typeB": tb.applies,
        "typeC": tc.applies, "kernelMethod": kern.method,
    }
    notes: List[str] = []
    if kern.low_confidence:
        notes.append("kernel dimension numerically delicate")
    cert = kernel_certificate(mu, kern, analysis) if dim > 0 else None
    if tc.applies == "yes" and mu.k >= 1:
        w1 = component_ac_mass(mu.component(1))
        if w1 > 0:
            evidence["w1Mass"] = w1
            evidence["mu0Mass"] = component_mass(mu.component(0))
    if routes:
        theorem = routes[0]
        verdict = "bounded" if dim == 0 else "unbounded"
        return BoundednessVerdict(verdict, theorem, dim, routes, evidence, cert, notes)
    if dim > 0:
        if cert is not None:
            notes.append("zero-norm element with positive-norm image: "
                         "multiplication does not descend to the quotient")
            return BoundednessVerdict("unbounded", "kernel-obstruction", dim,
                                      routes, evidence, cert, notes)
        if adm.admissible == "yes":
            notes.append("admissible measure with nontrivial kernel: "
                         "multiplication is not well defined")
            return BoundednessVerdict("unbounded", "kernel-obstruction", dim,
                                      routes, evidence, None, notes)
        notes.append("nontrivial kernel, but neither a certificate nor admissibility")
        return BoundednessVerdict("unknown", None, dim, routes, evidence, None, notes)
    notes.append("no verified route; trivial kernel alone decides nothing")
    return BoundednessVerdict("unknown", None, dim, routes, evidence, None, notes)


def _closed_curve_verdict(mu: VectorialMeasure) -> BoundednessVerdict:
    cut = seam_cut(mu)
    cut_analysis = WeightAnalysis(cut)
    cut_kern = solve_kernel(cut, cut_analysis)
    sub = boundedness_verdict(cut, cut_analysis, cut_kern)
    circle_kern = solve_kernel(mu)
    dim = circle_kern.dim
    evidence = dict(sub.evidence)
    evidence["cutKernelDim"] = cut_kern.dim
    notes = ["closed curve: routes verified on the seam-cut open model"] + sub.notes
    if sub.verdict == "bounded":
        # curve functions sit isometrically inside the cut model and the
        # subspace is multiplication-invariant, so boundedness transfers
        return BoundednessVerdict("bounded", sub.theorem, dim, sub.routes,
                                  evidence, None, notes)
    if dim > 0:
        cert = kernel_certificate(mu, circle_kern)
        if cert is not None:
            notes.append("zero-norm element on the closed curve with "
                         "positive-norm image")
            return BoundednessVerdict("unbounded", "kernel-obstruction", dim,
                                      sub.routes, evidence, cert, notes)
        adm = admissibility(WeightAnalysis(mu))
        if adm.admissible == "yes":
            notes.append("admissible measure with nontrivial kernel on the "
                         "closed curve")
            return BoundednessVerdict("unbounded", "kernel-obstruction", dim,
                                      sub.routes, evidence, None, notes)
    notes.append("cut-model verdict "
                 f"{sub.verdict!r} does not transfer to the closed curve")
    return BoundednessVerdict("unknown", None, dim, sub.routes, evidence, None, notes)
