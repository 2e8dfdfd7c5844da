"""Kernel of the highest-order part of the Sobolev seminorm.

Functions in the kernel are piecewise polynomials in the complex variable z:
on each maximal manageable arc they reduce to a polynomial whose degree is
set by how much mass of lower order faces the arc, glued across junction
points exactly up to the regularity order the junction supports, and killed
at atoms of every lower order that the arc can see.

Two independent solvers produce the null space: an SVD route over complex
floats for arbitrary curves, and an exact rational route (Gaussian
elimination over Q(i)) when the measure data is rational on an affine
segment.  Tests cross-check the two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .curves import Arc, Curve
from .exactlinalg import QComplex, exact_null_space
from .measures import Atom, VectorialMeasure, as_float
from .quadrature import integrate_piece
from .weights import RegularSet, Tri, WeightAnalysis


@dataclass
class LambdaArc:
    """One maximal arc of the union of manageable sets, with its ansatz data."""

    index: int
    a: float
    b: float                      # b > a; on closed curves b may exceed L
    wraps: bool
    j_sup: int                    # smallest order whose manageable set meets the arc
    j_lambda: int                 # ansatz: polynomial degree j_lambda - 1
    counts: Dict[int, float] = field(default_factory=dict)
    chart_center: complex = 0j
    chart_scale: complex = 1 + 0j

    @property
    def dof(self) -> int:
        return self.j_lambda

    def contains_param(self, t: float, L: float, closed: bool, tol: float) -> bool:
        if closed:
            d = (t - self.a) % L
            return tol < d < (self.b - self.a) - tol
        return self.a + tol < t < self.b - tol

    def closure_contains(self, t: float, L: float, closed: bool, tol: float) -> bool:
        if closed:
            d = (t - self.a) % L
            return d <= (self.b - self.a) + tol or d >= L - tol
        return self.a - tol <= t <= self.b + tol


@dataclass
class KernelComponent:
    arcs: List[LambdaArc]
    junctions: List[float]        # glue points; len(arcs)-1, or len(arcs) if cyclic
    cyclic: bool = False


@dataclass
class PiecewisePolynomial:
    """Piecewise polynomial in z over the lambda arcs, zero off their union."""

    curve: Curve
    pieces: List[Tuple[LambdaArc, np.ndarray]]  # ascending coeffs in the chart u

    def __call__(self, t: float) -> complex:
        return self.eval_param(t)

    def eval_param(self, t: float, order: int = 0) -> complex:
        L = self.curve.length
        tol = 1e-12 * max(1.0, L)
        for lam, coeffs in self.pieces:
            if coeffs.size and lam.contains_param(t, L, self.curve.closed, -tol):
                z = self.curve.point_at(t % L if self.curve.closed else t)
                c = coeffs
                for _ in range(order):
                    c = npoly.polyder(c) / lam.chart_scale
                u = (z - lam.chart_center) / lam.chart_scale
                return complex(npoly.polyval(u, c)) if c.size else 0j
        return 0j

    def eval_param_side(self, t: float, order: int, side: str) -> complex:
        """One-sided limit of the order-th derivative at t: the piece is
        located by a nudged parameter, then evaluated at t itself."""
        L = self.curve.length
        nudge = 1e-7 * max(1.0, L) * (1.0 if side == "right" else -1.0)
        tt = t + nudge
        if self.curve.closed:
            tt %= L
        tol = 1e-12 * max(1.0, L)
        for lam, coeffs in self.pieces:
            if coeffs.size and lam.contains_param(tt, L, self.curve.closed, -tol):
                te = t % L if self.curve.closed else min(max(t, 0.0), L)
                z = self.curve.point_at(te)
                c = coeffs
                for _ in range(order):
                    c = npoly.polyder(c) / lam.chart_scale
                u = (z - lam.chart_center) / lam.chart_scale
                return complex(npoly.polyval(u, c)) if c.size else 0j
        return 0j

    def breakpoints(self) -> List[float]:
        out = set()
        for lam, coeffs in self.pieces:
            if coeffs.size:
                out.add(float(lam.a))
                out.add(float(lam.b))
        return sorted(out)

    def coefficient_vector(self, skip: Optional[set] = None) -> np.ndarray:
        out = []
        for lam, coeffs in self.pieces:
            if skip and lam.index in skip:
                out.append(np.zeros_like(coeffs))
            else:
                out.append(coeffs)
        return np.concatenate(out) if out else np.zeros(0, dtype=complex)

    def degree_on(self, lam_index: int) -> int:
        for lam, coeffs in self.pieces:
            if lam.index == lam_index:
                nz = np.nonzero(np.abs(coeffs) > 1e-10 * (np.max(np.abs(coeffs)) + 1e-300))[0]
                return int(nz[-1]) if nz.size else -1
        return -1

    def max_degree(self) -> int:
        return max((self.degree_on(lam.index) for lam, _ in self.pieces), default=-1)

    def times_z(self) -> "PiecewisePolynomial":
        out = []
        for lam, coeffs in self.pieces:
            if coeffs.size == 0:
                out.append((lam, coeffs))
                continue
            shifted = npoly.polymulx(coeffs) * lam.chart_scale
            shifted[:len(coeffs)] += lam.chart_center * coeffs
            out.append((lam, shifted))
        return PiecewisePolynomial(self.curve, out)


@dataclass
class KernelResult:
    mu: VectorialMeasure
    components: List[KernelComponent]
    arcs: List[LambdaArc]
    basis: List[PiecewisePolynomial]
    dim: int
    method: str                    # "float-svd" | "exact" | "empty"
    low_confidence: bool = False
    approximate: bool = False
    exact_dim: Optional[int] = None
    singular_values: List[float] = field(default_factory=list)
    exact_basis: List[np.ndarray] = field(default_factory=list)


# -- decomposition ---------------------------------------------------------------

def _glueable(analysis: WeightAnalysis, t: float) -> Tri:
    if analysis.mu.k == 0:
        return "no"
    return analysis.regular_set(0).fully_regular(t)


def decompose_components(analysis: WeightAnalysis) -> Tuple[List[KernelComponent], bool]:
    """Lambda arcs from the union of all manageable sets, chained at glue
    points that are regular of order zero on both sides."""
    mu = analysis.mu
    curve = analysis.curve
    L = curve.length
    tol = 1e-12 * max(1.0, L)
    base = analysis.union_above(0)
    approx = base.approximate
    if base.is_empty():
        return [], approx

    if base.full:
        lam = _make_arc(analysis, 0, 0.0, L, wraps=True)
        return [KernelComponent([lam], [], cyclic=True)], approx

    raw = []
    for arc in sorted(base.arcs, key=lambda a: float(a.t0)):
        a, b = float(arc.t0), float(arc.t1)
        if curve.closed and b < a:
            b += L
        raw.append((a, b))
    arcs = [_make_arc(analysis, i, a, b, wraps=(b > L)) for i, (a, b) in enumerate(raw)]

    components: List[KernelComponent] = []
    current: List[LambdaArc] = []
    junctions: List[float] = []
    for lam in arcs:
        if current and abs(current[-1].b % L - lam.a % L) <= tol \
                and _glueable(analysis, lam.a % L) == "yes":
            current.append(lam)
            junctions.append(lam.a % L)
        else:
            if current:
                components.append(KernelComponent(current, junctions))
            current, junctions = [lam], []
    if current:
        components.append(KernelComponent(current, junctions))

    # seam gluing on closed curves: last arc meeting the first through t = 0
    if curve.closed and len(components) >= 1:
        first, last = components[0], components[-1]
        seam = last.arcs[-1].b % L
        if abs(seam - first.arcs[0].a % L) <= tol and _glueable(analysis, seam) == "yes":
            if first is last:
                first.cyclic = True
                first.junctions = first.junctions + [seam]
            else:
                merged = KernelComponent(last.arcs + first.arcs,
                                         last.junctions + [seam] + first.junctions)
                components = [merged] + components[1:-1]
    for t in [j for comp in components for j in comp.junctions]:
        if _glueable(analysis, t) == "unknown":
            approx = True
    return components, approx


def _make_arc(analysis: WeightAnalysis, index: int, a: float, b: float,
              wraps: bool) -> LambdaArc:
    mu = analysis.mu
    curve = analysis.curve
    L = curve.length
    tol = 1e-12 * max(1.0, L)
    j_sup = None
    for m in range(1, mu.k + 1):
        om = analysis.omega(m)
        if om.full or any(_arcs_overlap(arc, a, b, L, curve.closed, tol) for arc in om.arcs):
            j_sup = m
            break
    if j_sup is None:
        j_sup = mu.k  # unreachable for arcs built from the union
    counts: Dict[int, float] = {}
    j_lambda = j_sup
    for m in range(0, j_sup + 1):
        c = _order_count(analysis, m, a, b, wraps)
        counts[m] = c
        if m < j_sup and c >= (j_sup - m):
            j_lambda = m
            break
    lam = LambdaArc(index, a, b, wraps, j_sup, j_lambda, counts)
    _attach_chart(curve, lam)
    return lam


def _arcs_overlap(arc: Arc, a: float, b: float, L: float, closed: bool, tol: float) -> bool:
    x, y = float(arc.t0), float(arc.t1)
    if closed and y < x:
        y += L
    for sx, sy in (((x, y),) if not closed else ((x, y), (x + L, y + L), (x - L, y - L))):
        if min(sy, b) - max(sx, a) > tol:
            return True
    return False


def _order_count(analysis: WeightAnalysis, m: int, a: float, b: float,
                 wraps: bool) -> float:
    """Facing mass count of order m toward the arc (a, b): +inf when the
    a.c. part charges the arc, else the number of facing atoms."""
    mu = analysis.mu
    L = analysis.curve.length
    comp = mu.component(m)
    spans = [(a, min(b, L)), (0.0, b - L)] if wraps and b > L else [(a, b)]
    ac = 0.0
    for lo, hi in spans:
        if hi <= lo:
            continue
        for pc in comp.clipped_pieces(lo, hi):
            ac += integrate_piece(pc, n=32)[0]
    if ac > 1e-12 * max(1.0, L):
        return math.inf
    return float(len(facing_atoms(analysis, m, a, b, wraps)))


def facing_atoms(analysis: WeightAnalysis, m: int, a: float, b: float,
                 wraps: bool) -> List[Atom]:
    """Atoms of order m that constrain polynomials on the arc (a, b):
    interior atoms always do; an atom at an end must be regular of order m
    on the side facing into the arc."""
    mu = analysis.mu
    curve = analysis.curve
    L = curve.length
    tol = 1e-12 * max(1.0, L)
    out = []
    reg: Optional[RegularSet] = analysis.regular_set(m) if m < mu.k else None
    for atom in mu.component(m).atoms:
        t = float(atom.t)
        tn = t % L if curve.closed else t
        pos = _position_in_arc(tn, a, b, L, curve.closed, tol)
        if pos == "interior":
            out.append(atom)
        elif pos == "left-end":
            if reg is not None and reg.right_regular(tn) == "yes":
                out.append(atom)
        elif pos == "right-end":
            if reg is not None and reg.left_regular(tn) == "yes":
                out.append(atom)
    return out


def _position_in_arc(t: float, a: float, b: float, L: float, closed: bool,
                     tol: float) -> str:
    span = b - a
    d = (t - a) % L if closed else t - a
    if closed and d > span + tol and d < L - tol:
        return "outside"
    if not closed and (d < -tol or d > span + tol):
        return "outside"
    if abs(d) <= tol or (closed and abs(d - L) <= tol):
        return "left-end"
    if abs(d - span) <= tol:
        return "right-end"
    if 0 < d < span:
        return "interior"
    return "outside"


def _attach_chart(curve: Curve, lam: LambdaArc) -> None:
    L = curve.length
    mid = 0.5 * (lam.a + lam.b)
    mid = mid % L if curve.closed else min(max(mid, 0.0), L)
    center = curve.point_at(mid)
    if curve.kind == "segment" and curve.exact_affine is not None:
        (_, _), (dx, dy) = curve.exact_affine
        direction = complex(float(dx), float(dy))
        lam.chart_scale = direction * max(0.5 * (lam.b - lam.a), 1e-30)
    else:
        ts = [lam.a + (lam.b - lam.a) * i / 16.0 for i in range(17)]
        zs = [curve.point_at(t % L if curve.closed else min(max(t, 0.0), L)) for t in ts]
        r = max(abs(z - center) for z in zs)
        lam.chart_scale = complex(max(r, 1e-30))
    lam.chart_center = center


# -- assembly ----------------------------------------------------------------------

def _poly_derivative_row(deg: int, order: int, u: complex, scale: complex) -> np.ndarray:
    """Coefficient row of p -> p^(order)(u) / scale^order for p of degree < deg."""
    row = np.zeros(deg, dtype=complex)
    for n in range(order, deg):
        fall = 1.0
        for i_ in range(order):
            fall *= (n - i_)
        row[n] = fall * u ** (n - order)
    return row / scale ** order


def _exact_poly_derivative_row(deg: int, order: int, u: QComplex,
                               scale: QComplex) -> List[QComplex]:
    one = QComplex(Fraction(1))
    row = [QComplex(Fraction(0))] * deg
    upow = [one]
    for _ in range(deg):
        upow.append(upow[-1] * u)
    sc = one
    for _ in range(order):
        sc = sc * scale
    for n in range(order, deg):
        fall = Fraction(1)
        for i_ in range(order):
            fall *= (n - i_)
        row[n] = QComplex(fall) * upow[n - order] / sc
    return row


def solve_kernel(mu: VectorialMeasure, analysis: Optional[WeightAnalysis] = None,
                 prefer_exact: bool = True) -> KernelResult:
    analysis = analysis or WeightAnalysis(mu)
    components, approx = decompose_components(analysis)
    arcs = [lam for comp in components for lam in comp.arcs]
    if not arcs or all(lam.dof == 0 for lam in arcs):
        exact_dim = 0 if (prefer_exact and mu.is_exact) else None
        return KernelResult(mu, components, arcs, [], 0, "empty",
                            approximate=approx, exact_dim=exact_dim)

    basis, sv, low_conf = _solve_float(mu, analysis, components, arcs)
    exact_dim = None
    exact_vecs: List[np.ndarray] = []
    if prefer_exact and mu.is_exact:
        exact_raw = _solve_exact(mu, analysis, components, arcs)
        if exact_raw is not None:
            exact_dim = len(exact_raw)
            exact_vecs = [np.array([complex(q) for q in vec], dtype=complex)
                          for vec in exact_raw]
    return KernelResult(mu, components, arcs, basis, len(basis), "float-svd",
                        low_confidence=low_conf, approximate=approx,
                        exact_dim=exact_dim, singular_values=sv,
                        exact_basis=exact_vecs)


def _row_plan(mu: VectorialMeasure, analysis: WeightAnalysis,
              components: List[KernelComponent]):
    """Yields per-component row descriptors:
    ("atom", lam, order, t) and ("paste", lam_l, lam_r, order, t)."""
    L = analysis.curve.length
    for comp in components:
        rows = []
        for lam in comp.arcs:
            if lam.dof == 0:
                continue
            for m in range(0, lam.j_lambda):
                for atom in facing_atoms(analysis, m, lam.a, lam.b, lam.wraps):
                    rows.append(("atom", lam, m, float(atom.t)))
        pairs = list(zip(comp.arcs, comp.arcs[1:]))
        if comp.cyclic and len(comp.arcs) >= 1:
            pairs.append((comp.arcs[-1], comp.arcs[0]))
        for (lam_l, lam_r), t_star in zip(pairs, comp.junctions):
            dmax = max(lam_l.j_lambda, lam_r.j_lambda)
            rows.append(("paste", lam_l, lam_r, 0, t_star))
            for order in range(1, dmax):
                if order > mu.k - 1:
                    break
                if analysis.regular_set(order).fully_regular(t_star) == "yes":
                    rows.append(("paste", lam_l, lam_r, order, t_star))
        yield comp, rows


def _solve_float(mu: VectorialMeasure, analysis: WeightAnalysis,
                 components: List[KernelComponent], all_arcs: List[LambdaArc]):
    curve = analysis.curve
    L = curve.length
    basis: List[PiecewisePolynomial] = []
    all_sv: List[float] = []
    low_conf = False
    for comp, rows in _row_plan(mu, analysis, components):
        offsets = {}
        pos = 0
        for lam in comp.arcs:
            offsets[lam.index] = pos
            pos += lam.dof
        dof = pos
        if dof == 0:
            continue
        A = np.zeros((max(len(rows), 1), dof), dtype=complex)
        for ri, row in enumerate(rows):
            if row[0] == "atom":
                _, lam, order, t = row
                z = curve.point_at(t % L if curve.closed else t)
                u = (z - lam.chart_center) / lam.chart_scale
                r = _poly_derivative_row(lam.dof, order, u, lam.chart_scale)
                A[ri, offsets[lam.index]:offsets[lam.index] + lam.dof] = r
            else:
                _, lam_l, lam_r, order, t = row
                z = curve.point_at(t % L if curve.closed else t)
                if lam_l.dof > order:
                    ul = (z - lam_l.chart_center) / lam_l.chart_scale
                    rl = _poly_derivative_row(lam_l.dof, order, ul, lam_l.chart_scale)
                    A[ri, offsets[lam_l.index]:offsets[lam_l.index] + lam_l.dof] = rl
                if lam_r.dof > order:
                    ur = (z - lam_r.chart_center) / lam_r.chart_scale
                    rr = _poly_derivative_row(lam_r.dof, order, ur, lam_r.chart_scale)
                    A[ri, offsets[lam_r.index]:offsets[lam_r.index] + lam_r.dof] -= rr
        if not rows:
            null = np.eye(dof, dtype=complex)
        else:
            _, S, Vh = np.linalg.svd(A)
            smax = S[0] if S.size else 0.0
            thresh = 1e-10 * max(smax, 1.0)
            rank = int(np.sum(S > thresh))
            all_sv.extend(float(s) for s in S)
            if 0 < rank < S.size and S[rank - 1] < 10.0 * max(S[rank], 1e-300):
                low_conf = True
            null = Vh[rank:].conj().T
        for ci in range(null.shape[1]):
            vec = null[:, ci]
            # pieces run over every arc globally so coefficient vectors of
            # basis elements from different components stay comparable
            pieces = []
            for lam in all_arcs:
                if lam.index in offsets:
                    coeffs = vec[offsets[lam.index]:offsets[lam.index] + lam.dof]
                    pieces.append((lam, np.array(coeffs, dtype=complex)))
                else:
                    pieces.append((lam, np.zeros(lam.dof, dtype=complex)))
            basis.append(PiecewisePolynomial(curve, pieces))
    return basis, all_sv, low_conf


def _solve_exact(mu: VectorialMeasure, analysis: WeightAnalysis,
                 components: List[KernelComponent], all_arcs: List[LambdaArc]):
    """Exact null space for rational data on an affine segment; returns a
    list of globally laid out exact vectors or None when not applicable.
    The charts reproduce the float charts exactly, so the layout matches
    PiecewisePolynomial.coefficient_vector()."""
    curve = analysis.curve
    if curve.exact_affine is None or curve.kind != "segment":
        return None
    (x0, y0), (dx, dy) = curve.exact_affine
    dirq = QComplex(dx, dy)
    z0q = QComplex(x0, y0)

    global_offsets = {}
    gpos = 0
    for lam in all_arcs:
        global_offsets[lam.index] = gpos
        gpos += lam.dof
    total_dof = gpos

    def z_of(t: Fraction) -> QComplex:
        return z0q + dirq * QComplex(t)

    out = []
    for comp, rows in _row_plan(mu, analysis, components):
        offsets = {}
        pos = 0
        charts: Dict[int, Tuple[QComplex, QComplex]] = {}
        for lam in comp.arcs:
            offsets[lam.index] = pos
            pos += lam.dof
            ta, tb = Fraction(lam.a), Fraction(lam.b)
            center = z_of((ta + tb) / 2)
            scale = dirq * QComplex((tb - ta) / 2)
            charts[lam.index] = (center, scale)
        dof = pos
        if dof == 0:
            continue
        mat: List[List[QComplex]] = []
        for row in rows:
            r = [QComplex(Fraction(0))] * dof
            if row[0] == "atom":
                _, lam, order, t = row
                center, scale = charts[lam.index]
                u = (z_of(Fraction(t)) - center) / scale
                vals = _exact_poly_derivative_row(lam.dof, order, u, scale)
                for i_, v in enumerate(vals):
                    r[offsets[lam.index] + i_] = v
            else:
                _, lam_l, lam_r, order, t = row
                zq = z_of(Fraction(t))
                if lam_l.dof > order:
                    c, s = charts[lam_l.index]
                    vals = _exact_poly_derivative_row(lam_l.dof, order, (zq - c) / s, s)
                    for i_, v in enumerate(vals):
                        r[offsets[lam_l.index] + i_] = v
                if lam_r.dof > order:
                    c, s = charts[lam_r.index]
                    vals = _exact_poly_derivative_row(lam_r.dof, order, (zq - c) / s, s)
                    for i_, v in enumerate(vals):
                        r[offsets[lam_r.index] + i_] = r[offsets[lam_r.index] + i_] - v
            mat.append(r)
        if mat:
            null = exact_null_space(mat, dof)
        else:
            null = [[QComplex(Fraction(int(i == j_)))
                     for i in range(dof)] for j_ in range(dof)]
        zero = QComplex(Fraction(0))
        for vec in null:
            gvec = [zero] * total_dof
            for lam in comp.arcs:
                src = offsets[lam.index]
                dst = global_offsets[lam.index]
                gvec[dst:dst + lam.dof] = vec[src:src + lam.dof]
            out.append(gvec)
    return out


# -- derived quantities ---------------------------------------------------------------

def stable_kernel_dim(result: KernelResult) -> int:
    """Kernel dimension ignoring basis mass on the truncation-frontier
    component; equals dim for measures that are not marked as truncations."""
    mu = result.mu
    if mu.truncation is None or not result.basis:
        return result.dim
    L = mu.curve.length
    tol = 1e-9 * max(1.0, L)
    frontier = as_float(mu.truncation.frontier)
    skip = set()
    for comp in result.components:
        touches = any(lam.closure_contains(frontier, L, mu.curve.closed, tol)
                      for lam in comp.arcs)
        if touches:
            skip.update(lam.index for lam in comp.arcs)
    if not skip:
        return result.dim
    rows = [b.coefficient_vector(skip=skip) for b in result.basis]
    M = np.vstack([r for r in rows if r.size]) if rows else np.zeros((0, 0))
    if M.size == 0:
        return 0
    S = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(S > 1e-8 * max(float(S[0]) if S.size else 0.0, 1e-30)))


def check_c0(result: KernelResult, analysis: Optional[WeightAnalysis] = None) -> Tri:
    """Can constants be approximated while the top-order seminorm stays small?

    For fully represented measures each chained component has finitely many
    glue points, which makes the property equivalent to the kernel being
    trivial.  Measures marked as family truncations hide structure from the
    represented data, so only the small-k equivalence still applies to them.
    """
    mu = result.mu
    if result.low_confidence:
        return "unknown"
    if mu.truncation is not None and mu.k > 2:
        return "unknown"
    return "yes" if result.dim == 0 else "no"


def span_residual(basis_a: Sequence[np.ndarray], basis_b: Sequence[np.ndarray]) -> float:
    """Largest relative distance from vectors of basis_a to span(basis_b)."""
    if not list(basis_a):
        return 0.0
    if not list(basis_b):
        return 1.0
    B = np.vstack([b / np.linalg.norm(b) for b in basis_b]).T
    Q, _ = np.linalg.qr(B)
    worst = 0.0
    for v in basis_a:
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        res = v - Q @ (Q.conj().T @ v)
        worst = max(worst, float(np.linalg.norm(res) / nv))
    return worst
