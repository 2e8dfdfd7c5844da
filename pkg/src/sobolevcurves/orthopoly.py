"""Sobolev inner products, Gram matrices, orthogonal polynomials, and the
truncated multiplication operator.

Polynomials are expressed in a basis adapted to the curve: Chebyshev
polynomials of the scaled variable u = (z - center)/scale on affine segments
(u runs over [-1, 1] there), scaled monomials u^n on circles, circle arcs and
polylines.  The inner product is sesquilinear with conjugation on the second
argument, so complex curves are covered; on real segments everything reduces
to the real theory.  Atoms contribute exactly through derivative evaluation
at the atom point, never through quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev as ncheb
from numpy.polynomial import polynomial as npoly

from .curves import Curve
from .measures import VectorialMeasure, WeightPiece, as_float
from .quadrature import piece_rule


class NumericsError(Exception):
    pass


class UnsupportedOperation(NumericsError):
    """Raised for inner-product requests outside p = 2."""


class NullPolynomialError(NumericsError):
    """Gram matrix is singular; carries a certified null polynomial."""

    def __init__(self, message: str, basis: "AdaptedBasis", coeffs: np.ndarray):
        super().__init__(message)
        self.basis = basis
        self.coeffs = coeffs

    def polynomial(self) -> "BasisPolynomial":
        return BasisPolynomial(self.basis, self.coeffs)


# -- adapted basis ---------------------------------------------------------------

@dataclass
class AdaptedBasis:
    """phi_n(z) = T_n((z-c)/s) on segments, ((z-c)/s)^n elsewhere."""

    curve: Curve
    center: complex
    scale: float
    kind: str  # "chebyshev" | "monomial"

    @staticmethod
    def for_curve(curve: Curve) -> "AdaptedBasis":
        center, radius = curve.bounding_disk()
        kind = "chebyshev" if curve.kind == "segment" else "monomial"
        return AdaptedBasis(curve, center, max(radius, 1e-300), kind)

    def _der(self, coeffs: np.ndarray, order: int) -> np.ndarray:
        c = np.asarray(coeffs, dtype=complex)
        for _ in range(order):
            c = (ncheb.chebder(c) if self.kind == "chebyshev" else npoly.polyder(c))
            c = c / self.scale
            if c.size == 0:
                return np.zeros(1, dtype=complex)
        return c

    def eval_coeffs(self, coeffs: np.ndarray, z: complex, order: int = 0) -> complex:
        u = (z - self.center) / self.scale
        c = self._der(coeffs, order)
        if self.kind == "chebyshev":
            return complex(ncheb.chebval(u, c))
        return complex(npoly.polyval(u, c))

    def value_matrix(self, ts: Sequence[float], order: int, n_basis: int) -> np.ndarray:
        """(n_basis, len(ts)) matrix of phi_m^(order) along the curve."""
        zs = np.array([self.curve.point_at(t) for t in ts], dtype=complex)
        us = (zs - self.center) / self.scale
        if self.kind == "chebyshev":
            V = ncheb.chebvander(us, n_basis - 1)
        else:
            V = npoly.polyvander(us, n_basis - 1)
        if order == 0:
            return V.T
        D = np.zeros((n_basis, n_basis), dtype=complex)
        for m in range(n_basis):
            e = np.zeros(n_basis, dtype=complex)
            e[m] = 1.0
            d = self._der(e, order)
            D[: d.size, m] = d
        return (V @ D).T

    def times_z_matrix(self, n_basis: int) -> np.ndarray:
        """(n_basis, n_basis) map sending coefficients of f to those of z*f.

        The top column overflows one degree; callers only apply it to
        coefficient vectors of degree < n_basis - 1.
        """
        S = np.zeros((n_basis, n_basis), dtype=complex)
        mulx = ncheb.chebmulx if self.kind == "chebyshev" else npoly.polymulx
        for m in range(n_basis):
            e = np.zeros(n_basis, dtype=complex)
            e[m] = 1.0
            S[m, m] += self.center
            shifted = mulx(e[: m + 1]) * self.scale
            S[: min(shifted.size, n_basis), m] += shifted[:n_basis]
        return S

    def zeros_of(self, coeffs: np.ndarray) -> np.ndarray:
        c = np.asarray(coeffs, dtype=complex)
        roots_u = ncheb.chebroots(c) if self.kind == "chebyshev" else npoly.polyroots(c)
        return self.center + self.scale * np.asarray(roots_u, dtype=complex)


@dataclass
class BasisPolynomial:
    """A polynomial given by coefficients in an adapted basis."""

    basis: AdaptedBasis
    coeffs: np.ndarray

    def eval_param(self, t: float, order: int = 0) -> complex:
        L = self.basis.curve.length
        tt = t % L if self.basis.curve.closed else min(max(t, 0.0), L)
        z = self.basis.curve.point_at(tt)
        return self.basis.eval_coeffs(self.coeffs, z, order)

    def eval_param_side(self, t: float, order: int, side: str) -> complex:
        return self.eval_param(t, order)  # smooth: both one-sided limits agree

    def __call__(self, t: float) -> complex:
        return self.eval_param(t)

    def breakpoints(self) -> List[float]:
        return []


# -- inner products and norms -----------------------------------------------------

def _collect_breakpoints(f) -> List[float]:
    bp = getattr(f, "breakpoints", None)
    return sorted(set(bp())) if callable(bp) else []


def _split_at(piece: WeightPiece, cuts: Sequence[float]) -> List[WeightPiece]:
    frags = [piece]
    for c in cuts:
        out = []
        for fr in frags:
            if float(fr.t0) + 1e-12 < c < float(fr.t1) - 1e-12:
                left, right = fr.split(c)
                out.extend([left, right])
            else:
                out.append(fr)
        frags = out
    return frags


def _piece_quadrature(frag: WeightPiece, fn: Callable[[float], complex],
                      tol: float, n0: int = 32) -> complex:
    prev = None
    n = n0
    for _ in range(6):
        ts, ws = piece_rule(frag, n)
        if ts.size == 0:
            return 0.0 + 0j
        vals = np.array([fn(t) for t in ts], dtype=complex)
        cur = complex(np.sum(ws * vals))
        if prev is not None and abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
        n *= 2
    return prev


def _atom_value(f, t: float, order: int, mu: VectorialMeasure, analysis) -> complex:
    """One-sided trace of f^(order) at an atom: the value is pinned by the
    side(s) where order-regularity holds; with no regular side any
    representative works and the contribution is zero."""
    if analysis is None or order >= mu.k:
        return f.eval_param(t, order)
    reg = analysis.regular_set(order)
    sides = []
    if reg.right_regular(t) == "yes":
        sides.append("right")
    if reg.left_regular(t) == "yes":
        sides.append("left")
    if not sides:
        return 0j
    evals = getattr(f, "eval_param_side", None)
    if evals is None:
        return f.eval_param(t, order)
    vals = [evals(t, order, s) for s in sides]
    return vals[0] if len(vals) == 1 else max(vals, key=abs)


def sobolev_inner(mu: VectorialMeasure, f, g, analysis=None,
                  tol: float = 1e-10) -> complex:
    """Sum over orders of integral f^(j) conj(g^(j)) d mu_j; needs p = 2."""
    if as_float(mu.p) != 2.0:
        raise UnsupportedOperation(f"inner products need p = 2, got p = {as_float(mu.p)}")
    cuts = sorted(set(_collect_breakpoints(f) + _collect_breakpoints(g)))
    total = 0j
    for comp in mu.components:
        j = comp.j
        for pc in comp.nonzero_pieces():
            for frag in _split_at(pc, cuts):
                total += _piece_quadrature(
                    frag, lambda t: f.eval_param(t, j) * np.conj(g.eval_param(t, j)), tol)
        for atom in comp.atoms:
            t = float(atom.t)
            fv = _atom_value(f, t, j, mu, analysis)
            gv = _atom_value(g, t, j, mu, analysis)
            total += as_float(atom.mass) * fv * np.conj(gv)
    return complex(total)


def sobolev_norm(mu: VectorialMeasure, f, analysis=None, tol: float = 1e-10) -> float:
    """(sum_j ||f^(j)||_p^p over mu_j)^(1/p); any p >= 1."""
    pf = as_float(mu.p)
    cuts = _collect_breakpoints(f)
    total = 0.0
    for comp in mu.components:
        j = comp.j
        for pc in comp.nonzero_pieces():
            for frag in _split_at(pc, cuts):
                v = _piece_quadrature(frag, lambda t: abs(f.eval_param(t, j)) ** pf, tol)
                total += v.real
        for atom in comp.atoms:
            v = _atom_value(f, float(atom.t), j, mu, analysis)
            total += as_float(atom.mass) * abs(v) ** pf
    return total ** (1.0 / pf)


# -- Gram matrices and orthonormal bases ----------------------------------------

@dataclass
class GramMatrix:
    N: int
    G: np.ndarray
    basis: AdaptedBasis
    quad_error: float
    converged: bool


@dataclass
class OrthoBasis:
    """q_n = sum_m coeffs[m, n] phi_m, orthonormal in the Sobolev product."""

    basis: AdaptedBasis
    coeffs: np.ndarray  # upper triangular, positive real diagonal
    norms: np.ndarray   # diag of the Cholesky factor
    N: int

    def polynomial(self, n: int) -> BasisPolynomial:
        return BasisPolynomial(self.basis, self.coeffs[: n + 1, n])


def _assemble_gram(mu: VectorialMeasure, basis: AdaptedBasis, n_basis: int,
                   n_nodes: int, midpoint_split: bool = False) -> np.ndarray:
    G = np.zeros((n_basis, n_basis), dtype=complex)
    for comp in mu.components:
        j = comp.j
        for pc in comp.nonzero_pieces():
            frags = [pc]
            if midpoint_split:
                mid = 0.5 * (float(pc.t0) + float(pc.t1))
                frags = _split_at(pc, [mid])
            for frag in frags:
                ts, ws = piece_rule(frag, n_nodes)
                if ts.size == 0:
                    continue
                B = basis.value_matrix(ts, j, n_basis)
                G += (B * ws) @ B.conj().T
        for atom in comp.atoms:
            t = min(max(float(atom.t), 0.0), mu.curve.length)
            v = basis.value_matrix([t], j, n_basis)[:, 0]
            G += as_float(atom.mass) * np.outer(v, v.conj())
    return 0.5 * (G + G.conj().T)


def gram_matrix(mu: VectorialMeasure, N: int, tol: float = 1e-10) -> GramMatrix:
    """Hermitian PSD matrix of pairwise Sobolev products of phi_0..phi_N."""
    if as_float(mu.p) != 2.0:
        raise UnsupportedOperation("Gram matrices need p = 2")
    if N < 0:
        raise NumericsError("N must be >= 0")
    basis = AdaptedBasis.for_curve(mu.curve)
    n_basis = N + 1
    n = max(n_basis + 16, 48)
    prev = _assemble_gram(mu, basis, n_basis, n)
    err = math.inf
    for _ in range(4):
        cur = _assemble_gram(mu, basis, n_basis, 2 * n)
        scale = max(float(np.max(np.abs(cur))), 1e-300)
        err = float(np.max(np.abs(cur - prev))) / scale
        prev = cur
        if err <= tol:
            break
        n *= 2
    G = prev
    tracen = max(float(np.trace(G).real) / max(n_basis, 1), 1e-300)
    mineig = float(np.linalg.eigvalsh(G)[0])
    if mineig < -1e-10 * tracen * n_basis:
        raise NumericsError(f"Gram matrix not PSD: min eigenvalue {mineig:.3g}")
    return GramMatrix(N, G, basis, err, err <= tol)


def ortho_basis(gram: GramMatrix) -> OrthoBasis:
    """Orthonormalization via Cholesky; singular Gram matrices raise with a
    certified null polynomial extracted from the offending leading block."""
    G = gram.G
    n = G.shape[0]
    L = np.zeros_like(G)
    for i in range(n):
        s = G[i, i].real - float(np.sum(np.abs(L[i, :i]) ** 2))
        # relative to this row's own diagonal: Sobolev Gram matrices are
        # steeply graded in the degree, so a global trace scale is useless
        thresh = 1e-12 * max(G[i, i].real, 1e-300)
        if s <= thresh:
            block = G[: i + 1, : i + 1]
            w, V = np.linalg.eigh(block)
            v = V[:, 0]
            coeffs = v / np.max(np.abs(v))
            raise NullPolynomialError(
                f"Gram matrix singular at degree {i}: a degree-{i} polynomial "
                "has vanishing Sobolev norm", gram.basis, coeffs)
        L[i, i] = math.sqrt(s)
        for r in range(i + 1, n):
            L[r, i] = (G[r, i] - np.sum(L[r, :i] * L[i, :i].conj())) / L[i, i]
    # want A with A^T G conj(A) = I; A = conj(L^{-H}) is upper triangular
    # with positive real diagonal, fixing the leading-coefficient phase
    A = np.conj(np.linalg.inv(L.conj().T))
    return OrthoBasis(gram.basis, A, np.diag(L).real.copy(), gram.N)


def coeff_inner(G: np.ndarray, a: np.ndarray, b: np.ndarray) -> complex:
    """Sobolev product of polynomials with phi-basis coefficients a, b."""
    return complex(a @ G @ np.conj(b))


def orthonormality_residual(mu: VectorialMeasure, ortho: OrthoBasis,
                            tol: float = 1e-10) -> float:
    """max |<q_m, q_n> - delta_mn| re-verified with an independent rule
    (different node counts, pieces split at midpoints)."""
    n_basis = ortho.N + 1
    n_nodes = max(n_basis + 29, 61)
    G2 = _assemble_gram(mu, ortho.basis, n_basis, n_nodes, midpoint_split=True)
    A = ortho.coeffs
    Gq = A.T @ G2 @ np.conj(A)
    return float(np.max(np.abs(Gq - np.eye(n_basis))))


# -- multiplication operator --------------------------------------------------------

@dataclass
class ZeroSet:
    degree: int
    zeros: List[complex]
    residuals: List[float]
    reduced_degree: Optional[int] = None
    notes: List[str] = field(default_factory=list)


@dataclass
class MultOpReport:
    N: int
    M: np.ndarray
    sigma_max: float
    history: List[Tuple[int, float]]
    ortho: OrthoBasis
    zeros: Dict[int, ZeroSet] = field(default_factory=dict)
    bound_ok: Optional[bool] = None
    tol: float = 0.05
    notes: List[str] = field(default_factory=list)


def multiplication_matrix(mu: VectorialMeasure, N: int,
                          tol: float = 1e-10) -> MultOpReport:
    """Compression (M_N)_{mn} = <z q_n, q_m> with its singular-value history.

    The basis is built one degree past N because z q_N has degree N + 1.
    sigma_max of nested compressions is non-decreasing and approximates the
    operator norm from below; no extrapolation is attempted.
    """
    gram = gram_matrix(mu, N + 1, tol)
    ortho = ortho_basis(gram)
    res = orthonormality_residual(mu, ortho, tol)
    notes = [f"orthonormality residual {res:.3g}"]
    if res > 1e-6:
        raise NumericsError(f"orthonormal basis failed re-verification: {res:.3g}")
    n_big = N + 2
    A = ortho.coeffs
    S = ortho.basis.times_z_matrix(n_big)
    C = S @ A[:, : N + 1]
    X = C.T @ gram.G @ np.conj(A[:, : N + 1])
    M = X.T
    sub = 8
    history: List[Tuple[int, float]] = []
    while sub < N:
        s = float(np.linalg.svd(M[: sub + 1, : sub + 1], compute_uv=False)[0])
        history.append((sub, s))
        sub *= 2
    sigma = float(np.linalg.svd(M, compute_uv=False)[0])
    history.append((N, sigma))
    return MultOpReport(N, M, sigma, history, ortho, notes=notes)


def poly_zeros(coeffs: np.ndarray, basis: AdaptedBasis) -> ZeroSet:
    """Zeros via the companion matrix of the adapted-basis coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    deg = c.size - 1
    notes: List[str] = []
    reduced = None
    top = float(np.max(np.abs(c))) if c.size else 0.0
    if top == 0.0:
        raise NumericsError("zero polynomial has no zero set")
    while c.size > 1 and abs(c[-1]) <= 1e-12 * top:
        c = c[:-1]
        reduced = c.size - 1
    if reduced is not None:
        notes.append(f"leading coefficient negligible: degree reduced {deg} -> {reduced}")
    if c.size <= 1:
        raise NumericsError("polynomial is constant after degree reduction")
    zs = basis.zeros_of(c)
    pol = BasisPolynomial(basis, c)
    scale = top * max(1.0, basis.scale ** (c.size - 1))
    residuals = [abs(basis.eval_coeffs(c, z, 0)) / scale for z in zs]
    return ZeroSet(deg, [complex(z) for z in zs], residuals, reduced, notes)


def verify_zero_bound(mu: VectorialMeasure, n_max: int = 20, N: int = 64,
                      tol: float = 0.05, quad_tol: float = 1e-10) -> MultOpReport:
    """Zeros of q_1..q_n_max against the truncated-norm disk radius.

    sigma_max(M_N) only bounds the true norm from below, which keeps the
    check meaningful: zeros must lie within the full norm's disk.
    """
    report = multiplication_matrix(mu, N, quad_tol)
    ortho = report.ortho
    ok = True
    for n in range(1, min(n_max, ortho.N) + 1):
        zs = poly_zeros(ortho.coeffs[: n + 1, n], ortho.basis)
        report.zeros[n] = zs
        for z in zs.zeros:
            if abs(z) > report.sigma_max * (1.0 + tol):
                ok = False
    report.bound_ok = ok
    report.tol = tol
    return report
