"""Quadrature over weighted arcs.

Power-form pieces use Gauss-Jacobi rules so the endpoint factors
(t-t0)^alpha_left (t1-t)^alpha_right are integrated exactly rather than
sampled; everything else falls back to Gauss-Legendre with the weight folded
into the integrand.  Error estimates come from node doubling.
"""
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import betainc, betaln, roots_jacobi

from .measures import (Atom, GeneralForm, MeasureComponent, MonotoneForm,
                       PowerForm, VectorialMeasure, WeightPiece, ZeroForm,
                       as_float)

DEFAULT_NODES = 64


def gauss_legendre(n: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def piece_rule(piece: WeightPiece, n: int = DEFAULT_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes/weights with sum w_i f(t_i) ~ integral of f w dt over the piece."""
    a, b = float(piece.t0), float(piece.t1)
    form = piece.form
    if isinstance(form, ZeroForm) or b <= a:
        return np.array([]), np.array([])
    if isinstance(form, PowerForm):
        al, ar = as_float(form.alpha_left), as_float(form.alpha_right)
        if al == 0 and ar == 0:
            ts, ws = gauss_legendre(n, a, b)
            ws = ws * as_float(form.c)
        else:
            x, w = roots_jacobi(n, ar, al)  # weight (1-x)^ar (1+x)^al
            half = 0.5 * (b - a)
            ts = a + half * (x + 1.0)
            ws = w * as_float(form.c) * half ** (al + ar + 1.0)
        s = form.smooth()
        if s:
            ws = ws * np.array([s(t) for t in ts])
        return ts, ws
    ts, ws = gauss_legendre(n, a, b)
    vals = piece.evaluate_array(ts)
    return ts, ws * vals


def integrate_piece(piece: WeightPiece, f: Optional[Callable[[float], float]] = None,
                    n: int = DEFAULT_NODES) -> Tuple[float, float]:
    """(value, error estimate) for integral of f(t) w(t) dt over the piece."""
    v1 = _apply_rule(piece, f, n)
    v2 = _apply_rule(piece, f, 2 * n)
    return v2, abs(v2 - v1)


def _apply_rule(piece, f, n) -> float:
    ts, ws = piece_rule(piece, n)
    if ts.size == 0:
        return 0.0
    if f is None:
        return float(np.sum(ws))
    fv = np.array([f(t) for t in ts], dtype=complex)
    out = np.sum(ws * fv)
    return float(out.real) if abs(out.imag) < 1e-14 * (1 + abs(out.real)) else out


def component_ac_mass(comp: MeasureComponent, lo: Optional[float] = None,
                      hi: Optional[float] = None, n: int = DEFAULT_NODES) -> float:
    """Mass of the absolutely continuous part, optionally clipped to [lo, hi]."""
    pieces = comp.nonzero_pieces()
    if lo is not None or hi is not None:
        lo = -math.inf if lo is None else lo
        hi = math.inf if hi is None else hi
        pieces = comp.clipped_pieces(lo, hi)
    return sum(integrate_piece(pc)[0] for pc in pieces)


def component_mass(comp: MeasureComponent) -> float:
    return component_ac_mass(comp) + sum(as_float(a.mass) for a in comp.atoms)


def total_mass(mu: VectorialMeasure) -> float:
    return sum(component_mass(c) for c in mu.components)


def power_fragment_integral(a: float, b: float, P: float, Q: float,
                            lo: float, hi: float) -> float:
    """Integral over [lo, hi] of (t-a)^P (b-t)^Q dt, with a <= lo <= hi <= b.

    Integrable exponents go through the regularized incomplete beta closed
    form; a non-integrable exponent at a touched anchor returns inf, and at
    an untouched anchor the factor is smooth so adaptive quadrature applies.
    """
    if hi <= lo:
        return 0.0
    span = b - a
    touches_a = lo - a <= 1e-15 * max(span, 1.0)
    touches_b = b - hi <= 1e-15 * max(span, 1.0)
    if P <= -1.0 and touches_a:
        return math.inf
    if Q <= -1.0 and touches_b:
        return math.inf
    if P > -1.0 and Q > -1.0:
        u0 = min(max((lo - a) / span, 0.0), 1.0)
        u1 = min(max((hi - a) / span, 0.0), 1.0)
        lnB = betaln(P + 1.0, Q + 1.0)
        frac = betainc(P + 1.0, Q + 1.0, u1) - betainc(P + 1.0, Q + 1.0, u0)
        if frac <= 0.0:
            return 0.0
        return math.exp((P + Q + 1.0) * math.log(span) + lnB + math.log(frac))
    # one anchor is non-integrable but untouched: its factor is smooth here
    wa = P if touches_a else 0.0
    wb = Q if touches_b else 0.0

    def rest(t: float) -> float:
        v = 1.0
        if not touches_a:
            v *= (t - a) ** P
        if not touches_b:
            v *= (b - t) ** Q
        return v

    if wa != 0.0 or wb != 0.0:
        val, _ = quad(rest, lo, hi, weight="alg", wvar=(wa, wb), limit=200)
    else:
        val, _ = quad(rest, lo, hi, limit=200)
    return val


class QuadratureResult:
    """Outcome of adaptive weighted integration."""

    def __init__(self, value: complex, error_estimate: float,
                 subdivisions: int, converged: bool):
        self.value = value
        self.error_estimate = error_estimate
        self.subdivisions = subdivisions
        self.converged = converged

    def __repr__(self) -> str:
        return (f"QuadratureResult(value={self.value!r}, "
                f"error_estimate={self.error_estimate:.3g}, "
                f"subdivisions={self.subdivisions}, converged={self.converged})")


def integrate_weighted(curve, arc, pieces: Sequence[WeightPiece],
                       f: Optional[Callable[[float], complex]] = None,
                       tol: float = 1e-10) -> QuadratureResult:
    """Integral of f against the weighted arc measure over the given arc.

    The weight pieces are clipped to the arc exactly; each fragment is
    integrated with node doubling until the estimate stabilizes within tol.
    """
    lo, hi = float(arc.t0), float(arc.t1)
    if hi < lo:
        raise ValueError("arc must have t0 <= t1")
    comp = MeasureComponent(0, list(pieces), [])
    total = 0.0 + 0.0j
    err = 0.0
    subdivisions = 0
    converged = True
    for frag in comp.clipped_pieces(lo, hi):
        n = 32
        val, dif = integrate_piece(frag, f, n)
        while dif > tol * max(1.0, abs(val)) and n <= 32 * 2 ** 5:
            n *= 2
            subdivisions += 1
            val, dif = integrate_piece(frag, f, n)
        if dif > tol * max(1.0, abs(val)):
            converged = False
        total += val
        err += dif
    value = total.real if abs(total.imag) <= 1e-14 * max(1.0, abs(total)) else total
    return QuadratureResult(value, err, subdivisions, converged)
