"""Simple rectifiable oriented curves in the complex plane.

Every curve is parametrized by arc length: the parameter domain is [0, L]
and |dz/dt| = 1 wherever the tangent exists.  Closed curves are positively
oriented and their parameter wraps modulo L.

Segments with rational endpoints keep an exact affine description so that
downstream exact (Fraction) arithmetic can evaluate points without rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

Number = float  # parameters may also arrive as Fraction; float(x) is always valid


class CurveError(ValueError):
    """Raised for malformed curve descriptions or out-of-domain parameters."""


def _fraction_or_none(x) -> Optional[Fraction]:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            return None
    return None


def _sqrt_fraction(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        return None
    num = math.isqrt(q.numerator)
    den = math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


@dataclass(frozen=True)
class Arc:
    """Parameter interval on a curve, from t0 forward to t1.

    On closed curves the pair wraps positively (t0 > t1 is legal).  The
    inclusion flags record whether the endpoints belong to the arc, which
    matters for local-integrability tests and measure restriction.
    """

    t0: Number
    t1: Number
    include_left: bool = True
    include_right: bool = True

    def as_floats(self) -> Tuple[float, float]:
        return float(self.t0), float(self.t1)

    def midpoint(self):
        return (self.t0 + self.t1) / 2

    def contains(self, t, tol: float = 0.0) -> bool:
        """Membership of a parameter in a non-wrapping arc."""
        a, b = float(self.t0), float(self.t1)
        tf = float(t)
        if tf < a - tol or tf > b + tol:
            return False
        if abs(tf - a) <= tol and not self.include_left:
            return False
        if abs(tf - b) <= tol and not self.include_right:
            return False
        return True

    def interior_contains(self, t, tol: float = 0.0) -> bool:
        return float(self.t0) + tol < float(t) < float(self.t1) - tol


@dataclass(frozen=True)
class HalfPoint:
    """A parameter together with the side it is approached from."""

    t: Number
    side: str  # "left" | "right" | "both"

    def __post_init__(self):
        if self.side not in ("left", "right", "both"):
            raise CurveError(f"bad half-point side {self.side!r}")


class Curve:
    """A plane curve of one of four kinds, parametrized by arc length.

    kinds: "segment", "circle_arc", "full_circle", "polyline".
    """

    def __init__(self, kind: str, length: float, closed: bool, **params):
        self.kind = kind
        self.length = float(length)
        self.closed = closed
        self.params = params
        # exact affine map t -> z0 + dir*t when available (segments only)
        self.exact_affine: Optional[Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]] = None
        self.exact_length: Optional[Fraction] = None
        if self.length <= 0:
            raise CurveError("curve must have positive length")

    # -- construction -----------------------------------------------------

    @staticmethod
    def segment(a: complex, b: complex, a_exact=None, b_exact=None) -> "Curve":
        a, b = complex(a), complex(b)
        if a == b:
            raise CurveError("segment endpoints coincide")
        length = abs(b - a)
        exact = None
        exact_len = None
        if a_exact is not None and b_exact is not None:
            ax, ay = a_exact
            bx, by = b_exact
            l2 = (bx - ax) ** 2 + (by - ay) ** 2
            l = _sqrt_fraction(l2)
            if l is not None and l > 0:
                exact = ((ax, ay), ((bx - ax) / l, (by - ay) / l))
                exact_len = l
        c = Curve("segment", length, False, a=a, b=b)
        c.exact_affine = exact
        c.exact_length = exact_len
        return c

    @staticmethod
    def full_circle(center: complex, radius: float) -> "Curve":
        if radius <= 0:
            raise CurveError("circle needs positive radius")
        return Curve("full_circle", 2 * math.pi * radius, True,
                     center=complex(center), radius=float(radius))

    @staticmethod
    def circle_arc(center: complex, radius: float, theta0: float, theta1: float) -> "Curve":
        if radius <= 0:
            raise CurveError("circle arc needs positive radius")
        if not theta1 > theta0:
            raise CurveError("circle arc needs theta1 > theta0 (positive orientation)")
        if theta1 - theta0 >= 2 * math.pi:
            raise CurveError("circle arc spans a full turn or more; use full_circle")
        return Curve("circle_arc", radius * (theta1 - theta0), False,
                     center=complex(center), radius=float(radius),
                     theta0=float(theta0), theta1=float(theta1))

    @staticmethod
    def polyline(vertices: Sequence[complex]) -> "Curve":
        vs = [complex(v) for v in vertices]
        if len(vs) < 2:
            raise CurveError("polyline needs at least two vertices")
        closed = vs[0] == vs[-1] and len(vs) > 2
        seglens = []
        for u, v in zip(vs[:-1], vs[1:]):
            if u == v:
                raise CurveError("polyline has a zero-length edge")
            seglens.append(abs(v - u))
        bad = _polyline_self_intersection(vs, closed)
        if bad is not None:
            raise CurveError(f"polyline self-intersects: edges {bad[0]} and {bad[1]}")
        cum = [0.0]
        for s in seglens:
            cum.append(cum[-1] + s)
        return Curve("polyline", cum[-1], closed, vertices=tuple(vs), cumlen=tuple(cum))

    # -- evaluation --------------------------------------------------------

    def _wrap(self, t: float) -> float:
        if self.closed:
            t = math.fmod(t, self.length)
            if t < 0:
                t += self.length
            return t
        return t

    def point_at(self, t) -> complex:
        tf = float(t)
        if not self.closed:
            if tf < -1e-9 * max(1.0, self.length) or tf > self.length * (1 + 1e-12) + 1e-9:
                raise CurveError(f"parameter {tf} outside [0, {self.length}]")
            tf = min(max(tf, 0.0), self.length)
        else:
            tf = self._wrap(tf)
        p = self.params
        if self.kind == "segment":
            return p["a"] + (p["b"] - p["a"]) * (tf / self.length)
        if self.kind == "full_circle":
            r = p["radius"]
            return p["center"] + r * complex(math.cos(tf / r), math.sin(tf / r))
        if self.kind == "circle_arc":
            r = p["radius"]
            if p.get("sweep", 1) < 0:
                ang = p["theta1"] - tf / r
            else:
                ang = p["theta0"] + tf / r
            return p["center"] + r * complex(math.cos(ang), math.sin(ang))
        if self.kind == "polyline":
            cum = p["cumlen"]
            vs = p["vertices"]
            # binary search for the edge containing tf
            lo, hi = 0, len(cum) - 1
            while lo + 1 < hi:
                mid = (lo + hi) // 2
                if cum[mid] <= tf:
                    lo = mid
                else:
                    hi = mid
            seg = lo
            u, v = vs[seg], vs[seg + 1]
            d = cum[seg + 1] - cum[seg]
            return u + (v - u) * ((tf - cum[seg]) / d)
        raise CurveError(f"unknown curve kind {self.kind!r}")

    def point_exact(self, t) -> Optional[Tuple[Fraction, Fraction]]:
        """Exact point for rational parameters on exactly-described segments."""
        if self.exact_affine is None:
            return None
        if isinstance(t, (int, Fraction, float)):
            tq = Fraction(t)  # floats are exact binary rationals
        else:
            tq = _fraction_or_none(t)
        if tq is None:
            return None
        (x0, y0), (dx, dy) = self.exact_affine
        return (x0 + dx * tq, y0 + dy * tq)

    def arc_length_of(self, arc: Arc) -> float:
        """Length of an arc; wraps positively on closed curves."""
        t0, t1 = arc.as_floats()
        if not self.closed:
            if t1 < t0:
                raise CurveError("arc reversed on an open curve")
            self._check_domain(t0)
            self._check_domain(t1)
            return t1 - t0
        if t0 == t1:
            return 0.0
        d = math.fmod(t1 - t0, self.length)
        if d < 0:
            d += self.length
        if d == 0.0:
            return self.length  # distinct endpoints a full wrap apart
        return d

    def _check_domain(self, t: float):
        if t < -1e-9 or t > self.length * (1 + 1e-12) + 1e-9:
            raise CurveError(f"parameter {t} outside [0, {self.length}]")

    def reversed(self) -> "Curve":
        """Orientation reversal; only meaningful for open curves."""
        if self.closed:
            raise CurveError("closed curves stay positively oriented")
        p = self.params
        if self.kind == "segment":
            c = Curve.segment(p["b"], p["a"])
            if self.exact_affine is not None and self.exact_length is not None:
                (x0, y0), (dx, dy) = self.exact_affine
                L = self.exact_length
                c.exact_affine = ((x0 + dx * L, y0 + dy * L), (-dx, -dy))
                c.exact_length = L
            return c
        if self.kind == "circle_arc":
            # same point set traversed backwards: flip the angular sweep
            return Curve("circle_arc", self.length, False, center=p["center"],
                         radius=p["radius"], theta0=p["theta0"], theta1=p["theta1"],
                         sweep=-p.get("sweep", 1))
        if self.kind == "polyline":
            return Curve.polyline(tuple(reversed(p["vertices"])))
        raise CurveError(f"cannot reverse curve kind {self.kind!r}")

    def cut(self) -> "Curve":
        """Open model of a closed curve with the seam at t = 0; open curves
        are returned unchanged."""
        if not self.closed:
            return self
        p = self.params
        if self.kind == "full_circle":
            return Curve("circle_arc", self.length, False, center=p["center"],
                         radius=p["radius"], theta0=0.0, theta1=2 * math.pi)
        if self.kind == "polyline":
            return Curve("polyline", self.length, False,
                         vertices=p["vertices"], cumlen=p["cumlen"])
        raise CurveError(f"cannot cut curve kind {self.kind!r}")

    def scaled(self, c: complex) -> "Curve":
        """Image of the curve under z -> c*z (c != 0)."""
        c = complex(c)
        if c == 0:
            raise CurveError("scale factor must be nonzero")
        p = self.params
        if self.kind == "segment":
            return Curve.segment(c * p["a"], c * p["b"])
        if self.kind == "full_circle":
            return Curve.full_circle(c * p["center"], abs(c) * p["radius"])
        if self.kind == "circle_arc":
            ph = math.atan2(c.imag, c.real)
            return Curve("circle_arc", abs(c) * self.length, False,
                         center=c * p["center"], radius=abs(c) * p["radius"],
                         theta0=p["theta0"] + ph, theta1=p["theta1"] + ph,
                         sweep=p.get("sweep", 1))
        if self.kind == "polyline":
            return Curve.polyline([c * v for v in p["vertices"]])
        raise CurveError(f"unknown curve kind {self.kind!r}")

    def bounding_disk(self) -> Tuple[complex, float]:
        """Center and radius of a disk containing the curve (basis scaling)."""
        p = self.params
        if self.kind == "segment":
            return (p["a"] + p["b"]) / 2, abs(p["b"] - p["a"]) / 2
        if self.kind in ("full_circle", "circle_arc"):
            return p["center"], p["radius"]
        vs = p["vertices"]
        xs = [v.real for v in vs]
        ys = [v.imag for v in vs]
        c = complex((min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2)
        r = max(abs(v - c) for v in vs)
        return c, max(r, 1e-300)

    def max_abs(self) -> float:
        """sup |z| over the curve (exact for all four kinds)."""
        p = self.params
        if self.kind == "segment":
            return max(abs(p["a"]), abs(p["b"]))
        if self.kind == "full_circle":
            return abs(p["center"]) + p["radius"]
        if self.kind == "circle_arc":
            # endpoints plus the point aligned with the center direction if swept
            r, c0 = p["radius"], p["center"]
            cand = [abs(self.point_at(0.0)), abs(self.point_at(self.length))]
            if c0 != 0:
                phi = math.atan2(c0.imag, c0.real)
                k0 = math.ceil((p["theta0"] - phi) / (2 * math.pi))
                ang = phi + 2 * math.pi * k0
                if p["theta0"] <= ang <= p["theta1"]:
                    cand.append(abs(c0) + r)
            return max(cand)
        return max(abs(v) for v in p["vertices"])

    def to_json(self) -> dict:
        p = self.params
        if self.kind == "segment":
            if self.exact_affine is not None:
                (x0, y0), (dx, dy) = self.exact_affine
                ll = self.exact_length
                def enc(q: Fraction):
                    return int(q) if q.denominator == 1 else str(q)
                return {"kind": "segment",
                        "a": [enc(x0), enc(y0)],
                        "b": [enc(x0 + dx * ll), enc(y0 + dy * ll)]}
            return {"kind": "segment", "a": [p["a"].real, p["a"].imag],
                    "b": [p["b"].real, p["b"].imag]}
        if self.kind == "full_circle":
            return {"kind": "full_circle", "center": [p["center"].real, p["center"].imag],
                    "radius": p["radius"]}
        if self.kind == "circle_arc":
            d = {"kind": "circle_arc", "center": [p["center"].real, p["center"].imag],
                 "radius": p["radius"], "theta0": p["theta0"], "theta1": p["theta1"]}
            if p.get("sweep", 1) < 0:
                d["sweep"] = -1
            return d
        return {"kind": "polyline", "vertices": [[v.real, v.imag] for v in p["vertices"]]}

    def __repr__(self):
        return f"Curve({self.kind}, L={self.length:.6g}, closed={self.closed})"


# -- polyline simplicity ----------------------------------------------------

def _orient(a: complex, b: complex, c: complex) -> float:
    return (b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real)


def _on_segment(a: complex, b: complex, c: complex) -> bool:
    return (min(a.real, b.real) - 1e-15 <= c.real <= max(a.real, b.real) + 1e-15 and
            min(a.imag, b.imag) - 1e-15 <= c.imag <= max(a.imag, b.imag) + 1e-15)


def _segments_intersect(p1, p2, p3, p4) -> bool:
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(p3, p4, p1):
        return True
    if d2 == 0 and _on_segment(p3, p4, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, p3):
        return True
    if d4 == 0 and _on_segment(p1, p2, p4):
        return True
    return False


def _polyline_self_intersection(vs, closed):
    n = len(vs) - 1
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j == i + 1) or (closed and i == 0 and j == n - 1)
            if adjacent:
                # consecutive edges share one vertex; any further contact is a fold
                shared = vs[i + 1] if j == i + 1 else vs[0]
                a, b = vs[i], vs[i + 1]
                c, d = vs[j], vs[j + 1]
                # collinear overlap check
                if _orient(a, b, c) == 0 and _orient(a, b, d) == 0:
                    pts = [c, d] if j == i + 1 else [a, b]
                    others = [q for q in pts if q != shared]
                    if any(_on_segment(a, b, q) and _on_segment(c, d, q) for q in others):
                        return (i, j)
                continue
            if _segments_intersect(vs[i], vs[i + 1], vs[j], vs[j + 1]):
                return (i, j)
    return None


def build_curve(doc: dict) -> Curve:
    """Construct a curve from its JSON description block."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise CurveError("curve block needs a 'kind'")
    kind = doc["kind"]

    def _cx(v):
        if isinstance(v, (list, tuple)):
            return complex(_num(v[0]), _num(v[1]))
        return complex(_num(v), 0.0)

    def _num(v):
        if isinstance(v, str):
            return float(Fraction(v))
        return float(v)

    def _exact_pair(v):
        if isinstance(v, (list, tuple)):
            re = _fraction_or_none(v[0])
            im = _fraction_or_none(v[1])
            if re is not None and im is not None:
                return (re, im)
            return None
        re = _fraction_or_none(v)
        return (re, Fraction(0)) if re is not None else None

    if kind == "segment":
        return Curve.segment(_cx(doc["a"]), _cx(doc["b"]),
                             a_exact=_exact_pair(doc["a"]), b_exact=_exact_pair(doc["b"]))
    if kind == "full_circle":
        return Curve.full_circle(_cx(doc.get("center", 0)), _num(doc["radius"]))
    if kind == "circle_arc":
        c = Curve.circle_arc(_cx(doc.get("center", 0)), _num(doc["radius"]),
                             _num(doc["theta0"]), _num(doc["theta1"]))
        if int(doc.get("sweep", 1)) < 0:
            c.params["sweep"] = -1
        return c
    if kind == "polyline":
        return Curve.polyline([_cx(v) for v in doc["vertices"]])
    raise CurveError(f"unknown curve kind {kind!r}")
