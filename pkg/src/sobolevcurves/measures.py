"""Vectorial measures mu = (mu_0, ..., mu_k) on a curve.

Each component splits into an absolutely continuous part, described by a
finite list of weight pieces tiling the parameter domain, and a finite list
of atoms.  Weight pieces come in four forms:

  zero      w = 0 on the piece
  power     w(t) = c * (t-t0)^al * (t1-t)^ar * smooth(t), c > 0, al, ar > -1
  monotone  an evaluator comparable to a monotone function (direction known)
  general   an evaluator with no structural promises

Positions are arc-length parameters.  Numbers parsed from strings or ints are
kept as Fractions so the exact linear-algebra route stays exact; floats stay
floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .curves import Arc, Curve, CurveError, build_curve

NumberLike = Union[int, float, Fraction]


class MeasureError(ValueError):
    """Raised for malformed measure documents."""


# -- numeric helpers ---------------------------------------------------------

def parse_number(v) -> NumberLike:
    """Strings and ints parse to Fraction (exact); floats stay floats."""
    if isinstance(v, bool):
        raise MeasureError(f"boolean {v!r} is not a number")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            try:
                return float(v)
            except ValueError:
                raise MeasureError(f"cannot parse number {v!r}") from None
    raise MeasureError(f"cannot parse number {v!r}")


def dump_number(v) -> Union[str, float, int]:
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, int):
        return v
    return float(v)


def as_float(v) -> float:
    return float(v)


# -- weight-expression evaluators --------------------------------------------

_EXPR_NAMES = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "log": math.log, "sqrt": math.sqrt, "abs": abs, "pow": pow,
    "pi": math.pi, "e": math.e, "min": min, "max": max,
}


def compile_weight_expr(expr: str) -> Callable[[float], float]:
    """Compile a weight expression in the variable t (restricted namespace)."""
    code = compile(expr, "<weight expr>", "eval")
    for name in code.co_names:
        if name not in _EXPR_NAMES and name != "t":
            raise MeasureError(f"name {name!r} not allowed in weight expression")

    def _eval(t: float) -> float:
        return float(eval(code, {"__builtins__": {}}, {**_EXPR_NAMES, "t": float(t)}))

    return _eval


# -- forms --------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroForm:
    kind: str = field(default="zero", init=False)

    def to_json(self):
        return {"type": "zero"}


@dataclass(frozen=True)
class PowerForm:
    """w(t) = c * (t - t0)^alpha_left * (t1 - t)^alpha_right * smooth(t)."""

    c: NumberLike
    alpha_left: NumberLike = 0
    alpha_right: NumberLike = 0
    smooth_expr: Optional[str] = None
    kind: str = field(default="power", init=False)

    def __post_init__(self):
        if as_float(self.c) <= 0:
            raise MeasureError("power form needs c > 0 (use zero form for w = 0)")
        if as_float(self.alpha_left) <= -1 or as_float(self.alpha_right) <= -1:
            raise MeasureError("power exponents must exceed -1 (finite mass)")
        if self.smooth_expr is not None:
            compile_weight_expr(self.smooth_expr)  # validate eagerly

    def smooth(self) -> Optional[Callable[[float], float]]:
        return compile_weight_expr(self.smooth_expr) if self.smooth_expr else None

    def to_json(self):
        d = {"type": "power", "c": dump_number(self.c)}
        if as_float(self.alpha_left) != 0:
            d["alpha_left"] = dump_number(self.alpha_left)
        if as_float(self.alpha_right) != 0:
            d["alpha_right"] = dump_number(self.alpha_right)
        if self.smooth_expr:
            d["smooth"] = self.smooth_expr
        return d


@dataclass(frozen=True)
class MonotoneForm:
    """Evaluator comparable to a monotone function of known direction."""

    expr: str
    direction: str  # "nondecreasing" | "nonincreasing"
    comparable: bool = True
    kind: str = field(default="monotone", init=False)

    def __post_init__(self):
        if self.direction not in ("nondecreasing", "nonincreasing"):
            raise MeasureError(f"bad monotone direction {self.direction!r}")
        compile_weight_expr(self.expr)

    def evaluator(self) -> Callable[[float], float]:
        return compile_weight_expr(self.expr)

    def to_json(self):
        return {"type": "monotone", "expr": self.expr, "direction": self.direction,
                "comparable": self.comparable}


@dataclass(frozen=True)
class GeneralForm:
    expr: str
    kind: str = field(default="general", init=False)

    def __post_init__(self):
        compile_weight_expr(self.expr)

    def evaluator(self) -> Callable[[float], float]:
        return compile_weight_expr(self.expr)

    def to_json(self):
        return {"type": "general", "expr": self.expr}


Form = Union[ZeroForm, PowerForm, MonotoneForm, GeneralForm]


# -- pieces and atoms ----------------------------------------------------------

@dataclass(frozen=True)
class WeightPiece:
    arc: Arc
    form: Form

    @property
    def t0(self):
        return self.arc.t0

    @property
    def t1(self):
        return self.arc.t1

    def is_zero(self) -> bool:
        return isinstance(self.form, ZeroForm)

    def length(self) -> float:
        return float(self.t1) - float(self.t0)

    def evaluate(self, t: float) -> float:
        """Pointwise weight value; endpoints of power pieces may be 0 or inf."""
        f = self.form
        if isinstance(f, ZeroForm):
            return 0.0
        if isinstance(f, PowerForm):
            a, b = float(self.t0), float(self.t1)
            dl = max(float(t) - a, 0.0)
            dr = max(b - float(t), 0.0)
            al, ar = as_float(f.alpha_left), as_float(f.alpha_right)
            try:
                val = as_float(f.c) * dl ** al * dr ** ar
            except ZeroDivisionError:
                return math.inf
            s = f.smooth()
            return val * s(t) if s else val
        return f.evaluator()(float(t))

    def evaluate_array(self, ts: np.ndarray) -> np.ndarray:
        f = self.form
        if isinstance(f, ZeroForm):
            return np.zeros_like(ts, dtype=float)
        if isinstance(f, PowerForm):
            a, b = float(self.t0), float(self.t1)
            dl = np.clip(ts - a, 0.0, None)
            dr = np.clip(b - ts, 0.0, None)
            al, ar = as_float(f.alpha_left), as_float(f.alpha_right)
            with np.errstate(divide="ignore"):
                out = as_float(f.c) * np.power(dl, al) * np.power(dr, ar)
            s = f.smooth()
            if s:
                out = out * np.array([s(t) for t in ts])
            return out
        ev = f.evaluator()
        return np.array([ev(t) for t in ts])

    def exponent_at(self, t, side: str):
        """Vanishing order of a power piece at one of its endpoints.

        side is the side of t the piece lies on ("right": piece starts at t).
        Returns None when the piece is not power-formed or t is interior.
        """
        if not isinstance(self.form, PowerForm):
            return None
        tf = float(t)
        if side == "right" and abs(tf - float(self.t0)) <= 1e-12:
            return self.form.alpha_left
        if side == "left" and abs(tf - float(self.t1)) <= 1e-12:
            return self.form.alpha_right
        if float(self.t0) < tf < float(self.t1):
            return 0  # interior of a positive power piece: locally bounded
        return None

    def split(self, t) -> Tuple["WeightPiece", "WeightPiece"]:
        """Split at an interior parameter; power annotations stay exact by
        folding the far-endpoint factor into the smooth hook."""
        tf = float(t)
        if not (float(self.t0) < tf < float(self.t1)):
            raise MeasureError("split point must be interior to the piece")
        left_arc = Arc(self.t0, t)
        right_arc = Arc(t, self.t1)
        f = self.form
        if isinstance(f, ZeroForm):
            return WeightPiece(left_arc, f), WeightPiece(right_arc, f)
        if isinstance(f, PowerForm):
            lf = PowerForm(f.c, f.alpha_left, 0,
                           smooth_expr=_fold_power(f.smooth_expr, self.t1, f.alpha_right, "right"))
            rf = PowerForm(f.c, 0, f.alpha_right,
                           smooth_expr=_fold_power(f.smooth_expr, self.t0, f.alpha_left, "left"))
            if as_float(f.alpha_right) == 0:
                lf = PowerForm(f.c, f.alpha_left, 0, smooth_expr=f.smooth_expr)
            if as_float(f.alpha_left) == 0:
                rf = PowerForm(f.c, 0, f.alpha_right, smooth_expr=f.smooth_expr)
            return WeightPiece(left_arc, lf), WeightPiece(right_arc, rf)
        # monotone/general evaluators restrict as-is
        return WeightPiece(left_arc, f), WeightPiece(right_arc, f)


def _fold_power(smooth_expr: Optional[str], anchor, alpha, side: str) -> Optional[str]:
    if as_float(alpha) == 0:
        return smooth_expr
    a = repr(float(anchor))
    base = f"({a} - t)" if side == "right" else f"(t - {a})"
    factor = f"{base}**{repr(float(alpha))}"
    return factor if smooth_expr is None else f"({smooth_expr}) * {factor}"


@dataclass(frozen=True)
class Atom:
    t: NumberLike
    mass: NumberLike

    def __post_init__(self):
        if as_float(self.mass) <= 0:
            raise MeasureError("atoms need positive mass")

    def to_json(self):
        return {"t": dump_number(self.t), "mass": dump_number(self.mass)}


# -- components ----------------------------------------------------------------

@dataclass
class MeasureComponent:
    """One order of the vectorial measure: d mu_j = (star atoms) + w_j ds."""

    j: int
    pieces: List[WeightPiece]
    atoms: List[Atom]

    def nonzero_pieces(self) -> List[WeightPiece]:
        return [pc for pc in self.pieces if not pc.is_zero()]

    def is_null(self) -> bool:
        return not self.atoms and all(pc.is_zero() for pc in self.pieces)

    def is_purely_ac(self) -> bool:
        return not self.atoms

    def weight_at(self, t: float) -> float:
        for pc in self.pieces:
            if float(pc.t0) <= t <= float(pc.t1):
                return pc.evaluate(t)
        return 0.0

    def piece_at(self, t: float, side: str = "right") -> Optional[WeightPiece]:
        """The piece governing the weight just to one side of t."""
        for pc in self.pieces:
            a, b = float(pc.t0), float(pc.t1)
            if side == "right" and a - 1e-12 <= t < b - 1e-12:
                return pc
            if side == "left" and a + 1e-12 < t <= b + 1e-12:
                return pc
        return None

    def atoms_at(self, t: float, tol: float = 1e-12) -> List[Atom]:
        return [a for a in self.atoms if abs(float(a.t) - t) <= tol]

    def clipped_pieces(self, a: float, b: float) -> List[WeightPiece]:
        """Nonzero piece fragments overlapping (a, b), clipped exactly."""
        out = []
        for pc in self.nonzero_pieces():
            lo, hi = float(pc.t0), float(pc.t1)
            if hi <= a + 1e-15 or lo >= b - 1e-15:
                continue
            frag = pc
            if lo < a - 1e-15:
                frag = frag.split(_preferring_exact(pc.t0, pc.t1, a))[1]
            if float(frag.t1) > b + 1e-15:
                frag = frag.split(_preferring_exact(frag.t0, frag.t1, b))[0]
            out.append(frag)
        return out


def _preferring_exact(t0, t1, x: float):
    """Keep Fractions when the cut lands on a representable float."""
    if isinstance(t0, Fraction) or isinstance(t1, Fraction):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class TruncationInfo:
    """Marks a measure as a finite truncation of an infinite family."""

    family: str
    depth: int
    frontier: NumberLike  # parameter below which the family continues


# -- vectorial measure -----------------------------------------------------------

class VectorialMeasure:
    def __init__(self, curve: Curve, p: NumberLike, components: Sequence[MeasureComponent],
                 truncation: Optional[TruncationInfo] = None):
        if as_float(p) < 1:
            raise MeasureError("p must satisfy 1 <= p < infinity")
        self.curve = curve
        self.p = p
        comps = {c.j: c for c in components}
        k = max(comps) if comps else 0
        self.k = k
        Lx = curve.exact_length if curve.exact_length is not None else curve.length
        self.components = []
        for j in range(k + 1):
            c = comps.get(j)
            if c is None:
                c = MeasureComponent(j, [WeightPiece(Arc(Fraction(0), Lx), ZeroForm())], [])
            self.components.append(_normalize_component(curve, c))
        self.truncation = truncation

    def component(self, j: int) -> MeasureComponent:
        return self.components[j]

    @property
    def is_exact(self) -> bool:
        """All structural numbers rational and the curve exactly affine."""
        if self.curve.exact_affine is None:
            return False
        if not isinstance(self.p, Fraction):
            return False
        for comp in self.components:
            for a in comp.atoms:
                if not isinstance(a.t, Fraction) or not isinstance(a.mass, Fraction):
                    return False
            for pc in comp.pieces:
                if not isinstance(pc.form, (ZeroForm, PowerForm)):
                    return False
                if not (isinstance(pc.arc.t0, (Fraction, int)) and isinstance(pc.arc.t1, (Fraction, int))):
                    return False
                if isinstance(pc.form, PowerForm):
                    f = pc.form
                    if f.smooth_expr is not None:
                        return False
                    if not all(isinstance(x, (Fraction, int)) for x in (f.c, f.alpha_left, f.alpha_right)):
                        return False
        return True

    # -- transforms ---------------------------------------------------------

    def restrict(self, region: Sequence[Arc]) -> "VectorialMeasure":
        """Restriction to a finite union of arcs (inclusion flags honored)."""
        region = sorted(region, key=lambda a: float(a.t0))
        comps = []
        for comp in self.components:
            pieces = []
            for arc in region:
                pieces.extend(comp.clipped_pieces(float(arc.t0), float(arc.t1)))
            atoms = [a for a in comp.atoms
                     if any(r.contains(float(a.t), tol=1e-15) for r in region)]
            comps.append(MeasureComponent(comp.j, pieces, atoms))
        trunc = self.truncation
        if trunc is not None:
            if not any(r.contains(as_float(trunc.frontier), tol=1e-15) for r in region):
                trunc = None  # the cut lies outside the kept region
        return VectorialMeasure(self.curve, self.p, comps, truncation=trunc)

    def reversed(self) -> "VectorialMeasure":
        """Pushforward under orientation reversal t -> L - t (open curves)."""
        rcurve = self.curve.reversed()
        L = self.curve.exact_length if self.curve.exact_length is not None else self.curve.length
        comps = []
        for comp in self.components:
            pieces = []
            for pc in comp.pieces:
                arc = Arc(L - pc.arc.t1, L - pc.arc.t0, pc.arc.include_right, pc.arc.include_left)
                pieces.append(WeightPiece(arc, _reverse_form(pc.form, L)))
            atoms = [Atom(L - a.t, a.mass) for a in comp.atoms]
            comps.append(MeasureComponent(comp.j, pieces, atoms))
        return VectorialMeasure(rcurve, self.p, comps, truncation=None)

    def scaled(self, c: complex) -> "VectorialMeasure":
        """Pushforward under z -> c z; masses are preserved, densities rescale."""
        scurve = self.curve.scaled(c)
        r = abs(complex(c))
        comps = []
        for comp in self.components:
            pieces = []
            for pc in comp.pieces:
                arc = Arc(float(pc.arc.t0) * r, float(pc.arc.t1) * r,
                          pc.arc.include_left, pc.arc.include_right)
                pieces.append(WeightPiece(arc, _scale_form(pc.form, r)))
            atoms = [Atom(float(a.t) * r, a.mass) for a in comp.atoms]
            comps.append(MeasureComponent(comp.j, pieces, atoms))
        return VectorialMeasure(scurve, self.p, comps, truncation=None)

    def mass_scaled(self, c) -> "VectorialMeasure":
        """The measure c * mu for a positive constant c (same curve)."""
        if as_float(c) <= 0:
            raise MeasureError("mass scaling needs c > 0")
        comps = []
        for comp in self.components:
            pieces = [WeightPiece(pc.arc, _mass_scale_form(pc.form, c))
                      for pc in comp.pieces]
            atoms = [Atom(a.t, _mul_exactish(a.mass, c)) for a in comp.atoms]
            comps.append(MeasureComponent(comp.j, pieces, atoms))
        return VectorialMeasure(self.curve, self.p, comps, truncation=self.truncation)

    def to_json(self) -> dict:
        doc = {
            "curve": self.curve.to_json(),
            "p": dump_number(self.p),
            "k": self.k,
            "components": [],
        }
        for comp in self.components:
            cd = {"j": comp.j}
            pieces = [{"arc": [dump_number(pc.arc.t0), dump_number(pc.arc.t1)],
                       "form": pc.form.to_json()}
                      for pc in comp.pieces if not pc.is_zero()]
            atoms = [a.to_json() for a in comp.atoms]
            if pieces:
                cd["pieces"] = pieces
            if atoms:
                cd["atoms"] = atoms
            doc["components"].append(cd)
        if self.truncation is not None:
            doc["truncation"] = {"family": self.truncation.family,
                                 "depth": self.truncation.depth,
                                 "frontier": dump_number(self.truncation.frontier)}
        return doc


def _reverse_form(form: Form, L) -> Form:
    if isinstance(form, ZeroForm):
        return form
    Lf = repr(float(L))
    if isinstance(form, PowerForm):
        sm = form.smooth_expr
        if sm is not None:
            sm = _substitute_t(sm, f"({Lf} - t)")
        return PowerForm(form.c, form.alpha_right, form.alpha_left, smooth_expr=sm)
    if isinstance(form, MonotoneForm):
        d = "nonincreasing" if form.direction == "nondecreasing" else "nondecreasing"
        return MonotoneForm(_substitute_t(form.expr, f"({Lf} - t)"), d, form.comparable)
    return GeneralForm(_substitute_t(form.expr, f"({Lf} - t)"))


def _scale_form(form: Form, r: float) -> Form:
    if isinstance(form, ZeroForm):
        return form
    rf = repr(float(r))
    if isinstance(form, PowerForm):
        al, ar_ = as_float(form.alpha_left), as_float(form.alpha_right)
        cnew = as_float(form.c) * r ** (-1.0 - al - ar_)
        sm = _substitute_t(form.smooth_expr, f"(t / {rf})") if form.smooth_expr else None
        return PowerForm(cnew, form.alpha_left, form.alpha_right, smooth_expr=sm)
    if isinstance(form, MonotoneForm):
        return MonotoneForm(f"({_substitute_t(form.expr, f'(t / {rf})')}) / {rf}",
                            form.direction, form.comparable)
    return GeneralForm(f"({_substitute_t(form.expr, f'(t / {rf})')}) / {rf}")


def _mul_exactish(a, c):
    if isinstance(a, (int, Fraction)) and isinstance(c, (int, Fraction)):
        return Fraction(a) * Fraction(c)
    return as_float(a) * as_float(c)


def _add_exactish(a, c):
    if isinstance(a, (int, Fraction)) and isinstance(c, (int, Fraction)):
        return Fraction(a) + Fraction(c)
    return as_float(a) + as_float(c)


def _mass_scale_form(form: Form, c) -> Form:
    if isinstance(form, ZeroForm):
        return form
    if isinstance(form, PowerForm):
        return PowerForm(_mul_exactish(form.c, c), form.alpha_left,
                         form.alpha_right, smooth_expr=form.smooth_expr)
    cf = repr(as_float(c))
    if isinstance(form, MonotoneForm):
        return MonotoneForm(f"{cf} * ({form.expr})", form.direction, form.comparable)
    return GeneralForm(f"{cf} * ({form.expr})")


def _substitute_t(expr: str, repl: str) -> str:
    # token-level substitution: 't' never appears inside allowed names except
    # sqrt/tan; walk characters and replace standalone t
    out = []
    i = 0
    while i < len(expr):
        ch = expr[i]
        if ch == "t":
            prev = expr[i - 1] if i > 0 else ""
            nxt = expr[i + 1] if i + 1 < len(expr) else ""
            if not (prev.isalnum() or prev == "_") and not (nxt.isalnum() or nxt == "_"):
                out.append(repl)
                i += 1
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _normalize_component(curve: Curve, comp: MeasureComponent) -> MeasureComponent:
    """Sort pieces, check tiling (fill gaps with zero), sort atoms."""
    L = curve.length
    pieces = sorted(comp.pieces, key=lambda pc: float(pc.t0))
    for pc in pieces:
        a, b = float(pc.t0), float(pc.t1)
        if not (0 - 1e-9 <= a < b <= L * (1 + 1e-12) + 1e-9):
            raise MeasureError(f"piece arc [{a}, {b}] outside curve domain [0, {L}]")
    filled: List[WeightPiece] = []
    cursor = 0.0
    cursor_exact: NumberLike = Fraction(0)
    for pc in pieces:
        a = float(pc.t0)
        if a < cursor - 1e-9 * max(1.0, L):
            raise MeasureError(f"overlapping weight pieces near t = {a}")
        if a > cursor + 1e-12 * max(1.0, L):
            filled.append(WeightPiece(Arc(cursor_exact, pc.t0), ZeroForm()))
        filled.append(pc)
        cursor = float(pc.t1)
        cursor_exact = pc.t1
    Lx = curve.exact_length if curve.exact_length is not None else L
    if cursor < L - 1e-12 * max(1.0, L):
        filled.append(WeightPiece(Arc(cursor_exact, Lx), ZeroForm()))
    atoms = sorted(comp.atoms, key=lambda a: float(a.t))
    for a in atoms:
        if not (-1e-9 <= float(a.t) <= L + 1e-9):
            raise MeasureError(f"atom at t = {float(a.t)} outside curve domain")
    # coincident atoms merge: delta_t + delta_t is one support point
    merged: List[Atom] = []
    tol = 1e-12 * max(1.0, L)
    for a in atoms:
        if merged and abs(float(a.t) - float(merged[-1].t)) <= tol:
            prev = merged[-1]
            merged[-1] = Atom(prev.t, _add_exactish(prev.mass, a.mass))
        else:
            merged.append(a)
    return MeasureComponent(comp.j, filled, merged)


# -- parsing ---------------------------------------------------------------------

def _parse_form(doc: dict) -> Form:
    if not isinstance(doc, dict) or "type" not in doc:
        raise MeasureError("weight form needs a 'type'")
    t = doc["type"]
    if t == "zero":
        return ZeroForm()
    if t == "power":
        return PowerForm(parse_number(doc.get("c", 1)),
                         parse_number(doc.get("alpha_left", 0)),
                         parse_number(doc.get("alpha_right", 0)),
                         smooth_expr=doc.get("smooth"))
    if t == "monotone":
        return MonotoneForm(doc["expr"], doc.get("direction", "nondecreasing"),
                            bool(doc.get("comparable", True)))
    if t == "general":
        return GeneralForm(doc["expr"])
    raise MeasureError(f"unknown weight form type {t!r}")


def parse_measure(doc: dict) -> VectorialMeasure:
    """Parse a measure document (already JSON-decoded)."""
    if not isinstance(doc, dict):
        raise MeasureError("measure document must be an object")
    if "curve" not in doc:
        raise MeasureError("measure document needs a 'curve' block")
    curve = build_curve(doc["curve"])
    p = parse_number(doc.get("p", 2))
    if as_float(p) < 1:
        raise MeasureError(f"p = {as_float(p)} is out of range (need p >= 1)")

    if "family" in doc:
        fam = doc["family"]
        name = fam.get("name")
        if name == "dyadic_counterexample":
            return dyadic_counterexample(int(fam.get("depth", 2)), p=p)
        raise MeasureError(f"unknown family {name!r}")

    comps = []
    declared_k = doc.get("k")
    for cd in doc.get("components", []):
        j = int(cd.get("j", 0))
        if j < 0:
            raise MeasureError("component order j must be >= 0")
        pieces = []
        for pd in cd.get("pieces", []):
            arc_raw = pd["arc"]
            arc = Arc(parse_number(arc_raw[0]), parse_number(arc_raw[1]))
            if not float(arc.t0) < float(arc.t1):
                raise MeasureError(f"piece arc {arc_raw} is empty or reversed")
            pieces.append(WeightPiece(arc, _parse_form(pd["form"])))
        atoms = [Atom(parse_number(ad["t"]), parse_number(ad["mass"]))
                 for ad in cd.get("atoms", [])]
        comps.append(MeasureComponent(j, pieces, atoms))
    if declared_k is not None:
        kmax = max((c.j for c in comps), default=0)
        if int(declared_k) < kmax:
            raise MeasureError(f"declared k = {declared_k} below highest component {kmax}")
        if int(declared_k) > kmax:
            comps.append(MeasureComponent(int(declared_k), [], []))
    trunc = None
    td = doc.get("truncation")
    if td is not None:
        trunc = TruncationInfo(str(td["family"]), int(td["depth"]),
                               parse_number(td["frontier"]))
    return VectorialMeasure(curve, p, comps, truncation=trunc)


# -- generated families ------------------------------------------------------------

def dyadic_counterexample(depth: int, p: NumberLike = Fraction(2)) -> VectorialMeasure:
    """Truncation of the dyadic family on [0, 1]:

      mu_0 = sum 2^-m delta(2^-2m-1),   mu_1 = sum 2^-m delta(3 * 2^-2m-2),
      mu_2 = 0,
      w_3  = (2^-2m - x)^(2p-1) (x - 2^-2m-2)^(2p-1) on [2^-2m-2, 2^-2m],

    for m = 0..depth; the parameter region below 2^-(2 depth + 2) is the
    recorded truncation frontier.
    """
    if depth < 0:
        raise MeasureError("depth must be >= 0")
    p = parse_number(p)
    curve = Curve.segment(0, 1, a_exact=(Fraction(0), Fraction(0)),
                          b_exact=(Fraction(1), Fraction(0)))
    two = Fraction(2)
    mu0 = [Atom(two ** (-2 * m - 1), two ** (-m)) for m in range(depth + 1)]
    mu1 = [Atom(3 * two ** (-2 * m - 2), two ** (-m)) for m in range(depth + 1)]
    alpha = 2 * Fraction(p) - 1 if isinstance(p, Fraction) else 2.0 * p - 1.0
    pieces = []
    for m in range(depth + 1):
        lo, hi = two ** (-2 * m - 2), two ** (-2 * m)
        pieces.append(WeightPiece(Arc(lo, hi), PowerForm(1, alpha, alpha)))
    frontier = two ** (-2 * depth - 2)
    comps = [
        MeasureComponent(0, [], mu0),
        MeasureComponent(1, [], mu1),
        MeasureComponent(2, [], []),
        MeasureComponent(3, sorted(pieces, key=lambda pc: float(pc.t0)), []),
    ]
    return VectorialMeasure(curve, p, comps,
                            truncation=TruncationInfo("dyadic_counterexample", depth, frontier))
