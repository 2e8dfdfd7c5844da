"""Exact rational linear algebra for the kernel solver.

Kernel systems built from rational data have rational (complex-rational)
coefficients, so the null space can be computed without floating point.
This route is kept independent of the float/SVD route; tests compare the two.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Union


@dataclass(frozen=True)
class QComplex:
    """Complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(x) -> "QComplex":
        if isinstance(x, QComplex):
            return x
        if isinstance(x, complex):
            raise TypeError("float complex is not exact; build QComplex from Fractions")
        return QComplex(Fraction(x))

    def __add__(self, o):
        o = QComplex.of(o)
        return QComplex(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        o = QComplex.of(o)
        return QComplex(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __mul__(self, o):
        o = QComplex.of(o)
        return QComplex(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __radd__ = __add__
    __rmul__ = __mul__

    def __truediv__(self, o):
        o = QComplex.of(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero QComplex")
        return QComplex((self.re * o.re + self.im * o.im) / d,
                        (self.im * o.re - self.re * o.im) / d)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conj(self) -> "QComplex":
        return QComplex(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QComplex({self.re!s}, {self.im!s})"


Scalar = Union[int, Fraction, QComplex]

QC0 = QComplex(Fraction(0))
QC1 = QComplex(Fraction(1))


def _qc(x: Scalar) -> QComplex:
    return QComplex.of(x)


def exact_null_space(rows: Sequence[Sequence[Scalar]], ncols: int) -> List[List[QComplex]]:
    """Null-space basis of the matrix with the given rows, by fraction-free-ish
    Gaussian elimination over Q(i).  Returns basis vectors of length ncols;
    free variables are set to 1 one at a time."""
    mat = [[_qc(x) for x in row] for row in rows]
    for row in mat:
        if len(row) != ncols:
            raise ValueError("row width mismatch")
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if not mat[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][c]
        mat[r] = [x / inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and not mat[i][c].is_zero():
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [QC0] * ncols
        v[fc] = QC1
        for ri, pc in enumerate(pivots):
            v[pc] = -mat[ri][fc]
        basis.append(v)
    return basis


def exact_rank(rows: Sequence[Sequence[Scalar]], ncols: int) -> int:
    return ncols - len(exact_null_space(rows, ncols))
