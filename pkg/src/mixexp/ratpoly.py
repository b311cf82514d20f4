"""Dense univariate polynomials with exact rational coefficients.

Coefficients are stored lowest power first as :class:`fractions.Fraction`
values, with trailing zeros stripped so that equality is structural.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and "p/q" strings to Fraction; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class RatPoly:
    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs = tuple(cs)

    @classmethod
    def constant(cls, c) -> "RatPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "RatPoly":
        return cls([0, 1])

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self._coeffs):
            return self._coeffs[i]
        return Fraction(0)

    def __iter__(self):
        return iter(self._coeffs)

    def __len__(self):
        return len(self._coeffs)

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self._coeffs == RatPoly([other])._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    @staticmethod
    def _coerce(other) -> "RatPoly":
        if isinstance(other, RatPoly):
            return other
        return RatPoly([as_fraction(other)])

    def __add__(self, other):
        return poly_add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(-c for c in self._coeffs)

    def __sub__(self, other):
        return poly_add(self, -self._coerce(other))

    def __rsub__(self, other):
        return poly_add(self._coerce(other), -self)

    def __mul__(self, other):
        if isinstance(other, RatPoly):
            return poly_mul(self, other)
        c = as_fraction(other)
        return RatPoly(c * a for a in self._coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        if c == 0:
            raise ZeroDivisionError("polynomial division by zero scalar")
        return RatPoly(a / c for a in self._coeffs)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        out = RatPoly([1])
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __call__(self, x):
        return poly_eval(self, x)

    def derivative(self) -> "RatPoly":
        return poly_derivative(self)

    def to_strings(self) -> list:
        """Coefficient list rendered as "p/q" strings (JSON form)."""
        return [fraction_str(c) for c in self._coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "RatPoly":
        return cls(Fraction(s) for s in items)

    def __repr__(self):
        return f"RatPoly({self})"

    def __str__(self):
        return render(self)


def fraction_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_add(p: RatPoly, q: RatPoly) -> RatPoly:
    n = max(len(p), len(q))
    return RatPoly(p[i] + q[i] for i in range(n))


def poly_mul(p: RatPoly, q: RatPoly) -> RatPoly:
    if p.is_zero() or q.is_zero():
        return RatPoly()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(q.coeffs):
            out[i + j] += a * b
    return RatPoly(out)


def poly_derivative(p: RatPoly) -> RatPoly:
    return RatPoly(i * c for i, c in enumerate(p.coeffs) if i > 0)


def poly_eval(p: RatPoly, x):
    """Horner evaluation. Exact for rational ``x``; floats are accepted too."""
    if isinstance(x, float):
        acc = 0.0
        for c in reversed(p.coeffs):
            acc = acc * x + float(c)
        return acc
    x = as_fraction(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def render(p: RatPoly, var: str = "x") -> str:
    """Render as ``c0 + c1*x + c2*x^2`` with rationals written as p/q."""
    if p.is_zero():
        return "0"
    parts = []
    for i, c in enumerate(p.coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = fraction_str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{fraction_str(mag)}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)
