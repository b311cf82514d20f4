"""Test functions f and their moduli of continuity."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class ModulusOfContinuity:
    """omega(delta), nonnegative, nondecreasing, omega(0) = 0."""

    evaluate: Callable[[float], float]
    name: str = "omega"

    def __call__(self, delta: float) -> float:
        if delta < 0:
            raise ValueError("delta must be nonnegative")
        return float(self.evaluate(delta))

    @classmethod
    def lipschitz(cls, L: float = 1.0) -> "ModulusOfContinuity":
        return cls(lambda d: L * d, f"lipschitz({L:g})")

    @classmethod
    def zero(cls) -> "ModulusOfContinuity":
        return cls(lambda d: 0.0, "zero")

    def looks_valid(self, deltas: Sequence[float] = ()) -> bool:
        """Spot-check omega(0)=0, monotonicity and subadditivity on sample points."""
        ds = sorted(deltas) or [0.0, 1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0]
        if self(0.0) != 0.0:
            return False
        vals = [self(d) for d in ds]
        if any(v < 0 for v in vals) or any(b < a for a, b in zip(vals, vals[1:])):
            return False
        return all(self(d1 + d2) <= self(d1) + self(d2) + 1e-15 for d1 in ds for d2 in ds)


@dataclass(frozen=True)
class TestFunction:
    """A vectorised function f(t) with optional modulus.

    ``growth`` is the polynomial order of |f(t)| as |t| grows; it decides
    integrability against heavy-tailed kernels. ``kinks`` are points where f
    is not smooth and are passed to the quadrature as breakpoints.
    """

    __test__ = False  # not a pytest class

    name: str
    func: Callable
    modulus: Optional[ModulusOfContinuity] = None
    growth: float = 0.0
    kinks: tuple = field(default=())

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))


def constant(c: float = 1.0) -> TestFunction:
    return TestFunction(f"const({c:g})", lambda t: np.full_like(t, c, dtype=float), ModulusOfContinuity.zero(), 0.0)


def monomial(m: int) -> TestFunction:
    if m == 0:
        return constant(1.0)
    mod = ModulusOfContinuity.lipschitz(1.0) if m == 1 else None
    return TestFunction(f"t^{m}", lambda t: t**m, mod, float(m))


def polynomial(coeffs: Sequence[float]) -> TestFunction:
    cs = [float(c) for c in coeffs]
    deg = max((i for i, c in enumerate(cs) if c != 0), default=0)
    return TestFunction(
        "poly(" + ",".join(f"{c:g}" for c in cs) + ")",
        lambda t: np.polynomial.polynomial.polyval(t, cs), None, float(deg),
    )


def central_power(center: float, m: int) -> TestFunction:
    center = float(center)
    return TestFunction(f"(t-{center:.17g})^{m}", lambda t: (t - center) ** m, None, float(m))


def abs_shift(c: float) -> TestFunction:
    c = float(c)
    return TestFunction(f"|t-{c:g}|", lambda t: np.abs(t - c), ModulusOfContinuity.lipschitz(1.0), 1.0, (c,))


def sine() -> TestFunction:
    return TestFunction("sin", np.sin, ModulusOfContinuity(lambda d: min(d, 2.0), "min(d,2)"), 0.0)


def clipped(lo: float, hi: float) -> TestFunction:
    lo, hi = float(lo), float(hi)
    return TestFunction(
        f"clip({lo:g},{hi:g})", lambda t: np.clip(t, lo, hi),
        ModulusOfContinuity(lambda d: min(d, hi - lo), f"min(d,{hi - lo:g})"), 0.0, (lo, hi),
    )


def tabulated(xs: Sequence[float], ys: Sequence[float], name: str = "table") -> TestFunction:
    """Piecewise linear interpolation, constant beyond the table ends."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("tabulated function needs >= 2 strictly increasing abscissae")
    L = float(np.max(np.abs(np.diff(ys) / np.diff(xs))))
    return TestFunction(name, lambda t: np.interp(t, xs, ys), ModulusOfContinuity.lipschitz(L), 0.0, tuple(xs))


def load_table(path: str) -> TestFunction:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    try:
        pts = [(float(a), float(b)) for a, b, *_ in rows]
    except ValueError:
        pts = [(float(a), float(b)) for a, b, *_ in rows[1:]]
    xs, ys = zip(*pts)
    return tabulated(xs, ys, name=f"table({path})")


def parse_function(spec: str) -> TestFunction:
    """Build a test function from a short name.

    Accepted: one, t, t^m, abs:c, sin, clip:lo:hi, poly:c0:c1:..., table:path
    """
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    if spec in ("one", "1", "const"):
        return constant(1.0)
    if spec == "t":
        return monomial(1)
    if spec.startswith("t^"):
        return monomial(int(spec[2:]))
    if head == "abs":
        return abs_shift(float(_ratio(args[0])) if args else 0.5)
    if spec == "sin":
        return sine()
    if head == "clip":
        return clipped(float(_ratio(args[0])), float(_ratio(args[1])))
    if head == "poly":
        return polynomial([float(_ratio(a)) for a in args])
    if head == "table":
        return load_table(rest)
    raise ValueError(f"unknown function {spec!r}")


def _ratio(s: str):
    from fractions import Fraction

    return Fraction(s)
