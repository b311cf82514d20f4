"""Discrete structures: integer-valued families b_{n,k}(x) built from a power series.

Given a power series omega(y) = sum a_k y^k with a_k >= 0, the weights

    b_{n,k}(x) = b_k y(x)^k / omega(y(x))^n

where b_k are the coefficients of omega^n and y(x) inverts x = y omega'(y)/omega(y),
have mean n*x and variance n*b(x), with b(x) = y(x)/y'(x).  They satisfy

    b(x) d/dx b_{n,k}(x) = (k - n x) b_{n,k}(x).

Four families have closed forms (binomial, Poisson, negative binomial, Catalan);
any other family is handled generically from a finite coefficient prefix.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import ConvergenceError, DomainError, ParameterError, TruncationError, UnknownFamily
from .ratpoly import RatPoly

TAIL_MASS = 1e-14
DEFAULT_MAX_K = 10_000


@dataclass(frozen=True)
class PowerSeriesFamily:
    """Generating function omega(y) with nonnegative coefficients and radius of convergence."""

    name: str
    coeff: Callable[[int], Fraction]
    radius: float
    omega: Callable[[float], float]
    omega_prime: Callable[[float], float]
    omega_second: Callable[[float], float]
    # number of nonzero-capable coefficients for a finite polynomial, else None
    degree: Optional[int] = None

    @classmethod
    def from_coefficients(cls, name: str, coeffs, radius: float = math.inf) -> "PowerSeriesFamily":
        """Family given by a finite coefficient prefix a_0, a_1, ..., a_d."""
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            raise ValueError("omega must have at least one nonzero coefficient")
        if any(c < 0 for c in cs):
            raise ValueError("omega coefficients must be nonnegative")
        if cs[0] <= 0:
            raise ValueError("omega(0) must be positive")
        fl = np.array([float(c) for c in cs])
        d1 = np.polynomial.polynomial.polyder(fl)
        d2 = np.polynomial.polynomial.polyder(fl, 2)
        pv = np.polynomial.polynomial.polyval

        def coeff(k: int) -> Fraction:
            return cs[k] if 0 <= k < len(cs) else Fraction(0)

        return cls(
            name=name,
            coeff=coeff,
            radius=float(radius),
            omega=lambda y: float(pv(y, fl)),
            omega_prime=lambda y: float(pv(y, d1)) if len(d1) else 0.0,
            omega_second=lambda y: float(pv(y, d2)) if len(d2) else 0.0,
            degree=len(cs) - 1,
        )

    def x_of_y(self, y: float) -> float:
        return y * self.omega_prime(y) / self.omega(y)

    def dx_dy(self, y: float) -> float:
        w, w1, w2 = self.omega(y), self.omega_prime(y), self.omega_second(y)
        return w1 / w + y * (w2 * w - w1 * w1) / (w * w)


def _series_power(coeffs: list, n: int, K: int) -> list:
    """Coefficients 0..K of (sum coeffs[i] y^i)^n, exact, by binary powering."""
    def mul(p, q):
        out = [0] * min(len(p) + len(q) - 1, K + 1)
        for i, a in enumerate(p):
            if a == 0:
                continue
            for j in range(min(len(q), K + 1 - i)):
                out[i + j] += a * q[j]
        return out

    result = [Fraction(1)]
    base = list(coeffs[: K + 1])
    e = n
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result + [Fraction(0)] * (K + 1 - len(result))


class DiscreteStructure:
    """A structure B: weights b_{n,k}(x) on the domain X = [lo, hi].

    Built-in families pass closed forms for the inverse map, log-weights and
    covariance characteristic; a generic family falls back on numeric
    inversion and the exact coefficient table of omega^n.
    """

    def __init__(
        self,
        family: PowerSeriesFamily,
        domain: tuple,
        covariance: Optional[RatPoly] = None,
        y_of_x: Optional[Callable[[float], float]] = None,
        log_weights: Optional[Callable] = None,
        exact_weight: Optional[Callable] = None,
        support_size: Optional[Callable[[int], int]] = None,
    ):
        self.family = family
        self.name = family.name
        self.domain = (float(domain[0]), float(domain[1]))
        self.covariance = covariance
        self._y_of_x = y_of_x
        self._log_weights = log_weights
        self._exact_weight = exact_weight
        self._support_size = support_size
        self._table_cache: dict = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"DiscreteStructure({self.name!r}, X=[{self.domain[0]}, {self.domain[1]}])"

    # -- domain helpers -------------------------------------------------
    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        return lo <= x <= hi

    def _check(self, x):
        if not (isinstance(x, (int, float, Fraction, np.floating, np.integer)) and self.contains(float(x))):
            raise DomainError(f"x={x} outside X={list(self.domain)} for {self.name}")

    def max_k(self, n: int) -> Optional[int]:
        """Largest k with nonzero weight, or None for infinite support."""
        if self._support_size is not None:
            return self._support_size(n)
        if self.family.degree is not None:
            return n * self.family.degree
        return None

    # -- inverse map and characteristic --------------------------------
    def solve_y(self, x: float) -> float:
        """The y with x = y omega'(y)/omega(y)."""
        self._check(x)
        x = float(x)
        if self._y_of_x is not None:
            y = self._y_of_x(x)
            if not math.isfinite(y):
                raise DomainError(f"x={x} is on the boundary of X where y(x) is infinite")
            return y
        return self._invert(x)

    def _invert(self, x: float) -> float:
        fam = self.family
        if x == 0.0:
            return 0.0
        if x >= self.domain[1]:
            raise DomainError(f"x={x} not in the interior of X")
        cap = fam.radius * (1 - 1e-12) if math.isfinite(fam.radius) else math.inf
        hi = min(1.0, cap)
        while fam.x_of_y(hi) <= x:
            if hi >= cap:
                raise ConvergenceError(f"could not bracket y for x={x}")
            hi = min(hi * 2.0, cap)
        lo = 0.0
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            if fam.x_of_y(mid) < x:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, hi):
                break
        y = 0.5 * (lo + hi)
        for _ in range(3):
            d = fam.dx_dy(y)
            if d <= 0:
                break
            step = (fam.x_of_y(y) - x) / d
            y_new = y - step
            if not (0 < y_new < cap):
                break
            y = y_new
        if abs(fam.x_of_y(y) - x) > 1e-14 * max(1.0, abs(x)) * 10:
            raise ConvergenceError(f"inverse map did not converge at x={x}")
        return y

    def covariance_characteristic(self, x: float) -> float:
        self._check(x)
        if self.covariance is not None:
            return float(self.covariance(float(x)))
        y = self.solve_y(x)
        return y * self.family.dx_dy(y)

    def fisher_information(self, n: int, x: float) -> float:
        b = self.covariance_characteristic(x)
        if b <= 0:
            raise DomainError(f"b(x)=0 at x={x}: Fisher information undefined")
        return n / b

    # -- weights ---------------------------------------------------------
    def coefficient_table(self, n: int, K: int) -> list:
        """Exact coefficients b_0..b_K of omega(y)^n (cached per n)."""
        with self._lock:
            table = self._table_cache.get(n)
            if table is not None and len(table) > K:
                return table[: K + 1]
        coeffs = [self.family.coeff(i) for i in range(K + 1)]
        table = _series_power(coeffs, n, K)
        with self._lock:
            old = self._table_cache.get(n)
            if old is None or len(old) < len(table):
                self._table_cache[n] = table
        return table

    def log_weights(self, n: int, ks: np.ndarray, x: float) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        if self._log_weights is not None:
            return self._log_weights(n, ks, float(x))
        y = self.solve_y(x)
        table = self.coefficient_table(n, int(ks.max()) if ks.size else 0)
        out = np.full(ks.shape, -np.inf)
        log_omega = math.log(self.family.omega(y))
        for i, k in enumerate(ks.astype(int)):
            bk = table[k]
            if bk > 0:
                lb = math.log(bk.numerator) - math.log(bk.denominator)
                out[i] = lb + (k * math.log(y) if k else 0.0) - n * log_omega
        return out

    def weight(self, n: int, k: int, x: float) -> float:
        _check_n(n)
        self._check(x)
        if k < 0:
            return 0.0
        top = self.max_k(n)
        if top is not None and k > top:
            return 0.0
        return float(np.exp(self.log_weights(n, np.array([k]), x))[0])

    def exact_weight(self, n: int, k: int, x) -> Fraction:
        """Weight as an exact rational, for families where it is rational in x."""
        if self._exact_weight is None:
            raise NotImplementedError(f"{self.name} weights are not rational in x")
        x = Fraction(x)
        self._check(x)
        return self._exact_weight(n, k, x)

    def chebyshev_cutoff(self, n: int, x: float) -> int:
        b = max(self.covariance_characteristic(x), 0.0)
        return int(math.ceil(n * x + 12.0 * math.sqrt(n * b) + 20))

    def weights(self, n: int, x: float, tail: float = TAIL_MASS, max_k: int = DEFAULT_MAX_K) -> np.ndarray:
        """Weights b_{n,0..K}(x) with K from the truncation rule.

        K is the larger of the smallest index whose omitted right tail is
        below ``tail`` and the Chebyshev-style floor n x + 12 sqrt(n b(x)) + 20.
        The omitted mass is summed from the small end (1 - cumsum would lose
        it to rounding) and the part past the computed range is bounded
        geometrically using the last weight ratio.
        """
        _check_n(n)
        self._check(x)
        x = float(x)
        top = self.max_k(n)
        floor = self.chebyshev_cutoff(n, x)
        if floor > max_k and (top is None or top > max_k):
            raise TruncationError(f"{self.name}: n={n}, x={x} needs more than max_k={max_k} terms")
        K = min(2 * floor, max_k)
        # coefficient ratios of omega^n tend to 1/R, so weight ratios tend to y/R
        r_limit = self.solve_y(x) / self.family.radius if math.isfinite(self.family.radius) else 0.0
        while True:
            if top is not None and K >= top:
                return np.exp(self.log_weights(n, np.arange(top + 1), x))
            w = np.exp(self.log_weights(n, np.arange(K + 1), x))
            beyond = _geometric_tail(w, r_limit)
            if beyond <= 0.01 * tail:
                # right[j] = mass at indices >= j, accumulated from the far end
                right = np.cumsum(w[::-1])[::-1] + beyond
                omitted = np.append(right[1:], beyond)
                k_mass = int(np.argmax(omitted < tail))
                return w[: max(k_mass, floor) + 1]
            if K >= max_k:
                raise TruncationError(
                    f"{self.name}: tail mass above {tail} after max_k={max_k} terms (n={n}, x={x})"
                )
            K = min(2 * K, max_k)


def _geometric_tail(w: np.ndarray, r_limit: float = 0.0) -> float:
    """Mass past the last weight, if later ratios stay below max(last ratio, r_limit)."""
    last = float(w[-1])
    if last == 0.0:
        return 0.0
    if len(w) < 2 or w[-2] <= 0.0:
        return math.inf
    r = max(last / float(w[-2]), r_limit)
    if r >= 1.0:
        return math.inf
    return last * r / (1.0 - r)


def _check_n(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")


# -- built-in families ------------------------------------------------------

def _binomial() -> DiscreteStructure:
    fam = PowerSeriesFamily.from_coefficients("binomial", [1, 1])

    def logw(n, ks, x):
        valid = ks <= n
        kk = np.where(valid, ks, 0)
        out = gammaln(n + 1) - gammaln(kk + 1) - gammaln(n - kk + 1) + xlogy(kk, x) + xlogy(n - kk, 1 - x)
        return np.where(valid, out, -np.inf)

    def exact(n, k, x):
        if k < 0 or k > n:
            return Fraction(0)
        return math.comb(n, k) * x**k * (1 - x) ** (n - k)

    return DiscreteStructure(
        fam, (0, 1), RatPoly([0, 1, -1]),
        y_of_x=lambda x: x / (1 - x) if x < 1 else math.inf,
        log_weights=logw, exact_weight=exact, support_size=lambda n: n,
    )


def _poisson() -> DiscreteStructure:
    def coeff(k):
        return Fraction(1, math.factorial(k))

    fam = PowerSeriesFamily("poisson", coeff, math.inf, math.exp, math.exp, math.exp)

    def logw(n, ks, x):
        return -n * x + xlogy(ks, n * x) - gammaln(ks + 1)

    return DiscreteStructure(fam, (0, math.inf), RatPoly([0, 1]), y_of_x=lambda x: x, log_weights=logw)


def _negative_binomial() -> DiscreteStructure:
    fam = PowerSeriesFamily(
        "negative_binomial", lambda k: Fraction(1), 1.0,
        lambda y: 1 / (1 - y), lambda y: 1 / (1 - y) ** 2, lambda y: 2 / (1 - y) ** 3,
    )

    def logw(n, ks, x):
        return gammaln(n + ks) - gammaln(ks + 1) - gammaln(n) + xlogy(ks, x) - (n + ks) * math.log1p(x)

    def exact(n, k, x):
        if k < 0:
            return Fraction(0)
        return math.comb(n + k - 1, k) * x**k / (1 + x) ** (n + k)

    return DiscreteStructure(
        fam, (0, math.inf), RatPoly([0, 1, 1]), y_of_x=lambda x: x / (1 + x),
        log_weights=logw, exact_weight=exact,
    )


def _catalan_omega(y):
    if y == 0:
        return 1.0
    return (1 - math.sqrt(1 - 4 * y)) / (2 * y)


def _catalan() -> DiscreteStructure:
    # omega = C satisfies C = 1 + y C^2, so C' = C^2 / (1 - 2 y C).
    def w1(y):
        c = _catalan_omega(y)
        return c * c / (1 - 2 * y * c)

    def w2(y):
        c = _catalan_omega(y)
        cp = w1(y)
        s = 1 - 2 * y * c
        return (2 * c * cp * s + c * c * 2 * (c + y * cp)) / (s * s)

    fam = PowerSeriesFamily(
        "catalan", lambda k: Fraction(math.comb(2 * k, k), k + 1), 0.25, _catalan_omega, w1, w2,
    )

    def logw(n, ks, x):
        return (
            np.log(n / (2 * ks + n))
            + gammaln(2 * ks + n + 1) - gammaln(ks + 1) - gammaln(ks + n + 1)
            + xlogy(ks, x) + (n + ks) * math.log1p(x) - (n + 2 * ks) * math.log1p(2 * x)
        )

    def exact(n, k, x):
        if k < 0:
            return Fraction(0)
        return Fraction(n, 2 * k + n) * math.comb(2 * k + n, k) * x**k * (1 + x) ** (n + k) / (1 + 2 * x) ** (n + 2 * k)

    return DiscreteStructure(
        fam, (0, math.inf), RatPoly([0, 1, 3, 2]),
        y_of_x=lambda x: x * (1 + x) / (1 + 2 * x) ** 2,
        log_weights=logw, exact_weight=exact,
    )


_BUILDERS = {
    "binomial": _binomial,
    "poisson": _poisson,
    "negative_binomial": _negative_binomial,
    "catalan": _catalan,
}
FAMILY_NAMES = tuple(_BUILDERS)


def builtin_family(name: str) -> DiscreteStructure:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise UnknownFamily(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}") from None


def custom_family(name: str, coeffs, radius: float = math.inf) -> DiscreteStructure:
    """Structure generated by a finite coefficient prefix of omega.

    The domain is [0, x(R)) where x(R) is the supremum of y omega'/omega.
    """
    fam = PowerSeriesFamily.from_coefficients(name, coeffs, radius)
    if math.isfinite(fam.radius):
        hi = fam.x_of_y(fam.radius * (1 - 1e-12))
    else:
        hi = float(fam.degree)
    # The open right end is represented by the closest float below it.
    return DiscreteStructure(fam, (0.0, math.nextafter(hi, 0.0)))
