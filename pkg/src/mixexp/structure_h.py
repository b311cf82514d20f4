"""Continuous structures: densities h_{n,k}(t) with a quadratic characteristic.

Each density satisfies

    h(t) d/dt h_{n,k}(t) = (k - n t) h_{n,k}(t),   h(t) = a t^2 + b t + c,

and only six triples (a, b, c) give a family of densities. The shape of the
density is fixed by the relation; the normalizing constant is computed
analytically here. The constants as originally printed are kept alongside so
that discrepancies can be audited (see :func:`normalization_audit`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import InadmissibleTriple, ParameterError, QuadratureError
from .quadrature import integrate

LOG_2PI = math.log(2 * math.pi)


def _log_comb(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _log_sinh(z):
    # log sinh(z) for z > 0 without overflow
    return z + math.log1p(-math.exp(-2 * z)) - math.log(2)


def _log_cosh(z):
    return z + math.log1p(math.exp(-2 * z)) - math.log(2)


def arctan_log_mass(n: int, k: int) -> float:
    """log of the integral of exp(k atan t) (1+t^2)^(-n/2) over the real line.

    Substituting t = tan(theta) gives the integral of e^{k theta} cos^{n-2}(theta)
    over (-pi/2, pi/2), which has the closed forms used below.
    """
    if n % 2 == 0:
        m = n // 2
        prod = sum(math.log(k * k + (2 * j) ** 2) for j in range(1, m))
        if k == 0:
            head = math.log(math.pi)  # 2 sinh(k pi/2)/k -> pi
        else:
            head = math.log(2) + _log_sinh(k * math.pi / 2) - math.log(k)
        return head + math.lgamma(2 * m - 1) - prod
    m = (n - 1) // 2
    prod = sum(math.log(k * k + (2 * j - 1) ** 2) for j in range(1, m + 1))
    return math.log(2) + _log_cosh(k * math.pi / 2) + math.lgamma(2 * m) - prod


def arctan_printed_log_inverse_constant(n: int, k: int) -> float:
    """log of (c_{n,k})^{-1} exactly as printed for the (1,0,1) structure.

    Even n: 2 sh(k pi/2) (2m-2)! / prod (k^2 + (2j)^2); odd n: 2 ch(k pi/2) (2m)! / prod (k^2 + (2j-1)^2).
    The even form vanishes at k = 0 (log returns -inf).
    """
    if n % 2 == 0:
        m = n // 2
        if k == 0:
            return -math.inf
        prod = sum(math.log(k * k + (2 * j) ** 2) for j in range(1, m))
        return math.log(2) + _log_sinh(k * math.pi / 2) + math.lgamma(2 * m - 1) - prod
    m = (n - 1) // 2
    prod = sum(math.log(k * k + (2 * j - 1) ** 2) for j in range(1, m + 1))
    return math.log(2) + _log_cosh(k * math.pi / 2) + math.lgamma(2 * m + 1) - prod


@dataclass(frozen=True)
class QuadraticTriple:
    a: Fraction
    b: Fraction
    c: Fraction

    @classmethod
    def of(cls, a, b, c) -> "QuadraticTriple":
        return cls(Fraction(a), Fraction(b), Fraction(c))

    @classmethod
    def parse(cls, text: str) -> "QuadraticTriple":
        """Parse "a,b,c" or one of the aliases (beta, gamma, ...)."""
        text = text.strip()
        if text in ALIASES:
            return ALIASES[text]
        parts = [p.strip() for p in text.strip("()").split(",")]
        if len(parts) != 3:
            raise InadmissibleTriple(f"cannot parse triple {text!r}")
        return cls.of(*(Fraction(p) for p in parts))

    def h(self, t):
        return float(self.a) * t * t + float(self.b) * t + float(self.c)

    def as_tuple(self):
        return (self.a, self.b, self.c)

    def __str__(self):
        return ",".join(str(v) for v in self.as_tuple())


@dataclass(frozen=True)
class ContinuousStructure:
    """A structure H for one admissible triple.

    ``log_shape(n, k, t)`` is the unnormalized log density, ``log_norm(n, k)``
    the analytic log normalizing constant, ``printed_*`` the forms as printed.
    """

    name: str
    triple: QuadraticTriple
    support: tuple
    min_n: int
    log_shape: Callable
    log_norm: Callable
    printed_log_norm: Callable
    printed_log_shape: Callable
    max_k: Optional[Callable[[int], int]] = None
    printed_note: str = ""
    meta: dict = field(default_factory=dict)

    def __repr__(self):
        return f"ContinuousStructure({self.name!r}, triple=({self.triple}))"

    @property
    def heavy_tailed(self) -> bool:
        return self.triple.a > 0

    def check(self, n: int, k: int) -> None:
        if int(n) != n or n < self.min_n:
            raise ParameterError(f"{self.name}: n must be an integer >= {self.min_n}, got {n}")
        if int(k) != k or k < 0:
            raise ParameterError(f"k must be a nonnegative integer, got {k}")
        if self.max_k is not None and k > self.max_k(n):
            raise ParameterError(f"{self.name}: k={k} exceeds {self.max_k(n)} for n={n}")

    def moment_limit(self, n: int) -> float:
        """Moments of order p exist iff p < moment_limit(n)."""
        return n - 1 if self.heavy_tailed else math.inf

    def is_atom(self, n: int, k: int) -> bool:
        """True when the density degenerates to a point mass at 0.

        Only (1,0,0) with k = 0: the characteristic t^2 forces t^{-n}, which is
        not integrable; the k -> 0 limit of the family is the unit mass at 0.
        """
        return self.name == "invgamma" and k == 0

    def norm_const(self, n: int, k: int) -> float:
        self.check(n, k)
        if self.is_atom(n, k):
            return math.nan
        return math.exp(self.log_norm(n, k))

    def logpdf(self, n: int, k: int, t):
        self.check(n, k)
        t = np.asarray(t, dtype=float)
        lo, hi = self.support
        inside = (t >= lo) & (t <= hi)
        if self.is_atom(n, k):
            return np.where(t == 0.0, np.inf, -np.inf)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = self.log_shape(n, k, np.where(inside, t, 0.5 * (max(lo, -1.0) + min(hi, 1.0))))
        out = np.where(inside, vals + self.log_norm(n, k), -np.inf)
        return np.where(np.isnan(out), -np.inf, out)

    def density(self, n: int, k: int, t):
        """h_{n,k}(t); zero outside the support. Scalar in, scalar out."""
        vals = np.exp(self.logpdf(n, k, t))
        return float(vals) if np.ndim(vals) == 0 else vals

    def printed_density(self, n: int, k: int, t):
        """The density with the constant and shape exactly as printed."""
        t = np.asarray(t, dtype=float)
        lo, hi = self.support
        inside = (t > lo) & (t < hi) if math.isinf(lo) or math.isinf(hi) else (t >= lo) & (t <= hi)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = np.exp(self.printed_log_shape(n, k, t) + self.printed_log_norm(n, k))
        out = np.where(inside, vals, 0.0)
        out = np.where(np.isnan(out), 0.0, out)
        return float(out) if out.ndim == 0 else out

    def mean(self, n: int, k: int) -> Fraction:
        """First moment (k + b)/(n - 2a)."""
        a, b, _ = self.triple.as_tuple()
        if n <= 2 * a:
            raise ParameterError(f"mean requires n > 2a, got n={n}")
        return (k + b) / (n - 2 * a)

    def window(self, n: int, k: int):
        """Centre and spread used to seed quadrature breakpoints."""
        centre = float(self.mean(n, k)) if n > 2 * self.triple.a else k / n
        spread = math.sqrt(max(self.triple.h(centre), self.triple.h(k / n), 1.0 / (n * n)) / n)
        return centre, spread

    def breakpoints(self, n: int, k: int, extra=()):
        centre, s = self.window(n, k)
        lo, hi = self.support
        pts = [centre + s * z for z in (-60, -30, -15, -8, -4, -2, 0, 2, 4, 8, 15, 30, 60, 200)]
        pts.extend(extra)
        return sorted(p for p in pts if lo < p < hi)

    def expect(self, n: int, k: int, f, points=(), abs_tol: float = 1e-11, rel_tol: float = 1e-12) -> float:
        """Integral of f(t) h_{n,k}(t) dt over the support.

        ``f`` must accept numpy arrays. ``points`` marks kinks of f.
        """
        self.check(n, k)
        if self.is_atom(n, k):
            return float(np.asarray(f(np.array([0.0])), dtype=float)[0])
        log_c = self.log_norm(n, k)
        lo, hi = self.support

        def integrand(t):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                p = np.exp(self.log_shape(n, k, t) + log_c)
                p = np.where(np.isnan(p), 0.0, p)
                fv = np.asarray(f(t), dtype=float)
                out = fv * p
            return np.where(p == 0.0, 0.0, out)

        value, _ = integrate(integrand, lo, hi, points=self.breakpoints(n, k, points),
                             abs_tol=abs_tol, rel_tol=rel_tol)
        return value

    def normalization_check(self, n: int, k: int) -> float:
        return self.expect(n, k, np.ones_like)


ALIASES: dict = {}


def _t(a, b, c):
    return QuadraticTriple.of(a, b, c)


def _make_all() -> dict:
    inf = math.inf
    out = {}

    # (-1,1,0): (n+1) C(n,k) t^k (1-t)^{n-k} on [0,1]
    def beta_norm(n, k):
        return math.log(n + 1) + _log_comb(n, k)

    out["beta"] = ContinuousStructure(
        "beta", _t(-1, 1, 0), (0.0, 1.0), 1,
        log_shape=lambda n, k, t: xlogy(k, t) + xlogy(n - k, 1 - t),
        log_norm=beta_norm, printed_log_norm=beta_norm,
        printed_log_shape=lambda n, k, t: xlogy(k, t) + xlogy(n - k, 1 - t),
        max_k=lambda n: n,
    )

    # (1,1,0): t^k (1+t)^{-n-k} on (0,inf), n > 2
    out["betaprime"] = ContinuousStructure(
        "betaprime", _t(1, 1, 0), (0.0, inf), 3,
        log_shape=lambda n, k, t: xlogy(k, t) - (n + k) * np.log1p(t),
        log_norm=lambda n, k: math.log(n - 1) + _log_comb(n + k - 1, k),
        printed_log_norm=lambda n, k: math.log(n - 1) + _log_comb(n + k, k),
        printed_log_shape=lambda n, k, t: xlogy(k, t) - (n + k) * np.log1p(t),
        printed_note="printed constant (n-1)C(n+k,k) gives mass (n+k)/n; normalizing constant is (n-1)C(n+k-1,k)",
    )

    # (0,1,0): n^{k+1} t^k e^{-nt}/k! on (0,inf)
    def gamma_norm(n, k):
        return (k + 1) * math.log(n) - math.lgamma(k + 1)

    out["gamma"] = ContinuousStructure(
        "gamma", _t(0, 1, 0), (0.0, inf), 1,
        log_shape=lambda n, k, t: xlogy(k, t) - n * t,
        log_norm=gamma_norm, printed_log_norm=gamma_norm,
        printed_log_shape=lambda n, k, t: xlogy(k, t) - n * t,
    )

    # (1,0,0): k^{n-1} t^{-n} e^{-k/t} / Gamma(n-1) on (0,inf), n > 2
    def invgamma_norm(n, k):
        return (n - 1) * math.log(k) - math.lgamma(n - 1) if k > 0 else -math.inf

    out["invgamma"] = ContinuousStructure(
        "invgamma", _t(1, 0, 0), (0.0, inf), 3,
        log_shape=lambda n, k, t: -n * np.log(t) - k / t,
        log_norm=invgamma_norm, printed_log_norm=invgamma_norm,
        printed_log_shape=lambda n, k, t: -n * np.log(t) - k / n,
        printed_note="printed factor exp(-k/n) makes t^{-n} non-integrable at 0; exp(-k/t) is required",
    )

    # (0,0,1): sqrt(n/2pi) exp(-(k-nt)^2/(2n)) on R
    def gauss_norm(n, k):
        return 0.5 * (math.log(n) - LOG_2PI)

    out["gauss"] = ContinuousStructure(
        "gauss", _t(0, 0, 1), (-inf, inf), 1,
        log_shape=lambda n, k, t: -((k - n * t) ** 2) / (2 * n),
        log_norm=gauss_norm, printed_log_norm=gauss_norm,
        printed_log_shape=lambda n, k, t: -((k - n * t) ** 2) / (2 * n),
    )

    # (1,0,1): c exp(k atan t) (1+t^2)^{-n/2} on R, n > 2
    out["arctan"] = ContinuousStructure(
        "arctan", _t(1, 0, 1), (-inf, inf), 3,
        log_shape=lambda n, k, t: k * np.arctan(t) - 0.5 * n * np.log1p(t * t),
        log_norm=lambda n, k: -arctan_log_mass(n, k),
        printed_log_norm=lambda n, k: -arctan_printed_log_inverse_constant(n, k),
        printed_log_shape=lambda n, k, t: k * np.arctan(t) - 0.5 * n * np.log1p(t * t),
        printed_note="printed even-n constant lacks a factor 1/k; odd-n constant has (2m)! where (2m-1)! is required",
    )
    return out


STRUCTURES = _make_all()
ALIASES.update({name: s.triple for name, s in STRUCTURES.items()})
_BY_TRIPLE = {s.triple: s for s in STRUCTURES.values()}
ADMISSIBLE_TRIPLES = tuple(_BY_TRIPLE)


def builtin_h(triple) -> ContinuousStructure:
    """The structure for an admissible triple, an alias name or an "a,b,c" string."""
    if isinstance(triple, str):
        triple = QuadraticTriple.parse(triple)
    elif isinstance(triple, tuple):
        triple = QuadraticTriple.of(*triple)
    try:
        return _BY_TRIPLE[triple]
    except KeyError:
        raise InadmissibleTriple(
            f"({triple}) is not one of the admissible triples "
            + ", ".join(f"({t})" for t in ADMISSIBLE_TRIPLES)
        ) from None


def density(structure: ContinuousStructure, n: int, k: int, t):
    return structure.density(n, k, t)


def normalization_check(structure: ContinuousStructure, n: int, k: int) -> float:
    return structure.normalization_check(n, k)


def printed_mass(structure: ContinuousStructure, n: int, k: int) -> float:
    """Total mass of the density exactly as printed (inf when it diverges)."""
    structure.check(n, k)
    log_c = structure.printed_log_norm(n, k)
    if structure.name == "invgamma":
        # t^{-n} e^{-k/n} with n > 2 diverges at t -> 0+ unless the constant k^{n-1} vanishes
        return 0.0 if k == 0 else math.inf
    if math.isinf(log_c):
        return 0.0 if log_c < 0 else math.inf
    # printed constant differs from the analytic one by a factor; shapes agree
    return math.exp(log_c - structure.log_norm(n, k)) * structure.normalization_check(n, k)


def printed_mass_above(structure: ContinuousStructure, n: int, k: int, eps: float) -> float:
    """Quadrature mass of the printed density restricted to t >= eps.

    For a printed formula that is not integrable at the left end of the
    support this grows without bound as eps -> 0, which is the measurable
    form of the divergence.
    """
    structure.check(n, k)
    lo, hi = structure.support
    start = max(lo, eps)
    val, _ = integrate(lambda t: structure.printed_density(n, k, t), start, hi)
    return val


TRUNCATION_PROBES = (1e-1, 1e-2, 1e-3)


def normalization_audit(n: int = 6, ks=(0, 1, 3)) -> list:
    """Measured mass of every structure, analytic and as printed.

    One record per (structure, k) with the quadrature mass of the analytic
    density, the mass of the printed formula, and a discrepancy flag.
    """
    records = []
    for s in STRUCTURES.values():
        for k in ks:
            if s.max_k is not None and k > s.max_k(n):
                continue
            if s.is_atom(n, k):
                mass = 1.0
                note = "point mass at 0 (k=0 limit)"
            else:
                mass = s.normalization_check(n, k)
                note = ""
            pm = printed_mass(s, n, k)
            flagged = not (math.isfinite(pm) and abs(pm - 1.0) <= 1e-8)
            records.append({
                "structure": s.name,
                "triple": str(s.triple),
                "n": n,
                "k": k,
                "mass": mass,
                "printed_mass": pm,
                "printed_discrepancy": flagged,
                "note": s.printed_note if flagged else note,
            })
            if not math.isfinite(pm) and math.isfinite(s.printed_log_norm(n, k)):
                records[-1]["printed_mass_above"] = {
                    format(eps, "g"): printed_mass_above(s, n, k, eps) for eps in TRUNCATION_PROBES
                }
    return records
