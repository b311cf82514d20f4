"""Exact central-moment recurrences.

* ``beta_moments``: central moments of a discrete structure about n x,
  beta_{m+1} = b(x) (beta_m' + n m beta_{m-1}).
* ``nu_moments``: central moments of a continuous structure about its mean.
* ``mu_moments``: central moments of the mixture sum_k b_{n,k}(x) h_{n,k}(t)
  about alpha(x) = (n x + b)/(n - 2a).

All arithmetic is over Fractions; n is a fixed integer for each table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ParameterError
from .ratpoly import RatPoly, as_fraction, fraction_str

M_MAX = 12


def _check_mmax(m_max):
    if not 0 <= m_max <= M_MAX:
        raise ParameterError(f"m_max must be in [0, {M_MAX}], got {m_max}")


@dataclass(frozen=True)
class MomentTableB:
    n: int
    entries: tuple
    family: Optional[str] = None

    def __getitem__(self, m):
        return self.entries[m]

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> dict:
        return {
            "kind": "beta",
            "family": self.family,
            "n": self.n,
            "triple": None,
            "moments": [p.to_strings() for p in self.entries],
        }


@dataclass(frozen=True)
class MomentTableH:
    a: Fraction
    b: Fraction
    c: Fraction
    n: int
    k: int
    alpha1: Fraction
    entries: tuple

    def __getitem__(self, m):
        return self.entries[m]

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> dict:
        return {
            "kind": "nu",
            "family": None,
            "n": self.n,
            "k": self.k,
            "triple": f"{fraction_str(self.a)},{fraction_str(self.b)},{fraction_str(self.c)}",
            "alpha1": fraction_str(self.alpha1),
            "moments": [[fraction_str(v)] for v in self.entries],
        }


@dataclass(frozen=True)
class MomentTablePhillips:
    n: int
    alpha: RatPoly
    entries: tuple
    triple: tuple = ()
    family: Optional[str] = None

    def __getitem__(self, m):
        return self.entries[m]

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> dict:
        return {
            "kind": "mu",
            "family": self.family,
            "n": self.n,
            "triple": ",".join(fraction_str(v) for v in self.triple) if self.triple else None,
            "alpha": self.alpha.to_strings(),
            "moments": [p.to_strings() for p in self.entries],
        }


def beta_moments(b_poly: RatPoly, n, m_max: int, family: Optional[str] = None) -> MomentTableB:
    _check_mmax(m_max)
    n = as_fraction(n)
    table = [RatPoly([1]), RatPoly()]
    for m in range(1, m_max):
        table.append(b_poly * (table[m].derivative() + n * m * table[m - 1]))
    return MomentTableB(int(n) if n.denominator == 1 else n, tuple(table[: m_max + 1]), family)


def double_factorial(k: int) -> int:
    if k <= 0:
        return 1
    return math.prod(range(k, 0, -2))


def asymptotic_coefficient(m: int) -> Fraction:
    """Leading coefficient c_m of beta_m as n grows.

    beta_{2r} ~ c n^r b^r and beta_{2r+1} ~ c n^r b^r b' with
    c_{2r} = (2r-1)!! and c_{2r+1} = (2r)!!/2 * sum_{i<r} (2i+1)!!/(2i)!!.
    """
    if m < 2:
        raise ValueError("asymptotic coefficients are defined for m >= 2")
    r, odd = divmod(m, 2)
    if not odd:
        return Fraction(double_factorial(2 * r - 1))
    s = sum(Fraction(double_factorial(2 * i + 1), double_factorial(2 * i)) for i in range(r))
    return Fraction(double_factorial(2 * r), 2) * s


def h_alpha1(a, b, c, n: int, k: int) -> Fraction:
    a, b = as_fraction(a), as_fraction(b)
    if n <= 2 * a:
        raise ParameterError(f"first moment needs n > 2a (n={n}, a={a})")
    return (k + b) / (n - 2 * a)


def nu_moments(a, b, c, n: int, k: int, m_max: int) -> MomentTableH:
    """Central moments nu_0..nu_{m_max} of h_{n,k} for h(t) = a t^2 + b t + c.

    (n - a(m+1)) nu_m = (m(2a alpha1 + b) - (n alpha1 - k)) nu_{m-1}
                        + (m-1)(a alpha1^2 + b alpha1 + c) nu_{m-2}
    """
    _check_mmax(m_max)
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    al = h_alpha1(a, b, c, n, k)
    slope = 2 * a * al + b
    level = a * al * al + b * al + c
    nu = [Fraction(1), Fraction(0)]
    for m in range(2, m_max + 1):
        den = n - a * (m + 1)
        if den <= 0:
            raise ParameterError(f"moment of order {m} needs n > a(m+1) = {a * (m + 1)}, got n={n}")
        nu.append(((m * slope - (n * al - k)) * nu[m - 1] + (m - 1) * level * nu[m - 2]) / den)
    return MomentTableH(a, b, c, n, k, al, tuple(nu[: m_max + 1]))


def nu2_closed_form(a, b, c, n: int, k: int) -> Fraction:
    """nu_2 = (k+b)(ak+bn-ab)/((n-2a)^2 (n-3a)) + c/(n-3a)."""
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    return (k + b) * (a * k + b * n - a * b) / ((n - 2 * a) ** 2 * (n - 3 * a)) + c / (n - 3 * a)


def phillips_alpha(b_coeff, a_coeff, n: int) -> RatPoly:
    """alpha(x) = (n x + b)/(n - 2a), the mean of the mixture."""
    a, b = as_fraction(a_coeff), as_fraction(b_coeff)
    den = n - 2 * a
    if den <= 0:
        raise ParameterError(f"alpha(x) needs n > 2a (n={n}, a={a})")
    return RatPoly([b / den, Fraction(n) / den])


def mu_moments(b_poly: RatPoly, a, b, c, n: int, m_max: int, family: Optional[str] = None) -> MomentTablePhillips:
    """Central moments of the mixture as polynomials in x.

    Writing h(t) about alpha as A + B (t - alpha) + a (t - alpha)^2 and
    integrating h h'_{n,k} (t-alpha)^m by parts (boundary terms vanish) gives

    (n - a(m+2)) mu_{m+1} = b(x) mu_m' + mu_m ((m+1) B - n (alpha - x))
                            + m mu_{m-1} (A + b(x) alpha')
    with A = a alpha^2 + b alpha + c and B = 2 a alpha + b.
    """
    _check_mmax(m_max)
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    alpha = phillips_alpha(b, a, n)
    X = RatPoly.x()
    A = a * alpha * alpha + b * alpha + c
    B = a * 2 * alpha + b
    shift = n * (alpha - X)
    lift = A + b_poly * alpha.derivative()
    mu = [RatPoly([1]), RatPoly()]
    for m in range(1, m_max):
        den = n - a * (m + 2)
        if den <= 0:
            raise ParameterError(f"moment of order {m + 1} needs n > a(m+2) = {a * (m + 2)}, got n={n}")
        nxt = b_poly * mu[m].derivative() + mu[m] * ((m + 1) * B - shift) + m * mu[m - 1] * lift
        mu.append(nxt / den)
    return MomentTablePhillips(n, alpha, tuple(mu[: m_max + 1]), (a, b, c), family)


def mu2_closed_form(b_poly: RatPoly, a, b, c, n: int) -> RatPoly:
    """mu_2 = (a alpha^2 + b alpha + c + b(x) n/(n-2a)) / (n - 3a)."""
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    if n <= 3 * a:
        raise ParameterError(f"mu_2 needs n > 3a (n={n})")
    alpha = phillips_alpha(b, a, n)
    return (a * alpha * alpha + b * alpha + c + b_poly * Fraction(n) / (n - 2 * a)) / (n - 3 * a)


def gamma_kernel_mu2(b_poly: RatPoly, n: int) -> RatPoly:
    """mu_2 = (x + b(x))/n + 1/n^2 for the gamma-type continuous kernel."""
    return (RatPoly.x() + b_poly) / n + Fraction(1, n * n)


def gamma_kernel_mu_moments(b_poly: RatPoly, n: int, m_max: int) -> tuple:
    """Specialised recurrence for the gamma-type kernel (a, b, c) = (0, 1, 0).

    mu_{m+1} = (b(x) mu_m' + m mu_m + m mu_{m-1} (b(x) + x + 1/n)) / n
    """
    X = RatPoly.x()
    mu = [RatPoly([1]), RatPoly()]
    for m in range(1, m_max):
        mu.append((b_poly * mu[m].derivative() + m * mu[m] + m * mu[m - 1] * (b_poly + X + Fraction(1, n))) / n)
    return tuple(mu[: m_max + 1])


def betaprime_kernel_mu2(b_poly: RatPoly, n: int) -> RatPoly:
    """mu_2 = (((nx+1)/(n-2))^2 + (nx+1)/(n-2) + n b(x)/(n-2)) / (n-3)."""
    q = RatPoly([1, n]) / (n - 2)
    return (q * q + q + b_poly * Fraction(n, n - 2)) / (n - 3)


def betaprime_kernel_mu_moments(b_poly: RatPoly, n: int, m_max: int) -> tuple:
    """Specialised recurrence for the beta-prime kernel (a, b, c) = (1, 1, 0)."""
    X = RatPoly.x()
    q = RatPoly([1, n]) / (n - 2)
    mu = [RatPoly([1]), RatPoly()]
    for m in range(1, m_max):
        if n - m - 2 <= 0:
            raise ParameterError(f"needs n > m + 2 (n={n}, m={m})")
        nxt = (
            b_poly * mu[m].derivative()
            + mu[m] * (RatPoly([1, 2]) * Fraction(n * m, n - 2))
            + (q * q + q + b_poly * Fraction(n, n - 2)) * m * mu[m - 1]
        )
        mu.append(nxt / (n - m - 2))
    return tuple(mu[: m_max + 1])


def moment_numeric(table, x, m: int) -> Fraction:
    """Exact value of the m-th stored moment at x."""
    if not 0 <= m < len(table):
        raise IndexError(f"moment {m} not in table of length {len(table)}")
    entry = table[m]
    if isinstance(entry, RatPoly):
        return entry(as_fraction(x) if not isinstance(x, float) else x)
    return entry
