"""Independent reference computations.

Brute-force moment sums, closed-form polynomial moments from factorial
moments, direct quadrature, and Monte Carlo sampling of the mixture
eta ~ sum_k b_{n,k}(x) h_{n,k}(t). None of these call the recurrences in
:mod:`mixexp.moments`.

Random numbers come from numpy's PCG64 generator. A seed is expanded with
``numpy.random.SeedSequence`` into one sub-stream for the discrete index and
one for the continuous draw.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ParameterError, SamplerError, TruncationError
from .phillips import OperatorPreset, alpha
from .ratpoly import RatPoly
from .structure_b import DiscreteStructure
from .structure_h import ContinuousStructure


# -- discrete moments ---------------------------------------------------------

def _weight_ratio_bound(structure: DiscreteStructure, n: int, x: Fraction, K: int) -> Optional[float]:
    """Upper bound on b_{n,k+1}(x)/b_{n,k}(x) valid for every k >= K."""
    name = structure.name
    xf = float(x)
    if name == "poisson":
        return n * xf / (K + 1)
    if name == "negative_binomial":
        return (n + K) / (K + 1) * xf / (1 + xf)
    if name == "catalan":
        # coefficient ratio (2k+n)(2k+n+1)/((k+1)(k+n+1)) <= 4 once 6k + 3n + 4 >= n^2
        if 6 * K + 3 * n + 4 < n * n:
            return None
        return 4 * structure.solve_y(xf)
    return None


def brute_beta_with_bound(structure: DiscreteStructure, n: int, m: int, x, tail_tol: float = 1e-20):
    """Direct sum of (k - n x)^m b_{n,k}(x) and a certified bound on what was left out.

    Finite support with rational weights gives an exact Fraction and bound 0.
    Otherwise terms are summed exactly (rational weights) or with 50-digit
    mpmath (Poisson) until the geometric tail bound drops below ``tail_tol``.
    """
    x = Fraction(x)
    if m == 0:
        return Fraction(1), 0.0
    top = structure.max_k(n)
    centre = n * x
    if top is not None and structure._exact_weight is not None:
        total = sum((structure.exact_weight(n, k, x) * (k - centre) ** m for k in range(top + 1)), Fraction(0))
        return total, 0.0

    if structure.name == "poisson":
        with mpmath.workdps(50):
            lam = mpmath.mpf(centre.numerator) / centre.denominator
            w = mpmath.exp(-lam)
            acc = mpmath.mpf(0)
            k = 0
            while True:
                acc += w * (k - lam) ** m
                w_next = w * lam / (k + 1)
                if k > lam + 1:
                    bound = _tail_bound(structure, n, x, k, float(w_next), m)
                    if bound is not None and bound < tail_tol:
                        return float(acc), bound
                w = w_next
                k += 1
                if k > 100_000:
                    raise TruncationError("poisson brute-force sum did not reach its tail target")

    if structure._exact_weight is None:
        raise TruncationError(f"{structure.name}: no exact weights for a certified brute-force sum")
    acc = Fraction(0)
    k = 0
    while True:
        acc += structure.exact_weight(n, k, x) * (k - centre) ** m
        if k > centre + 1:
            w_next = float(structure.exact_weight(n, k + 1, x))
            bound = _tail_bound(structure, n, x, k + 1, w_next, m, first_index=k + 1)
            if bound is not None and bound < tail_tol:
                return acc, bound
        k += 1
        if k > 100_000:
            raise TruncationError(f"{structure.name} brute-force sum did not reach its tail target")


def _tail_bound(structure, n, x, k, w_next, m, first_index=None):
    """Bound on sum_{j > k} |j - n x|^m b_j using a geometric majorant."""
    j = k + 1 if first_index is None else first_index
    centre = float(n * x)
    if j - centre <= 1:
        return None
    ratio = _weight_ratio_bound(structure, n, x, j)
    if ratio is None:
        return None
    q = ratio * ((j + 1 - centre) / (j - centre)) ** m
    if q >= 1:
        return None
    return abs(j - centre) ** m * w_next / (1 - q)


def brute_beta(structure: DiscreteStructure, n: int, m: int, x, tail_tol: float = 1e-20):
    """Central moment about n x by direct summation of the weights."""
    return brute_beta_with_bound(structure, n, m, x, tail_tol)[0]


def _stirling2(j: int) -> list:
    row = [1]
    for r in range(1, j + 1):
        new = [0] * (r + 1)
        for i in range(1, r + 1):
            new[i] = i * (row[i] if i < len(row) else 0) + row[i - 1]
        row = new
    return row


def factorial_moment_beta(family: str, n: int, m: int) -> RatPoly:
    """beta_m(x) as an exact polynomial from the factorial moments of the family.

    E[(k)_i] is n(n-1)..(n-i+1) x^i (binomial), (n x)^i (Poisson) and
    n(n+1)..(n+i-1) x^i (negative binomial); raw moments follow through
    Stirling numbers of the second kind.
    """
    X = RatPoly.x()

    def fact_moment(i):
        if family == "binomial":
            c = math.prod(n - r for r in range(i))
        elif family == "poisson":
            c = n**i
        elif family == "negative_binomial":
            c = math.prod(n + r for r in range(i))
        else:
            raise ValueError(f"no factorial-moment formula for {family!r}")
        return X**i * c

    raw = [sum((fact_moment(i) * s for i, s in enumerate(_stirling2(j))), RatPoly()) for j in range(m + 1)]
    shift = X * (-n)
    return sum((raw[j] * math.comb(m, j) * shift ** (m - j) for j in range(m + 1)), RatPoly())


def binomial_expanded_beta(n: int, m: int) -> RatPoly:
    """sum_k C(n,k) x^k (1-x)^{n-k} (k - n x)^m expanded symbolically."""
    X = RatPoly.x()
    one_minus = RatPoly([1, -1])
    return sum(
        (X**k * one_minus ** (n - k) * math.comb(n, k) * (RatPoly([k, -n])) ** m for k in range(n + 1)),
        RatPoly(),
    )


# -- quadrature -----------------------------------------------------------------

def quad_expectation(structure: ContinuousStructure, n: int, k: int, f, points=()) -> float:
    """Integral of f(t) h_{n,k}(t) dt by adaptive quadrature (absolute tolerance 1e-11)."""
    return structure.expect(n, k, f, points=points, abs_tol=1e-11)


# -- sampling -------------------------------------------------------------------

@dataclass(frozen=True)
class SampleBatch:
    seed: int
    n_samples: int
    values: np.ndarray


@dataclass(frozen=True)
class McEstimate:
    mean: float
    variance: float
    std_error: float
    variance_std_error: float
    n_samples: int


def mc_estimate(values: np.ndarray) -> McEstimate:
    v = np.asarray(values, dtype=float)
    N = v.size
    if N < 2:
        raise ValueError("need at least two samples")
    mean = float(v.mean())
    d = v - mean
    var = float(d @ d / (N - 1))
    m4 = float(np.mean(d**4))
    return McEstimate(mean, var, math.sqrt(var / N), math.sqrt(max(m4 - var * var, 0.0) / N), N)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for sub-stream ``stream`` of ``seed`` (PCG64)."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


class ArctanSampler:
    """Rejection sampler for exp(k atan t)(1+t^2)^{-n/2}.

    Envelope: Student t with n-1 degrees of freedom centred at the mode k/n,
    with the scale that maximises the acceptance rate. Both tails decay like
    |t|^{-n}, so the density ratio is bounded.
    """

    def __init__(self, n: int, k: int):
        if n < 3:
            raise ParameterError("arctan sampler needs n >= 3")
        self.n, self.k = n, k
        self.nu = n - 1
        self.t0 = k / n
        s_curv = math.sqrt((1 + self.t0**2) / (n - 1))
        # acceptance rate = mass(target) / (M * mass(envelope)); envelope mass is
        # proportional to s, so pick the scale minimising s * M(s)
        res = minimize_scalar(lambda ls: self._sup_log_ratio(math.exp(ls)) + ls,
                              bounds=(math.log(s_curv) - 1.0, math.log(s_curv) + 4.0),
                              method="bounded", options={"xatol": 1e-3})
        self.s = math.exp(res.x)
        self.log_m = self._sup_log_ratio(self.s)
        from .structure_h import arctan_log_mass

        log_env_mass = (
            math.lgamma(self.nu / 2) + 0.5 * math.log(self.nu * math.pi) - math.lgamma((self.nu + 1) / 2)
            + math.log(self.s)
        )
        self.efficiency = math.exp(arctan_log_mass(n, k) - self.log_m - log_env_mass)
        if self.efficiency < 1e-3:
            raise SamplerError(f"rejection efficiency {self.efficiency:.2e} below 1e-3 (n={n}, k={k})")

    def log_target(self, t):
        return self.k * np.arctan(t) - 0.5 * self.n * np.log1p(t * t)

    def log_env(self, t, s=None):
        z = (t - self.t0) / (self.s if s is None else s)
        return -0.5 * (self.nu + 1) * np.log1p(z * z / self.nu)

    def _sup_log_ratio(self, s: float) -> float:
        theta = np.linspace(-np.pi / 2, np.pi / 2, 4001)[1:-1]
        t = np.tan(theta)
        r = self.log_target(t) - self.log_env(t, s)
        i = int(np.argmax(r))
        lo, hi = theta[max(i - 1, 0)], theta[min(i + 1, len(theta) - 1)]
        res = minimize_scalar(lambda th: -(self.log_target(np.tan(th)) - self.log_env(np.tan(th), s)),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best = max(float(r[i]), -float(res.fun))
        # limits at t -> +-inf
        tail = abs(self.k) * math.pi / 2 - 0.5 * self.n * math.log(s**2 * self.nu)
        return max(best, tail) + 1e-9

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty(size)
        filled = 0
        batch = max(64, int(size / max(self.efficiency, 1e-3) * 1.2))
        while filled < size:
            t = self.t0 + self.s * rng.standard_t(self.nu, batch)
            u = rng.random(batch)
            ok = np.log(u) < self.log_target(t) - self.log_env(t) - self.log_m
            acc = t[ok][: size - filled]
            out[filled: filled + acc.size] = acc
            filled += acc.size
        return out


def sample_kernel(structure: ContinuousStructure, n: int, k, rng: np.random.Generator) -> np.ndarray:
    """One draw from h_{n,k} per entry of the integer array ``k``."""
    k = np.asarray(k)
    if k.size and np.min(k) < 0:
        raise ParameterError("k must be nonnegative")
    structure.check(n, int(k.max()) if k.size else 0)
    name = structure.name
    kf = k.astype(float)
    if name == "beta":
        return rng.beta(kf + 1, n - kf + 1)
    if name == "gamma":
        return rng.gamma(kf + 1, 1.0 / n)
    if name == "betaprime":
        return rng.gamma(kf + 1) / rng.gamma(n - 1, size=k.shape)
    if name == "invgamma":
        return kf / rng.gamma(n - 1, size=k.shape)
    if name == "gauss":
        return rng.normal(kf / n, 1.0 / math.sqrt(n))
    if name == "arctan":
        out = np.empty(k.shape)
        for kk in np.unique(k):
            idx = np.nonzero(k == kk)
            out[idx] = ArctanSampler(n, int(kk)).sample(len(idx[0]), rng)
        return out
    raise ParameterError(f"no sampler for {name}")


def sample_discrete(structure: DiscreteStructure, n: int, x: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of k from the truncated weights."""
    w = structure.weights(n, x)
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), len(w) - 1)


def sample_phillips(preset: OperatorPreset, n: int, x: float, n_samples: int, seed: int) -> SampleBatch:
    preset.check(n, x)
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    if n_samples == 0:
        return SampleBatch(seed, 0, np.empty(0))
    ks = sample_discrete(preset.discrete, n, x, n_samples, make_rng(seed, 0))
    ts = sample_kernel(preset.continuous, n, ks, make_rng(seed, 1))
    return SampleBatch(seed, n_samples, ts)


def monte_carlo_check(preset: OperatorPreset, n: int, x: float, n_samples: int, seed: int, bands: float = 4.0) -> dict:
    """Compare sample mean/variance of eta with alpha(x) and mu_2(x)."""
    from .moments import mu_moments

    batch = sample_phillips(preset, n, x, n_samples, seed)
    est = mc_estimate(batch.values)
    mu2 = float(mu_moments(preset.b_poly, *preset.triple, n, 2)[2](Fraction(x)))
    al = alpha(preset, n, x)
    z_mean = (est.mean - al) / est.std_error
    z_var = (est.variance - mu2) / est.variance_std_error
    return {
        "preset": preset.name,
        "n": n,
        "x": x,
        "seed": seed,
        "n_samples": n_samples,
        "sample_mean": est.mean,
        "alpha": al,
        "mean_std_error": est.std_error,
        "mean_z": z_mean,
        "sample_variance": est.variance,
        "mu2": mu2,
        "variance_std_error": est.variance_std_error,
        "variance_z": z_var,
        "passed": bool(abs(z_mean) <= bands and abs(z_var) <= bands),
    }
