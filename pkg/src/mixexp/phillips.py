"""Phillips-type operators

    P_n(f, x) = sum_k b_{n,k}(x) * integral f(t) h_{n,k}(t) dt

evaluated by a truncated series over the discrete kernel and adaptive
quadrature over the continuous kernel. The inner integrals do not depend on
x, so an :class:`Operator` caches them per k and reuses them across a grid.
"""
from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, MixexpError, ParameterError, UnknownPreset
from .functions import TestFunction
from .structure_b import DiscreteStructure, TAIL_MASS, builtin_family
from .structure_h import ContinuousStructure, builtin_h


@dataclass(frozen=True)
class OperatorPreset:
    name: str
    discrete: DiscreteStructure
    continuous: ContinuousStructure
    min_n: int

    @property
    def triple(self):
        return self.continuous.triple.as_tuple()

    @property
    def b_poly(self):
        return self.discrete.covariance

    def check(self, n: int, x: Optional[float] = None) -> None:
        if int(n) != n or n < self.min_n:
            raise ParameterError(f"{self.name}: n must be an integer >= {self.min_n}, got {n}")
        if x is not None and not self.discrete.contains(float(x)):
            raise DomainError(f"{self.name}: x={x} outside X={list(self.discrete.domain)}")


@dataclass(frozen=True)
class EvalConfig:
    series_tolerance: float = 1e-12
    quad_abs_tol: float = 1e-11
    max_k: int = 10_000

    def __post_init__(self):
        if self.series_tolerance <= 0 or self.quad_abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_k < 1:
            raise ValueError("max_k must be >= 1")


DEFAULT_CONFIG = EvalConfig()

# (discrete family, continuous alias, min_n)
PRESETS = {
    "phillips": ("poisson", "gamma", 1),
    "bernstein_durrmeyer": ("binomial", "beta", 1),
    "szasz_baskakov": ("poisson", "betaprime", 4),
    "durrmeyer_beta": ("negative_binomial", "betaprime", 4),
}
PRESET_NAMES = tuple(PRESETS)


def make_preset(name: str, family: Optional[str] = None, triple=None) -> OperatorPreset:
    """A named operator, or ``custom`` with an explicit (family, triple) pairing."""
    if name == "custom":
        if family is None or triple is None:
            raise ValueError("custom preset needs both family and triple")
        h = builtin_h(triple)
        a = float(h.triple.a)
        min_n = max(h.min_n, math.floor(3 * a) + 1)
        return OperatorPreset("custom", builtin_family(family), h, min_n)
    try:
        fam, alias, min_n = PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}, custom") from None
    return OperatorPreset(name, builtin_family(fam), builtin_h(alias), min_n)


class Operator:
    """P_n(., x) for one preset, function and n, with a per-k integral cache."""

    def __init__(self, preset: OperatorPreset, f: TestFunction, n: int, cfg: EvalConfig = DEFAULT_CONFIG):
        preset.check(n)
        h = preset.continuous
        if f.growth >= h.moment_limit(n):
            raise ParameterError(
                f"{f.name} grows like |t|^{f.growth:g}; {h.name} kernel at n={n} only has moments "
                f"of order < {h.moment_limit(n):g}"
            )
        self.preset = preset
        self.f = f
        self.n = n
        self.cfg = cfg
        self._cache: dict = {}
        self._lock = threading.Lock()

    def inner(self, k: int, abs_tol: Optional[float] = None) -> float:
        """Integral of f against h_{n,k}, to ``abs_tol`` (default quad_abs_tol).

        The tolerance is rounded down to a decade above quad_abs_tol and cached
        per (k, decade), so a value never depends on the order of earlier calls.
        """
        base = self.cfg.quad_abs_tol
        tol = base if abs_tol is None else abs_tol
        level = max(0, math.floor(math.log10(tol / base) + 1e-12)) if tol > base else 0
        key = (k, level)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = self.preset.continuous.expect(self.n, k, self.f, points=self.f.kinks, abs_tol=base * 10.0**level)
        with self._lock:
            self._cache.setdefault(key, val)
        return val

    def weights(self, x: float) -> np.ndarray:
        self.preset.check(self.n, x)
        return self.preset.discrete.weights(
            self.n, float(x), tail=min(self.cfg.series_tolerance, TAIL_MASS), max_k=self.cfg.max_k
        )

    def __call__(self, x: float) -> float:
        # each term w_k I_k gets error at most max(w_k, 1/K) * quad_abs_tol,
        # so the series as a whole stays within 2 * quad_abs_tol
        w = self.weights(x)
        base = self.cfg.quad_abs_tol
        scale = 1.0 / len(w)
        terms = []
        for k, wk in enumerate(w):
            if wk > 0.0:
                tol = base * max(1.0, scale / wk) if wk * MAX_TERM_TOL > base * scale else MAX_TERM_TOL
                terms.append(wk * self.inner(k, tol))
        return math.fsum(terms)


MAX_TERM_TOL = 1e-3


def evaluate(preset: OperatorPreset, f: TestFunction, n: int, x: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    return Operator(preset, f, n, cfg)(x)


class GridEvaluationError(MixexpError):
    """Some grid points failed; ``values`` holds NaN there and ``errors`` maps index -> exception."""

    def __init__(self, values, errors):
        self.values = values
        self.errors = errors
        first = next(iter(errors.items()))
        super().__init__(f"{len(errors)} of {len(values)} grid points failed (first: index {first[0]}: {first[1]})")


def evaluate_grid(preset: OperatorPreset, f: TestFunction, n: int, xs: Sequence[float],
                  cfg: EvalConfig = DEFAULT_CONFIG, workers: int = 1) -> list:
    """Evaluate at every x; failures are collected and raised together at the end."""
    op = Operator(preset, f, n, cfg)
    values = [math.nan] * len(xs)
    errors = {}

    def one(i):
        try:
            values[i] = op(xs[i])
        except MixexpError as exc:
            errors[i] = exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(one, range(len(xs))))
    else:
        for i in range(len(xs)):
            one(i)
    if errors:
        raise GridEvaluationError(values, dict(sorted(errors.items())))
    return values


def alpha(preset: OperatorPreset, n: int, x: float) -> float:
    """Mean of the mixture, (n x + b)/(n - 2a)."""
    a, b, _ = (float(v) for v in preset.triple)
    return (n * x + b) / (n - 2 * a)
