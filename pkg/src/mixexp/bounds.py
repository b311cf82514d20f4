"""Modulus-of-continuity error bounds for Phillips-type operators.

For f with modulus omega and n > 3a,

    |P_n(f, x) - f(x)| <= omega(d) (1 + mu_2(x)/d^2) + omega(|alpha(x) - x|)

with d = 1/sqrt(n), which expands to :func:`theorem2_bound`. The specialised
forms for the four named operators are evaluated as printed, without
simplification, by :func:`specialized_bound`.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .errors import ParameterError, UnknownPreset
from .functions import ModulusOfContinuity, TestFunction
from .phillips import DEFAULT_CONFIG, EvalConfig, Operator, OperatorPreset

SLACK = 1e-9


def theorem2_bound(omega: ModulusOfContinuity, a, b, c, b_of_x: float, n: int, x: float,
                   as_printed: bool = False) -> float:
    """General bound at x.

    The bracket is n * mu_2(x), so the constant term c of h enters it. With
    ``as_printed=True`` the c term is dropped, which is the commonly quoted
    form; the two agree for every kernel with c = 0 (all four presets).
    """
    a, b, c = float(a), float(b), float(c)
    if n <= 3 * a:
        raise ParameterError(f"bound requires n > 3a (n={n}, a={a:g})")
    if as_printed:
        c = 0.0
    alpha = (n * x + b) / (n - 2 * a)
    second = (a * alpha * alpha + b * alpha + c + b_of_x * n / (n - 2 * a)) / (n - 3 * a)
    return omega(1 / math.sqrt(n)) * (1 + n * second) + omega(abs((2 * a * x + b) / (n - 2 * a)))


def preset_bound(preset: OperatorPreset, omega: ModulusOfContinuity, n: int, x: float) -> float:
    """theorem2_bound with the preset's triple and covariance characteristic."""
    a, b, c = preset.triple
    return theorem2_bound(omega, a, b, c, preset.discrete.covariance_characteristic(x), n, x)


def specialized_bound(preset_name: str, omega: ModulusOfContinuity, n: int, x: float) -> float:
    d = omega(1 / math.sqrt(n))
    if preset_name == "phillips":
        return d * (1 + x + x * x)
    if preset_name == "bernstein_durrmeyer":
        return 0.25 * d + omega(1 / n)
    if preset_name in ("szasz_baskakov", "durrmeyer_beta") and n <= 3:
        raise ParameterError(f"{preset_name} bound requires n > 3, got n={n}")
    if preset_name == "szasz_baskakov":
        num = n * n * x * x + 2 * n * n * x - 2 * n * x + n - 2
        return d * (1 + num / ((n - 2) ** 2 * (n - 3)) * n) + omega((2 * x + 1) / (n - 2))
    if preset_name == "durrmeyer_beta":
        q = (n * x + 1) / (n - 2)
        return d * (1 + n / (n - 3) * (q * q + (n * x * x + 2 * n * x + 1) / (n - 2))) + omega(abs((2 * x + 1) / (n - 2)))
    raise UnknownPreset(f"no specialised bound for {preset_name!r}")


def empirical_error(preset: OperatorPreset, f: TestFunction, n: int, xs: Sequence[float],
                    cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    op = Operator(preset, f, n, cfg)
    return max(abs(op(x) - float(f(x))) for x in xs)


@dataclass(frozen=True)
class BoundReport:
    n: int
    x: float
    general_bound: float
    specialized_bound: Optional[float]
    empirical_error: float
    dominated: bool

    @property
    def specialized_dominated(self) -> Optional[bool]:
        if self.specialized_bound is None:
            return None
        return self.empirical_error <= self.specialized_bound + SLACK


def bound_check(preset: OperatorPreset, f: TestFunction, n: int, xs: Sequence[float],
                omega: Optional[ModulusOfContinuity] = None, cfg: EvalConfig = DEFAULT_CONFIG) -> list:
    """One report per x comparing |P_n f(x) - f(x)| with the bounds."""
    omega = omega or f.modulus
    if omega is None:
        raise ValueError(f"{f.name} has no declared modulus of continuity")
    op = Operator(preset, f, n, cfg)
    reports = []
    for x in xs:
        x = float(x)
        err = abs(op(x) - float(f(x)))
        general = preset_bound(preset, omega, n, x)
        try:
            special = specialized_bound(preset.name, omega, n, x)
        except (UnknownPreset, ParameterError):
            special = None
        reports.append(BoundReport(n, x, general, special, err, err <= general + SLACK))
    return reports


CSV_FIELDS = ("n", "x", "general", "specialized", "empirical", "dominated")


def _fmt(v):
    return "" if v is None else format(v, ".17g")


def reports_to_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        w.writerow([r.n, _fmt(r.x), _fmt(r.general_bound), _fmt(r.specialized_bound),
                    _fmt(r.empirical_error), str(r.dominated).lower()])
    return buf.getvalue()


def reports_to_json(reports: Sequence[BoundReport]) -> list:
    return [
        {
            "n": r.n,
            "x": r.x,
            "general": r.general_bound,
            "specialized": r.specialized_bound,
            "empirical": r.empirical_error,
            "dominated": r.dominated,
        }
        for r in reports
    ]
