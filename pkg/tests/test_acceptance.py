"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from mixexp.bounds import bound_check, specialized_bound
from mixexp.functions import ModulusOfContinuity, abs_shift, central_power, constant, monomial
from mixexp.moments import asymptotic_coefficient, beta_moments, double_factorial, mu_moments, nu2_closed_form, nu_moments
from mixexp.oracle import brute_beta_with_bound, mc_estimate, sample_phillips
from mixexp.phillips import PRESET_NAMES, Operator, alpha, make_preset
from mixexp.ratpoly import RatPoly
from mixexp.structure_b import builtin_family
from mixexp.structure_h import ADMISSIBLE_TRIPLES, STRUCTURES, builtin_h, normalization_audit

X = RatPoly.x()
F = Fraction


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def verdict(number, title, ok, elapsed, limit, detail=""):
    within = elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    print(f"[{status}] criterion {number}: {title} -- {detail} ({elapsed:.2f} s, limit {limit} s)")
    assert ok, detail
    assert within, f"runtime {elapsed:.2f} s exceeds {limit} s"


def test_criterion_1_exact_moment_identities():
    worst_poisson = 0.0
    mismatches = []
    with Timer() as t:
        for name, ns in (("binomial", range(2, 9)), ("poisson", range(1, 9))):
            fam = builtin_family(name)
            b = fam.covariance
            for n in ns:
                table = beta_moments(b, n, 6)
                if table[2] != b * n or table[3] != b * b.derivative() * n:
                    mismatches.append((name, n, "low order"))
                for x in (F(1, 4), F(1, 2), F(2, 3)):
                    for m in range(0, 7):
                        brute, tail = brute_beta_with_bound(fam, n, m, x)
                        ref = table[m](x)
                        if name == "binomial":
                            if brute != ref:
                                mismatches.append((name, n, m, x))
                        else:
                            if tail >= 1e-20 * 10**m:
                                mismatches.append((name, n, m, x, "tail"))
                            rel = abs(float(brute) - float(ref)) / max(1.0, abs(float(ref)))
                            worst_poisson = max(worst_poisson, rel)
    ok = not mismatches and worst_poisson <= 1e-12
    verdict(1, "exact moment identities", ok, t.elapsed, 5,
            f"mismatches={mismatches[:3]}, worst Poisson relative deviation={worst_poisson:.2e}")


def test_criterion_2_printed_closed_forms():
    failures = []
    with Timer() as t:
        b = builtin_family("poisson").covariance
        for n in (5, 10, 100):
            mu2 = mu_moments(b, 0, 1, 0, n, 2)[2]
            if mu2 != (X + b) / n + F(1, n * n):
                failures.append(("phillips", n, str(mu2)))
        b = builtin_family("negative_binomial").covariance
        for n in (5, 10):
            q = (X * n + 1) / (n - 2)
            printed = (q * q + q + b * F(n, n - 2)) / (n - 3)
            mu2 = mu_moments(b, 1, 1, 0, n, 2)[2]
            if mu2 != printed:
                failures.append(("durrmeyer_beta", n, str(mu2)))
    verdict(2, "printed mu_2 closed forms", not failures, t.elapsed, 1, f"failures={failures}")


def test_criterion_3_nu2_cross_validation():
    exact_fail = []
    worst = 0.0
    with Timer() as t:
        for triple in ADMISSIBLE_TRIPLES:
            a, b, c = triple.as_tuple()
            s = builtin_h(triple)
            for n, k in ((6, 0), (6, 3), (12, 5)):
                if n <= 3 * a:
                    continue
                nu2 = nu_moments(a, b, c, n, k, 2)[2]
                if nu2 != nu2_closed_form(a, b, c, n, k):
                    exact_fail.append((str(triple), n, k))
                mean = float(s.mean(n, k))
                quad = s.expect(n, k, lambda u: (u - mean) ** 2)
                worst = max(worst, abs(quad - float(nu2)))
    ok = not exact_fail and worst <= 1e-7
    verdict(3, "nu_2 recurrence = printed form = quadrature", ok, t.elapsed, 10,
            f"exact mismatches={exact_fail}, worst quadrature deviation={worst:.2e}")


def test_criterion_4_asymptotics():
    devs = {}
    with Timer() as t:
        n = 10**4
        for name, x in (("binomial", F(1, 2)), ("poisson", F(1))):
            b = builtin_family(name).covariance
            table = beta_moments(b, n, 4)
            for r in (1, 2):
                ratio = table[2 * r](x) / (n**r * b(x) ** r)
                devs[(name, 2 * r)] = abs(float(ratio) / double_factorial(2 * r - 1) - 1)
        b = builtin_family("binomial").covariance
        beta3 = beta_moments(b, 7, 3)[3]
        c3_consistent = asymptotic_coefficient(3) == 1 and beta3 == b * b.derivative() * 7
    ok = all(d <= 0.05 for d in devs.values()) and c3_consistent
    detail = ", ".join(f"{k[0]} m={k[1]}: {v:.2e}" for k, v in devs.items()) + f"; c_3 consistent={c3_consistent}"
    verdict(4, "leading-term asymptotics", ok, t.elapsed, 30, detail)


def test_criterion_5_operator_correctness():
    worst = {0: 0.0, 1: 0.0, 2: 0.0}
    with Timer() as t:
        for name in PRESET_NAMES:
            p = make_preset(name)
            hi = 1.0 if p.discrete.domain[1] <= 1 else 2.0
            xs = [hi * (i + 1) / 10 for i in range(9)]
            for n in sorted({10, max(4, p.min_n)}):
                ones = Operator(p, constant(), n)
                ident = Operator(p, monomial(1), n)
                mu2 = mu_moments(p.b_poly, *p.triple, n, 2)[2]
                for x in xs:
                    a = alpha(p, n, x)
                    worst[0] = max(worst[0], abs(ones(x) - 1.0))
                    worst[1] = max(worst[1], abs(ident(x) - a))
                    sq = Operator(p, central_power(a, 2), n)(x)
                    worst[2] = max(worst[2], abs(sq - float(mu2(F(x)))))
    ok = worst[0] <= 1e-10 and worst[1] <= 1e-8 and worst[2] <= 1e-7
    verdict(5, "operator reproduces 1, alpha, mu_2", ok, t.elapsed, 60,
            f"max |P1-1|={worst[0]:.1e}, max |Pt-alpha|={worst[1]:.1e}, max |P(t-alpha)^2-mu_2|={worst[2]:.1e}")


def test_criterion_6_general_bound_domination():
    lip = ModulusOfContinuity.lipschitz(1.0)
    violations = []
    checked = 0
    min_slack = math.inf
    with Timer() as t:
        for name in PRESET_NAMES:
            p = make_preset(name)
            hi = 1.0 if p.discrete.domain[1] <= 1 else 4.0
            xs = [hi * i / 18 for i in range(1, 18)]
            ns = [n for n in (4, 5, 6, 7) if n >= p.min_n] + [16, 64, 256]
            for c in (0.25, 0.5, 1.0):
                f = abs_shift(c)
                for n in ns:
                    for r in bound_check(p, f, n, xs, omega=lip):
                        checked += 1
                        min_slack = min(min_slack, r.general_bound - r.empirical_error)
                        if not r.dominated:
                            violations.append((name, c, n, r.x))
        phillips = make_preset("phillips")
        xs = [2.0 * i / 16 for i in range(17)]
        special_bad = []
        for c in (0.25, 0.5, 1.0):
            for n in (4, 5, 6, 7, 16, 64, 256):
                op = Operator(phillips, abs_shift(c), n)
                for x in xs:
                    err = abs(op(x) - abs(x - c))
                    if err > specialized_bound("phillips", lip, n, x) + 1e-9:
                        special_bad.append((c, n, x))
    ok = not violations and not special_bad
    verdict(6, "general bound dominates; Phillips specialised bound dominates on [0,2]", ok, t.elapsed, 300,
            f"{checked} points, min slack={min_slack:.3e}, violations={violations[:3]}, specialised={special_bad[:3]}")


def test_criterion_7_convergence_rate():
    with Timer() as t:
        p = make_preset("bernstein_durrmeyer")
        f = abs_shift(0.5)
        xs = [i / 32 for i in range(33)]
        errs = {}
        for n in (32, 512):
            op = Operator(p, f, n)
            errs[n] = max(abs(op(x) - abs(x - 0.5)) for x in xs)
    ratio = errs[512] / errs[32]
    verdict(7, "O(1/sqrt n) decay for |t-1/2|", ratio < 0.5, t.elapsed, 120,
            f"sup error n=32: {errs[32]:.4g}, n=512: {errs[512]:.4g}, ratio={ratio:.3f}")


def test_criterion_8_monte_carlo():
    details = []
    ok = True
    with Timer() as t:
        for name in ("phillips", "szasz_baskakov"):
            p = make_preset(name)
            n, x = 50, 1.0
            batch = sample_phillips(p, n, x, 10**6, seed=20240601)
            est = mc_estimate(batch.values)
            mu2 = float(mu_moments(p.b_poly, *p.triple, n, 2)[2](F(1)))
            z_mean = (est.mean - alpha(p, n, x)) / est.std_error
            z_var = (est.variance - mu2) / est.variance_std_error
            ok &= abs(z_mean) <= 4 and abs(z_var) <= 4
            details.append(f"{name}: z_mean={z_mean:+.2f}, z_var={z_var:+.2f}")
    verdict(8, "Monte Carlo mean and variance", ok, t.elapsed, 120, "; ".join(details))


def test_criterion_9_normalization_audit():
    with Timer() as t:
        masses = []
        for s in STRUCTURES.values():
            for n in (s.min_n, 6, 15):
                for k in (0, 1, 3, 7):
                    if (s.max_k is not None and k > s.max_k(n)) or s.is_atom(n, k):
                        continue
                    masses.append((s.name, n, k, s.normalization_check(n, k)))
        audit = normalization_audit()
    worst = max(abs(m - 1.0) for *_, m in masses)
    bp = [r for r in audit if r["structure"] == "betaprime" and r["k"] > 0]
    ig = [r for r in audit if r["structure"] == "invgamma" and r["k"] > 0]
    bp_ok = bool(bp) and all(
        r["printed_discrepancy"] and r["printed_mass"] == pytest.approx((r["n"] + r["k"]) / r["n"], rel=1e-9) for r in bp
    )
    ig_ok = bool(ig) and all(
        r["printed_discrepancy"] and math.isinf(r["printed_mass"])
        and np.all(np.diff(list(r["printed_mass_above"].values())) > 0)
        for r in ig
    )
    ok = worst <= 1e-8 and bp_ok and ig_ok
    detail = (
        f"{len(masses)} densities, worst |mass-1|={worst:.1e}; (1,1,0) printed masses "
        + ", ".join(f"k={r['k']}: {r['printed_mass']:.4f}" for r in bp)
        + "; (1,0,0) printed mass on [1e-3, inf): "
        + ", ".join(f"k={r['k']}: {r['printed_mass_above']['0.001']:.3g}" for r in ig)
    )
    verdict(9, "normalization audit", ok, t.elapsed, 30, detail)
