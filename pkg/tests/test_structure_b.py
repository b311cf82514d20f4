import math
from fractions import Fraction

import numpy as np
import pytest

from mixexp.errors import DomainError, UnknownFamily
from mixexp.structure_b import FAMILY_NAMES, builtin_family, custom_family

FAMILIES = {name: builtin_family(name) for name in FAMILY_NAMES}


def interior_grid(fam, count=10):
    lo, hi = fam.domain
    if hi <= 1.0:
        return [(i + 1) / (count + 1) for i in range(count)]
    return [0.2 + 0.4 * i for i in range(count)]


def full_weights(fam, n, x, factor=4):
    """Weights far past the working truncation, for moment checks."""
    top = fam.max_k(n)
    K = top if top is not None else factor * fam.chebyshev_cutoff(n, x) + 200
    return np.exp(fam.log_weights(n, np.arange(K + 1), x))


class TestSolveY:
    def test_closed_forms(self):
        assert FAMILIES["binomial"].solve_y(0.25) == pytest.approx(1 / 3, rel=1e-14)
        assert FAMILIES["poisson"].solve_y(2.0) == pytest.approx(2.0, rel=1e-14)
        assert FAMILIES["negative_binomial"].solve_y(1.0) == pytest.approx(0.5, rel=1e-14)

    def test_generic_inversion(self):
        fam = custom_family("gen_nb", [1] * 200, radius=1.0)
        for x in (0.1, 1.0, 3.0):
            y = fam.solve_y(x)
            assert y == pytest.approx(x / (1 + x), rel=1e-12)

    def test_catalan_inverse_roundtrip(self):
        fam = FAMILIES["catalan"]
        for x in (0.1, 1.0, 5.0):
            y = fam.solve_y(x)
            assert fam.family.x_of_y(y) == pytest.approx(x, rel=1e-14)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            FAMILIES["binomial"].solve_y(1.5)
        with pytest.raises(DomainError):
            FAMILIES["poisson"].solve_y(-0.1)


class TestWeight:
    def test_examples(self):
        assert FAMILIES["binomial"].weight(2, 1, 0.5) == pytest.approx(0.5, rel=1e-15)
        assert FAMILIES["poisson"].weight(1, 0, 1.0) == pytest.approx(math.exp(-1), rel=1e-14)
        assert FAMILIES["catalan"].weight(1, 0, 1.0) == pytest.approx(2 / 3, rel=1e-14)
        assert FAMILIES["catalan"].exact_weight(1, 0, 1) == Fraction(2, 3)

    def test_catalan_direct_formula(self):
        # (n/(2k+n)) C(2k+n, k) x^k (1+x)^{n+k} (1+2x)^{-n-2k}
        fam = FAMILIES["catalan"]
        x = Fraction(3, 4)
        for n in (1, 3):
            for k in range(6):
                direct = Fraction(n, 2 * k + n) * math.comb(2 * k + n, k) * x**k * (1 + x) ** (n + k) / (1 + 2 * x) ** (n + 2 * k)
                assert fam.exact_weight(n, k, x) == direct
                assert fam.weight(n, k, float(x)) == pytest.approx(float(direct), rel=1e-12)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            FAMILIES["binomial"].weight(3, 1, 1.2)

    def test_unknown_family(self):
        with pytest.raises(UnknownFamily):
            builtin_family("hypergeometric")


class TestCharacteristic:
    def test_examples(self):
        assert FAMILIES["binomial"].covariance_characteristic(0.5) == 0.25
        assert FAMILIES["poisson"].covariance_characteristic(3.0) == 3.0
        assert FAMILIES["catalan"].covariance_characteristic(1.0) == 6.0
        assert FAMILIES["negative_binomial"].covariance_characteristic(2.0) == 6.0

    def test_polynomials(self):
        assert str(FAMILIES["binomial"].covariance) == "x - x^2"
        assert str(FAMILIES["negative_binomial"].covariance) == "x + x^2"
        assert str(FAMILIES["poisson"].covariance) == "x"
        assert str(FAMILIES["catalan"].covariance) == "x + 3*x^2 + 2*x^3"

    def test_domains(self):
        assert FAMILIES["binomial"].domain == (0.0, 1.0)
        for name in ("poisson", "negative_binomial", "catalan"):
            assert FAMILIES[name].domain == (0.0, math.inf)

    @pytest.mark.parametrize("name", ["poisson", "negative_binomial", "catalan"])
    def test_matches_y_over_yprime(self, name):
        # b(x) = y / y'(x) computed from the generating function alone
        fam = FAMILIES[name]
        for x in (0.3, 1.0, 2.5):
            y = fam.solve_y(x)
            assert y * fam.family.dx_dy(y) == pytest.approx(fam.covariance_characteristic(x), rel=1e-10)


class TestFisher:
    def test_examples(self):
        assert FAMILIES["binomial"].fisher_information(10, 0.5) == 40
        assert FAMILIES["poisson"].fisher_information(1, 2.0) == 0.5
        assert FAMILIES["poisson"].fisher_information(1, 1.0) == 1.0

    def test_score_oracle(self):
        # E[(d/dx log b_{n,k})^2] by central differences
        fam = FAMILIES["binomial"]
        n, x, eps = 10, 0.5, 1e-6
        ks = np.arange(n + 1)
        w = np.exp(fam.log_weights(n, ks, x))
        score = (fam.log_weights(n, ks, x + eps) - fam.log_weights(n, ks, x - eps)) / (2 * eps)
        assert float(np.sum(score**2 * w)) == pytest.approx(40.0, rel=1e-6)

    def test_boundary(self):
        with pytest.raises(DomainError):
            FAMILIES["binomial"].fisher_information(5, 0.0)


@pytest.mark.parametrize("name", FAMILY_NAMES)
@pytest.mark.parametrize("n", [1, 5, 20, 50])
def test_normalization(name, n):
    fam = FAMILIES[name]
    for x in interior_grid(fam):
        w = fam.weights(n, x)
        assert abs(math.fsum(w) - 1.0) <= 1e-12
        assert np.all((w >= 0) & (w <= 1))


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_truncation_rule(name):
    fam = FAMILIES[name]
    n, x = 20, 0.4
    w = fam.weights(n, x)
    top = fam.max_k(n)
    if top is None:
        assert len(w) - 1 >= fam.chebyshev_cutoff(n, x)
    else:
        assert len(w) == top + 1


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_defining_relation(name):
    # b(x) d/dx b_{n,k}(x) = (k - n x) b_{n,k}(x)
    fam = FAMILIES[name]
    eps = 1e-6
    for n in (1, 4, 9):
        for x in interior_grid(fam, 4):
            bx = fam.covariance_characteristic(x)
            for k in range(0, 3 * n + 3):
                w = fam.weight(n, k, x)
                deriv = (fam.weight(n, k, x + eps) - fam.weight(n, k, x - eps)) / (2 * eps)
                assert abs(bx * deriv - (k - n * x) * w) <= 1e-6 * max(1.0, w)


@pytest.mark.parametrize("name", FAMILY_NAMES)
@pytest.mark.parametrize("n", [1, 5, 20])
def test_mean_and_variance(name, n):
    fam = FAMILIES[name]
    for x in interior_grid(fam, 5):
        w = full_weights(fam, n, x)
        k = np.arange(len(w))
        mean = math.fsum(k * w)
        var = math.fsum((k - n * x) ** 2 * w)
        assert mean == pytest.approx(n * x, rel=1e-10)
        assert var == pytest.approx(n * fam.covariance_characteristic(x), rel=1e-10)


def test_generic_binomial_matches_closed_form():
    gen = custom_family("binomial_generic", [1, 1])
    ref = FAMILIES["binomial"]
    for n in range(1, 11):
        for x in (0.1, 0.37, 0.5, 0.9):
            ks = np.arange(n + 1)
            a = np.exp(gen.log_weights(n, ks, x))
            b = np.exp(ref.log_weights(n, ks, x))
            assert np.max(np.abs(a - b)) <= 1e-12


def test_generic_poisson_prefix():
    coeffs = [Fraction(1, math.factorial(i)) for i in range(60)]
    gen = custom_family("poisson_generic", coeffs)
    ref = FAMILIES["poisson"]
    ks = np.arange(25)
    assert np.allclose(np.exp(gen.log_weights(3, ks, 1.5)), np.exp(ref.log_weights(3, ks, 1.5)), rtol=1e-12, atol=0)


def test_coefficient_cache_is_consistent():
    gen = custom_family("cache_probe", [1, 2, 1])
    first = gen.coefficient_table(4, 8)
    again = gen.coefficient_table(4, 3)
    assert again == first[:4]
    assert first == [math.comb(8, i) for i in range(9)]


def test_large_n_no_overflow():
    fam = FAMILIES["catalan"]
    w = fam.weights(400, 2.0)
    assert math.isfinite(math.fsum(w)) and abs(math.fsum(w) - 1) < 1e-12
