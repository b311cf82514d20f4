from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mixexp.ratpoly import RatPoly, as_fraction, poly_add, poly_derivative, poly_eval, poly_mul, render

fractions_ = st.fractions(min_value=-20, max_value=20, max_denominator=30)
polys = st.lists(fractions_, max_size=7).map(RatPoly)


def P(*cs):
    return RatPoly([Fraction(c) for c in cs])


class TestExamples:
    def test_add(self):
        assert poly_add(P(1, 1), P(0, -1)) == P(1)
        assert poly_add(RatPoly(), P(3, 0, 2)) == P(3, 0, 2)
        assert poly_add(P(0, 1), P(0, 1)) == P(0, 2)

    def test_mul(self):
        assert poly_mul(P(0, 1), P(1, -1)) == P(0, 1, -1)
        assert poly_mul(P(4, 5), RatPoly()).is_zero
        assert poly_mul(P(1, 1), P(1, 2)) == P(1, 3, 2)

    def test_derivative(self):
        assert poly_derivative(P(0, 1, -1)) == P(1, -2)
        assert poly_derivative(P(7)).is_zero
        assert poly_derivative(P(0, 1, 3, 2)) == P(1, 6, 6)

    def test_eval(self):
        assert poly_eval(P(0, 1, -1), Fraction(1, 2)) == Fraction(1, 4)
        assert poly_eval(RatPoly(), Fraction(3, 7)) == 0
        assert poly_eval(P(1, 3, 2), 1) == 6


def test_canonical_form():
    p = P(1, 2, 0, 0)
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert RatPoly().degree == -1 and RatPoly().coeffs == ()
    assert P(0, 0) == RatPoly()


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.1)


def test_render():
    assert render(P(Fraction(1, 100), Fraction(1, 5))) == "1/100 + 1/5*x"
    assert render(P(0, 2, -2)) == "2*x - 2*x^2"
    assert render(RatPoly()) == "0"
    assert str(P(-1, 0, 1)) == "-1 + x^2"


def test_string_roundtrip():
    p = P(Fraction(-3, 7), 0, 5)
    assert RatPoly.from_strings(p.to_strings()) == p


@settings(max_examples=150, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert p - p == RatPoly()


@settings(max_examples=150, deadline=None)
@given(polys, polys)
def test_leibniz(p, q):
    assert (p * q).derivative() == p.derivative() * q + p * q.derivative()


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.lists(fractions_, min_size=20, max_size=20))
def test_eval_commutes(p, q, xs):
    for x in xs:
        assert (p + q)(x) == p(x) + q(x)
        assert (p * q)(x) == p(x) * q(x)
        assert (p - q)(x) == p(x) - q(x)
