from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octocut.polyring import (CC, GF, QQ, QQ_R2, QR2, DomainMismatch, InhomogeneousError,
                              ReductionError, SparsePolynomial, convert_scalar,
                              domain_from_name, parse_polynomial, polynomial_ring, sqrt_mod)

F = GF(10007)
NAMES = ["x", "y", "z"]


def _poly(domain, coeff):
    return st.dictionaries(
        st.tuples(*[st.integers(0, 3)] * 3), coeff, max_size=5
    ).map(lambda t: SparsePolynomial(3, domain, t))


rational = st.fractions(min_value=-20, max_value=20, max_denominator=7)
q_polys = _poly(QQ, rational)
fp_polys = _poly(F, st.integers(0, F.p - 1))


@settings(max_examples=60, deadline=None)
@given(q_polys, q_polys, q_polys)
def test_ring_axioms_over_q(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@settings(max_examples=60, deadline=None)
@given(fp_polys, fp_polys)
def test_ring_axioms_over_fp(a, b):
    assert a * (b + a) == a * b + a * a
    assert (a + b) - b == a


@settings(max_examples=60, deadline=None)
@given(q_polys, q_polys, st.integers(0, 2))
def test_leibniz_rule(a, b, i):
    lhs = (a * b).partial_derivative(i)
    assert lhs == a.partial_derivative(i) * b + a * b.partial_derivative(i)


@settings(max_examples=60, deadline=None)
@given(q_polys, q_polys, st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_reduction_mod_p_is_a_homomorphism(a, b, pt):
    def red(p):
        return p.map_coefficients(F)
    assert red(a * b) == red(a) * red(b)
    assert red(a + b) == red(a) + red(b)
    assert red(a).evaluate(pt) == F.convert(a.evaluate(pt))


@settings(max_examples=60, deadline=None)
@given(q_polys)
def test_parse_round_trip(a):
    assert parse_polynomial(a.to_string(NAMES), NAMES, QQ) == a


def test_parse_examples():
    x, y, z = polynomial_ring(NAMES)
    assert parse_polynomial("x^2 - 1/2*y*z + 3", NAMES) == x**2 - Fraction(1, 2) * y * z + 3
    p = parse_polynomial("(1+2r2)*x - r2*y", NAMES, QQ_R2)
    assert p.coefficient((1, 0, 0)) == QR2(Fraction(1), Fraction(2))
    assert p.coefficient((0, 1, 0)) == QR2(Fraction(0), Fraction(-1))
    assert parse_polynomial("0", NAMES).is_zero()
    with pytest.raises(ValueError):
        parse_polynomial("x + w", NAMES)


def test_sqrt_minus_two():
    assert sqrt_mod(-2, 11) == 3
    r = sqrt_mod(-2, 10009)
    assert (r * r + 2) % 10009 == 0
    for p in (5, 10007):              # -2 is a square mod p iff p = 1, 3 mod 8
        with pytest.raises(ReductionError):
            sqrt_mod(-2, p)


def test_quadratic_field_reduction():
    r2 = QR2(Fraction(0), Fraction(1))
    assert QQ_R2.mul(r2, r2) == QR2(Fraction(-2))
    assert convert_scalar(r2, QQ_R2, GF(11)) == 3
    assert convert_scalar(QR2(Fraction(1), Fraction(1)), QQ_R2, GF(11), sqrt_m2=8) == 9
    with pytest.raises(ReductionError):
        convert_scalar(r2, QQ_R2, GF(11), sqrt_m2=4)
    with pytest.raises(DomainMismatch):
        convert_scalar(1.5 + 0j, CC, QQ)


def test_denominator_divisible_by_p_is_rejected():
    with pytest.raises(ReductionError):
        GF(7).convert(Fraction(1, 7))


def test_mixed_domains_are_rejected():
    a = SparsePolynomial.variable(0, 2, QQ)
    b = SparsePolynomial.variable(0, 2, F)
    with pytest.raises(DomainMismatch):
        a + b


def test_homogeneity():
    x, y, _ = polynomial_ring(NAMES)
    assert (x * y + y**2).homogeneous_degree() == 2
    with pytest.raises(InhomogeneousError):
        (x + y**2).homogeneous_degree()


def test_substitution():
    x, y, z = polynomial_ring(NAMES)
    p = x**2 + y * z
    assert p.substitute({0: y + z}) == (y + z) ** 2 + y * z
    with pytest.raises(ValueError):
        p.substitute_linear({0: y * z})


def test_domain_tags():
    assert domain_from_name("q") == QQ
    assert domain_from_name("fp:10007") == F
    assert domain_from_name("qr2") == QQ_R2
    with pytest.raises(ValueError):
        domain_from_name("fp:10")


def test_documented_scalar_examples():
    F7 = GF(7)
    a = SparsePolynomial.monomial((1, 1), 2, F7, 4)
    b = SparsePolynomial.monomial((1, 1), 2, F7, 3)
    assert (a + b).is_zero()
    one_plus = QR2(Fraction(1), Fraction(1))
    assert QQ_R2.mul(one_plus, one_plus) == QR2(Fraction(-1), Fraction(2))
    assert F7.convert(Fraction(1, 2)) == 4
    with pytest.raises(ReductionError):
        sqrt_mod(-2, 7)


def test_identity_and_inverse_cases():
    x, y, _ = polynomial_ring(NAMES)
    p = x * y - 3 * y
    assert p + 0 == p
    assert p * 1 == p
    assert (p + (-p)).is_zero()
    assert (x + y) * (x - y) == x**2 - y**2


def test_evaluation():
    x, y, _ = polynomial_ring(NAMES)
    assert (x**2 + y**2).evaluate([3, 4, 0]) == 25
    assert SparsePolynomial.zero(3).evaluate([1, 2, 3]) == 0


def test_partial_derivative_examples():
    names = [f"P{i}" for i in range(1, 28)]
    p = parse_polynomial("P9*P18*P27", names)
    assert p.partial_derivative(26) == parse_polynomial("P9*P18", names)
    assert SparsePolynomial.constant(5, 27).partial_derivative(0).is_zero()
    q = parse_polynomial("P18*P27", names)
    zero = SparsePolynomial.zero(27)
    assert q.substitute({8: zero, 17: zero, 26: zero}, 27).is_zero()


@settings(max_examples=40, deadline=None)
@given(q_polys, q_polys, st.lists(st.lists(rational, min_size=3, max_size=3), min_size=3,
                                  max_size=3))
def test_linear_substitution_is_a_ring_map(a, b, matrix):
    x = polynomial_ring(NAMES)
    sub = {i: sum((x[j] * c for j, c in enumerate(row)), SparsePolynomial.zero(3))
           for i, row in enumerate(matrix)}
    sub = {i: f for i, f in sub.items() if not f.is_zero()}
    if len(sub) < 3:
        return
    assert (a * b).substitute_linear(sub) == a.substitute_linear(sub) * b.substitute_linear(sub)
    assert (a + b).substitute_linear(sub) == a.substitute_linear(sub) + b.substitute_linear(sub)
