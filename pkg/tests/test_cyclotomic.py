import cmath
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from hybridring.cyclotomic import (
    CycloNumber,
    cyclo_reduce,
    cyclotomic_poly,
    euler_phi,
    field_degree_over_Qp,
    format_cyclo,
    galois_apply,
    padic_galois_group,
    padic_galois_order,
)
from hybridring.errors import DomainError

MODULI = [1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 20, 24]


@st.composite
def cyclo(draw, e=None):
    if e is None:
        e = draw(st.sampled_from(MODULI))
    terms = draw(st.dictionaries(st.integers(0, e - 1), st.integers(-4, 4), max_size=5))
    den = draw(st.integers(1, 6))
    return CycloNumber.from_exponents(e, terms, den)


def approx(x: CycloNumber) -> complex:
    return x.to_complex()


def test_cyclotomic_poly_matches_sympy():
    x = sympy.Symbol("x")
    for e in range(1, 40):
        ref = sympy.Poly(sympy.cyclotomic_poly(e, x), x).all_coeffs()[::-1]
        assert list(cyclotomic_poly(e)) == [int(c) for c in ref]


def test_zeta4_squared():
    assert CycloNumber.zeta(4) ** 2 == CycloNumber.rational(-1, 4)
    assert cyclo_reduce({2: 1}, 4) == CycloNumber.rational(-1, 4)


def test_vanishing_sum():
    assert cyclo_reduce({1: 1, 2: 1}, 3) == CycloNumber.rational(-1, 3)


def test_golden_ratio_conjugate():
    x = cyclo_reduce({1: 1, 4: 1}, 5)
    assert x * x + x - 1 == CycloNumber.rational(0, 5)
    assert abs(approx(x) - 2 * math.cos(2 * math.pi / 5)) < 1e-12
    y = sympy.Symbol("y")
    assert sympy.minimal_polynomial(2 * sympy.cos(2 * sympy.pi / 5), y) == y ** 2 + y - 1


def test_galois_examples():
    z = CycloNumber.zeta(8)
    assert galois_apply(z, 1) == z
    assert galois_apply(z, 3) == CycloNumber.zeta(8, 3)
    with pytest.raises(DomainError):
        galois_apply(z, 2)


@given(cyclo(e=12), cyclo(e=12), st.sampled_from([1, 5, 7, 11]))
def test_galois_multiplicative(a, b, k):
    assert galois_apply(a * b, k) == galois_apply(a, k) * galois_apply(b, k)
    assert galois_apply(a + b, k) == galois_apply(a, k) + galois_apply(b, k)


@given(cyclo(e=15), st.sampled_from([1, 2, 4, 7, 8, 11, 13, 14]), st.sampled_from([1, 2, 4, 7, 8, 11, 13, 14]))
def test_galois_composition(a, k, j):
    assert galois_apply(galois_apply(a, k), j) == galois_apply(a, (k * j) % 15)


@given(cyclo(), cyclo())
def test_arithmetic_matches_complex(a, b):
    for got, want in ((a + b, approx(a) + approx(b)), (a * b, approx(a) * approx(b)), (a - b, approx(a) - approx(b))):
        assert abs(approx(got) - want) < 1e-9
    if not b.is_zero():
        assert abs(approx(a / b) - approx(a) / approx(b)) < 1e-6 * (1 + abs(approx(a) / approx(b)))


@given(cyclo(e=20), cyclo(e=20), cyclo(e=20))
def test_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    assert a + b == b + a


@given(cyclo(e=24))
def test_canonical_form(a):
    # same value through a different formal expression
    b = (a + CycloNumber.zeta(24, 5)) - CycloNumber.zeta(24, 5)
    assert a == b and a.num == b.num and a.den == b.den and hash(a) == hash(b)


@given(cyclo(e=6), cyclo(e=10))
def test_mixed_moduli(a, b):
    s = a + b
    assert abs(approx(s) - (approx(a) + approx(b))) < 1e-9


def test_inverse():
    x = CycloNumber.from_exponents(7, {1: 1, 3: 2})
    assert x * x.inverse() == CycloNumber.rational(1, 7)
    with pytest.raises(ZeroDivisionError):
        CycloNumber.rational(0, 7).inverse()


def test_rational_helpers():
    h = CycloNumber.rational(Fraction(3, 4), 5)
    assert h.is_rational() and h.to_fraction() == Fraction(3, 4)
    assert not CycloNumber.zeta(5).is_rational()
    assert CycloNumber.rational(Fraction(1, 3)).is_p_integral(2)
    assert not CycloNumber.rational(Fraction(1, 3)).is_p_integral(3)


def test_format():
    assert format_cyclo(CycloNumber.rational(-1, 4)) == "-1"
    s = format_cyclo(CycloNumber.from_exponents(5, {1: 1}, 2))
    assert s == "1/2·z (z=ζ5)"


def test_padic_galois_group_examples():
    g = padic_galois_group(5, 2)
    assert g.order == 4 and set(g.elements) == {1, 2, 3, 4}
    g = padic_galois_group(8, 3)
    assert set(g.elements) == {1, 3}
    assert padic_galois_group(1, 7).order == 1


def test_padic_galois_group_closed_form():
    for e in range(1, 60):
        for p in (2, 3, 5, 7, 11, 13):
            g = padic_galois_group(e, p)
            assert g.order == padic_galois_order(e, p)
            # a group: closed under multiplication
            s = set(g.elements) if e > 1 else {0}
            if e > 1:
                assert all((a * b) % e in s for a in s for b in s)


def test_field_degree_examples():
    assert field_degree_over_Qp([CycloNumber.rational(2)], 3) == 1
    assert field_degree_over_Qp([CycloNumber.zeta(5)], 2) == 4
    real7 = CycloNumber.zeta(7) + CycloNumber.zeta(7, 6)
    assert field_degree_over_Qp([real7], 2) == 3
    # brute force: orbit of the complex value under the decomposition group
    orbit = {round(approx(galois_apply(real7, k)).real, 9) for k in padic_galois_group(7, 2).elements}
    assert len(orbit) == 3


def test_euler_phi():
    assert [euler_phi(n) for n in range(1, 13)] == [int(sympy.totient(n)) for n in range(1, 13)]


def test_zeta_is_root_of_unity():
    for e in MODULI:
        z = CycloNumber.zeta(e)
        assert z ** e == CycloNumber.rational(1, e)
        assert abs(approx(z) - cmath.exp(2j * math.pi / e)) < 1e-12
