from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import CENSUS_PRIMES, census_groups
from hybridring.characters import character_table, contains_in_kernel
from hybridring.constructors import affine, alternating, cyclic, quaternion, symmetric
from hybridring.cyclotomic import CycloNumber
from hybridring.errors import DomainError
from hybridring.groups import generate, normal_subgroups, vp
from hybridring.hybrid import (
    CentralElement,
    character_idempotent,
    check_basechange_down,
    check_basechange_up,
    element_convolution,
    group_ring_shape,
    idempotent_completeness,
    is_N_hybrid,
    is_defect_zero,
    rational_idempotent,
    trace_idempotent,
)

SMALL = [G for G in census_groups() if G.order <= 60]


def normal_of_order(G, k):
    return next(N for N in normal_subgroups(G) if N.order == k)


def brute_hybrid(G, N, p):
    """Definition by degrees: p ∤ |N| and χ(1) carries the full p-part of |G| off N's kernel."""
    if N.order % p == 0:
        return False
    T = character_table(G)
    full = vp(G.order, p)
    return all(vp(c.degree, p) == full for c in T.chars if not contains_in_kernel(c, N))


# ---- idempotents -----------------------------------------------------------------


def test_trace_idempotent_q8_center():
    G = quaternion()
    Z = normal_of_order(G, 2)
    e, integral = trace_idempotent(G, Z, 2)
    assert integral is False
    coeffs = e.element_coefficients()
    assert sorted(c.to_fraction() for c in coeffs) == [0] * 6 + [Fraction(1, 2)] * 2
    assert e.is_idempotent()


def test_q8_faithful_idempotent_not_2_integral():
    G = quaternion()
    T = character_table(G)
    i = next(i for i, c in enumerate(T.chars) if c.degree == 2)
    e = character_idempotent(T, i, verify=True)
    assert e.coefficient(0).to_fraction() == Fraction(1, 2)
    assert not e.is_p_integral(2)
    assert not rational_idempotent(T, i, 2).p_integral
    assert not is_defect_zero(G, T[i], 2)


def test_c5_at_2_single_orbit_epsilon():
    G = cyclic(5)
    T = character_table(G)
    r = rational_idempotent(T, 1, 2)
    assert sorted(r.orbit) == [1, 2, 3, 4]
    coeffs = [c.to_fraction() for c in r.element.element_coefficients()]
    assert coeffs[0] == Fraction(4, 5) and all(c == Fraction(-1, 5) for c in coeffs[1:])
    assert r.coefficients_rational and r.p_integral


def test_rational_character_epsilon_is_e_chi():
    T = character_table(symmetric(4))
    for i in range(len(T)):
        assert rational_idempotent(T, i, 3).element == character_idempotent(T, i)


def test_character_idempotents_are_orthogonal_and_sum_to_one():
    for G in (symmetric(3), alternating(4), quaternion(), cyclic(6)):
        T = character_table(G)
        es = [character_idempotent(T, i) for i in range(len(T))]
        total = CentralElement.zero(G)
        for a, ea in enumerate(es):
            total = total + ea
            assert ea * ea == ea
            for eb in es[a + 1:]:
                assert (ea * eb) == CentralElement.zero(G)
        assert total == CentralElement.one(G)


def test_central_product_matches_convolution():
    for G in (symmetric(3), quaternion(), alternating(4)):
        T = character_table(G)
        a, b = character_idempotent(T, 1), character_idempotent(T, len(T) - 1)
        a = a + CentralElement.one(G).scale(Fraction(1, 3))
        ref = element_convolution(G, a.element_coefficients(), b.element_coefficients())
        assert (a * b).element_coefficients() == ref


@given(st.sampled_from(SMALL), st.data())
def test_epsilon_is_rational_idempotent(G, data):
    T = character_table(G)
    i = data.draw(st.integers(0, len(T) - 1))
    p = data.draw(st.sampled_from(CENSUS_PRIMES))
    r = rational_idempotent(T, i, p)
    assert r.element.is_idempotent()
    assert r.coefficients_rational == r.element.is_rational()


def test_integrality_equals_defect_zero_everywhere():
    for G in census_groups():
        T = character_table(G)
        for p in CENSUS_PRIMES:
            for i, chi in enumerate(T.chars):
                assert rational_idempotent(T, i, p).p_integral == is_defect_zero(G, chi, p), (G.label, p, i)


# ---- hybrid certificates ----------------------------------------------------------


def test_hybrid_examples():
    S4 = symmetric(4)
    V = normal_of_order(S4, 4)
    assert not is_N_hybrid(S4, V, 2).verdict
    assert is_N_hybrid(S4, V, 3).verdict
    A4 = normal_of_order(S4, 12)
    assert not is_N_hybrid(S4, A4, 3).verdict
    assert is_N_hybrid(S4, S4.trivial, 3).verdict
    cert = is_N_hybrid(S4, S4.whole, 5)
    assert cert.verdict and not cert.failures


def test_hybrid_failure_reasons():
    G = symmetric(3)
    cert = is_N_hybrid(G, G.whole, 3)
    assert not cert.verdict and "divides" in cert.reason
    Q = quaternion()
    cert = is_N_hybrid(Q, Q.trivial, 3)
    assert cert.verdict
    C = cyclic(6)
    cert = is_N_hybrid(C, normal_of_order(C, 3), 2)
    assert not cert.verdict and cert.failures


def test_hybrid_rejects_bad_input():
    G = symmetric(3)
    with pytest.raises(DomainError):
        is_N_hybrid(G, G.whole, 4)
    t = next(generate(G, [x]) for x in range(G.order) if G.element_orders[x] == 2)
    with pytest.raises(DomainError):
        is_N_hybrid(G, t, 3)


def test_hybrid_matches_brute_force_definition():
    for G in census_groups():
        for N in normal_subgroups(G):
            for p in CENSUS_PRIMES:
                assert is_N_hybrid(G, N, p).verdict == brute_hybrid(G, N, p), (G.label, N.order, p)


# ---- shapes -------------------------------------------------------------------


def test_golden_shapes():
    S3 = symmetric(3)
    assert group_ring_shape(S3, normal_of_order(S3, 3), 2).labels == ["Z_2[C2]", "M_2(Z_2)"]
    A4 = alternating(4)
    assert group_ring_shape(A4, normal_of_order(A4, 4), 3).labels == ["Z_3[C3]", "M_3(Z_3)"]


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_affine_shapes(q):
    G = affine(q)
    N = normal_of_order(G, q)
    for p in (3, 5, 7, 11):
        if q % p == 0:
            continue
        shape = group_ring_shape(G, N, p)
        assert Counter(shape.labels) == Counter([f"Z_{p}[C{q - 1}]", f"M_{q - 1}(Z_{p})"])


def test_shape_rejects_non_hybrid():
    S4 = symmetric(4)
    with pytest.raises(DomainError):
        group_ring_shape(S4, normal_of_order(S4, 4), 2)


def test_shape_dimension_audit_everywhere():
    for G in census_groups():
        for N in normal_subgroups(G):
            for p in CENSUS_PRIMES:
                if not is_N_hybrid(G, N, p).verdict:
                    continue
                shape = group_ring_shape(G, N, p)
                assert shape.audit_ok
                assert sum(c.dimension for c in shape.components) == G.order


def test_irrational_centers_get_degree():
    G = cyclic(7)
    shape = group_ring_shape(G, G.whole, 2)
    degrees = sorted(c.center_degree for c in shape.components if c.kind == "matrix")
    assert degrees == [3, 3]
    assert shape.labels[0] == "Z_2"
    assert all("unramified" in c.center for c in shape.components if c.center_degree == 3)


# ---- completeness ------------------------------------------------------------------


def test_completeness_examples():
    S4 = symmetric(4)
    ok, total = idempotent_completeness(S4, normal_of_order(S4, 4), 3)
    assert ok and total == CentralElement.one(S4)
    C5 = cyclic(5)
    ok, _ = idempotent_completeness(C5, C5.whole, 2)
    assert ok


def test_completeness_for_every_hybrid():
    for G in census_groups():
        for N in normal_subgroups(G):
            for p in CENSUS_PRIMES:
                if is_N_hybrid(G, N, p).verdict:
                    assert idempotent_completeness(G, N, p)[0], (G.label, N.order, p)


# ---- base change ----------------------------------------------------------------


def basechange_configurations(G):
    Ns = normal_subgroups(G)
    for H in Ns:
        for N in Ns:
            for K in normal_subgroups(G):
                if K.issubset(N) and K.issubset(H):
                    yield H, N, K


def test_basechange_examples():
    S4 = symmetric(4)
    A4, V = normal_of_order(S4, 12), normal_of_order(S4, 4)
    down = check_basechange_down(S4, A4, V, V, 3)
    assert down.lhs and down.rhs and down.status == "respected"
    up = check_basechange_up(S4, A4, V, 3)
    assert up.status == "respected" and up.lhs == up.rhs
    up = check_basechange_up(S4, A4, V, 2)
    assert up.status == "inapplicable"


def test_basechange_never_violated():
    count = 0
    for G in census_groups():
        if G.order > 120:
            continue
        for H, N, K in basechange_configurations(G):
            for p in (3, 5):
                rep = check_basechange_down(G, H, N, K, p)
                assert rep.status != "violated", (G.label, H.order, N.order, K.order, p)
                count += 1
                if N.issubset(H):
                    assert check_basechange_up(G, H, N, p).status != "violated"
    assert count > 100


def test_elements_are_class_functions():
    G = symmetric(3)
    with pytest.raises(DomainError):
        CentralElement(G, [1, 2])
    x = CentralElement(G, [CycloNumber.rational(1), 0, Fraction(1, 3)])
    assert x.is_rational() and not x.is_p_integral(3)
