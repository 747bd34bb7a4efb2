import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy.combinatorics.named_groups import AlternatingGroup, SymmetricGroup

from conftest import census_groups
from hybridring.constructors import (
    affine,
    alternating,
    build_group,
    cyclic,
    dicyclic,
    metacyclic,
    quaternion,
    shortcut_spec,
    symmetric,
)
from hybridring.errors import DomainError, OrderCapError
from hybridring.groups import (
    FiniteGroup,
    Subgroup,
    automorphism_from_images,
    center,
    derived_subgroup,
    describe,
    fingerprint,
    generate,
    identity_automorphism,
    inner_automorphism,
    normal_subgroups,
    quotient,
    sylow_subgroup,
    vp,
)


def brute_classes(G):
    seen, out = set(), []
    for x in range(G.order):
        if x in seen:
            continue
        orb = {G.conjugate(g, x) for g in range(G.order)}
        seen |= orb
        out.append(frozenset(orb))
    return sorted(out, key=min)


def brute_normal(G):
    """Unions of classes containing 1 that are closed under multiplication."""
    classes = [c for c in brute_classes(G) if 0 not in c]
    found = set()
    for r in range(len(classes) + 1):
        for combo in itertools.combinations(classes, r):
            S = {0}.union(*combo)
            if all(G.op(a, b) in S for a in S for b in S):
                found.add(frozenset(S))
    return found


def brute_derived(G):
    comms = {G.commutator(a, b) for a in range(G.order) for b in range(G.order)}
    return set(generate(G, comms).members)


# ---- build_group ----------------------------------------------------------


def test_aff4_is_a4():
    G = build_group(shortcut_spec("Aff4"))
    assert G.order == 12
    assert fingerprint(G) == fingerprint(alternating(4))
    assert describe(G) == "A4"


def test_cyclic_one_is_trivial():
    G = cyclic(1)
    assert G.order == 1 and G.mul.tolist() == [[0]]


def test_metacyclic_21():
    G = metacyclic(7, 3)
    assert G.order == 21 and not G.is_abelian
    assert len(brute_derived(G)) == 7
    assert derived_subgroup(G).order == 7


def test_spec_round_trip():
    for G in census_groups():
        H = build_group(G.spec)
        assert np.array_equal(G.mul, H.mul)


def test_table_spec_validated():
    with pytest.raises(DomainError):
        build_group({"table": [[0, 1], [1, 1]]})
    with pytest.raises(DomainError):
        build_group({"construct": "nope"})
    with pytest.raises(DomainError):
        shortcut_spec("Z7")


def test_order_cap(monkeypatch):
    with pytest.raises(OrderCapError):
        symmetric(5, cap=100)
    monkeypatch.setenv("HYBRIDRING_ORDER_CAP", "50")
    with pytest.raises(OrderCapError):
        affine(8)
    assert affine(7, cap=100).order == 42


def test_identity_and_inverse():
    for G in census_groups():
        ar = np.arange(G.order)
        assert np.array_equal(G.mul[0], ar) and np.array_equal(G.mul[:, 0], ar)
        assert (G.mul[ar, G.inv] == 0).all()


def test_associativity_exhaustive_small():
    for G in census_groups():
        if G.order > 60:
            continue
        m = G.mul
        left = m[m[:, :, None], np.arange(G.order)[None, None, :]]
        right = m[np.arange(G.order)[:, None, None], m[None, :, :]]
        assert np.array_equal(left, right)


# ---- classes ----------------------------------------------------------------


def test_class_sizes_examples():
    assert sorted(symmetric(3).classes.sizes) == [1, 2, 3]
    assert sorted(symmetric(4).classes.sizes) == [1, 3, 6, 6, 8]
    G = cyclic(12)
    assert len(G.classes) == 12


def test_classes_match_brute_force():
    for G in census_groups():
        if G.order > 80:
            continue
        ours = sorted((frozenset(c) for c in G.classes.classes), key=min)
        assert ours == brute_classes(G)


def test_class_counts_against_sympy():
    for n in (3, 4, 5):
        assert len(symmetric(n).classes) == len(SymmetricGroup(n).conjugacy_classes())
    for n in (4, 5):
        assert len(alternating(n).classes) == len(AlternatingGroup(n).conjugacy_classes())


# ---- normal subgroups ------------------------------------------------------


def test_normal_subgroups_examples():
    assert [N.order for N in normal_subgroups(symmetric(4))] == [1, 4, 12, 24]
    assert [N.order for N in normal_subgroups(alternating(5))] == [1, 60]
    assert [N.order for N in normal_subgroups(cyclic(12))] == [1, 2, 3, 4, 6, 12]


def test_normal_subgroups_brute_force():
    for G in census_groups():
        if len(G.classes) > 12:
            continue
        ours = {frozenset(N.members) for N in normal_subgroups(G)}
        assert ours == brute_normal(G), G.label


def test_normal_lattice_closed():
    for G in census_groups():
        Ns = normal_subgroups(G)
        sets = {N.members for N in Ns}
        for A, B in itertools.combinations(Ns, 2):
            assert A.intersection(B).members in sets
            assert generate(G, list(A.members) + list(B.members)).members in sets


# ---- quotients -----------------------------------------------------------------


def test_s4_mod_v4():
    G = symmetric(4)
    V = next(N for N in normal_subgroups(G) if N.order == 4)
    Q, _ = quotient(G, V)
    assert Q.order == 6 and not Q.is_abelian and describe(Q) == "S3"


def test_a4_mod_v4_and_trivial():
    G = alternating(4)
    V = next(N for N in normal_subgroups(G) if N.order == 4)
    Q, _ = quotient(G, V)
    assert describe(Q) == "C3"
    Q1, proj = quotient(G, G.trivial)
    assert Q1.order == 12 and fingerprint(Q1) == fingerprint(G)
    assert sorted(proj.tolist()) == list(range(12))


def test_quotient_is_homomorphism():
    for G in census_groups():
        for N in normal_subgroups(G):
            Q, proj = quotient(G, N)
            assert np.array_equal(proj[G.mul], Q.mul[proj[:, None], proj[None, :]])


def test_quotient_rejects_non_normal():
    G = symmetric(3)
    T = next(generate(G, [x]) for x in range(G.order) if G.element_orders[x] == 2)
    assert not T.is_normal
    with pytest.raises(DomainError):
        quotient(G, T)


# ---- derived, sylow, center ------------------------------------------------------------


def test_derived_examples():
    assert derived_subgroup(symmetric(4)).order == 12
    assert derived_subgroup(cyclic(9)).order == 1
    Q = quaternion()
    D = derived_subgroup(Q)
    assert D.order == 2 and D == center(Q)


def test_derived_brute_force_and_abelian_iff():
    for G in census_groups():
        if G.order > 60:
            continue
        D = derived_subgroup(G)
        assert set(D.members) == brute_derived(G)
        assert (D.order == 1) == (len(G.classes) == G.order)


def test_sylow_examples():
    P, normal = sylow_subgroup(symmetric(4), 3)
    assert P.order == 3 and not normal
    P, normal = sylow_subgroup(alternating(4), 2)
    assert P.order == 4 and normal
    P, normal = sylow_subgroup(symmetric(3), 5)
    assert P.order == 1 and normal


def test_sylow_orders():
    for G in census_groups():
        for p in (2, 3, 5, 7):
            P, normal = sylow_subgroup(G, p)
            assert P.order == p ** vp(G.order, p)
            assert normal == P.is_normal


# ---- automorphisms ----------------------------------------------------------------


def test_automorphism_orders():
    G = cyclic(7)
    assert identity_automorphism(G).order == 1
    assert automorphism_from_images(G, {1: 2}).order == 3
    S = symmetric(4)
    t = next(x for x in range(S.order) if S.element_orders[x] == 2 and S.classes.sizes[S.classes.class_of[x]] == 6)
    assert inner_automorphism(S, t).order == 2


def test_automorphism_rejects_non_homomorphism():
    with pytest.raises(DomainError):
        automorphism_from_images(cyclic(6), {1: 2})


@given(st.sampled_from([G for G in census_groups() if 1 < G.order <= 60]), st.data())
def test_inner_automorphism_is_homomorphism(G, data):
    g = data.draw(st.integers(0, G.order - 1))
    a = inner_automorphism(G, g)
    x = data.draw(st.integers(0, G.order - 1))
    y = data.draw(st.integers(0, G.order - 1))
    assert a(G.op(x, y)) == G.op(a(x), a(y))
    assert a.compose(a.inverse()).is_identity


@given(st.sampled_from([G for G in census_groups() if G.order > 1]), st.data())
def test_generate_closed(G, data):
    gens = data.draw(st.lists(st.integers(0, G.order - 1), max_size=3))
    S = generate(G, gens)
    assert G.order % S.order == 0
    m = list(S.members)
    assert all(G.op(a, b) in S for a in m for b in m)


def test_subgroup_checks():
    G = dicyclic(3)
    with pytest.raises(DomainError):
        Subgroup(G, [0, 1], check=True)
    assert isinstance(G, FiniteGroup)
