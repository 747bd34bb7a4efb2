import time
from collections import Counter

import pytest

from conftest import lie_instances
from hybridring.characters import character_table
from hybridring.constructors import affine, alternating, cyclic, direct_product, metacyclic, quaternion, symmetric
from hybridring.errors import DomainError
from hybridring.groups import (
    automorphism_from_images,
    derived_subgroup,
    identity_automorphism,
    inner_automorphism,
    normal_subgroups,
    vp,
)
from hybridring.hybrid import group_ring_shape, is_N_hybrid
from hybridring.iwasawa import (
    codescent_from_number_field,
    commutator_and_commutativity,
    equivalence_classes,
    finite_normal_subgroups,
    gamma_orbits,
    induced_quotient_action,
    is_lambda_N_hybrid,
    lambda_idempotent_completeness,
    lambda_shape,
    make_lie_group,
)


def normal_of_order(G, k):
    return next(N for N in normal_subgroups(G) if N.order == k)


def p_element(G, p):
    return next(x for x in range(1, G.order) if int(G.element_orders[x]) == p)


# ---- construction ---------------------------------------------------------------


def test_make_lie_group_examples():
    gd = make_lie_group(cyclic(7), None, 3)
    assert gd.n == 0 and gd.alpha_order == 1 and gd.finite_quotient().order == 7
    C7 = cyclic(7)
    gd = make_lie_group(C7, automorphism_from_images(C7, {1: 2}), 3)
    assert gd.n == 1 and gd.finite_quotient().order == 21
    assert not gd.finite_quotient().is_abelian


def test_make_lie_group_rejects():
    C7 = cyclic(7)
    with pytest.raises(DomainError):
        make_lie_group(C7, None, 2)
    with pytest.raises(DomainError):
        make_lie_group(C7, automorphism_from_images(C7, {1: 3}), 3)  # order 6
    with pytest.raises(DomainError):
        make_lie_group(C7, None, 9)


def test_finite_quotient_contains_h_as_normal():
    for H, alpha, p in lie_instances()[::7]:
        gd = make_lie_group(H, alpha, p)
        Gn = gd.finite_quotient()
        assert Gn.order == H.order * gd.alpha_order
        assert gd.h_subgroup().is_normal


def test_alpha_stable_normal_subgroups():
    H = cyclic(7)
    gd = make_lie_group(H, automorphism_from_images(H, {1: 2}), 3)
    assert [N.order for N in finite_normal_subgroups(gd)] == [1, 7]
    Q = quaternion()
    gd = make_lie_group(Q, identity_automorphism(Q), 3)
    assert len(finite_normal_subgroups(gd)) == len(normal_subgroups(Q))


# ---- orbits -----------------------------------------------------------------------


def test_gamma_orbits_examples():
    C7 = cyclic(7)
    gd = make_lie_group(C7, automorphism_from_images(C7, {1: 2}), 3)
    sizes = sorted(o.w for o in gamma_orbits(gd).orbits)
    assert sizes == [1, 3, 3]
    S4 = symmetric(4)
    gd = make_lie_group(S4, inner_automorphism(S4, p_element(S4, 3)), 3)
    assert all(o.w == 1 for o in gamma_orbits(gd).orbits)


def test_orbit_sizes_are_p_powers_and_partition():
    for H, alpha, p in lie_instances():
        gd = make_lie_group(H, alpha, p)
        data = gamma_orbits(gd)
        flat = sorted(i for o in data.orbits for i in o.characters)
        assert flat == list(range(len(character_table(H))))
        for o in data.orbits:
            assert o.w == p ** vp(o.w, p)
            assert o.w <= gd.alpha_order


def test_equivalence_classes_coarsen_both_partitions():
    for H, alpha, p in lie_instances()[::5]:
        gd = make_lie_group(H, alpha, p)
        classes = equivalence_classes(gd)
        where = {i: k for k, cls in enumerate(classes) for i in cls}
        for o in gamma_orbits(gd).orbits:
            assert len({where[i] for i in o.characters}) == 1
        for orb in character_table(H).padic_orbits(p).orbits:
            assert len({where[i] for i in orb}) == 1


# ---- hybrid criterion -----------------------------------------------------------


def test_lambda_hybrid_examples():
    S4 = symmetric(4)
    gd = make_lie_group(S4, None, 3)
    assert is_lambda_N_hybrid(gd, normal_of_order(S4, 4)).verdict
    assert not is_lambda_N_hybrid(gd, normal_of_order(S4, 12)).verdict
    C7 = cyclic(7)
    gd = make_lie_group(C7, automorphism_from_images(C7, {1: 2}), 3)
    cert = is_lambda_N_hybrid(gd, C7.whole)
    assert cert.verdict and cert.direct_verdict


def test_lambda_hybrid_rejects_unstable_n():
    V = direct_product([cyclic(2), cyclic(2)])
    a, b = 1, 2
    alpha = automorphism_from_images(V, {a: b, b: V.op(a, b)})
    gd = make_lie_group(V, alpha, 3)
    moved = next(N for N in normal_subgroups(V) if N.order == 2)
    with pytest.raises(DomainError):
        is_lambda_N_hybrid(gd, moved)
    assert [N.order for N in finite_normal_subgroups(gd)] == [1, 4]


def test_two_paths_agree_on_census():
    start = time.perf_counter()
    total = hybrid = 0
    for H, alpha, p in lie_instances():
        gd = make_lie_group(H, alpha, p)
        for N in finite_normal_subgroups(gd):
            cert = is_lambda_N_hybrid(gd, N)
            assert cert.group_ring.verdict == cert.direct_verdict == cert.verdict
            total += 1
            hybrid += cert.verdict
    assert total >= 200 and hybrid > 0
    assert time.perf_counter() - start < 300


def test_lambda_completeness_on_hybrid_instances():
    for H, alpha, p in lie_instances()[::3]:
        gd = make_lie_group(H, alpha, p)
        for N in finite_normal_subgroups(gd):
            if is_lambda_N_hybrid(gd, N).verdict:
                assert lambda_idempotent_completeness(gd, N)[0], (H.label, p, N.order)


# ---- shapes ----------------------------------------------------------------------


def test_s4_v4_shape():
    S4 = symmetric(4)
    gd = make_lie_group(S4, None, 3)
    shape = lambda_shape(gd, normal_of_order(S4, 4))
    assert Counter(shape.labels) == Counter(["Z_3[[S3⋊Γ]]", "M_3(Z_3[[T]])", "M_3(Z_3[[T]])"])
    assert all(c.w == 1 for c in shape.components if c.kind == "matrix")
    assert shape.audit_ok


def test_s4_v4_shape_any_semidirect_product():
    S4 = symmetric(4)
    gd = make_lie_group(S4, inner_automorphism(S4, p_element(S4, 3)), 3)
    shape = lambda_shape(gd, normal_of_order(S4, 4))
    assert Counter(shape.labels) == Counter(["Z_3[[S3⋊Γ]]", "M_3(Z_3[[T]])", "M_3(Z_3[[T]])"])


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_affine_iwasawa_shape(q):
    H = affine(q)
    N = normal_of_order(H, q)
    for p in (3, 5, 7):
        if q % p == 0:
            continue
        alphas = [None]
        if H.order % p == 0:
            alphas.append(inner_automorphism(H, p_element(H, p)))
        for alpha in alphas:
            gd = make_lie_group(H, alpha, p)
            shape = lambda_shape(gd, N, refine=False)
            assert Counter(shape.labels) == Counter([f"Z_{p}[[C{q - 1}⋊Γ]]", f"M_{q - 1}(Z_{p}[[T]])"])


def test_refined_shape_when_p_coprime_to_h():
    H = affine(5)
    gd = make_lie_group(H, None, 3)
    shape = lambda_shape(gd, normal_of_order(H, 5))
    assert shape.is_maximal
    assert all(c.kind == "matrix" for c in shape.components)
    assert "M_4(Z_3[[T]])" in shape.labels and shape.audit_ok


def test_shape_audit_and_w_everywhere():
    for H, alpha, p in lie_instances()[::4]:
        gd = make_lie_group(H, alpha, p)
        for N in finite_normal_subgroups(gd):
            if not is_lambda_N_hybrid(gd, N).verdict:
                continue
            for refine in (True, False):
                shape = lambda_shape(gd, N, refine=refine)
                assert shape.audit_ok
                for c in shape.components:
                    assert c.w == p ** vp(c.w, p)


def test_identity_alpha_matches_group_ring_shape():
    for H in (symmetric(4), alternating(4), affine(7), metacyclic(7, 3)):
        for p in (3, 5, 7):
            gd = make_lie_group(H, None, p)
            for N in finite_normal_subgroups(gd):
                if not is_N_hybrid(H, N, p).verdict:
                    continue
                fin = group_ring_shape(H, N, p)
                lam = lambda_shape(gd, N, refine=False)
                want = sorted((c.size, c.center_degree) for c in fin.components if c.kind == "matrix")
                got = sorted((c.size, c.field_degree) for c in lam.components if c.kind == "matrix")
                assert got == want, (H.label, p, N.order)


def test_shape_rejects_non_hybrid():
    S4 = symmetric(4)
    with pytest.raises(DomainError):
        lambda_shape(make_lie_group(S4, None, 3), normal_of_order(S4, 12))


def test_induced_quotient_action():
    C7 = cyclic(7)
    gd = make_lie_group(C7, automorphism_from_images(C7, {1: 2}), 3)
    Q, a = induced_quotient_action(gd, C7.trivial)
    assert Q.order == 7 and a.order == 3
    Q, a = induced_quotient_action(gd, C7.whole)
    assert Q.order == 1 and a.is_identity


# ---- commutator ---------------------------------------------------------------------


def test_commutator_examples():
    S4 = symmetric(4)
    rep = commutator_and_commutativity(make_lie_group(S4, None, 3))
    assert rep.subgroup.order == 12 and not rep.matrix_over_commutative and rep.cross_checked
    C7 = cyclic(7)
    rep = commutator_and_commutativity(make_lie_group(C7, automorphism_from_images(C7, {1: 2}), 3))
    assert rep.subgroup.order == 7 and rep.matrix_over_commutative
    rep = commutator_and_commutativity(make_lie_group(C7, None, 3))
    assert rep.subgroup.order == 1


def test_commutator_cross_checked_on_census():
    for H, alpha, p in lie_instances():
        gd = make_lie_group(H, alpha, p)
        rep = commutator_and_commutativity(gd)
        assert rep.cross_checked
        assert derived_subgroup(H).issubset(rep.subgroup)
        if alpha.is_identity:
            assert rep.subgroup == derived_subgroup(H)


# ---- descent from a finite Galois group ---------------------------------------------


def test_codescent_s4():
    S4 = symmetric(4)
    code = codescent_from_number_field(S4, 3)
    assert code.gdata.H.order == 24 and code.gdata.alpha.is_identity


def test_codescent_twisted():
    G = metacyclic(7, 3)
    code = codescent_from_number_field(G, 3, h_index=3)
    assert code.gdata.H.order == 7
    assert code.gdata.alpha.order == 3
    assert int(G.element_orders[code.generator]) == 3


def test_codescent_rejects():
    with pytest.raises(DomainError):
        codescent_from_number_field(symmetric(4), 3, h_index=3)
    with pytest.raises(DomainError):
        codescent_from_number_field(symmetric(4), 3, h_index=2)
    with pytest.raises(DomainError):
        codescent_from_number_field(symmetric(4), 2)


def test_codescent_with_n():
    G = alternating(4)
    V = normal_of_order(G, 4)
    code = codescent_from_number_field(G, 3, h_index=3, N=V)
    assert code.N_in_H is not None and code.N_in_H.order == 4 and code.N_in_H.is_whole()
