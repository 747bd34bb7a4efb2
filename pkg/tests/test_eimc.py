import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from hybridring.constructors import (
    affine_frobenius,
    alternating,
    cyclic,
    dicyclic_frobenius,
    direct_product,
    metacyclic,
    quaternion,
    symmetric,
)
from hybridring.errors import DomainError
from hybridring.groups import automorphism_from_images, normal_subgroups
from hybridring.iwasawa import make_lie_group
from hybridring.eimc import (
    EimcCase,
    Level,
    audit,
    best_hybrid_witness,
    case_from_json,
    census,
    census_summary,
    evaluate,
    replay,
)

CASES = Path(__file__).resolve().parent.parent / "cases"


def finite_case(G, p, **kw):
    return EimcCase(p, "finite", G, **kw)


def check_consistent(case):
    v = evaluate(case)
    assert replay(v.trace) == v.level
    assert audit(case, v) == []
    return v


# ---- golden verdicts -------------------------------------------------------------


def test_s4_at_3():
    v = check_consistent(finite_case(symmetric(4), 3, base_field_is_Q=True))
    assert v.level == Level.HOLDS_WITH_UNIQUENESS
    assert v.rules == ["R-HYBRID-SYLOW", "R-MU", "R-UNIQ-UP", "R-BREAKDOWN"]


@pytest.mark.parametrize("p", [5, 7, 11])
def test_s4_above_3(p):
    for base in (True, False):
        v = check_consistent(finite_case(symmetric(4), p, base_field_is_Q=base))
        assert v.level == Level.HOLDS_WITH_UNIQUENESS
        assert v.rules[0] == "R-MAX"


def test_dicyclic_frobenius_holds_and_frob_blocked():
    v = check_consistent(finite_case(dicyclic_frobenius(3, 5), 3, base_field_is_Q=True))
    assert v.level == Level.HOLDS
    assert "R-HYBRID-SYLOW" in v.rules and "R-FROB" not in v.rules
    assert any("R-FROB blocked" in n and "non-abelian" in n for n in v.notes)


def test_modified_affine_holds():
    v = check_consistent(finite_case(affine_frobenius(8, 7), 7, base_field_is_Q=True))
    assert v.level == Level.HOLDS
    assert "R-HYBRID-SYLOW" in v.rules


def test_without_base_q_falls_back_to_mu():
    v = check_consistent(finite_case(symmetric(4), 3))
    assert v.level == Level.CONDITIONAL_ON_MU
    v = check_consistent(finite_case(symmetric(4), 3, mu_zero_known="yes"))
    assert v.level >= Level.HOLDS


def test_a5_stays_conditional():
    for p in (3, 5):
        v = check_consistent(finite_case(alternating(5), p, base_field_is_Q=True))
        assert v.level == Level.CONDITIONAL_ON_MU and v.rules == ["R-MU"]


def test_mu_no_gives_unknown():
    v = check_consistent(finite_case(alternating(5), 3, mu_zero_known="no"))
    assert v.level == Level.UNKNOWN and v.trace == ()


def test_frob_rule_at_kernel_prime():
    v = check_consistent(finite_case(metacyclic(7, 3), 7, base_field_is_Q=True))
    assert "R-FROB" in v.rules and v.level >= Level.HOLDS


def test_lie_mode_case():
    C7 = cyclic(7)
    gd = make_lie_group(C7, automorphism_from_images(C7, {1: 2}), 3)
    v = check_consistent(EimcCase(3, "lie", gdata=gd, base_field_is_Q=True))
    assert v.level == Level.HOLDS_WITH_UNIQUENESS


def test_case_files_evaluate():
    for path in sorted(CASES.glob("*.json")):
        case = case_from_json(json.loads(path.read_text()))
        v = check_consistent(case)
        assert v.level >= Level.HOLDS, path.name


# ---- input validation -------------------------------------------------------------


def test_contradicting_assertion_rejected():
    with pytest.raises(DomainError):
        evaluate(finite_case(symmetric(4), 3, base_field_is_Q=True, assertions={"order:12": "no"}))
    with pytest.raises(DomainError):
        evaluate(finite_case(symmetric(4), 3, base_field_is_Q=True, assertions={"sylow": "yes"}))


def test_bad_cases_rejected():
    with pytest.raises(DomainError):
        finite_case(symmetric(3), 2)
    with pytest.raises(DomainError):
        finite_case(symmetric(3), 3, mu_zero_known="maybe")
    with pytest.raises(DomainError):
        evaluate(finite_case(symmetric(3), 3, assertions={"normal:99": "yes"}))
    with pytest.raises(DomainError):
        evaluate(finite_case(symmetric(3), 3, assertions={"bogus": "yes"}))
    with pytest.raises(DomainError):
        case_from_json({"group": "S4"})
    with pytest.raises(DomainError):
        case_from_json({"group": "S4", "p": "3"})


def test_assertion_keys_resolve_to_same_subgroup():
    G = symmetric(4)
    a = evaluate(finite_case(G, 3, assertions={"order:4*sylow": "yes"}))
    idx = [N.order for N in normal_subgroups(G)].index(4)
    b = evaluate(finite_case(G, 3, assertions={f"normal:{idx}*sylow": "yes"}))
    assert a.level == b.level == Level.HOLDS_WITH_UNIQUENESS
    assert a.rules == b.rules


def test_tampered_trace_fails_audit():
    case = finite_case(symmetric(4), 3, base_field_is_Q=True)
    v = evaluate(case)
    r = v.trace[0]
    bad = type(r)(r.rule, r.citation, tuple((k, (not x) if isinstance(x, bool) else x) for k, x in r.facts),
                  r.conclusion, r.note)
    forged = type(v)(v.case, v.p, v.level, (bad,) + v.trace[1:], v.notes)
    assert audit(case, forged)


# ---- monotonicity ------------------------------------------------------------------

MONO_GROUPS = [symmetric(3), symmetric(4), alternating(4), quaternion(), metacyclic(7, 3),
               direct_product([cyclic(3), cyclic(3)]), dicyclic_frobenius(3, 5)]


@given(st.sampled_from(MONO_GROUPS), st.sampled_from([3, 5, 7]), st.data())
def test_more_facts_never_lower_the_level(G, p, data):
    keys = ["sylow"] + [f"normal:{i}" for i in range(len(normal_subgroups(G)))]
    keys += [f"normal:{i}*sylow" for i in range(len(normal_subgroups(G)))]
    chosen = data.draw(st.lists(st.sampled_from(keys), unique=True, max_size=4))
    base = finite_case(G, p)
    richer = finite_case(G, p, assertions={k: "yes" for k in chosen})
    lo, hi = evaluate(base), evaluate(richer)
    assert hi.level >= lo.level
    with_mu = finite_case(G, p, assertions={k: "yes" for k in chosen}, mu_zero_known="yes")
    assert evaluate(with_mu).level >= hi.level
    assert replay(hi.trace) == hi.level


def test_level_order_and_parse():
    assert Level.UNKNOWN < Level.CONDITIONAL_ON_MU < Level.HOLDS < Level.HOLDS_WITH_UNIQUENESS
    for lv in Level:
        assert Level.parse(lv.label) == lv
    with pytest.raises(DomainError):
        Level.parse("probably")


# ---- witnesses and census ------------------------------------------------------------


def test_best_witness():
    G = symmetric(4)
    wit = best_hybrid_witness(G, 3)
    assert [N.order for N in wit] == [4, 1]
    assert best_hybrid_witness(G, 5)[0].order == 24


def test_census_abelian_all_hwu():
    rows = census({"family": "abelian", "invariants": [[3], [3, 3], [2, 6], [9], [15]]}, [3, 5, 7])
    assert rows and all(r.status == "ok" and r.verdict == "holds-with-uniqueness" for r in rows)


def test_census_metacyclic_at_least_holds():
    rows = census({"family": "metacyclic", "max_ell": 31}, [3, 5, 7])
    assert all(Level.parse(r.verdict) >= Level.HOLDS for r in rows)
    for r in rows:
        ell = int(r.group.split(":")[0][1:])
        if r.p == ell:
            assert "R-FROB" in r.rules
    summary = census_summary(rows)
    assert summary["rows"] == len(rows)


def test_census_skips_unbuildable():
    rows = census({"family": "symmetric", "n": [4, 7]}, [3], cap=2000)
    assert [r.status for r in rows] == ["ok", "skipped"]
    assert census_summary(rows)["by_verdict"]["skipped"] == 1


def test_census_rejects_bad_family():
    with pytest.raises(DomainError):
        census({"family": "nope"}, [3])
    with pytest.raises(DomainError):
        census({"family": "cyclic", "n": [3]}, [2])


def test_census_rows_serialize():
    rows = census({"family": "cyclic", "n": [6]}, [3])
    assert rows[0].tsv().split("\t")[0] == "C6"
    assert json.dumps(rows[0].to_json())
