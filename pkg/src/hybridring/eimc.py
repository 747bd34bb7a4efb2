"""EIMC verdicts derived from group data plus asserted arithmetic facts.

A case is either a finite Galois group G = Gal(L/K) (the cyclotomic
Z_p-extension L_∞/K is then studied) or a Lie group H ⋊ Γ given directly.
Rules fire on computed group facts and on three-valued assertions of the
form "the fixed field of S is abelian over Q".  Every fired rule records
the facts it consumed so the verdict can be replayed and audited.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable


from .characters import character_table, inner_product, restrict, trivial_character
from .constructors import (
    affine,
    affine_frobenius,
    alternating,
    build_group,
    cyclic,
    dicyclic,
    dicyclic_frobenius,
    dihedral,
    direct_product,
    metacyclic,
    shortcut_spec,
    symmetric,
    unitriangular_frobenius,
)
from .errors import DomainError, OrderCapError
from .frobenius import frobenius_structure
from .groups import (
    FiniteGroup,
    Subgroup,
    automorphism_from_images,
    derived_subgroup,
    describe,
    generate,
    is_prime,
    normal_subgroups,
    prime_factors,
    quotient,
    sylow_subgroup,
)
from .hybrid import is_N_hybrid
from .iwasawa import (
    LieGroupData,
    codescent_from_number_field,
    commutator_and_commutativity,
    finite_normal_subgroups,
    induced_quotient_action,
    is_lambda_N_hybrid,
)


class Level(IntEnum):
    UNKNOWN = 0
    CONDITIONAL_ON_MU = 1
    HOLDS = 2
    HOLDS_WITH_UNIQUENESS = 3

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def parse(cls, text: str) -> "Level":
        try:
            return cls[text.upper().replace("-", "_")]
        except KeyError:
            raise DomainError(f"unknown verdict level {text!r}") from None


TRI = ("yes", "no", "unknown")

CITATIONS = {
    "R-MAX": "Theorem: if p does not divide |H| then the EIMC with uniqueness holds",
    "R-ABEL-SYLOW": "Corollary: if the fixed field of a Sylow p-subgroup is abelian over Q then the EIMC holds",
    "R-HYBRID-ABEL": "Theorem: Z_p[G] N-hybrid and L^N/Q abelian give the EIMC with uniqueness",
    "R-HYBRID-SYLOW": "Theorem: Z_p[G] N-hybrid and (L^N)^Pbar = L^(NP) abelian over Q give the EIMC",
    "R-BREAKDOWN": "Theorem: for Λ(𝒢) N-hybrid the EIMC (with uniqueness) holds for 𝒢 iff it holds for 𝒢/N",
    "R-MU": "Theorem: the μ=0 hypothesis implies the EIMC",
    "R-FROB": "Corollary: Frobenius group with abelian complement V and L^N/Q abelian",
    "R-UNIQ-UP": "Remark: SK_1(Q(𝒢)) vanishes when no skewfields occur, so existence gives uniqueness",
}


def _tri(v, what: str) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "unknown"
    if v not in TRI:
        raise DomainError(f"{what} must be one of yes/no/unknown, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# cases


@dataclass
class EimcCase:
    p: int
    mode: str = "finite"  # "finite" or "lie"
    G: FiniteGroup | None = None
    gdata: LieGroupData | None = None
    assertions: dict = field(default_factory=dict)  # key -> "yes"/"no"/"unknown"
    mu_zero_known: str = "unknown"
    base_field_is_Q: bool = False
    no_skewfields_assertion: str = "unknown"
    h_index: int = 1
    label: str = ""

    def __post_init__(self):
        if not is_prime(self.p) or self.p == 2:
            raise DomainError("EIMC cases need an odd prime p")
        if self.mode not in ("finite", "lie"):
            raise DomainError(f"mode must be 'finite' or 'lie', got {self.mode!r}")
        if self.mode == "finite" and self.G is None:
            raise DomainError("finite mode needs the Galois group G")
        if self.mode == "lie":
            if self.gdata is None:
                raise DomainError("lie mode needs LieGroupData")
            if self.gdata.p != self.p:
                raise DomainError("prime of the case differs from the Lie group's prime")
        self.mu_zero_known = _tri(self.mu_zero_known, "mu_zero_known")
        self.no_skewfields_assertion = _tri(self.no_skewfields_assertion, "no_skewfields_assertion")
        self.assertions = {str(k): _tri(v, f"assertion {k!r}") for k, v in self.assertions.items()}
        if not self.label:
            self.label = self.G.label if self.mode == "finite" else self.gdata.label

    def with_assertions(self, extra: dict) -> "EimcCase":
        merged = dict(self.assertions)
        merged.update(extra)
        return EimcCase(self.p, self.mode, self.G, self.gdata, merged, self.mu_zero_known,
                        self.base_field_is_Q, self.no_skewfields_assertion, self.h_index, self.label)


def _group_from_json(value, cap) -> FiniteGroup:
    if isinstance(value, str):
        return build_group(shortcut_spec(value), cap)
    return build_group(value, cap)


def case_from_json(data: dict, cap: int | None = None) -> EimcCase:
    if not isinstance(data, dict):
        raise DomainError("case file must hold a JSON object")
    for key in ("group", "p"):
        if key not in data:
            raise DomainError(f"case is missing {key!r}")
    p = data["p"]
    if isinstance(p, bool) or not isinstance(p, int):
        raise DomainError("'p' must be an integer")
    mode = data.get("mode", "finite")
    G = _group_from_json(data["group"], cap)
    assertions = data.get("assertions", {})
    if not isinstance(assertions, dict):
        raise DomainError("'assertions' must be an object")
    common = dict(
        assertions=assertions,
        mu_zero_known=data.get("mu_zero_known", "unknown"),
        base_field_is_Q=bool(data.get("base_field_is_Q", False)),
        no_skewfields_assertion=data.get("no_skewfields_assertion", "unknown"),
        label=str(data.get("label", "")),
    )
    if mode == "lie":
        alpha = data.get("alpha")
        if alpha is None:
            aut = None
        elif isinstance(alpha, dict):
            aut = automorphism_from_images(G, {int(k): int(v) for k, v in alpha.items()})
        else:
            raise DomainError("'alpha' must map generators of H to their images")
        from .iwasawa import make_lie_group

        return EimcCase(p, "lie", None, make_lie_group(G, aut, p, cap=cap), **common)
    h_index = data.get("h_index", 1)
    if isinstance(h_index, bool) or not isinstance(h_index, int):
        raise DomainError("'h_index' must be an integer")
    return EimcCase(p, "finite", G, None, h_index=h_index, **common)


# ---------------------------------------------------------------------------
# group-side context


class _Context:
    """Finite group data behind a case: the ambient finite group, its Sylow
    p-subgroup, normal subgroups eligible as N, and the Lie group data."""

    def __init__(self, case: EimcCase):
        self.case = case
        p = case.p
        if case.mode == "finite":
            self.top = case.G
            self.normals = list(normal_subgroups(case.G))
            self.code = codescent_from_number_field(case.G, p, h_index=case.h_index)
            self.gdata = self.code.gdata
        else:
            self.gdata = case.gdata
            self.top = self.gdata.finite_quotient()
            self.normals = [self.gdata.lift(N) for N in finite_normal_subgroups(self.gdata)]
            self.code = None
        self.P, self.P_normal = sylow_subgroup(self.top, p)
        self.derived = derived_subgroup(self.top)
        self.by_key = {self._key(S): S for S in self._named()}
        self.values = self._resolve()

    # naming ------------------------------------------------------------
    def _named(self) -> list[Subgroup]:
        out = list(self.normals) + [self.P]
        out += [self.np(N) for N in self.normals]
        return out

    def np(self, N: Subgroup) -> Subgroup:
        return generate(self.top, list(N.members) + list(self.P.members))

    def _key(self, S: Subgroup) -> str:
        if S == self.P:
            return "sylow"
        for i, N in enumerate(self.normals):
            if S == N:
                return f"normal:{i}"
        for i, N in enumerate(self.normals):
            if S == self.np(N):
                return f"normal:{i}*sylow"
        return "members:" + ",".join(map(str, S.members))  # pragma: no cover

    def key(self, S: Subgroup) -> str:
        return self._key(S)

    def parse_key(self, text: str) -> Subgroup:
        t = text.replace(" ", "")
        with_sylow = t.endswith("*sylow")
        base = t[: -len("*sylow")] if with_sylow else t
        if base == "sylow" and not with_sylow:
            return self.P
        if base.startswith("normal:"):
            try:
                N = self.normals[int(base[7:])]
            except (ValueError, IndexError):
                raise DomainError(f"assertion key {text!r} names no normal subgroup") from None
        elif base.startswith("order:"):
            try:
                k = int(base[6:])
            except ValueError:
                raise DomainError(f"bad assertion key {text!r}") from None
            hits = [N for N in self.normals if N.order == k]
            if len(hits) != 1:
                raise DomainError(f"assertion key {text!r} matches {len(hits)} normal subgroups")
            N = hits[0]
        elif base.startswith("members:"):
            try:
                N = Subgroup(self.top, [int(x) for x in base[8:].split(",") if x], check=True)
            except (ValueError, DomainError) as exc:
                raise DomainError(f"bad subgroup in assertion key {text!r}: {exc}") from None
        else:
            raise DomainError(f"unknown assertion key {text!r}; use sylow, normal:i, order:k or members:...")
        return self.np(N) if with_sylow else N

    # assertion values ----------------------------------------------------
    def derived_value(self, S: Subgroup) -> str:
        """Fixed field of S abelian over Q, when K = Q: iff S contains the commutator subgroup."""
        return "yes" if self.derived.issubset(S) else "no"

    def _resolve(self) -> dict:
        case = self.case
        vals: dict[tuple, str] = {}
        for k, v in case.assertions.items():
            S = self.parse_key(k)
            if case.base_field_is_Q and v != "unknown":
                d = self.derived_value(S)
                if d != v:
                    raise DomainError(
                        f"assertion {k!r} = {v} contradicts the group: with K = Q the fixed field of a subgroup "
                        f"is abelian over Q exactly when the subgroup contains the commutator subgroup "
                        f"(here: {d})")
            prev = vals.get(S.members)
            if prev is not None and prev != v and "unknown" not in (prev, v):
                raise DomainError(f"conflicting assertions for the fixed field named by {k!r}")
            if prev is None or prev == "unknown":
                vals[S.members] = v
        return vals

    def value(self, S: Subgroup) -> str:
        v = self.values.get(S.members, "unknown")
        if v == "unknown" and self.case.base_field_is_Q:
            return self.derived_value(S)
        return v

    def hybrid(self, N: Subgroup) -> bool:
        if self.case.mode == "finite":
            return is_N_hybrid(self.case.G, N, self.case.p).verdict
        Nh = Subgroup(self.gdata.H, N.members)
        return is_lambda_N_hybrid(self.gdata, Nh).verdict


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class FiredRule:
    rule: str
    citation: str
    facts: tuple  # sorted (name, value) pairs
    conclusion: Level
    note: str = ""

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "citation": self.citation,
            "facts": {k: v for k, v in self.facts},
            "conclusion": self.conclusion.label,
            "note": self.note,
        }


@dataclass(frozen=True)
class EimcVerdict:
    case: str
    p: int
    level: Level
    trace: tuple[FiredRule, ...]
    notes: tuple[str, ...] = ()

    @property
    def rules(self) -> list[str]:
        return [r.rule for r in self.trace]

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "p": self.p,
            "level": self.level.label,
            "trace": [r.to_json() for r in self.trace],
            "notes": list(self.notes),
        }

    def render(self) -> str:
        lines = [f"EIMC verdict for {self.case} at p = {self.p}: {self.level.label}"]
        for r in self.trace:
            facts = ", ".join(f"{k}={v}" for k, v in r.facts)
            lines.append(f"  [{r.rule}] -> {r.conclusion.label}: {r.citation}")
            lines.append(f"      facts: {facts}")
            if r.note:
                lines.append(f"      note: {r.note}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)


def _fire(rule: str, facts: dict, level: Level, note: str = "", citation: str | None = None) -> FiredRule:
    return FiredRule(rule, citation or CITATIONS[rule], tuple(sorted(facts.items())), level, note)


def _is_prime_power(n: int) -> bool:
    return n > 1 and len(prime_factors(n)) == 1


def _no_skewfields_auto(gdata: LieGroupData) -> tuple[bool, str]:
    """alpha = id and every irreducible character of H rational with Schur index 1 over Q.

    Rational characters are real, so their Schur index is 1 or 2; an odd
    multiplicity of the trivial character in some restriction to a cyclic
    subgroup forces index 1.
    """
    if not gdata.alpha.is_identity:
        return False, "alpha is not the identity"
    H = gdata.H
    T = character_table(H)
    reps = list(H.classes.representatives)
    cyclics = []
    seen = set()
    for r in reps:
        C = generate(H, [int(r)])
        if C.members not in seen:
            seen.add(C.members)
            cyclics.append(C)
    for i, chi in enumerate(T.chars):
        if not chi.is_rational():
            return False, f"character {i} of H is not rational-valued"
        ok = False
        for C in cyclics:
            res = restrict(chi, C)
            m = inner_product(res, trivial_character(res.group))
            if int(m) % 2 == 1:
                ok = True
                break
        if not ok:
            return False, f"no cyclic subgroup certifies Schur index 1 for character {i}"
    return True, "alpha = id and all characters of H are rational with Schur index 1"


def _quotient_case(ctx: _Context, N: Subgroup) -> EimcCase:
    """The case for L^N (finite mode) or 𝒢/N (lie mode)."""
    case = ctx.case
    mu = case.mu_zero_known if case.mu_zero_known == "yes" else "unknown"
    if case.mode == "finite":
        Q, proj = quotient(case.G, N)
        mapped = {}
        for members, v in ctx.values.items():
            if set(N.members) <= set(members):
                mapped["members:" + ",".join(map(str, sorted(set(int(proj[x]) for x in members))))] = v
        return EimcCase(case.p, "finite", Q, None, mapped, mu, case.base_field_is_Q,
                        case.no_skewfields_assertion, case.h_index, f"{case.label}/{N.order}")
    gd = ctx.gdata
    Nh = Subgroup(gd.H, N.members)
    Q, qalpha = induced_quotient_action(gd, Nh)
    qd = LieGroupData(Q, qalpha, case.p, cap=gd.cap)
    _, proj = quotient(gd.H, Nh)
    m = qd.alpha_order
    nh = gd.H.order
    mapped = {}
    for members, v in ctx.values.items():
        if set(N.members) <= set(members):
            img = sorted({int(proj[x % nh]) + Q.order * ((x // nh) % m) for x in members})
            mapped["members:" + ",".join(map(str, img))] = v
    return EimcCase(case.p, "lie", None, qd, mapped, mu, case.base_field_is_Q,
                    case.no_skewfields_assertion, 1, f"{case.label}/{N.order}")


def _try_uniqueness(ctx: _Context, fired: list) -> bool:
    """Append R-UNIQ-UP when the current level is holds; returns whether the check ran."""
    case = ctx.case
    level = max((r.conclusion for r in fired), default=Level.UNKNOWN)
    if not Level.HOLDS <= level < Level.HOLDS_WITH_UNIQUENESS:
        return False
    comm = commutator_and_commutativity(ctx.gdata)
    auto, why = _no_skewfields_auto(ctx.gdata)
    facts = {"level_before": level.label, "p_divides_commutator": not comm.matrix_over_commutative,
             "no_skewfields_assertion": case.no_skewfields_assertion, "auto_no_skewfields": auto}
    if comm.matrix_over_commutative:
        fired.append(_fire("R-UNIQ-UP", facts, Level.HOLDS_WITH_UNIQUENESS,
                           f"p does not divide |𝒢′| = {comm.subgroup.order}"))
    elif case.no_skewfields_assertion == "yes":
        fired.append(_fire("R-UNIQ-UP", facts, Level.HOLDS_WITH_UNIQUENESS, "no skewfields asserted"))
    elif auto:
        fired.append(_fire("R-UNIQ-UP", facts, Level.HOLDS_WITH_UNIQUENESS, f"no skewfields derived: {why}"))
    return True


def evaluate(case: EimcCase) -> EimcVerdict:
    ctx = _Context(case)
    p = case.p
    fired: list[FiredRule] = []
    notes: list[str] = []
    H = ctx.gdata.H
    finite = case.mode == "finite"

    # R-MAX
    if H.order % p != 0:
        fired.append(_fire("R-MAX", {"p_divides_H": False, "H_order": H.order}, Level.HOLDS_WITH_UNIQUENESS))

    # R-ABEL-SYLOW
    sv = ctx.value(ctx.P)
    if sv == "yes":
        fired.append(_fire("R-ABEL-SYLOW", {"assertion:sylow": "yes"}, Level.HOLDS))
        if not ctx.P_normal:
            notes.append("the Sylow fixed field is asserted abelian over Q but the Sylow subgroup is not normal")

    # hybrid rules
    hybrid_Ns = [N for N in ctx.normals if ctx.hybrid(N)]
    tag = "Z_p[G]" if finite else "Λ(𝒢)"
    for N in hybrid_Ns:
        k = ctx.key(N)
        if ctx.value(N) == "yes":
            cite = None if finite else "Theorem: Λ(𝒢) N-hybrid and ℒ^N/Q abelian give the EIMC with uniqueness"
            fired.append(_fire("R-HYBRID-ABEL", {f"hybrid:{k}": True, f"assertion:{k}": "yes"},
                               Level.HOLDS_WITH_UNIQUENESS, f"{tag} is N-hybrid for N of order {N.order}", cite))
        NP = ctx.np(N)
        kp = ctx.key(NP)
        if ctx.value(NP) == "yes":
            cite = None if finite else "Theorem: Λ(𝒢) N-hybrid and (ℒ^N)^Pbar abelian over Q give the EIMC"
            fired.append(_fire("R-HYBRID-SYLOW", {f"hybrid:{k}": True, f"assertion:{kp}": "yes"}, Level.HOLDS,
                               f"N of order {N.order}, NP of order {NP.order}", cite))

    # R-MU
    if case.mu_zero_known == "yes":
        fired.append(_fire("R-MU", {"mu_zero_known": "yes"}, Level.HOLDS))
    elif case.mu_zero_known == "unknown":
        fired.append(_fire("R-MU", {"mu_zero_known": "unknown"}, Level.CONDITIONAL_ON_MU,
                           "μ = 0 unresolved: the EIMC holds conditionally on it"))

    # R-FROB
    if finite:
        S = frobenius_structure(case.G)
        if S is not None:
            Vg, _ = S.complement.as_group()
            kv = ctx.value(S.kernel)
            if not Vg.is_abelian:
                notes.append(f"R-FROB blocked: G is a Frobenius group but its complement of order "
                             f"{S.complement.order} is non-abelian")
            elif kv == "yes":
                kern_key = ctx.key(S.kernel)
                facts = {"frobenius": True, "complement_abelian": True, f"assertion:{kern_key}": "yes",
                         "p_divides_kernel": S.kernel.order % p == 0,
                         "kernel_prime_power": _is_prime_power(S.kernel.order)}
                if S.kernel.order % p != 0:
                    fired.append(_fire("R-FROB", facts, Level.HOLDS_WITH_UNIQUENESS, "p does not divide |N|"))
                elif _is_prime_power(S.kernel.order):
                    fired.append(_fire("R-FROB", facts, Level.HOLDS, "the kernel is an ℓ-group"))

    # R-UNIQ-UP is tried on the direct rules first, then once more after the breakdown
    uniq_tried = _try_uniqueness(ctx, fired)
    # R-BREAKDOWN: recurse on the quotient by each nontrivial hybrid N
    for N in hybrid_Ns:
        if N.order == 1:
            continue
        sub = evaluate(_quotient_case(ctx, N))
        if sub.level > Level.UNKNOWN:
            k = ctx.key(N)
            fired.append(_fire("R-BREAKDOWN", {f"hybrid:{k}": True, "quotient_level": sub.level.label},
                               sub.level, f"quotient by N of order {N.order} evaluates to {sub.level.label}; "
                               "every level, conditional-on-mu included, is transferred through the equivalence"))

    if not uniq_tried:
        _try_uniqueness(ctx, fired)
    level = max((r.conclusion for r in fired), default=Level.UNKNOWN)
    return EimcVerdict(case.label, p, level, tuple(fired), tuple(notes))


# ---------------------------------------------------------------------------
# replay and audit


def _replay_rule(r: FiredRule) -> Level:
    f = dict(r.facts)
    if r.rule == "R-MAX":
        return Level.HOLDS_WITH_UNIQUENESS if f["p_divides_H"] is False else Level.UNKNOWN
    if r.rule == "R-ABEL-SYLOW":
        return Level.HOLDS if f.get("assertion:sylow") == "yes" else Level.UNKNOWN
    if r.rule in ("R-HYBRID-ABEL", "R-HYBRID-SYLOW"):
        hyb = all(v is True for k, v in f.items() if k.startswith("hybrid:"))
        ass = all(v == "yes" for k, v in f.items() if k.startswith("assertion:"))
        if not (hyb and ass):
            return Level.UNKNOWN
        return Level.HOLDS_WITH_UNIQUENESS if r.rule == "R-HYBRID-ABEL" else Level.HOLDS
    if r.rule == "R-BREAKDOWN":
        hyb = all(v is True for k, v in f.items() if k.startswith("hybrid:"))
        return Level.parse(f["quotient_level"]) if hyb else Level.UNKNOWN
    if r.rule == "R-MU":
        return {"yes": Level.HOLDS, "unknown": Level.CONDITIONAL_ON_MU}.get(f["mu_zero_known"], Level.UNKNOWN)
    if r.rule == "R-FROB":
        if not (f["frobenius"] and f["complement_abelian"]):
            return Level.UNKNOWN
        if not all(v == "yes" for k, v in f.items() if k.startswith("assertion:")):
            return Level.UNKNOWN
        if not f["p_divides_kernel"]:
            return Level.HOLDS_WITH_UNIQUENESS
        return Level.HOLDS if f["kernel_prime_power"] else Level.UNKNOWN
    if r.rule == "R-UNIQ-UP":
        before = Level.parse(f["level_before"])
        ok = (not f["p_divides_commutator"]) or f["no_skewfields_assertion"] == "yes" or f["auto_no_skewfields"]
        return Level.HOLDS_WITH_UNIQUENESS if before >= Level.HOLDS and ok else before
    raise DomainError(f"unknown rule {r.rule!r}")


def replay(trace: Iterable[FiredRule]) -> Level:
    """Recompute the verdict from the consumed facts alone."""
    return max((_replay_rule(r) for r in trace), default=Level.UNKNOWN)


def audit(case: EimcCase, verdict: EimcVerdict) -> list[str]:
    """Re-verify every computed fact in the trace against the group data; returns problems."""
    ctx = _Context(case)
    problems = []
    if replay(verdict.trace) != verdict.level:
        problems.append("replayed level differs from the verdict")
    for r in verdict.trace:
        if _replay_rule(r) != r.conclusion:
            problems.append(f"{r.rule}: conclusion does not follow from its facts")
        for k, v in r.facts:
            if k.startswith("hybrid:"):
                N = ctx.parse_key(k[len("hybrid:"):])
                if ctx.hybrid(N) != v:
                    problems.append(f"{r.rule}: {k} recomputes to {not v}")
            elif k.startswith("assertion:"):
                S = ctx.parse_key(k[len("assertion:"):])
                if ctx.value(S) != v:
                    problems.append(f"{r.rule}: {k} is {ctx.value(S)} for this case")
            elif k == "p_divides_H" and (ctx.gdata.H.order % case.p == 0) != v:
                problems.append("R-MAX: divisibility fact is wrong")
            elif k == "p_divides_commutator":
                comm = commutator_and_commutativity(ctx.gdata)
                if comm.matrix_over_commutative == v:
                    problems.append("R-UNIQ-UP: commutator fact is wrong")
            elif k == "auto_no_skewfields" and _no_skewfields_auto(ctx.gdata)[0] != v:
                problems.append("R-UNIQ-UP: automatic no-skewfields fact is wrong")
            elif k == "frobenius":
                S = frobenius_structure(case.G) if case.G is not None else None
                if (S is not None) != v:
                    problems.append("R-FROB: Frobenius detection fact is wrong")
            elif k == "mu_zero_known" and case.mu_zero_known != v:
                problems.append("R-MU: μ fact differs from the case")
        if r.rule == "R-BREAKDOWN":
            N = ctx.parse_key(next(k for k, _ in r.facts if k.startswith("hybrid:"))[len("hybrid:"):])
            sub = evaluate(_quotient_case(ctx, N))
            if sub.level.label != dict(r.facts)["quotient_level"]:
                problems.append("R-BREAKDOWN: quotient re-evaluates to a different level")
    return problems


# ---------------------------------------------------------------------------
# hybrid witnesses and census


def best_hybrid_witness(G: FiniteGroup, p: int) -> list[Subgroup]:
    """Normal N with Z_p[G] N-hybrid, largest first; {1} always closes the list."""
    hits = [N for N in normal_subgroups(G) if is_N_hybrid(G, N, p).verdict]
    return sorted(hits, key=lambda N: (-N.order, N.members))


def _family_members(spec: dict, cap) -> list[tuple[str, object]]:
    """(name, thunk) pairs; thunks build the group lazily so cap errors land per row."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise DomainError("family spec must be an object with a 'family' key")
    fam = spec["family"]

    def ints(key, default=None):
        v = spec.get(key, default)
        if v is None:
            raise DomainError(f"family {fam!r} needs {key!r}")
        if not isinstance(v, list) or not all(isinstance(x, (int, list)) for x in v):
            raise DomainError(f"{key!r} must be a list")
        return v

    out: list[tuple[str, object]] = []
    if fam == "metacyclic":
        max_ell = spec.get("max_ell", 50)
        for ell in range(3, max_ell + 1):
            if not is_prime(ell):
                continue
            for q in prime_factors(ell - 1):
                out.append((f"C{ell}:C{q}", lambda ell=ell, q=q: metacyclic(ell, q, cap)))
    elif fam == "affine":
        qs = spec.get("q")
        if qs is None:
            max_q = spec.get("max_q", 32)
            qs = []
            for q in range(2, max_q + 1):
                fs = prime_factors(q)
                if len(fs) == 1:
                    qs.append(q)
        for q in qs:
            out.append((f"Aff({q})", lambda q=q: affine(q, cap)))
    elif fam == "cyclic":
        for n in ints("n"):
            out.append((f"C{n}", lambda n=n: cyclic(n, cap)))
    elif fam == "abelian":
        for inv in ints("invariants"):
            inv = list(inv) if isinstance(inv, list) else [inv]
            name = "x".join(f"C{d}" for d in inv)
            out.append((name, lambda inv=inv: direct_product([cyclic(d) for d in inv], cap)))
    elif fam == "dihedral":
        for n in ints("n"):
            out.append((f"D{2 * n}", lambda n=n: dihedral(n, cap)))
    elif fam == "dicyclic":
        for n in ints("n"):
            out.append((f"Dic{n}", lambda n=n: dicyclic(n, cap)))
    elif fam == "symmetric":
        for n in ints("n"):
            out.append((f"S{n}", lambda n=n: symmetric(n, cap)))
    elif fam == "alternating":
        for n in ints("n"):
            out.append((f"A{n}", lambda n=n: alternating(n, cap)))
    elif fam == "affine_frobenius":
        for q, pp in ints("params"):
            out.append((f"AffFrob({q},{pp})", lambda q=q, pp=pp: affine_frobenius(q, pp, cap)))
    elif fam == "dicyclic_frobenius":
        for item in ints("params"):
            pp, ell = (item, "auto") if isinstance(item, int) else item
            out.append((f"DicFrob({pp},{ell})", lambda pp=pp, ell=ell: dicyclic_frobenius(pp, ell, cap)))
    elif fam == "unitriangular":
        for a, f, n, q in ints("params"):
            out.append((f"UT({a},{f},{n},{q})",
                        lambda a=a, f=f, n=n, q=q: unitriangular_frobenius(a, f, n, q, cap)))
    elif fam == "groups":
        for g in spec.get("groups", []):
            name = g if isinstance(g, str) else str(g.get("label", g.get("construct", "group")))
            out.append((name, lambda g=g: _group_from_json(g, cap)))
    else:
        raise DomainError(f"unknown family {fam!r}")
    return out


@dataclass(frozen=True)
class CensusRow:
    group: str
    order: int | None
    p: int
    status: str  # "ok" or "skipped"
    best_N_order: int | None = None
    best_N_type: str = ""
    hybrid_orders: tuple[int, ...] = ()
    verdict: str = ""
    rules: tuple[str, ...] = ()
    reason: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__, hybrid_orders=list(self.hybrid_orders), rules=list(self.rules))

    COLUMNS = ("group", "order", "p", "status", "best_N_order", "best_N_type", "hybrid_orders",
               "verdict", "rules", "reason")

    def tsv(self) -> str:
        cells = []
        for c in self.COLUMNS:
            v = getattr(self, c)
            if isinstance(v, tuple):
                v = ",".join(map(str, v))
            cells.append("" if v is None else str(v))
        return "\t".join(cells)


def census(family: dict, primes: Iterable[int], cap: int | None = None) -> list[CensusRow]:
    """Rows (group, p, best N, verdict) under the standard assertions: K = Q, μ unknown."""
    primes = sorted(set(primes))
    for p in primes:
        if not is_prime(p) or p == 2:
            raise DomainError(f"census primes must be odd primes, got {p}")
    rows = []
    for name, make in _family_members(family, cap):
        try:
            G = make()
        except OrderCapError as exc:
            rows.extend(CensusRow(name, exc.order, p, "skipped", reason=str(exc)) for p in primes)
            continue
        except DomainError as exc:
            rows.extend(CensusRow(name, None, p, "skipped", reason=str(exc)) for p in primes)
            continue
        for p in primes:
            wit = best_hybrid_witness(G, p)
            v = evaluate(EimcCase(p, "finite", G, base_field_is_Q=True, label=name))
            best = wit[0]
            rows.append(CensusRow(name, G.order, p, "ok", best.order, describe(best.as_group()[0]),
                                  tuple(N.order for N in wit), v.level.label, tuple(v.rules)))
    return rows


def census_summary(rows: list[CensusRow]) -> dict:
    counts: dict[str, int] = {}
    for r in rows:
        key = r.verdict if r.status == "ok" else "skipped"
        counts[key] = counts.get(key, 0) + 1
    return {"rows": len(rows), "by_verdict": dict(sorted(counts.items()))}
