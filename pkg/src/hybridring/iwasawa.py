"""One-dimensional p-adic Lie groups H ⋊ Γ and their Iwasawa algebras.

Γ ≅ Z_p acts on the finite group H through the automorphism ``alpha``
(the action of a topological generator).  All character work happens on
the finite quotient G_n = H ⋊ C_{p^n}, where p^n is the order of alpha.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import (
    CharacterTable,
    character_table,
    contains_in_kernel,
    inner_product,
    restrict,
)
from .constructors import semidirect_table
from .cyclotomic import lies_in_subfield
from .errors import ComputationError, DomainError
from .groups import (
    FiniteGroup,
    GroupAutomorphism,
    Subgroup,
    derived_subgroup,
    describe,
    identity_automorphism,
    is_prime,
    normal_closure,
    normal_subgroups,
    quotient,
    vp,
)
from .hybrid import (
    CentralElement,
    HybridCertificate,
    _restricted_idempotent,
    is_N_hybrid,
    p_prime_part,
    trace_idempotent,
)


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


class LieGroupData:
    """H ⋊ Γ given by (H, alpha, p); ``n`` is minimal with alpha^(p^n) = id."""

    def __init__(self, H: FiniteGroup, alpha: GroupAutomorphism, p: int, *, cap: int | None = None):
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        if p == 2:
            raise DomainError("the Iwasawa side requires an odd prime p")
        if alpha.group is not H:
            raise DomainError("alpha must be an automorphism of H")
        o = alpha.order
        if not _is_power_of(o, p):
            raise DomainError(f"alpha has order {o}, which is not a power of p = {p}")
        self.H = H
        self.alpha = alpha
        self.p = p
        self.n = vp(o, p)
        self.cap = cap
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"<LieGroupData {self.H.label} ⋊ Γ, p={self.p}, n={self.n}>"

    @property
    def alpha_order(self) -> int:
        return self.p ** self.n

    @property
    def label(self) -> str:
        tag = "x" if self.alpha.is_identity else "⋊"
        return f"{self.H.label}{tag}Γ"

    def finite_quotient(self) -> FiniteGroup:
        """G_n = H ⋊ C_{p^n}; H keeps indices 0..|H|-1 and γ is index |H|."""
        G = self._cache.get("Gn")
        if G is None:
            from .groups import check_cap

            m = self.alpha_order
            check_cap(self.H.order * m, self.cap, what="finite quotient H ⋊ C_{p^n}")
            act = np.empty((m, self.H.order), dtype=np.int64)
            act[0] = np.arange(self.H.order)
            for k in range(1, m):
                act[k] = self.alpha.images[act[k - 1]]
            ar = np.arange(m)
            cyc = (ar[:, None] + ar[None, :]) % m
            table = semidirect_table(self.H.mul.astype(np.int64), cyc, act)
            G = FiniteGroup(table, label=f"{self.H.label}:C{m}" if m > 1 else self.H.label,
                            check=self.H.order * m <= 200)
            self._cache["Gn"] = G
        return G

    def h_subgroup(self) -> Subgroup:
        """H inside G_n."""
        hit = self._cache.get("Hsub")
        if hit is None:
            hit = Subgroup(self.finite_quotient(), range(self.H.order))
            self._cache["Hsub"] = hit
        return hit

    def lift(self, N: Subgroup) -> Subgroup:
        """A subgroup of H viewed inside G_n."""
        return Subgroup(self.finite_quotient(), N.members)

    def to_json(self) -> dict:
        return {
            "H": self.H.label,
            "H_order": self.H.order,
            "alpha": [int(x) for x in self.alpha.images],
            "alpha_order": self.alpha_order,
            "p": self.p,
            "n": self.n,
        }


def make_lie_group(H: FiniteGroup, alpha: GroupAutomorphism | None, p: int, cap: int | None = None) -> LieGroupData:
    if alpha is None:
        alpha = identity_automorphism(H)
    return LieGroupData(H, alpha, p, cap=cap)


def _require_in_H(gdata: LieGroupData, N: Subgroup) -> None:
    if N.parent is not gdata.H:
        raise DomainError("N must be a subgroup of H")
    if not N.is_normal:
        raise DomainError("N is not normal in H")
    if not gdata.alpha.stabilizes(N):
        raise DomainError("N is not stable under alpha, so it is not normal in the Lie group")


def finite_normal_subgroups(gdata: LieGroupData) -> list[Subgroup]:
    """Normal subgroups of H stable under alpha."""
    return [N for N in normal_subgroups(gdata.H) if gdata.alpha.stabilizes(N)]


# ---------------------------------------------------------------------------
# γ-orbits on Irr(H)


@dataclass(frozen=True)
class GammaOrbit:
    characters: tuple[int, ...]
    w: int
    eta_degree: int
    defect_zero: bool

    def to_json(self) -> dict:
        return {"characters": list(self.characters), "w": self.w, "eta_degree": self.eta_degree,
                "defect_zero": self.defect_zero}


@dataclass(frozen=True)
class GammaOrbitData:
    p: int
    orbits: tuple[GammaOrbit, ...]
    permutation: tuple[int, ...]  # index of η∘alpha^-1 for each η

    def orbit_of(self, i: int) -> GammaOrbit:
        for o in self.orbits:
            if i in o.characters:
                return o
        raise KeyError(i)

    def to_json(self) -> dict:
        return {"p": self.p, "orbits": [o.to_json() for o in self.orbits],
                "permutation": list(self.permutation)}


def _twist_permutation(T: CharacterTable, alpha: GroupAutomorphism) -> tuple[int, ...]:
    """i -> index of T[i]∘alpha^-1."""
    perm_inv = alpha.inverse().class_permutation()
    by_key = {}
    for i, chi in enumerate(T.chars):
        by_key[tuple(tuple(d.items()) for d in chi.raw)] = i
    out = []
    for chi in T.chars:
        key = tuple(tuple(chi.raw[perm_inv[k]].items()) for k in range(len(chi.raw)))
        j = by_key.get(key)
        if j is None:  # pragma: no cover - automorphisms permute Irr(H)
            raise ComputationError("twisted character is not in the table")
        out.append(j)
    return tuple(out)


def gamma_orbits(gdata: LieGroupData) -> GammaOrbitData:
    hit = gdata._cache.get("gamma")
    if hit is not None:
        return hit
    H, p = gdata.H, gdata.p
    T = character_table(H)
    perm = _twist_permutation(T, gdata.alpha)
    seen = [False] * len(T)
    vH = vp(H.order, p)
    orbits = []
    for i in range(len(T)):
        if seen[i]:
            continue
        cyc = [i]
        seen[i] = True
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = perm[j]
        w = len(cyc)
        if not _is_power_of(w, p):
            raise ComputationError(f"γ-orbit of size {w} is not a power of p")  # pragma: no cover
        d = T[i].degree
        orbits.append(GammaOrbit(tuple(sorted(cyc)), w, d, vp(d, p) == vH))
    out = GammaOrbitData(p, tuple(orbits), perm)
    gdata._cache["gamma"] = out
    return out


def equivalence_classes(gdata: LieGroupData) -> list[tuple[int, ...]]:
    """Irr(H) cut into ~-classes: the join of γ-orbits and p-adic Galois orbits."""
    T = character_table(gdata.H)
    parent = list(range(len(T)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)

    for o in gamma_orbits(gdata).orbits:
        for j in o.characters[1:]:
            union(o.characters[0], j)
    for orb in T.padic_orbits(gdata.p).orbits:
        for j in orb[1:]:
            union(orb[0], j)
    groups: dict[int, list[int]] = {}
    for i in range(len(T)):
        groups.setdefault(find(i), []).append(i)
    return sorted(tuple(v) for v in groups.values())


# ---------------------------------------------------------------------------
# the N-hybrid criterion, two ways


@dataclass(frozen=True)
class ClassWitness:
    """One ~-class of Irr(G_n) with N outside the kernel, seen through its H-restriction."""

    characters: tuple[int, ...]  # indices into the G_n table
    chi_degree: int
    w: int
    eta_degree: int
    field_degree: int
    integral: bool
    defect_zero: bool

    def to_json(self) -> dict:
        return dict(self.__dict__, characters=list(self.characters))


@dataclass(frozen=True)
class LambdaCertificate:
    group: str
    N: tuple[int, ...]
    p: int
    verdict: bool
    reason: str
    group_ring: HybridCertificate
    direct_verdict: bool
    witnesses: tuple[ClassWitness, ...] = ()

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "N": list(self.N),
            "N_order": len(self.N),
            "p": self.p,
            "verdict": self.verdict,
            "reason": self.reason,
            "group_ring_certificate": self.group_ring.to_json(),
            "direct_verdict": self.direct_verdict,
            "classes": [w.to_json() for w in self.witnesses],
        }


def _epsilon_on_H(gdata: LieGroupData, T: CharacterTable, orbit: tuple[int, ...]):
    """(ε, w, η(1), field degree) for a ~-class of Irr(G_n), built from H-restricted values."""
    Hs = gdata.h_subgroup()
    Hg, _ = Hs.as_group()
    res = [restrict(T[j], Hs) for j in orbit]
    distinct: dict = {}
    for r in res:
        distinct.setdefault(r.key(), r)
    w = inner_product(res[0], res[0])
    if not isinstance(w, Fraction) or w.denominator != 1:
        raise ComputationError("restriction norm is not an integer")  # pragma: no cover
    w = int(w)
    chi1 = T[orbit[0]].degree
    eta1 = chi1 // w
    beta = None
    for r in distinct.values():
        beta = r if beta is None else beta + r
    coeffs = _restricted_idempotent(beta, range(len(Hg.classes)), Fraction(eta1, Hg.order))
    return CentralElement(Hg, coeffs), w, eta1, len(distinct)


def _direct_classes(gdata: LieGroupData, N: Subgroup):
    Gn = gdata.finite_quotient()
    T = character_table(Gn)
    Hs = gdata.h_subgroup()
    Hg, _ = Hs.as_group()
    Nn = gdata.lift(N)
    if not Nn.is_normal:
        raise ComputationError("alpha-stable N failed to be normal in G_n")  # pragma: no cover
    N_in_H = Subgroup(Hg, N.members)
    out = []
    for orb in T.padic_orbits(gdata.p, scope=Hs).orbits:
        chi = T[orb[0]]
        in_ker = contains_in_kernel(chi, Nn)
        if in_ker != contains_in_kernel(restrict(chi, Hs), N_in_H):
            raise ComputationError("N ≤ ker χ disagrees with N ≤ ker of the restriction")
        out.append((orb, in_ker))
    return T, out


def is_lambda_N_hybrid(gdata: LieGroupData, N: Subgroup) -> LambdaCertificate:
    """Λ(H ⋊ Γ) is N-hybrid, decided through Z_p[H] and directly on G_n; both must agree."""
    _require_in_H(gdata, N)
    p = gdata.p
    a = is_N_hybrid(gdata.H, N, p)
    T, classes = _direct_classes(gdata, N)
    vH = vp(gdata.H.order, p)
    wits = []
    for orb, in_ker in classes:
        if in_ker:
            continue
        eps, w, eta1, d = _epsilon_on_H(gdata, T, orb)
        integral = eps.is_p_integral(p)
        dz = vp(eta1, p) == vH
        if integral != dz:
            raise ComputationError(f"ε for class {orb} has integrality {integral} but defect-zero flag {dz}")
        wits.append(ClassWitness(orb, T[orb[0]].degree, w, eta1, d, integral, dz))
    b = N.order % p != 0 and all(x.integral for x in wits)
    if a.verdict != b:
        raise ComputationError(f"hybrid criterion mismatch: group ring says {a.verdict}, direct check says {b}")
    if N.order % p == 0:
        reason = "p divides |N|"
    elif b:
        reason = "p does not divide |N| and every ε over a class outside N's kernel is p-integral"
    else:
        bad = [x.characters for x in wits if not x.integral]
        reason = f"ε is not p-integral for the classes {bad}"
    return LambdaCertificate(gdata.label, N.members, p, b, reason, a, b, tuple(wits))


def lambda_idempotent_completeness(gdata: LieGroupData, N: Subgroup) -> tuple[bool, CentralElement]:
    """e_N + Σ ε over ~-classes with N outside the kernel equals 1, inside Q[H]."""
    _require_in_H(gdata, N)
    T, classes = _direct_classes(gdata, N)
    Hg, _ = gdata.h_subgroup().as_group()
    total, _ = trace_idempotent(Hg, Subgroup(Hg, N.members))
    for orb, in_ker in classes:
        if not in_ker:
            total = total + _epsilon_on_H(gdata, T, orb)[0]
    return total == CentralElement.one(Hg), total


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class LambdaComponent:
    kind: str  # "remainder" or "matrix"
    label: str
    size: int
    field_degree: int
    center: str
    rank: int  # over Λ(Γ)
    representative: int | None = None
    characters: tuple[int, ...] = ()
    w: int = 1
    eta_degree: int = 1

    def to_json(self) -> dict:
        return dict(self.__dict__, characters=list(self.characters))


@dataclass(frozen=True)
class LambdaShape:
    group: str
    N: tuple[int, ...]
    p: int
    H_order: int
    components: tuple[LambdaComponent, ...]
    is_maximal: bool
    is_matrix_over_commutative: bool
    quotient_action: tuple[int, ...] = field(default=())

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.components]

    @property
    def audit_ok(self) -> bool:
        return sum(c.rank for c in self.components) == self.H_order

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "N_order": len(self.N),
            "p": self.p,
            "H_order": self.H_order,
            "labels": self.labels,
            "components": [c.to_json() for c in self.components],
            "is_maximal": self.is_maximal,
            "is_matrix_over_commutative": self.is_matrix_over_commutative,
            "quotient_action": list(self.quotient_action),
            "rank_audit": self.audit_ok,
        }


def induced_quotient_action(gdata: LieGroupData, N: Subgroup) -> tuple[FiniteGroup, GroupAutomorphism]:
    """H/N together with the automorphism induced by alpha."""
    Q, proj = quotient(gdata.H, N)
    reps = [-1] * Q.order
    for x in range(gdata.H.order):
        q = int(proj[x])
        if reps[q] < 0:
            reps[q] = x
    images = [int(proj[gdata.alpha(r)]) for r in reps]
    return Q, GroupAutomorphism(Q, images)


def _power_series_center(values, d: int, p: int, e: int) -> str:
    if d == 1:
        return f"power series ring Z_{p}[[T]]"
    m = p_prime_part(e, p)
    if all(lies_in_subfield(v, m) for v in values):
        return f"power series ring over the unramified extension of Z_{p} of degree {d}"
    return f"power series ring over a local ring of degree {d} over Z_{p}, ramification undetermined"


def lambda_shape(gdata: LieGroupData, N: Subgroup, *, refine: bool = True) -> LambdaShape:
    """Λ(𝒢) ≅ Λ(𝒢/N) ⊕ matrix components, one per ~-class outside N's kernel.

    When p ∤ |H| the whole algebra is maximal; with ``refine`` the quotient
    part is split into matrix components too, so no remainder is left.
    """
    cert = is_lambda_N_hybrid(gdata, N)
    if not cert.verdict:
        raise DomainError(f"Λ is not N-hybrid for this N: {cert.reason}")
    p, H = gdata.p, gdata.H
    T = character_table(H)
    maximal = H.order % p != 0
    comm = commutator_and_commutativity(gdata)
    gam = gamma_orbits(gdata)
    comps: list[LambdaComponent] = []
    qaction: tuple[int, ...] = ()
    split_all = maximal and refine
    if not split_all:
        Q, qalpha = induced_quotient_action(gdata, N)
        qaction = tuple(int(x) for x in qalpha.images)
        label = f"Z_{p}[[Γ]]" if Q.order == 1 else f"Z_{p}[[{describe(Q)}⋊Γ]]"
        comps.append(LambdaComponent("remainder", label, 1, 1, f"Λ of the quotient {describe(Q)} ⋊ Γ",
                                     Q.order))
    for cls in equivalence_classes(gdata):
        eta = T[cls[0]]
        if not split_all and contains_in_kernel(eta, N):
            continue
        o = gam.orbit_of(cls[0])
        w, d = o.w, len(cls) // o.w
        size = w * eta.degree
        base = f"Z_{p}[[T]]" if d == 1 else f"O_{d}[[T]]"
        beta = eta
        for j in o.characters:
            if j != cls[0]:
                beta = beta + T[j]
        center = _power_series_center(beta.values, d, p, H.exponent)
        comps.append(LambdaComponent("matrix", f"M_{size}({base})", size, d, center,
                                     d * w * eta.degree ** 2, cls[0], cls, w, eta.degree))
    shape = LambdaShape(gdata.label, N.members, p, H.order, tuple(comps), maximal,
                        comm.matrix_over_commutative, qaction)
    if not shape.audit_ok:
        raise ComputationError("rank audit failed for the Iwasawa shape")  # pragma: no cover
    return shape


# ---------------------------------------------------------------------------
# commutator subgroup


@dataclass(frozen=True)
class CommutatorReport:
    subgroup: Subgroup  # of H
    matrix_over_commutative: bool  # p ∤ |𝒢′|
    no_skewfields: bool
    cross_checked: bool

    def to_json(self) -> dict:
        return {
            "commutator": list(self.subgroup.members),
            "commutator_order": self.subgroup.order,
            "commutator_type": describe(self.subgroup.as_group()[0]),
            "matrix_over_commutative": self.matrix_over_commutative,
            "no_skewfields": self.no_skewfields,
            "cross_checked": self.cross_checked,
        }


def commutator_and_commutativity(gdata: LieGroupData) -> CommutatorReport:
    hit = gdata._cache.get("commutator")
    if hit is not None:
        return hit
    H = gdata.H
    gens = set()
    for a in range(H.order):
        gens.add(int(H.mul[H.inv[a], gdata.alpha(a)]))
    gens |= set(derived_subgroup(H).members)
    C = normal_closure(H, gens)
    if not gdata.alpha.stabilizes(C):
        raise ComputationError("commutator subgroup is not alpha-stable")  # pragma: no cover
    checked = False
    try:
        Gn = gdata.finite_quotient()
    except DomainError:
        Gn = None
    if Gn is not None:
        D = derived_subgroup(Gn)
        if set(D.members) != set(C.members):
            raise ComputationError("commutator subgroup disagrees with the derived subgroup of G_n")
        checked = True
    flag = C.order % gdata.p != 0
    out = CommutatorReport(C, flag, flag, checked)
    gdata._cache["commutator"] = out
    return out


# ---------------------------------------------------------------------------
# descent from a finite Galois group


@dataclass(frozen=True)
class CodescentData:
    G: FiniteGroup
    H_in_G: Subgroup
    generator: int  # element of G whose conjugation gives alpha
    gdata: LieGroupData
    N_in_H: Subgroup | None
    candidates: int  # number of admissible H of the requested index

    def to_json(self) -> dict:
        return {
            "G": self.G.label,
            "H": list(self.H_in_G.members),
            "H_index": self.G.order // self.H_in_G.order,
            "generator": self.generator,
            "candidates": self.candidates,
            "lie_group": self.gdata.to_json(),
            "N": None if self.N_in_H is None else list(self.N_in_H.members),
        }


def _cyclic_quotient_generator(G: FiniteGroup, H: Subgroup, p: int) -> int | None:
    """Least p-element of G whose image generates G/H, or None if G/H is not cyclic."""
    Q, proj = quotient(G, H)
    orders = G.element_orders
    qorders = Q.element_orders
    for g in range(G.order):
        if _is_power_of(int(orders[g]), p) and int(qorders[proj[g]]) == Q.order:
            return g
    return None


def codescent_from_number_field(G: FiniteGroup, p: int, *, h_index: int = 1, H: Subgroup | None = None,
                                N: Subgroup | None = None, cap: int | None = None) -> CodescentData:
    """(H, alpha, p) for Gal(L_∞/K) when Gal(L/K) = G and [G:H] = [L ∩ K_∞ : K].

    H is given directly or chosen as the first normal subgroup (by members)
    of index ``h_index`` with cyclic quotient.
    """
    if not is_prime(p) or p == 2:
        raise DomainError("codescent needs an odd prime p")
    if H is None:
        if h_index < 1 or not _is_power_of(h_index, p):
            raise DomainError(f"[G:H] = {h_index} must be a power of p = {p}")
        cands = [S for S in normal_subgroups(G) if S.order * h_index == G.order
                 and _cyclic_quotient_generator(G, S, p) is not None]
        if not cands:
            raise DomainError(f"no normal subgroup of index {h_index} with cyclic quotient")
        H = cands[0]
        ncand = len(cands)
    else:
        if H.parent is not G or not H.is_normal:
            raise DomainError("H must be a normal subgroup of G")
        if not _is_power_of(G.order // H.order, p):
            raise DomainError("G/H is not of p-power order")
        ncand = 1
    g = _cyclic_quotient_generator(G, H, p)
    if g is None:
        raise DomainError("G/H is not cyclic")
    if H.is_whole():
        # L ∩ K_∞ = K: 𝒢 ≅ G × Γ
        Hg = G
        alpha = identity_automorphism(G)
    else:
        Hg, emb = H.as_group()
        images = H.to_sub_indices(int(G.mul[G.mul[g, x], G.inv[g]]) for x in emb)
        alpha = GroupAutomorphism(Hg, images)
    gdata = LieGroupData(Hg, alpha, p, cap=cap)
    Nh = None
    if N is not None:
        if N.parent is not G or not N.is_normal:
            raise DomainError("N must be a normal subgroup of G")
        if not N.issubset(H):
            raise DomainError("N is not contained in H")
        Nh = Subgroup(Hg, H.to_sub_indices(N.members))
    return CodescentData(G, H, g, gdata, Nh, ncand)
