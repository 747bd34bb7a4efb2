"""Frobenius groups: detection, kernel and complement, structural checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characters import character_table, contains_in_kernel, induce, restrict
from .constructors import (
    dicyclic_frobenius,
    unitriangular_diagonal,
    unitriangular_frobenius,
    unitriangular_parameters,
    ut_multiply,
    _ut_positions,
)
from .errors import ComputationError, DomainError
from .finite_field import GF
from .groups import (
    FiniteGroup,
    Subgroup,
    centralizer,
    nilpotency_class,
    normal_subgroups,
)


def is_frobenius_with_complement(G: FiniteGroup, H: Subgroup) -> bool:
    """H ∩ gHg^-1 = 1 for every g outside H (H proper and nontrivial)."""
    if H.parent is not G:
        raise DomainError("subgroup does not belong to this group")
    if H.order == 1 or H.order == G.order:
        raise DomainError("a Frobenius complement must be proper and nontrivial")
    mask = H.mask
    hm = np.array(H.members)
    done = mask.copy()
    for g in range(G.order):
        if done[g]:
            continue
        # gHg^-1 depends only on the coset gH
        done[G.mul[g, hm]] = True
        conj = G.mul[G.mul[g, hm], G.inv[g]]
        if mask[conj].sum() > 1:
            return False
    return True


def kernel_from_complement(G: FiniteGroup, H: Subgroup) -> Subgroup:
    """(G minus the union of the nonidentity parts of all conjugates of H) ∪ {1}."""
    covered = np.zeros(G.order, dtype=bool)
    hm = np.array(H.members)
    for g in range(G.order):
        covered[G.mul[G.mul[g, hm], G.inv[g]]] = True
    covered[0] = False
    return Subgroup(G, np.nonzero(~covered)[0].tolist())


@dataclass(frozen=True)
class FrobeniusStructure:
    group: FiniteGroup
    kernel: Subgroup
    complement: Subgroup
    checks: dict = field(default_factory=dict)

    @property
    def all_checks_pass(self) -> bool:
        return all(v for k, v in self.checks.items() if isinstance(v, bool))

    def to_json(self) -> dict:
        return {
            "group": self.group.label,
            "order": self.group.order,
            "kernel": list(self.kernel.members),
            "kernel_order": self.kernel.order,
            "complement": list(self.complement.members),
            "complement_order": self.complement.order,
            "checks": dict(sorted(self.checks.items())),
        }


def _centralizers_inside(G: FiniteGroup, N: Subgroup) -> bool:
    """C_G(n) ≤ N for every n ≠ 1 in N."""
    nm = np.array([x for x in N.members if x != 0])
    commute = G.mul[:, nm] == G.mul[nm, :].T  # g x n
    outside = ~N.mask
    return not commute[outside].any()


def find_frobenius_kernel(G: FiniteGroup) -> Subgroup | None:
    """The normal subgroup 1 < N < G with C_G(n) ≤ N for all 1 ≠ n in N, if any."""
    for N in normal_subgroups(G):
        if N.order == 1 or N.order == G.order:
            continue
        if math.gcd(N.order, G.order // N.order) != 1:
            continue
        if _centralizers_inside(G, N):
            return N
    return None


def _complement_for(G: FiniteGroup, N: Subgroup) -> Subgroup:
    """C_G(y) for the least y ∉ N whose centralizer is a complement to N."""
    idx = G.order // N.order
    mask = N.mask
    for y in range(1, G.order):
        if mask[y]:
            continue
        C = centralizer(G, y)
        if C.order == idx and mask[list(C.members)].sum() == 1:
            return C
    raise ComputationError("no centralizer complement found for the Frobenius kernel")


def _check_induced_characters(G: FiniteGroup, N: Subgroup) -> bool:
    T = character_table(G)
    Ng, _ = N.as_group()
    TN = character_table(Ng)
    for chi in T.chars:
        if contains_in_kernel(chi, N):
            continue
        mults = TN.decompose(restrict(chi, N))
        psi = next((j for j, m in enumerate(mults) if m and j != 0), None)
        if psi is None or induce(TN[psi], N) != chi:
            return False
    return True


def frobenius_structure(G: FiniteGroup) -> FrobeniusStructure | None:
    N = find_frobenius_kernel(G)
    if N is None:
        return None
    H = _complement_for(G, N)
    malnormal = is_frobenius_with_complement(G, H)
    K = kernel_from_complement(G, H)
    ng, _ = N.as_group()
    cls = nilpotency_class(ng)
    checks = {
        "complement_malnormal": malnormal,
        "kernel_matches_formula": K == N,
        "kernel_normal": N.is_normal,
        "orders_multiply": N.order * H.order == G.order and N.intersection(H).order == 1,
        "coprime": math.gcd(N.order, H.order) == 1,
        "kernel_nilpotent": cls is not None,
        "kernel_nilpotency_class": cls,
        "normal_comparability": all(K2.issubset(N) or N.issubset(K2) for K2 in normal_subgroups(G)),
        "induced_characters": _check_induced_characters(G, N),
    }
    return FrobeniusStructure(G, N, H, checks)


def build_dicyclic_frobenius(p: int, ell: int | str = "auto", cap: int | None = None):
    """(F_ell)^2 ⋊ Dic_p together with its verified Frobenius structure."""
    G = dicyclic_frobenius(p, ell, cap=cap)
    S = frobenius_structure(G)
    if S is None:
        raise ComputationError("dicyclic construction is not a Frobenius group")  # pragma: no cover
    Hg, _ = S.complement.as_group()
    involutions = int((Hg.element_orders == 2).sum())
    S.checks["complement_order_4p"] = S.complement.order == 4 * p
    S.checks["complement_unique_involution"] = involutions == 1
    kg, _ = S.kernel.as_group()
    S.checks["kernel_elementary_abelian"] = kg.is_abelian and set(kg.element_orders.tolist()) <= {1, G.spec["params"]["ell"]}
    return G, S


def build_unitriangular_frobenius(p: int, f: int, n: int, q: int, cap: int | None = None):
    """UT_n(F_{p^f}) ⋊ C_q together with its verified Frobenius structure."""
    G = unitriangular_frobenius(p, f, n, q, cap=cap)
    S = frobenius_structure(G)
    if S is None:
        raise ComputationError("unitriangular construction is not a Frobenius group")  # pragma: no cover
    S.checks["kernel_class_is_n_minus_1"] = S.checks["kernel_nilpotency_class"] == n - 1
    return G, S


@dataclass(frozen=True)
class UnitriangularReport:
    p: int
    f: int
    n: int
    q: int
    order: int
    kernel_order: int
    lower_central_orders: tuple[int, ...]
    nilpotency_class: int
    fixed_point_free: bool

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def unitriangular_kernel_report(p: int, f: int, n: int, q: int, size_limit: int = 100_000) -> UnitriangularReport:
    """Lower central series of UT_n(F_{p^f}) computed on matrices, without a Cayley table.

    Used for instances whose full group exceeds the order cap.
    """
    order = unitriangular_parameters(p, f, n, q)
    F = GF(p ** f)
    pos = _ut_positions(n)
    kern = (p ** f) ** len(pos)
    if kern > size_limit:
        raise DomainError(f"kernel of order {kern} exceeds the matrix-level limit {size_limit}")
    one = tuple([0] * len(pos))

    def mul(u, v):
        return ut_multiply(F, n, u, v)

    inv_cache: dict = {}

    def inv(u):
        hit = inv_cache.get(u)
        if hit is None:
            # u^(order of u) = 1; walk powers
            x, prev = u, one
            while x != one:
                prev, x = x, mul(x, u)
            hit = prev
            inv_cache[u] = hit
        return hit

    def closure(gens):
        seen = {one}
        frontier = [one]
        gens = [g for g in gens if g != one]
        while frontier:
            nxt = []
            for w in frontier:
                for g in gens:
                    x = mul(w, g)
                    if x not in seen:
                        seen.add(x)
                        nxt.append(x)
            frontier = nxt
        return seen

    # elementary matrices with F_p-basis entries generate UT_n(F_{p^f})
    basis = [p ** i for i in range(f)]
    gens = []
    for k in range(len(pos)):
        for b in basis:
            e = [0] * len(pos)
            e[k] = b
            gens.append(tuple(e))
    series = [closure(gens)]
    if len(series[0]) != kern:
        raise ComputationError("elementary matrices failed to generate the unitriangular group")  # pragma: no cover
    current_gens = gens
    while len(series[-1]) > 1:
        comms = {mul(mul(inv(x), inv(g)), mul(x, g)) for x in current_gens for g in gens}
        # normal closure under conjugation by the generators
        pool = set(comms) - {one}
        frontier = list(pool)
        while frontier:
            nxt = []
            for c in frontier:
                for g in gens:
                    d = mul(mul(g, c), inv(g))
                    if d not in pool and d != one:
                        pool.add(d)
                        nxt.append(d)
            frontier = nxt
        sub = closure(sorted(pool))
        if len(sub) == len(series[-1]):
            break
        series.append(sub)
        current_gens = sorted(pool)
    nil = len(series) - 1 if len(series[-1]) == 1 else -1
    b = unitriangular_diagonal(F, n, q)
    binv = [int(F.inv[x]) for x in b]
    ffree = all(F.pow(int(F.mul[b[i], binv[j]]), t) != 1 for t in range(1, q) for i, j in pos)
    return UnitriangularReport(p, f, n, q, order, kern, tuple(len(s) for s in series), nil, ffree)
