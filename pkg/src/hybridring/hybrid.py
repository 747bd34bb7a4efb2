"""Hybridness of p-adic group rings Z_p[G].

Central group-algebra elements are stored class-wise (one coefficient per
conjugacy class, shared by every element of the class) and multiplied with
the class structure constants.  On top of that sit the trace idempotent
e_N, the character idempotents e_χ and their p-adic orbit sums ε_χ, the
defect-zero criterion for N-hybridness and the Wedderburn shape report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .characters import (
    CharacterTable,
    ClassFunction,
    character_table,
    contains_in_kernel,
)
from .cyclotomic import CycloNumber, euler_phi, format_cyclo, lies_in_subfield, reduction_matrix
from .errors import DomainError
from .groups import FiniteGroup, Subgroup, describe, is_prime, quotient, vp

# ---------------------------------------------------------------------------
# central elements of Q(ζ)[G]


def structure_constants(G: FiniteGroup) -> np.ndarray:
    """A[i, j, k] = #{(x, y) in C_i x C_j : x y = z_k} with z_k the class representative."""
    hit = G._cache.get("structure_constants")
    if hit is None:
        cd = G.classes
        r = len(cd)
        reps = np.array(cd.representatives)
        ar = np.arange(G.order)
        Y = G.mul[G.inv[ar][:, None], reps[None, :]]  # y = x^-1 z_k
        hit = np.zeros((r, r, r), dtype=np.int64)
        np.add.at(hit, (cd.class_of[ar][:, None], cd.class_of[Y], np.arange(r)[None, :]), 1)
        hit.flags.writeable = False
        G._cache["structure_constants"] = hit
    return hit


def _to_exponent_space(coeffs: Sequence[CycloNumber], m: int) -> tuple[np.ndarray, int]:
    """Integer matrix (classes x m) over ζ_m^k plus a common denominator."""
    lifted = [c.lift(m) for c in coeffs]
    den = math.lcm(*(c.den for c in lifted)) if lifted else 1
    phi = euler_phi(m)
    big = max((abs(x) * (den // c.den) for c in lifted for x in c.num), default=0) >= 1 << 40
    out = np.zeros((len(lifted), m), dtype=object if big else np.int64)
    for i, c in enumerate(lifted):
        f = den // c.den
        out[i, :phi] = [x * f for x in c.num]
    return out, den


def _from_exponent_space(vecs: np.ndarray, den: int, m: int) -> list[CycloNumber]:
    red = reduction_matrix(m)
    out = []
    for v in vecs:
        nz = np.nonzero(v)[0]
        if len(nz) == 0:
            out.append(CycloNumber.rational(0, m))
            continue
        num = np.array([int(x) for x in v[nz]], dtype=object) @ red[nz]
        out.append(CycloNumber(m, [int(x) for x in num], den))
    return out


class CentralElement:
    """Σ_k c_k · (sum of the elements of class k), with c_k in a cyclotomic field."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: FiniteGroup, coeffs: Sequence[CycloNumber | Fraction | int]):
        if len(coeffs) != len(group.classes):
            raise DomainError("central element needs one coefficient per class")
        self.group = group
        self.coeffs = tuple(c if isinstance(c, CycloNumber) else CycloNumber.rational(c) for c in coeffs)

    @classmethod
    def zero(cls, G: FiniteGroup) -> "CentralElement":
        return cls(G, [0] * len(G.classes))

    @classmethod
    def one(cls, G: FiniteGroup) -> "CentralElement":
        return cls(G, [1] + [0] * (len(G.classes) - 1))

    @property
    def modulus(self) -> int:
        return math.lcm(*(c.e for c in self.coeffs))

    def coefficient(self, g: int) -> CycloNumber:
        return self.coeffs[int(self.group.classes.class_of[g])]

    def element_coefficients(self) -> list[CycloNumber]:
        cls = self.group.classes.class_of
        return [self.coeffs[int(cls[g])] for g in range(self.group.order)]

    def _check(self, other: "CentralElement") -> None:
        if other.group is not self.group:
            raise DomainError("group-algebra elements live on different groups")

    def __add__(self, other: "CentralElement") -> "CentralElement":
        self._check(other)
        return CentralElement(self.group, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "CentralElement") -> "CentralElement":
        self._check(other)
        return CentralElement(self.group, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, c) -> "CentralElement":
        return CentralElement(self.group, [a * c for a in self.coeffs])

    def __mul__(self, other: "CentralElement") -> "CentralElement":
        """Convolution product in the group algebra."""
        self._check(other)
        G = self.group
        A = structure_constants(G)
        m = math.lcm(self.modulus, other.modulus)
        a, da = _to_exponent_space(self.coeffs, m)
        b, db = _to_exponent_space(other.coeffs, m)
        r = len(self.coeffs)
        if a.dtype == object or b.dtype == object:
            a, b = a.astype(object), b.astype(object)
        # T[i, k, :] = Σ_j A[i, j, k] b_j
        T = np.einsum("ijk,jx->ikx", A.astype(a.dtype), b)
        out = np.zeros((r, m), dtype=a.dtype)
        for i in range(r):
            if not a[i].any():
                continue
            for k in range(r):
                if not T[i, k].any():
                    continue
                prod = np.convolve(a[i], T[i, k])
                folded = prod[:m].copy()
                folded[: len(prod) - m] += prod[m:]
                out[k] += folded
        return CentralElement(G, _from_exponent_space(out, da * db, m))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CentralElement):
            return NotImplemented
        return other.group is self.group and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_idempotent(self) -> bool:
        return self * self == self

    def is_p_integral(self, p: int) -> bool:
        """Coefficients lie in Z_(p)[ζ]; the power basis is an integral basis."""
        return all(c.is_p_integral(p) for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.coeffs)

    def to_json(self) -> dict:
        cd = self.group.classes
        return {
            "class_coefficients": [
                {"representative": int(cd.representatives[k]), "size": cd.sizes[k], "coefficient": format_cyclo(c)}
                for k, c in enumerate(self.coeffs)
            ]
        }

    def __repr__(self) -> str:
        return "CentralElement(" + ", ".join(format_cyclo(c) for c in self.coeffs) + ")"


def element_convolution(G: FiniteGroup, a: Sequence[CycloNumber], b: Sequence[CycloNumber]) -> list[CycloNumber]:
    """Plain element-by-element convolution (reference implementation for small groups)."""
    n = G.order
    out = [CycloNumber.rational(0) for _ in range(n)]
    for x in range(n):
        if a[x].is_zero():
            continue
        for y in range(n):
            if b[y].is_zero():
                continue
            z = int(G.mul[x, y])
            out[z] = out[z] + a[x] * b[y]
    return out


# ---------------------------------------------------------------------------
# idempotents


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")


def _require_normal(G: FiniteGroup, N: Subgroup) -> None:
    if N.parent is not G:
        raise DomainError("subgroup does not belong to this group")
    if not N.is_normal:
        raise DomainError("subgroup is not normal")


def trace_idempotent(G: FiniteGroup, N: Subgroup, p: int | None = None) -> tuple[CentralElement, bool | None]:
    """e_N = |N|^-1 Σ_{n in N} n, plus whether it is p-integral (p ∤ |N|)."""
    _require_normal(G, N)
    cd = G.classes
    inN = {int(cd.class_of[x]) for x in N.members}
    c = Fraction(1, N.order)
    e = CentralElement(G, [c if k in inN else 0 for k in range(len(cd))])
    flag = None if p is None else N.order % p != 0
    return e, flag


def _char_modulus(chi: ClassFunction) -> int:
    """Least m with all eigenvalues of χ being m-th roots of unity."""
    e = chi.raw_e
    m = 1
    for d in chi.raw:
        for k in d:
            m = math.lcm(m, e // math.gcd(e, k))
    return m


def _restricted_idempotent(chi: ClassFunction, classes: Sequence[int], scale: Fraction) -> list[CycloNumber]:
    """scale · χ(g^-1) on the listed classes, zero elsewhere, at the smallest modulus."""
    G = chi.group
    inv = G.inverse_class
    m = _char_modulus(chi)
    f = chi.raw_e // m
    keep = set(classes)
    out = []
    for k in range(len(G.classes)):
        if k not in keep:
            out.append(CycloNumber.rational(0, m))
            continue
        raw = chi.raw[inv[k]]
        out.append(CycloNumber.from_exponents(m, {x // f: mult for x, mult in raw.items()}) * scale)
    return out


def character_idempotent(table: CharacterTable, i: int, *, verify: bool = False) -> CentralElement:
    """e_χ = χ(1)/|G| Σ_g χ(g^-1) g for χ = table[i]."""
    G = table.group
    chi = table[i]
    e = CentralElement(G, _restricted_idempotent(chi, range(len(G.classes)), Fraction(chi.degree, G.order)))
    if verify and not e.is_idempotent():
        raise DomainError("class function is not an irreducible character")
    return e


@dataclass(frozen=True)
class RationalIdempotent:
    element: CentralElement
    orbit: tuple[int, ...]
    p_integral: bool
    coefficients_rational: bool


def rational_idempotent(table: CharacterTable, i: int, p: int) -> RationalIdempotent:
    """ε_χ: sum of e_χ' over the p-adic Galois orbit of χ = table[i]."""
    _require_prime(p)
    orbit = table.padic_orbits(p).orbit_of(i)
    total = None
    for j in orbit:
        ej = character_idempotent(table, j)
        total = ej if total is None else total + ej
    return RationalIdempotent(total, orbit, total.is_p_integral(p), total.is_rational())


def is_defect_zero(G: FiniteGroup, chi: ClassFunction | int, p: int) -> bool:
    """v_p(χ(1)) = v_p(|G|)"""
    _require_prime(p)
    d = chi if isinstance(chi, int) else chi.degree
    return vp(d, p) == vp(G.order, p)


# ---------------------------------------------------------------------------
# hybrid certificate


@dataclass(frozen=True)
class Witness:
    character: int
    degree: int
    vp_degree: int
    vp_order: int

    @property
    def defect_zero(self) -> bool:
        return self.vp_degree == self.vp_order


@dataclass(frozen=True)
class HybridCertificate:
    group: str
    N: tuple[int, ...]
    p: int
    verdict: bool
    reason: str
    witnesses: tuple[Witness, ...] = ()

    @property
    def failures(self) -> tuple[Witness, ...]:
        return tuple(w for w in self.witnesses if not w.defect_zero)

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "N": list(self.N),
            "N_order": len(self.N),
            "p": self.p,
            "verdict": self.verdict,
            "reason": self.reason,
            "witnesses": [
                {"character": w.character, "degree": w.degree, "vp_degree": w.vp_degree,
                 "vp_order": w.vp_order, "defect_zero": w.defect_zero}
                for w in self.witnesses
            ],
            "failing": [w.character for w in self.failures],
        }


def is_N_hybrid(G: FiniteGroup, N: Subgroup, p: int) -> HybridCertificate:
    """Z_p[G] is N-hybrid iff p ∤ |N| and every χ with N ≰ ker χ has defect zero."""
    _require_prime(p)
    _require_normal(G, N)
    if N.order % p == 0:
        return HybridCertificate(G.label, N.members, p, False, "condition (i) fails: p divides |N|")
    T = character_table(G)
    vG = vp(G.order, p)
    wit = tuple(
        Witness(i, chi.degree, vp(chi.degree, p), vG)
        for i, chi in enumerate(T.chars)
        if not contains_in_kernel(chi, N)
    )
    bad = [w.character for w in wit if not w.defect_zero]
    if bad:
        reason = f"characters {bad} outside the kernel of N are not of defect zero"
    else:
        reason = "p does not divide |N| and every character not containing N in its kernel has defect zero"
    return HybridCertificate(G.label, N.members, p, not bad, reason, wit)


# ---------------------------------------------------------------------------
# Wedderburn shape


@dataclass(frozen=True)
class ShapeComponent:
    kind: str  # "group-ring" or "matrix"
    label: str
    size: int
    center_degree: int
    center: str
    dimension: int  # over Q_p
    characters: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "size": self.size,
            "center_degree": self.center_degree,
            "center": self.center,
            "dimension": self.dimension,
            "characters": list(self.characters),
        }


@dataclass(frozen=True)
class WedderburnShape:
    group: str
    N: tuple[int, ...]
    p: int
    order: int
    components: tuple[ShapeComponent, ...]

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.components]

    @property
    def audit_ok(self) -> bool:
        return sum(c.dimension for c in self.components) == self.order

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "N_order": len(self.N),
            "p": self.p,
            "order": self.order,
            "components": [c.to_json() for c in self.components],
            "labels": self.labels,
            "dimension_audit": self.audit_ok,
        }


def p_prime_part(n: int, p: int) -> int:
    while n % p == 0:
        n //= p
    return n


def center_description(values: Sequence[CycloNumber], degree: int, p: int, e: int) -> str:
    if degree == 1:
        return f"Q_{p}"
    m = p_prime_part(e, p)
    if all(lies_in_subfield(v, m) for v in values):
        return f"unramified of degree {degree}"
    return f"degree {degree}, ramification undetermined"


def matrix_label(size: int, degree: int, p: int, prefix: str = "Z") -> str:
    base = f"{prefix}_{p}" if degree == 1 else f"O_{degree}"
    return f"M_{size}({base})"


def group_ring_label(Q: FiniteGroup, p: int) -> str:
    return f"Z_{p}" if Q.order == 1 else f"Z_{p}[{describe(Q)}]"


def group_ring_shape(G: FiniteGroup, N: Subgroup, p: int) -> WedderburnShape:
    cert = is_N_hybrid(G, N, p)
    if not cert.verdict:
        raise DomainError(f"Z_{p}[{G.label}] is not N-hybrid for this N: {cert.reason}")
    T = character_table(G)
    Q, _ = quotient(G, N)
    comps = [ShapeComponent("group-ring", group_ring_label(Q, p), 1, 1, f"group ring of G/N ({describe(Q)})", Q.order)]
    outside = {w.character for w in cert.witnesses}
    for orb, f in zip(T.padic_orbits(p).orbits, T.padic_orbits(p).field_degrees):
        if orb[0] not in outside:
            continue
        d = T.degrees[orb[0]]
        center = center_description(T[orb[0]].values, f, p, G.exponent)
        comps.append(ShapeComponent("matrix", matrix_label(d, f, p), d, f, center, d * d * f, orb))
    shape = WedderburnShape(G.label, N.members, p, G.order, tuple(comps))
    if not shape.audit_ok:
        raise DomainError("dimension audit failed for the Wedderburn shape")  # pragma: no cover
    return shape


# ---------------------------------------------------------------------------
# base change


@dataclass(frozen=True)
class ImplicationReport:
    kind: str  # "down" or "up"
    lhs: bool | None
    rhs: bool | None
    status: str  # "respected", "violated", "inapplicable"
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "lhs": self.lhs, "rhs": self.rhs, "status": self.status, "detail": self.detail}


def _sub_in(H: Subgroup, K: Subgroup) -> Subgroup:
    """K (a subgroup of H's parent contained in H) as a subgroup of H.as_group()."""
    Hg, _ = H.as_group()
    return Subgroup(Hg, H.to_sub_indices(K.members))


def check_basechange_down(G: FiniteGroup, H: Subgroup, N: Subgroup, K: Subgroup, p: int) -> ImplicationReport:
    """Z_p[G] N-hybrid ⇒ Z_p[H] K-hybrid, for H, N ⊴ G and K ⊴ H with K ≤ N."""
    _require_prime(p)
    _require_normal(G, H)
    _require_normal(G, N)
    if not K.issubset(N) or not K.issubset(H):
        raise DomainError("K must lie in both H and N")
    Hg, _ = H.as_group()
    Kh = _sub_in(H, K)
    if not Kh.is_normal:
        raise DomainError("K is not normal in H")
    lhs = is_N_hybrid(G, N, p).verdict
    rhs = is_N_hybrid(Hg, Kh, p).verdict
    status = "violated" if lhs and not rhs else "respected"
    return ImplicationReport("down", lhs, rhs, status, "lhs false: vacuous" if not lhs else "")


def check_basechange_up(G: FiniteGroup, H: Subgroup, N: Subgroup, p: int) -> ImplicationReport:
    """Z_p[G] N-hybrid ⇔ Z_p[H] N-hybrid when N ⊴ H ⊴ G, N ⊴ G and p ∤ [G:H]."""
    _require_prime(p)
    _require_normal(G, H)
    _require_normal(G, N)
    if not N.issubset(H):
        raise DomainError("N must be contained in H")
    if (G.order // H.order) % p == 0:
        return ImplicationReport("up", None, None, "inapplicable", f"p divides [G:H] = {G.order // H.order}")
    Hg, _ = H.as_group()
    lhs = is_N_hybrid(G, N, p).verdict
    rhs = is_N_hybrid(Hg, _sub_in(H, N), p).verdict
    return ImplicationReport("up", lhs, rhs, "respected" if lhs == rhs else "violated")


def idempotent_completeness(G: FiniteGroup, N: Subgroup, p: int) -> tuple[bool, CentralElement]:
    """1 = e_N + Σ ε_χ over orbits of characters with N ≰ ker χ, as exact elements."""
    T = character_table(G)
    total, _ = trace_idempotent(G, N)
    for orb in T.padic_orbits(p).orbits:
        if contains_in_kernel(T[orb[0]], N):
            continue
        total = total + rational_idempotent(T, orb[0], p).element
    return total == CentralElement.one(G), total
