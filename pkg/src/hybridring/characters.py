"""Complex irreducible characters of finite groups, computed exactly.

Nonabelian groups go through Dixon's method: simultaneous eigenvectors of
the class-multiplication matrices over F_ell (ell = 1 mod exponent), then
each value is lifted to Q(ζ_e) by recovering the eigenvalue multiplicities
of ρ(g) with a discrete Fourier transform over F_ell.  Abelian groups are
handled by extending characters along a chain of subgroups.

Every irreducible character keeps its per-class eigenvalue multisets
("raw" data: exponent of ζ_e -> multiplicity).  Values, kernels, Galois
images and inner products are computed from that exact data.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import CycloNumber, format_cyclo, padic_galois_group
from .errors import ComputationError, DomainError
from .groups import FiniteGroup, Subgroup, check_cap, is_prime

Raw = dict  # exponent (mod raw_e) -> multiplicity


# ---------------------------------------------------------------------------
# class functions


class ClassFunction:
    """A class function on ``group`` with one value per conjugacy class.

    Either ``raw`` (eigenvalue multisets modulo ``raw_e``) or explicit
    ``values`` must be given.  Raw data makes most operations cheap.
    """

    __slots__ = ("group", "raw", "raw_e", "_values", "name")

    def __init__(self, group: FiniteGroup, *, values: Sequence[CycloNumber] | None = None,
                 raw: Sequence[Raw] | None = None, raw_e: int | None = None, name: str = ""):
        r = len(group.classes)
        if raw is None and values is None:
            raise DomainError("class function needs values or raw data")
        if raw is not None:
            if len(raw) != r:
                raise DomainError("raw data has the wrong number of classes")
            raw = tuple(dict(sorted((int(k), int(m)) for k, m in d.items() if m)) for d in raw)
            raw_e = int(raw_e or group.exponent)
        if values is not None:
            if len(values) != r:
                raise DomainError(f"expected {r} class values, got {len(values)}")
            values = tuple(v if isinstance(v, CycloNumber) else CycloNumber.rational(v) for v in values)
        self.group = group
        self.raw = raw
        self.raw_e = raw_e
        self._values = values
        self.name = name

    # -- values -----------------------------------------------------------
    def value(self, k: int) -> CycloNumber:
        if self._values is not None:
            return self._values[k]
        return _raw_value(self.raw_e, tuple(self.raw[k].items()))

    @property
    def values(self) -> tuple[CycloNumber, ...]:
        if self._values is None:
            self._values = tuple(self.value(k) for k in range(len(self.raw)))
        return self._values

    def __call__(self, g: int) -> CycloNumber:
        return self.value(int(self.group.classes.class_of[g]))

    @property
    def degree(self) -> int:
        if self.raw is not None:
            return sum(self.raw[0].values())
        v = self.values[0]
        if not v.is_rational() or v.to_fraction().denominator != 1:
            raise DomainError("class function has no integral degree")
        return int(v.to_fraction())

    def key(self) -> tuple:
        """Hashable identity of the function (raw multisets when available)."""
        if self.raw is not None:
            return ("raw", self.raw_e, tuple(tuple(d.items()) for d in self.raw))
        e = self.group.exponent
        return ("val", tuple((v.lift(math.lcm(e, v.e)).num, v.den) for v in self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassFunction):
            return NotImplemented
        if other.group is not self.group:
            return False
        if self.raw is not None and other.raw is not None and self.raw_e == other.raw_e:
            return self.raw == other.raw
        return all(a == b for a, b in zip(self.values, other.values))

    def __hash__(self) -> int:
        return hash(tuple(hash(v) for v in self.values))

    def __repr__(self) -> str:
        label = self.name or "ClassFunction"
        return f"<{label} on {self.group.label}: " + ", ".join(str(v) for v in self.values) + ">"

    # -- arithmetic ---------------------------------------------------------
    def _same_group(self, other: "ClassFunction") -> None:
        if other.group is not self.group:
            raise DomainError("class functions live on different groups")

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        self._same_group(other)
        if self.raw is not None and other.raw is not None:
            e = math.lcm(self.raw_e, other.raw_e)
            a, b = _raw_lift(self.raw, self.raw_e, e), _raw_lift(other.raw, other.raw_e, e)
            merged = []
            for x, y in zip(a, b):
                d = dict(x)
                for k, m in y.items():
                    d[k] = d.get(k, 0) + m
                merged.append(d)
            return ClassFunction(self.group, raw=merged, raw_e=e)
        return ClassFunction(self.group, values=[x + y for x, y in zip(self.values, other.values)])

    def __neg__(self) -> "ClassFunction":
        return ClassFunction(self.group, values=[-x for x in self.values])

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        self._same_group(other)
        return ClassFunction(self.group, values=[x - y for x, y in zip(self.values, other.values)])

    def __mul__(self, other) -> "ClassFunction":
        if isinstance(other, ClassFunction):
            self._same_group(other)
            if self.raw is not None and other.raw is not None:
                e = math.lcm(self.raw_e, other.raw_e)
                a, b = _raw_lift(self.raw, self.raw_e, e), _raw_lift(other.raw, other.raw_e, e)
                prod = []
                for x, y in zip(a, b):
                    d: dict[int, int] = {}
                    for k1, m1 in x.items():
                        for k2, m2 in y.items():
                            k = (k1 + k2) % e
                            d[k] = d.get(k, 0) + m1 * m2
                    prod.append(d)
                return ClassFunction(self.group, raw=prod, raw_e=e)
            return ClassFunction(self.group, values=[x * y for x, y in zip(self.values, other.values)])
        if isinstance(other, int) and other >= 0 and self.raw is not None:
            return ClassFunction(self.group, raw=[{k: m * other for k, m in d.items()} for d in self.raw],
                                 raw_e=self.raw_e)
        return ClassFunction(self.group, values=[x * other for x in self.values])

    __rmul__ = __mul__

    def conjugate(self) -> "ClassFunction":
        return self.galois(-1)

    def galois(self, k: int) -> "ClassFunction":
        """σ_k applied to every value."""
        if self.raw is not None:
            e = self.raw_e
            if math.gcd(k, e) != 1:
                raise DomainError(f"σ_{k} is not defined on Q(ζ_{e})")
            return ClassFunction(self.group, raw=[{(x * k) % e: m for x, m in d.items()} for d in self.raw],
                                 raw_e=e, name=self.name)
        return ClassFunction(self.group, values=[v.galois(k) for v in self.values], name=self.name)

    def compose_power(self, k: int) -> "ClassFunction":
        """g -> f(g^k); equals σ_k f for characters when k is coprime to the exponent."""
        pm = self.group.class_power_map(k)
        if self.raw is not None:
            return ClassFunction(self.group, raw=[self.raw[pm[j]] for j in range(len(pm))], raw_e=self.raw_e)
        return ClassFunction(self.group, values=[self.values[pm[j]] for j in range(len(pm))])

    def is_rational(self) -> bool:
        return all(v.is_rational() for v in self.values)


@functools.lru_cache(maxsize=65536)
def _raw_value(e: int, items: tuple) -> CycloNumber:
    return CycloNumber.from_exponents(e, items)


def _raw_lift(raw, e_from: int, e_to: int):
    if e_from == e_to:
        return raw
    f = e_to // e_from
    return tuple({k * f: m for k, m in d.items()} for d in raw)


def _exponent_vector_sum(terms: Iterable[tuple[int, int]], e: int) -> CycloNumber:
    vec: dict[int, int] = {}
    for k, m in terms:
        k %= e
        vec[k] = vec.get(k, 0) + m
    return CycloNumber.from_exponents(e, vec)


def inner_product(a: ClassFunction, b: ClassFunction):
    """|G|^-1 Σ_g a(g) b(g^-1).  Returns a Fraction when the result is rational."""
    if a.group is not b.group:
        raise DomainError("inner product of class functions on different groups")
    G = a.group
    cd = G.classes
    inv = G.inverse_class
    if a.raw is not None and b.raw is not None:
        e = math.lcm(a.raw_e, b.raw_e)
        ra, rb = _raw_lift(a.raw, a.raw_e, e), _raw_lift(b.raw, b.raw_e, e)
        acc: dict[int, int] = {}
        for k, size in enumerate(cd.sizes):
            for x, m in ra[k].items():
                for y, m2 in rb[inv[k]].items():
                    z = (x + y) % e
                    acc[z] = acc.get(z, 0) + size * m * m2
        total = CycloNumber.from_exponents(e, acc)
    else:
        total = CycloNumber.rational(0)
        for k, size in enumerate(cd.sizes):
            av, bv = a.value(k), b.value(inv[k])
            if av.is_zero() or bv.is_zero():
                continue
            total = total + av * bv * size
    total = total * Fraction(1, G.order)
    return total.to_fraction() if total.is_rational() else total


def trivial_character(G: FiniteGroup) -> ClassFunction:
    return ClassFunction(G, raw=[{0: 1}] * len(G.classes), raw_e=G.exponent, name="trivial")


def regular_character(G: FiniteGroup) -> ClassFunction:
    vals = [CycloNumber.rational(G.order)] + [CycloNumber.rational(0)] * (len(G.classes) - 1)
    return ClassFunction(G, values=vals, name="regular")


def restrict(chi: ClassFunction, H: Subgroup) -> ClassFunction:
    """Restriction to H, as a class function on ``H.as_group()``."""
    if not isinstance(H, Subgroup) or H.parent is not chi.group:
        raise DomainError("restriction target is not a subgroup of the character's group")
    Hg, emb = H.as_group()
    cls_G = chi.group.classes.class_of
    where = [int(cls_G[emb[r]]) for r in Hg.classes.representatives]
    if chi.raw is not None:
        e_h = Hg.exponent
        if chi.raw_e % e_h == 0:
            f = chi.raw_e // e_h
            raw = [chi.raw[c] for c in where]
            if all(k % f == 0 for d in raw for k in d):
                return ClassFunction(Hg, raw=[{k // f: m for k, m in d.items()} for d in raw], raw_e=e_h)
        return ClassFunction(Hg, raw=[chi.raw[c] for c in where], raw_e=chi.raw_e)
    return ClassFunction(Hg, values=[chi.values[c] for c in where])


def induce(psi: ClassFunction, H: Subgroup) -> ClassFunction:
    """Induction from H (psi lives on ``H.as_group()``) to the parent group."""
    Hg, emb = H.as_group()
    if psi.group is not Hg:
        raise DomainError("induced function must live on the subgroup's own group")
    G = H.parent
    cd = G.classes
    r = len(cd)
    sums = [CycloNumber.rational(0)] * r
    for c, cls in enumerate(Hg.classes.classes):
        k = int(cd.class_of[emb[cls[0]]])
        sums[k] = sums[k] + psi.value(c) * len(cls)
    vals = []
    for k in range(r):
        if sums[k].is_zero():
            vals.append(sums[k])
        else:
            vals.append(sums[k] * Fraction(G.order, H.order * cd.sizes[k]))
    return ClassFunction(G, values=vals)


def inflate(chibar: ClassFunction, G: FiniteGroup, proj: np.ndarray) -> ClassFunction:
    """Pull back a class function on Q = G/N along the projection ``proj``."""
    Q = chibar.group
    proj = np.asarray(proj)
    if proj.shape != (G.order,) or proj.max() >= Q.order:
        raise DomainError("projection does not match the quotient group")
    rows = np.arange(G.order) if G.order <= 400 else np.arange(0, G.order, max(1, G.order // 200))
    if not np.array_equal(proj[G.mul[rows]], Q.mul[np.ix_(proj[rows], proj)]):
        raise DomainError("projection is not a homomorphism onto the quotient")
    cls_Q = Q.classes.class_of
    where = [int(cls_Q[proj[r]]) for r in G.classes.representatives]
    if chibar.raw is not None:
        return ClassFunction(G, raw=[chibar.raw[c] for c in where], raw_e=chibar.raw_e)
    return ClassFunction(G, values=[chibar.values[c] for c in where])


def kernel_of(chi: ClassFunction, *, verify: bool = True) -> Subgroup:
    """{g : χ(g) = χ(1)}, for a character χ."""
    G = chi.group
    if verify and chi.raw is None:
        mults = character_table(G).decompose(chi)
        if any(not isinstance(m, Fraction) or m.denominator != 1 or m < 0 for m in mults):
            raise DomainError("kernel requested for a class function that is not a character")
    d = chi.degree
    if chi.raw is not None:
        cls = [k for k, dd in enumerate(chi.raw) if dd == {0: d}]
    else:
        cls = [k for k, v in enumerate(chi.values) if v == d]
    cd = G.classes
    members = sorted(x for k in cls for x in cd.classes[k])
    K = Subgroup(G, members, check=True)
    if not K.is_normal:
        raise ComputationError("kernel of a character is not normal")  # pragma: no cover
    return K


def kernel_classes(chi: ClassFunction) -> frozenset[int]:
    d = chi.degree
    if chi.raw is not None:
        return frozenset(k for k, dd in enumerate(chi.raw) if dd == {0: d})
    return frozenset(k for k, v in enumerate(chi.values) if v == d)


def contains_in_kernel(chi: ClassFunction, N: Subgroup) -> bool:
    """N ≤ ker χ"""
    ker = kernel_classes(chi)
    cls = chi.group.classes.class_of
    return all(int(cls[x]) in ker for x in N.members)


# ---------------------------------------------------------------------------
# Dixon's method over F_ell


def _mod_rref(A: np.ndarray, ell: int) -> tuple[np.ndarray, list[int]]:
    A = np.array(A, dtype=np.int64) % ell
    rows, cols = A.shape
    piv: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * pow(int(A[r, c]), ell - 2, ell)) % ell
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            A[hit] = (A[hit] - np.outer(col[hit], A[r]) % ell) % ell
        piv.append(c)
        r += 1
    return A[:r], piv


def _mod_nullspace(A: np.ndarray, ell: int) -> np.ndarray:
    """Rows spanning {x : A x = 0} over F_ell."""
    R, piv = _mod_rref(A, ell)
    cols = A.shape[1]
    pset = set(piv)
    out = []
    for f in range(cols):
        if f in pset:
            continue
        x = np.zeros(cols, dtype=np.int64)
        x[f] = 1
        for i, pc in enumerate(piv):
            x[pc] = (-R[i, f]) % ell
        out.append(x)
    return np.array(out, dtype=np.int64).reshape(len(out), cols)


def _mod_charpoly(X: np.ndarray, ell: int) -> np.ndarray:
    """Characteristic polynomial (low -> high) via Hessenberg reduction."""
    H = np.array(X, dtype=np.int64) % ell
    d = len(H)
    for m in range(1, d - 1):
        nz = np.nonzero(H[m:, m - 1])[0]
        if len(nz) == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            H[[m, i]] = H[[i, m]]
            H[:, [m, i]] = H[:, [i, m]]
        inv = pow(int(H[m, m - 1]), ell - 2, ell)
        for i in range(m + 1, d):
            u = int(H[i, m - 1]) * inv % ell
            if u:
                H[i] = (H[i] - u * H[m]) % ell
                H[:, m] = (H[:, m] + u * H[:, i]) % ell
    polys = [np.array([1], dtype=np.int64)]
    for k in range(1, d + 1):
        prev = polys[k - 1]
        pk = np.zeros(k + 1, dtype=np.int64)
        pk[1:] = prev
        pk[:-1] = (pk[:-1] - int(H[k - 1, k - 1]) * prev) % ell
        t = 1
        for i in range(1, k):
            t = t * int(H[k - i, k - i - 1]) % ell
            if not t:
                break
            c = t * int(H[k - i - 1, k - 1]) % ell
            if c:
                q = polys[k - i - 1]
                pk[: len(q)] = (pk[: len(q)] - c * q) % ell
        polys.append(pk % ell)
    return polys[d]


def _mod_roots(poly: np.ndarray, ell: int) -> list[int]:
    xs = np.arange(ell, dtype=np.int64)
    vals = np.zeros(ell, dtype=np.int64)
    for c in poly[::-1]:
        vals = (vals * xs + int(c)) % ell
    return [int(x) for x in np.nonzero(vals == 0)[0]]


def _class_matrix(G: FiniteGroup, j: int) -> np.ndarray:
    """(M_j)_{ik} = #{x in C_j : x^-1 z_k in C_i}, z_k the class representative."""
    cd = G.classes
    r = len(cd)
    cj = np.array(cd.classes[j])
    reps = np.array(cd.representatives)
    Y = G.mul[G.inv[cj][:, None], reps[None, :]]
    M = np.zeros((r, r), dtype=np.int64)
    np.add.at(M, (cd.class_of[Y], np.broadcast_to(np.arange(r), Y.shape)), 1)
    return M


def dixon_prime(e: int, n: int, limit_factor: int = 100_000) -> int:
    """Least prime ell = 1 (mod e) with ell > 2 sqrt(n)."""
    bound = max(e * limit_factor, 1000)
    ell = e + 1
    while ell <= bound:
        if ell * ell > 4 * n and is_prime(ell):
            return ell
        ell += e
    raise ComputationError(f"no prime ell = 1 mod {e} with ell > 2*sqrt({n}) found below {bound}")


def _primitive_root(ell: int) -> int:
    from .groups import prime_factors

    fs = prime_factors(ell - 1)
    for g in range(2, ell):
        if all(pow(g, (ell - 1) // q, ell) != 1 for q in fs):
            return g
    return 1  # ell = 2


def _class_power_table(G: FiniteGroup, k: int, o: int) -> np.ndarray:
    """Classes of g^0, g^1, ..., g^(o-1) for g the representative of class k."""
    g = G.classes.representatives[k]
    out = np.zeros(o, dtype=np.int64)
    cur = 0
    for s in range(o):
        out[s] = G.classes.class_of[cur]
        cur = int(G.mul[cur, g])
    return out


def _dixon_raw(G: FiniteGroup) -> list[list[Raw]]:
    cd = G.classes
    r = len(cd)
    n = G.order
    e = G.exponent
    ell = dixon_prime(e, n)
    sizes = np.array(cd.sizes, dtype=np.int64)

    spaces = [np.eye(r, dtype=np.int64)]
    for j in range(1, r):
        if all(len(B) == 1 for B in spaces):
            break
        M = _class_matrix(G, j) % ell
        nxt = []
        for B in spaces:
            if len(B) == 1:
                nxt.append(B)
                continue
            _, piv = _mod_rref(B, ell)
            X = ((M @ B.T) % ell)[piv, :]
            roots = _mod_roots(_mod_charpoly(X, ell), ell)
            if len(roots) == 1:
                nxt.append(B)
                continue
            dim = 0
            for lam in roots:
                Y = _mod_nullspace((X - lam * np.eye(len(X), dtype=np.int64)) % ell, ell)
                sub, _ = _mod_rref((Y @ B) % ell, ell)
                dim += len(sub)
                nxt.append(sub)
            if dim != len(B):
                raise ComputationError("class matrices failed to split over F_ell")
        spaces = nxt
    if len(spaces) != r or any(len(B) != 1 for B in spaces):
        raise ComputationError("simultaneous eigenspaces did not separate all characters")

    inv_cls = np.array(G.inverse_class)
    size_inv = np.array([pow(int(s), ell - 2, ell) for s in sizes], dtype=np.int64)
    theta = np.zeros((r, r), dtype=np.int64)  # chars x classes, values mod ell
    degrees = []
    for c, B in enumerate(spaces):
        v = B[0] % ell
        if v[0] == 0:
            raise ComputationError("eigenvector vanishes at the identity class")
        v = v * pow(int(v[0]), ell - 2, ell) % ell
        S = int(np.sum(v * v[inv_cls] % ell * size_inv % ell) % ell)
        target = n * pow(S, ell - 2, ell) % ell
        d = next((x for x in range(1, math.isqrt(n) + 1) if x * x % ell == target), None)
        if d is None:
            raise ComputationError("no admissible degree for a central character")
        degrees.append(d)
        theta[c] = v * d % ell * size_inv % ell
    if sum(d * d for d in degrees) != n:
        raise ComputationError("degree sum of squares differs from the group order")

    eps = pow(_primitive_root(ell), (ell - 1) // e, ell)
    raw: list[list[Raw]] = [[{} for _ in range(r)] for _ in range(r)]
    dft_cache: dict[int, np.ndarray] = {}
    for k in range(r):
        o = int(cd.orders[cd.representatives[k]])
        W = dft_cache.get(o)
        if W is None:
            zo_inv = pow(eps, (e // o) * (o - 1), ell)  # ζ_o^-1 mod ell
            pw = np.array([pow(zo_inv, i, ell) for i in range(o)], dtype=np.int64)
            idx = np.outer(np.arange(o), np.arange(o)) % o
            W = pw[idx]
            dft_cache[o] = W
        pc = _class_power_table(G, k, o)
        T = theta[:, pc]  # chars x o
        if o * ell * ell < (1 << 62):
            m = (T @ W) % ell
        else:  # pragma: no cover - only for huge primes
            m = np.array((T.astype(object) @ W.astype(object)) % ell, dtype=np.int64)
        m = m * pow(o, ell - 2, ell) % ell
        step = e // o
        for c in range(r):
            row = m[c]
            if row.sum() != degrees[c] or (row > degrees[c]).any():
                raise ComputationError("eigenvalue multiplicities failed to lift")
            raw[c][k] = {int(t) * step: int(row[t]) for t in np.nonzero(row)[0]}
    return raw


def _abelian_raw(G: FiniteGroup) -> list[list[Raw]]:
    n, e = G.order, G.exponent
    exps = np.zeros((1, n), dtype=np.int64)
    inS = np.zeros(n, dtype=bool)
    inS[0] = True
    S = np.array([0])
    while len(S) < n:
        g = int(np.argmin(inS))
        gi = [0]
        cur = g
        while not inS[cur]:
            gi.append(cur)
            cur = int(G.mul[cur, g])
        m = len(gi)
        c = exps[:, cur]
        if (c % m).any():
            raise ComputationError("abelian character extension failed")  # pragma: no cover
        step = e // m
        a = (c[:, None] // m + np.arange(m)[None, :] * step) % e  # chars x m choices
        a = a.reshape(-1)
        base = np.repeat(exps, m, axis=0)
        P = G.mul[S[:, None], np.array(gi)[None, :]]  # |S| x m
        new = np.zeros((len(a), n), dtype=np.int64)
        for i in range(m):
            new[:, P[:, i]] = (base[:, S] + i * a[:, None]) % e
        exps = new
        inS[P.reshape(-1)] = True
        S = np.sort(P.reshape(-1))
    cls = G.classes.class_of
    out = []
    for row in exps:
        per = [None] * n
        for x in range(n):
            per[int(cls[x])] = {int(row[x]): 1}
        out.append(per)
    return out


def _lex_cmp(a: ClassFunction, b: ClassFunction) -> int:
    for k in range(len(a.group.classes)):
        if a.raw is not None and b.raw is not None and a.raw[k] == b.raw[k]:
            continue
        x, y = a.value(k).sort_key(), b.value(k).sort_key()
        if x != y:
            return -1 if x < y else 1
    return 0


# ---------------------------------------------------------------------------
# character tables


@dataclass(frozen=True)
class GaloisOrbitPartition:
    p: int
    scope: tuple[int, ...] | None  # members of the restriction subgroup, or None for all of G
    orbits: tuple[tuple[int, ...], ...]
    field_degrees: tuple[int, ...]

    def orbit_of(self, i: int) -> tuple[int, ...]:
        for orb in self.orbits:
            if i in orb:
                return orb
        raise KeyError(i)


class CharacterTable:
    """Irreducible characters of ``group``; ``chars[0]`` is trivial.

    Characters after the first are ordered by degree, then by their value
    tuples compared class by class on power-basis coordinates.
    """

    def __init__(self, group: FiniteGroup, chars: Sequence[ClassFunction]):
        self.group = group
        self.classes = group.classes
        self.chars = tuple(chars)
        self.degrees = tuple(c.degree for c in self.chars)
        self._index = {c.key(): i for i, c in enumerate(self.chars)}
        self._cache: dict = {}

    def __len__(self) -> int:
        return len(self.chars)

    def __getitem__(self, i: int) -> ClassFunction:
        return self.chars[i]

    def __iter__(self):
        return iter(self.chars)

    def index(self, chi: ClassFunction) -> int:
        """Position of an irreducible character (matched by values)."""
        i = self._index.get(chi.key())
        if i is not None:
            return i
        for j, c in enumerate(self.chars):
            if c == chi:
                return j
        raise DomainError("class function is not an irreducible character of this group")

    def decompose(self, f: ClassFunction) -> list:
        return [inner_product(f, c) for c in self.chars]

    def is_character(self, f: ClassFunction) -> bool:
        return all(isinstance(m, Fraction) and m.denominator == 1 and m >= 0 for m in self.decompose(f))

    def is_irreducible(self, f: ClassFunction) -> bool:
        try:
            self.index(f)
            return True
        except DomainError:
            return False

    def galois_permutation(self, k: int) -> tuple[int, ...]:
        """i -> index of σ_k χ_i (k coprime to the exponent)."""
        e = self.group.exponent
        k %= e
        hit = self._cache.get(("gal", k))
        if hit is None:
            if math.gcd(k, e) != 1:
                raise DomainError(f"{k} is not a unit modulo the exponent {e}")
            hit = tuple(self._index[c.compose_power(k).key()] for c in self.chars)
            self._cache[("gal", k)] = hit
        return hit

    def padic_orbits(self, p: int, scope: Subgroup | None = None) -> GaloisOrbitPartition:
        """Orbits of σ_k, k in the p-adic decomposition group, on value tuples.

        With ``scope`` only values on the subgroup's elements count, so
        characters with equal restrictions fall into one orbit.
        """
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        G = self.group
        if scope is not None and (scope.parent is not G):
            raise DomainError("orbit scope is not a subgroup of the table's group")
        key = ("orbits", p, None if scope is None else scope.members)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        e = G.exponent
        ks = padic_galois_group(e, p).elements
        if scope is None:
            cls = list(range(len(self.classes)))
        else:
            cls = sorted({int(self.classes.class_of[x]) for x in scope.members})

        def rkey(i: int, k: int = 1) -> tuple:
            c = self.chars[i]
            pm = G.class_power_map(k) if k != 1 else None
            return tuple(tuple(c.raw[pm[j] if pm else j].items()) for j in cls)

        parent = list(range(len(self.chars)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        by_key: dict[tuple, int] = {}
        for i in range(len(self.chars)):
            kk = rkey(i)
            if kk in by_key:
                parent[find(i)] = find(by_key[kk])
            else:
                by_key[kk] = i
        for i in range(len(self.chars)):
            for k in ks:
                if k == 1:
                    continue
                j = by_key[rkey(i, k)]
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for i in range(len(self.chars)):
            groups.setdefault(find(i), []).append(i)
        orbits = tuple(sorted(tuple(v) for v in groups.values()))
        degs = tuple(len({rkey(i) for i in orb}) for orb in orbits)
        out = GaloisOrbitPartition(p, None if scope is None else scope.members, orbits, degs)
        self._cache[key] = out
        return out

    def check_row_orthogonality(self) -> bool:
        for i, a in enumerate(self.chars):
            for j in range(i, len(self.chars)):
                if inner_product(a, self.chars[j]) != (1 if i == j else 0):
                    return False
        return True

    def check_column_orthogonality(self) -> bool:
        G = self.group
        cd = self.classes
        inv = G.inverse_class
        e = G.exponent
        r = len(cd)
        for i in range(r):
            for j in range(r):
                acc: dict[int, int] = {}
                for c in self.chars:
                    for x, m in c.raw[i].items():
                        for y, m2 in c.raw[inv[j]].items():
                            z = (x + y) % e
                            acc[z] = acc.get(z, 0) + m * m2
                val = CycloNumber.from_exponents(e, acc)
                want = G.order // cd.sizes[i] if i == j else 0
                if val != want:
                    return False
        return True

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        cd = self.classes
        return {
            "group": self.group.spec,
            "label": self.group.label,
            "order": self.group.order,
            "exponent": self.group.exponent,
            "classes": [
                {"representative": int(cd.representatives[k]), "size": cd.sizes[k],
                 "element_order": cd.class_orders[k]}
                for k in range(len(cd))
            ],
            "characters": [
                {
                    "degree": c.degree,
                    "values": [format_cyclo(v) for v in c.values],
                    "eigenvalues": [[[k, m] for k, m in d.items()] for d in c.raw],
                }
                for c in self.chars
            ],
        }

    @classmethod
    def from_json(cls, data: dict, group: FiniteGroup | None = None) -> "CharacterTable":
        if group is None:
            from .constructors import build_group

            group = build_group(data["group"])
        cd = group.classes
        if [c["size"] for c in data["classes"]] != list(cd.sizes) or [
            c["representative"] for c in data["classes"]
        ] != list(cd.representatives):
            raise DomainError("stored class data does not match the group")
        e = int(data["exponent"])
        chars = []
        for row in data["characters"]:
            raw = [{int(k): int(m) for k, m in per} for per in row["eigenvalues"]]
            chars.append(ClassFunction(group, raw=raw, raw_e=e))
        return cls(group, chars)


def character_table(G: FiniteGroup, cap: int | None = None) -> CharacterTable:
    hit = G._cache.get("chartable")
    if hit is not None:
        return hit
    check_cap(G.order, cap, "character table group")
    raws = _abelian_raw(G) if G.is_abelian else _dixon_raw(G)
    e = G.exponent
    chars = [ClassFunction(G, raw=r, raw_e=e) for r in raws]
    triv_key = trivial_character(G).key()
    first = [c for c in chars if c.key() == triv_key]
    rest = [c for c in chars if c.key() != triv_key]
    rest.sort(key=functools.cmp_to_key(lambda a, b: (a.degree > b.degree) - (a.degree < b.degree) or _lex_cmp(a, b)))
    for i, c in enumerate(first + rest):
        c.name = f"chi{i}"
    table = CharacterTable(G, first + rest)
    G._cache["chartable"] = table
    return table


# ---------------------------------------------------------------------------
# Clifford theory


@dataclass(frozen=True)
class CliffordRecord:
    chi: int
    constituents: tuple[int, ...]  # indices in Irr(N)
    multiplicity: int  # e
    orbit_size: int  # [G : G_η]
    eta_degree: int
    holds: bool


def conjugation_class_action(G: FiniteGroup, N: Subgroup, g: int) -> tuple[int, ...]:
    """Permutation of N's classes induced by n -> g n g^-1."""
    Ng, emb = N.as_group()
    lookup = {int(x): i for i, x in enumerate(emb)}
    cls = Ng.classes
    return tuple(int(cls.class_of[lookup[G.conjugate(g, int(emb[r]))]]) for r in cls.representatives)


def clifford_data(G: FiniteGroup, N: Subgroup) -> list[CliffordRecord]:
    """Check res χ = e Σ_{orbit} η^g and χ(1) = e [G:G_η] η(1) for every χ."""
    if not N.is_normal:
        raise DomainError("Clifford data needs a normal subgroup")
    T = character_table(G)
    Ng, _ = N.as_group()
    TN = character_table(Ng)
    # action of G on Irr(N): η^g(n) = η(g n g^-1)
    perms = {}
    for g in range(G.order):
        cp = conjugation_class_action(G, N, g)
        if cp not in perms:
            perms[cp] = 0
        perms[cp] += 1
    actions = []
    for cp in perms:
        img = []
        for eta in TN.chars:
            moved = ClassFunction(Ng, raw=[eta.raw[cp[j]] for j in range(len(cp))], raw_e=eta.raw_e)
            img.append(TN.index(moved))
        actions.append((tuple(img), perms[cp]))
    out = []
    for i, chi in enumerate(T.chars):
        mults = TN.decompose(restrict(chi, N))
        cons = tuple(j for j, m in enumerate(mults) if m)
        es = {int(mults[j]) for j in cons}
        eta = cons[0]
        orbit = {img[eta] for img, _ in actions}
        stab = sum(cnt for img, cnt in actions if img[eta] == eta)
        index = G.order // stab
        e = es.pop() if len(es) == 1 else 0
        holds = (
            not es and e > 0 and set(cons) == orbit and index == len(orbit)
            and chi.degree == e * index * TN.degrees[eta]
        )
        out.append(CliffordRecord(i, cons, e, index, TN.degrees[eta], holds))
    return out
