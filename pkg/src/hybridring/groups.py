"""Finite groups stored as full multiplication tables, with the structural
queries the rest of the package needs (classes, normal subgroups, quotients,
Sylow subgroups, commutators, automorphisms).

Element 0 is always the identity.  Every "least representative" tie-break
refers to element indices.
"""
from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, OrderCapError

DEFAULT_ORDER_CAP = 2000
CAP_ENV_VAR = "HYBRIDRING_ORDER_CAP"
EXHAUSTIVE_CHECK_LIMIT = 200
_SAMPLED_TRIPLES = 20000


def order_cap(override: int | None = None) -> int:
    """Effective order cap: explicit override, else environment, else default."""
    if override is not None:
        cap = int(override)
    else:
        raw = os.environ.get(CAP_ENV_VAR, "").strip()
        if not raw:
            return DEFAULT_ORDER_CAP
        try:
            cap = int(raw)
        except ValueError:
            raise DomainError(f"{CAP_ENV_VAR}={raw!r} is not an integer") from None
    if cap < 1:
        raise DomainError(f"order cap must be positive, got {cap}")
    return cap


def check_cap(order: int, cap: int | None = None, what: str = "group") -> None:
    limit = order_cap(cap)
    if order > limit:
        raise OrderCapError(order, limit, what)


@dataclass(frozen=True)
class ConjClassData:
    classes: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    class_of: np.ndarray
    sizes: tuple[int, ...]
    orders: np.ndarray  # element orders, indexed by element

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def class_orders(self) -> tuple[int, ...]:
        return tuple(int(self.orders[r]) for r in self.representatives)


class FiniteGroup:
    """A finite group given by its Cayley table.

    ``spec`` is the JSON-able construction record, used for report echoes
    and round trips.  Derived data is cached on the instance; the table
    itself is read-only.
    """

    def __init__(self, mul, label: str = "G", spec: dict | None = None, *, check: bool = True):
        table = np.array(mul, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise DomainError("multiplication table must be a non-empty square array")
        n = table.shape[0]
        if table.min() < 0 or table.max() >= n:
            raise DomainError("multiplication table entries must lie in 0..order-1")
        table = table.astype(np.int32)
        ar = np.arange(n)
        if not (np.array_equal(table[0], ar) and np.array_equal(table[:, 0], ar)):
            raise DomainError("element 0 is not a two-sided identity")
        if check:
            if not (np.sort(table, axis=1) == ar).all() or not (np.sort(table, axis=0) == ar[:, None]).all():
                raise DomainError("multiplication table is not a Latin square")
        inv = np.argmax(table == 0, axis=1).astype(np.int32)
        if not (table[ar, inv] == 0).all() or not (table[inv, ar] == 0).all():
            raise DomainError("inverses do not agree with the multiplication table")
        if check:
            _check_associative(table)
        table.flags.writeable = False
        inv.flags.writeable = False
        self.mul = table
        self.inv = inv
        self.label = label
        self.spec = spec if spec is not None else {"table": table.tolist()}
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label!r}, order={self.order})"

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    def __len__(self) -> int:
        return self.order

    def op(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = int(self.inv[x]), -k
        result, base = 0, int(x)
        while k:
            if k & 1:
                result = int(self.mul[result, base])
            base = int(self.mul[base, base])
            k >>= 1
        return result

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1"""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    def commutator(self, a: int, b: int) -> int:
        """a^-1 b^-1 a b"""
        return int(self.mul[self.mul[self.inv[a], self.inv[b]], self.mul[a, b]])

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        ar = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        cur = ar.copy()
        k = 1
        while (orders == 0).any():
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            cur = self.mul[cur, ar]
            k += 1
        orders.flags.writeable = False
        return orders

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(int(o) for o in set(self.element_orders.tolist())))

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())

    @cached_property
    def classes(self) -> ConjClassData:
        n = self.order
        ar = np.arange(n)
        class_of = np.full(n, -1, dtype=np.int64)
        cells: list[tuple[int, ...]] = []
        for x in range(n):
            if class_of[x] >= 0:
                continue
            conj = np.unique(self.mul[self.mul[ar, x], self.inv])
            class_of[conj] = len(cells)
            cells.append(tuple(int(c) for c in conj))
        class_of.flags.writeable = False
        return ConjClassData(
            classes=tuple(cells),
            representatives=tuple(c[0] for c in cells),
            class_of=class_of,
            sizes=tuple(len(c) for c in cells),
            orders=self.element_orders,
        )

    @cached_property
    def inverse_class(self) -> tuple[int, ...]:
        cd = self.classes
        return tuple(int(cd.class_of[self.inv[r]]) for r in cd.representatives)

    def power_class(self, j: int, k: int) -> int:
        """Class of g_j^k where g_j is the representative of class j."""
        cd = self.classes
        return int(cd.class_of[self.power(cd.representatives[j], k)])

    def class_power_map(self, k: int) -> tuple[int, ...]:
        return tuple(self.power_class(j, k) for j in range(len(self.classes)))

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, range(self.order))

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, (0,))

    def subgroup(self, members: Iterable[int]) -> "Subgroup":
        return Subgroup(self, members, check=True)


def _check_associative(table: np.ndarray) -> None:
    n = table.shape[0]
    if n <= EXHAUSTIVE_CHECK_LIMIT:
        left = table[table]  # left[a, b, c] = (ab)c
        right = table[np.arange(n)[:, None, None], table[None, :, :]]  # a(bc)
        ok = np.array_equal(left, right)
    else:
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, _SAMPLED_TRIPLES))
        ok = np.array_equal(table[table[a, b], c], table[a, table[b, c]])
    if not ok:
        raise DomainError("multiplication table is not associative")


class Subgroup:
    """A subgroup of a FiniteGroup, stored as a sorted tuple of element indices."""

    __slots__ = ("parent", "members", "_set", "_cache")

    def __init__(self, parent: FiniteGroup, members: Iterable[int], *, check: bool = False):
        mem = tuple(sorted({int(x) for x in members}))
        if check:
            if not mem or mem[0] != 0:
                raise DomainError("subgroup must contain the identity")
            if mem[-1] >= parent.order:
                raise DomainError("subgroup member out of range")
            arr = np.array(mem)
            prod = np.unique(parent.mul[np.ix_(arr, arr)])
            if len(prod) != len(mem) or not np.array_equal(prod, arr):
                raise DomainError("subset is not closed under multiplication")
        self.parent = parent
        self.members = mem
        self._set = frozenset(mem)
        self._cache: dict = {}

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x) -> bool:
        return int(x) in self._set

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other.members == self.members

    def __hash__(self) -> int:
        return hash(self.members)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order} of {self.parent.label})"

    @property
    def mask(self) -> np.ndarray:
        m = self._cache.get("mask")
        if m is None:
            m = np.zeros(self.parent.order, dtype=bool)
            m[list(self.members)] = True
            m.flags.writeable = False
            self._cache["mask"] = m
        return m

    def issubset(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_whole(self) -> bool:
        return self.order == self.parent.order

    @property
    def is_normal(self) -> bool:
        v = self._cache.get("normal")
        if v is None:
            G = self.parent
            cd = G.classes
            cls = set(cd.class_of[list(self.members)].tolist())
            v = sum(cd.sizes[c] for c in cls) == self.order
            self._cache["normal"] = v
        return v

    def intersection(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, self._set & other._set)

    def conjugate(self, g: int) -> "Subgroup":
        G = self.parent
        arr = np.array(self.members)
        return Subgroup(G, G.mul[G.mul[g, arr], G.inv[g]])

    def as_group(self) -> tuple[FiniteGroup, np.ndarray]:
        """The subgroup as a standalone group plus the embedding (sub index -> parent index)."""
        hit = self._cache.get("group")
        if hit is None:
            G = self.parent
            emb = np.array(self.members, dtype=np.int64)
            lookup = np.full(G.order, -1, dtype=np.int64)
            lookup[emb] = np.arange(len(emb))
            table = lookup[G.mul[np.ix_(emb, emb)]]
            sub = FiniteGroup(table, label=f"{G.label}|{self.order}", check=False)
            emb.flags.writeable = False
            hit = (sub, emb)
            self._cache["group"] = hit
        return hit

    def to_sub_indices(self, elements: Iterable[int]) -> list[int]:
        """Translate parent element indices into indices of ``as_group()``."""
        _, emb = self.as_group()
        pos = {int(x): i for i, x in enumerate(emb)}
        try:
            return [pos[int(x)] for x in elements]
        except KeyError:
            raise DomainError("element is not in the subgroup") from None


def generate(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """Subgroup generated by ``gens`` (closure under right multiplication)."""
    gens = sorted({int(g) for g in gens} - {0})
    if not gens:
        return G.trivial
    seen = np.zeros(G.order, dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    garr = np.array(gens)
    while frontier.size:
        nxt = np.unique(G.mul[np.ix_(frontier, garr)])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return Subgroup(G, np.nonzero(seen)[0])


def normal_closure(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    cd = G.classes
    cls = {int(cd.class_of[g]) for g in gens}
    elems = [x for c in sorted(cls) for x in cd.classes[c]]
    return generate(G, elems)


def join(A: Subgroup, B: Subgroup) -> Subgroup:
    return generate(A.parent, set(A.members) | set(B.members))


def normal_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """All normal subgroups, sorted by order then lexicographically."""
    hit = G._cache.get("normal_subgroups")
    if hit is not None:
        return list(hit)
    cd = G.classes
    # every normal subgroup is a product of normal closures of single classes
    atoms: dict[tuple, list[int]] = {}
    for j, rep in enumerate(cd.representatives):
        S = generate(G, cd.classes[j])
        atoms.setdefault(S.members, []).append(rep)
    found: dict[tuple[int, ...], Subgroup] = {}
    atom_list = [Subgroup(G, m) for m in atoms]
    queue = list(atom_list)
    for S in atom_list:
        found[S.members] = S
    while queue:
        S = queue.pop()
        for A in atom_list:
            if A.issubset(S):
                continue
            T = _normal_product(G, S, A)
            if T.members not in found:
                found[T.members] = T
                queue.append(T)
    result = sorted(found.values(), key=lambda s: (s.order, s.members))
    for s in result:
        s._cache["normal"] = True
    G._cache["normal_subgroups"] = tuple(result)
    return list(result)


def _normal_product(G: FiniteGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    a = np.array(A.members)
    b = np.array(B.members)
    return Subgroup(G, np.unique(G.mul[np.ix_(a, b)]))


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, np.ndarray]:
    """G/N with cosets numbered by their least element; returns (G/N, projection)."""
    if N.parent is not G:
        raise DomainError("subgroup belongs to a different group")
    if not N.is_normal:
        raise DomainError("quotient requires a normal subgroup")
    key = ("quotient", N.members)
    hit = G._cache.get(key)
    if hit is not None:
        return hit
    n = G.order
    proj = np.full(n, -1, dtype=np.int64)
    reps: list[int] = []
    narr = np.array(N.members)
    for x in range(n):
        if proj[x] >= 0:
            continue
        proj[G.mul[x, narr]] = len(reps)
        reps.append(x)
    r = np.array(reps)
    table = proj[G.mul[np.ix_(r, r)]]
    Q = FiniteGroup(table, label=f"{G.label}/{N.order}", check=False)
    proj.flags.writeable = False
    G._cache[key] = (Q, proj)
    return Q, proj


def commutator_subgroup(G: FiniteGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    """[A, B], generated by the commutators a^-1 b^-1 a b."""
    a = np.array(A.members)
    b = np.array(B.members)
    comm = G.mul[G.mul[np.ix_(G.inv[a], G.inv[b])], G.mul[np.ix_(a, b)]]
    return generate(G, np.unique(comm).tolist())


def derived_subgroup(G: FiniteGroup) -> Subgroup:
    hit = G._cache.get("derived")
    if hit is None:
        hit = commutator_subgroup(G, G.whole, G.whole)
        G._cache["derived"] = hit
    return hit


def lower_central_series(G: FiniteGroup, limit: int = 64) -> list[Subgroup]:
    """G = γ_1 ≥ γ_2 ≥ ... until it stabilises."""
    series = [G.whole]
    while len(series) < limit:
        nxt = commutator_subgroup(G, series[-1], G.whole)
        if nxt == series[-1]:
            break
        series.append(nxt)
    return series


def nilpotency_class(G: FiniteGroup) -> int | None:
    """Nilpotency class, or None when the lower central series stalls above 1."""
    series = lower_central_series(G)
    if series[-1].order != 1:
        return None
    return len(series) - 1


def centralizer(G: FiniteGroup, x: int) -> Subgroup:
    return Subgroup(G, np.nonzero(G.mul[:, x] == G.mul[x, :])[0])


def center(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, np.nonzero((G.mul == G.mul.T).all(axis=1))[0])


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def sylow_subgroup(G: FiniteGroup, p: int) -> tuple[Subgroup, bool]:
    """A Sylow p-subgroup built greedily from least-index p-elements, plus normality."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    key = ("sylow", p)
    hit = G._cache.get(key)
    if hit is not None:
        return hit
    target = p ** vp(G.order, p)
    S = G.trivial
    orders = G.element_orders
    candidates = [x for x in range(1, G.order) if _is_p_power(int(orders[x]), p)]
    while S.order < target:
        grown = False
        for x in candidates:
            if x in S:
                continue
            T = generate(G, list(S.members) + [x])
            if _is_p_power(T.order, p):
                S = T
                grown = True
                if S.order == target:
                    break
        if not grown:  # pragma: no cover - Sylow theory rules this out
            raise RuntimeError("greedy Sylow construction stalled")
    hit = (S, S.is_normal)
    G._cache[key] = hit
    return hit


class GroupAutomorphism:
    """An automorphism stored as the permutation of element indices."""

    def __init__(self, group: FiniteGroup, images: Sequence[int], *, check: bool = True):
        img = np.array(images, dtype=np.int64)
        n = group.order
        if img.shape != (n,):
            raise DomainError("automorphism images must list one image per element")
        if check:
            if img[0] != 0 or not np.array_equal(np.sort(img), np.arange(n)):
                raise DomainError("images do not define a bijection fixing the identity")
            if not np.array_equal(img[group.mul], group.mul[np.ix_(img, img)]):
                raise DomainError("images do not define a homomorphism")
        img.flags.writeable = False
        self.group = group
        self.images = img

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupAutomorphism)
            and other.group is self.group
            and np.array_equal(other.images, self.images)
        )

    def __hash__(self) -> int:
        return hash(self.images.tobytes())

    def compose(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        """self ∘ other"""
        return GroupAutomorphism(self.group, self.images[other.images], check=False)

    def inverse(self) -> "GroupAutomorphism":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(len(self.images))
        return GroupAutomorphism(self.group, inv, check=False)

    def power(self, k: int) -> "GroupAutomorphism":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = np.arange(self.group.order)
        img = base.images
        while k:
            if k & 1:
                result = img[result]
            img = img[img]
            k >>= 1
        return GroupAutomorphism(self.group, result, check=False)

    @cached_property
    def order(self) -> int:
        ident = np.arange(self.group.order)
        cur = self.images
        k = 1
        while not np.array_equal(cur, ident):
            cur = self.images[cur]
            k += 1
        return k

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(self.group.order)))

    def class_permutation(self) -> tuple[int, ...]:
        cd = self.group.classes
        return tuple(int(cd.class_of[self.images[r]]) for r in cd.representatives)

    def stabilizes(self, S: Subgroup) -> bool:
        return set(self.images[list(S.members)].tolist()) == set(S.members)


def identity_automorphism(G: FiniteGroup) -> GroupAutomorphism:
    return GroupAutomorphism(G, np.arange(G.order), check=False)


def inner_automorphism(G: FiniteGroup, g: int) -> GroupAutomorphism:
    """x -> g x g^-1"""
    ar = np.arange(G.order)
    return GroupAutomorphism(G, G.mul[G.mul[g, ar], G.inv[g]], check=False)


def automorphism_from_images(G: FiniteGroup, images: dict[int, int]) -> GroupAutomorphism:
    """Extend generator images to an automorphism, verifying it is one."""
    gens = sorted(int(g) for g in images)
    if any(g < 0 or g >= G.order for g in gens) or any(
        int(v) < 0 or int(v) >= G.order for v in images.values()
    ):
        raise DomainError("automorphism generator or image out of range")
    img = np.full(G.order, -1, dtype=np.int64)
    img[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for w in frontier:
            for g in gens:
                x = int(G.mul[w, g])
                y = int(G.mul[img[w], int(images[g])])
                if img[x] < 0:
                    img[x] = y
                    nxt.append(x)
                elif img[x] != y:
                    raise DomainError("generator images are inconsistent with the group relations")
        frontier = nxt
    if (img < 0).any():
        raise DomainError("the given elements do not generate the group")
    return GroupAutomorphism(G, img, check=True)


def abelian_invariants(G: FiniteGroup) -> tuple[int, ...]:
    """Invariant factors of an abelian group, e.g. (2, 6) for C2 x C6."""
    if not G.is_abelian:
        raise DomainError("abelian invariants requested for a nonabelian group")
    orders = G.element_orders
    factors: list[list[int]] = []
    for p in prime_factors(G.order):
        # number of elements of order dividing p^k pins down the partition
        parts = []
        k = 1
        prev = 1
        while True:
            cnt = int(np.sum(np.gcd(orders, p ** k) == orders))
            if cnt == prev:
                break
            parts.append(vp(cnt // prev, p))  # rank of the k-th layer
            prev = cnt
            k += 1
        # parts[i] = number of cyclic factors of order >= p^(i+1)
        exps = []
        for i in range(len(parts)):
            nxt = parts[i + 1] if i + 1 < len(parts) else 0
            exps += [i + 1] * (parts[i] - nxt)
        factors.append(sorted((p ** e for e in exps), reverse=True))
    width = max((len(f) for f in factors), default=0)
    inv = []
    for i in range(width):
        inv.append(math.prod(f[i] for f in factors if i < len(f)))
    return tuple(sorted(inv))


def is_cyclic(G: FiniteGroup) -> bool:
    return int(G.element_orders.max()) == G.order


def fingerprint(G: FiniteGroup, degrees: Sequence[int] | None = None) -> dict:
    """Isomorphism invariants: order profile, class sizes, optional degree multiset."""
    fp = {
        "order": G.order,
        "order_profile": sorted(Counter(G.element_orders.tolist()).items()),
        "class_sizes": sorted(G.classes.sizes),
    }
    if degrees is not None:
        fp["degrees"] = sorted(int(d) for d in degrees)
    return fp


_CATALOG_HOOK = None


def set_catalog_hook(fn) -> None:
    global _CATALOG_HOOK
    _CATALOG_HOOK = fn


def describe(G: FiniteGroup) -> str:
    """Short isomorphism-type name guessed from invariants ("C6", "S3", ...)."""
    hit = G._cache.get("describe")
    if hit is not None:
        return hit
    if G.order == 1:
        name = "1"
    elif G.is_abelian:
        inv = abelian_invariants(G)
        name = "V4" if inv == (2, 2) else "x".join(f"C{d}" for d in inv)
    else:
        name = None
        if _CATALOG_HOOK is not None:
            name = _CATALOG_HOOK(G)
        if name is None:
            name = f"group of order {G.order}"
    G._cache["describe"] = name
    return name
