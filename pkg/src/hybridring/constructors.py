"""Group constructors and the GroupSpec JSON format.

A spec is either ``{"construct": name, "params": {...}}`` or
``{"table": [[...], ...]}``.  Every builder checks the order cap before
allocating its table.
"""
from __future__ import annotations

import itertools
import math
import re
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from .errors import DomainError
from .finite_field import GF, prime_power
from .groups import (
    FiniteGroup,
    GroupAutomorphism,
    automorphism_from_images,
    check_cap,
    fingerprint,
    is_prime,
    set_catalog_hook,
)


def semidirect_table(n_mul: np.ndarray, h_mul: np.ndarray, act: np.ndarray) -> np.ndarray:
    """Table of N ⋊ H with element (x, h) encoded x + |N|*h.

    ``act[h, x]`` is the image of x under the automorphism attached to h, and
    (x1, h1)(x2, h2) = (x1 * act[h1, x2], h1 h2).
    """
    nn = n_mul.shape[0]
    nh = h_mul.shape[0]
    order = nn * nh
    idx = np.arange(order)
    x, h = idx % nn, idx // nn
    first = n_mul[x[:, None], act[h[:, None], x[None, :]]]
    second = h_mul[h[:, None], h[None, :]]
    return first + nn * second


def _cyclic_table(n: int) -> np.ndarray:
    ar = np.arange(n)
    return (ar[:, None] + ar[None, :]) % n


def _as_int(params: dict, key: str, default=None) -> int:
    if key not in params:
        if default is None:
            raise DomainError(f"missing parameter {key!r}")
        return default
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise DomainError(f"parameter {key!r} must be an integer, got {v!r}")
    return v


def _make(table, label: str, construct: str, params: dict, check: bool = True) -> FiniteGroup:
    spec = {"construct": construct, "params": dict(params)}
    return FiniteGroup(table, label=label, spec=spec, check=check)


def cyclic(n: int, cap: int | None = None) -> FiniteGroup:
    if n < 1:
        raise DomainError("cyclic group needs n >= 1")
    check_cap(n, cap)
    return _make(_cyclic_table(n), "1" if n == 1 else f"C{n}", "cyclic", {"n": n})


def dihedral(n: int, cap: int | None = None) -> FiniteGroup:
    """Dihedral group of order 2n: r^i s^k encoded i + n k."""
    if n < 1:
        raise DomainError("dihedral group needs n >= 1")
    check_cap(2 * n, cap)
    act = np.array([np.arange(n), (-np.arange(n)) % n])
    return _make(semidirect_table(_cyclic_table(n), _cyclic_table(2), act), f"D{2 * n}", "dihedral", {"n": n})


def dicyclic(n: int, cap: int | None = None) -> FiniteGroup:
    """Dic_n of order 4n: a^i x^k encoded i + 2n k, x^2 = a^n, x a x^-1 = a^-1."""
    if n < 2:
        raise DomainError("dicyclic group needs n >= 2")
    m = 2 * n
    check_cap(2 * m, cap)
    idx = np.arange(2 * m)
    i, k = idx % m, idx // m
    j, l_ = i[None, :], k[None, :]
    sign = np.where(k[:, None] == 1, -1, 1)
    expo = i[:, None] + sign * j + np.where((k[:, None] + l_) == 2, n, 0)
    table = (expo % m) + m * ((k[:, None] + l_) % 2)
    label = "Q8" if n == 2 else f"Dic{n}"
    return _make(table, label, "dicyclic", {"n": n})


def quaternion(cap: int | None = None) -> FiniteGroup:
    G = dicyclic(2, cap)
    G.spec = {"construct": "quaternion", "params": {}}
    return G


def klein(cap: int | None = None) -> FiniteGroup:
    table = np.array([[a ^ b for b in range(4)] for a in range(4)])
    return _make(table, "V4", "klein", {})


def _perm_group(perms: list[tuple[int, ...]], label: str, construct: str, params: dict) -> FiniteGroup:
    P = np.array(perms, dtype=np.int64)
    m, d = P.shape
    weights = d ** np.arange(d)
    codes = P @ weights
    lookup = {int(c): i for i, c in enumerate(codes)}
    comp = P[np.arange(m)[:, None, None], P[None, :, :]]  # (a∘b)(x) = a(b(x))
    ccodes = comp @ weights
    table = np.vectorize(lookup.__getitem__)(ccodes)
    return _make(table, label, construct, params, check=m <= 200)


def _parity(p: tuple[int, ...]) -> int:
    seen, parity = set(), 0
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def symmetric(n: int, cap: int | None = None) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise DomainError("symmetric groups are supported for 1 <= n <= 6")
    check_cap(math.factorial(n), cap)
    perms = list(itertools.permutations(range(n)))
    return _perm_group(perms, f"S{n}", "symmetric", {"n": n})


def alternating(n: int, cap: int | None = None) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise DomainError("alternating groups are supported for 1 <= n <= 6")
    check_cap(max(1, math.factorial(n) // 2), cap)
    perms = [p for p in itertools.permutations(range(n)) if _parity(p) == 0]
    return _make_alt(perms, n)


def _make_alt(perms, n):
    return _perm_group(perms, f"A{n}", "alternating", {"n": n})


def _units_first(F: GF, members: list[int]) -> list[int]:
    """Put 1 first, keep the rest in encoding order."""
    return [1] + [c for c in members if c != 1]


def affine(q: int, cap: int | None = None) -> FiniteGroup:
    """Aff(q): x -> a x + b; translations are the first q elements."""
    prime_power(q)
    if q > 64:
        raise DomainError("Aff(q) is supported for prime powers q <= 64")
    check_cap(q * (q - 1), cap)
    F = GF(q)
    units = _units_first(F, list(range(1, q)))
    uidx = {c: i for i, c in enumerate(units)}
    h_mul = np.array([[uidx[int(F.mul[a, b])] for b in units] for a in units])
    act = np.array([F.mul[a] for a in units])
    table = semidirect_table(F.add, h_mul, act)
    return _make(table, f"Aff({q})", "affine", {"q": q})


def _least_order_q_unit(ell: int, q: int) -> int:
    for r in range(2, ell):
        if pow(r, q, ell) == 1 and all(pow(r, d, ell) != 1 for d in range(1, q)):
            return r
    raise DomainError(f"no unit of order {q} modulo {ell}")


def metacyclic(ell: int, q: int, cap: int | None = None) -> FiniteGroup:
    """C_ell ⋊ C_q with the generator acting as multiplication by the least unit of order q."""
    if not is_prime(ell):
        raise DomainError(f"ell={ell} must be prime")
    if q < 2 or (ell - 1) % q:
        raise DomainError(f"q={q} must be > 1 and divide ell-1={ell - 1}")
    check_cap(ell * q, cap)
    r = _least_order_q_unit(ell, q)
    ar = np.arange(ell)
    act = np.array([(pow(r, t, ell) * ar) % ell for t in range(q)])
    table = semidirect_table(_cyclic_table(ell), _cyclic_table(q), act)
    return _make(table, f"C{ell}:C{q}", "metacyclic", {"ell": ell, "q": q})


def affine_frobenius(q: int, p_part: int | None = None, cap: int | None = None) -> FiniteGroup:
    """F_q ⋊ (M ⋊ <φ>) with φ the absolute Frobenius.

    M is F_q^× by default; with ``p_part`` it is the group of p-power roots
    of unity in F_q^×.
    """
    ell, f = prime_power(q)
    if q > 64:
        raise DomainError("affine-Frobenius groups are supported for q <= 64")
    F = GF(q)
    if p_part is None:
        members = list(range(1, q))
    else:
        if not is_prime(p_part) or (q - 1) % p_part:
            raise DomainError(f"p_part={p_part} must be a prime dividing q-1={q - 1}")
        m = 1
        while (q - 1) % (m * p_part) == 0:
            m *= p_part
        members = F.roots_of_unity(m)
    M = _units_first(F, members)
    inner_order = len(M) * f
    check_cap(q * inner_order, cap)
    midx = {c: i for i, c in enumerate(M)}
    # inner group K = M ⋊ <φ>, element (c, i) encoded midx[c] + |M| i
    frob = [[F.frobenius(c, i) for c in range(q)] for i in range(f)]
    k_act = np.array([[midx[frob[i][c]] for c in M] for i in range(f)])
    m_mul = np.array([[midx[int(F.mul[a, b])] for b in M] for a in M])
    k_mul = semidirect_table(m_mul, _cyclic_table(f), k_act)
    act = np.zeros((inner_order, q), dtype=np.int64)
    for code in range(inner_order):
        c, i = M[code % len(M)], code // len(M)
        act[code] = [int(F.mul[c, frob[i][x]]) for x in range(q)]
    table = semidirect_table(F.add, k_mul, act)
    params = {"q": q} if p_part is None else {"q": q, "p_part": p_part}
    label = f"AffFrob({q})" if p_part is None else f"AffFrob({q},{p_part})"
    return _make(table, label, "affine_frobenius", params)


def _mat_mul2(a, b, ell):
    return (
        (a[0] * b[0] + a[1] * b[2]) % ell,
        (a[0] * b[1] + a[1] * b[3]) % ell,
        (a[2] * b[0] + a[3] * b[2]) % ell,
        (a[2] * b[1] + a[3] * b[3]) % ell,
    )


def _mat_order(m, ell, bound):
    ident = (1, 0, 0, 1)
    x, k = m, 1
    while x != ident:
        x = _mat_mul2(x, m, ell)
        k += 1
        if k > bound:
            return None
    return k


def dicyclic_matrices(p: int, ell: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(a, j) in SL2(F_ell) with a of order 2p, j^2 = -1 and j a j^-1 = a^-1.

    Both are the lexicographically least matrices (entries a11, a12, a21, a22)
    with these properties.
    """
    minus = (ell - 1, 0, 0, ell - 1)
    sl2 = [
        m
        for m in itertools.product(range(ell), repeat=4)
        if (m[0] * m[3] - m[1] * m[2]) % ell == 1
    ]
    a = next((m for m in sl2 if _mat_order(m, ell, 2 * p) == 2 * p), None)
    if a is None:
        raise DomainError(f"no element of order {2 * p} in SL2(F_{ell})")
    a_inv = a
    for _ in range(2 * p - 2):
        a_inv = _mat_mul2(a_inv, a, ell)
    for j in sl2:
        if _mat_mul2(j, j, ell) == minus and _mat_mul2(j, a, ell) == _mat_mul2(a_inv, j, ell):
            return a, j
    raise DomainError(f"no quaternion partner j found in SL2(F_{ell})")  # pragma: no cover


def dicyclic_prime_candidates(p: int, limit: int = 10_000) -> list[int]:
    return [ell for ell in range(3, limit) if is_prime(ell) and ell != p and ell % p in (1, p - 1)]


def dicyclic_frobenius(p: int, ell: int | str = "auto", cap: int | None = None) -> FiniteGroup:
    """(F_ell)^2 ⋊ Dic_p with Dic_p embedded in SL2(F_ell).

    Element (v, a^i j^k) is encoded v + ell^2 (i + 2p k), v = x + ell y.
    """
    if p < 3 or not is_prime(p):
        raise DomainError("p must be an odd prime")
    if ell == "auto":
        cands = dicyclic_prime_candidates(p)
        if not cands:
            raise DomainError(f"no admissible prime ell below 10000 for p={p}")
        ell = cands[0]
    if not isinstance(ell, int) or not is_prime(ell) or ell in (2, p):
        raise DomainError(f"ell={ell!r} must be a prime not dividing 2p")
    if ell % p not in (1, p - 1):
        raise DomainError(f"ell={ell} must be congruent to ±1 mod {p}")
    check_cap(4 * p * ell * ell, cap)
    a, j = dicyclic_matrices(p, ell)
    ident = (1, 0, 0, 1)
    apow = [ident]
    for _ in range(2 * p - 1):
        apow.append(_mat_mul2(apow[-1], a, ell))
    mats = apow + [_mat_mul2(x, j, ell) for x in apow]
    d = dicyclic(p, cap=None if cap is None else max(cap, 4 * p))
    nn = ell * ell
    act = np.zeros((len(mats), nn), dtype=np.int64)
    for h, m in enumerate(mats):
        for v in range(nn):
            x, y = v % ell, v // ell
            act[h, v] = (m[0] * x + m[1] * y) % ell + ell * ((m[2] * x + m[3] * y) % ell)
    # sanity: the matrix list multiplies like Dic_p in the chosen encoding
    lookup = {m: i for i, m in enumerate(mats)}
    for i1 in range(len(mats)):
        for i2 in range(len(mats)):
            if lookup[_mat_mul2(mats[i1], mats[i2], ell)] != d.mul[i1, i2]:
                raise AssertionError("dicyclic matrix model disagrees with Dic_p")  # pragma: no cover
    n_mul = np.array(
        [[(u % ell + v % ell) % ell + ell * ((u // ell + v // ell) % ell) for v in range(nn)] for u in range(nn)]
    )
    table = semidirect_table(n_mul, d.mul, act)
    return _make(table, f"F{ell}^2:Dic{p}", "dicyclic_frobenius", {"p": p, "ell": ell}, check=4 * p * nn <= 200)


def unitriangular_parameters(p: int, f: int, n: int, q: int) -> int:
    """Validate the parameters and return the group order q * p^(f n(n-1)/2)."""
    if not is_prime(p) or not is_prime(q):
        raise DomainError("p and q must be primes")
    if f < 1 or n < 2:
        raise DomainError("need f >= 1 and n >= 2")
    if q <= n:
        raise DomainError(f"need q > n, got q={q}, n={n}")
    if (p ** f - 1) % q:
        raise DomainError(f"q={q} must divide p^f - 1 = {p ** f - 1}")
    return q * p ** (f * n * (n - 1) // 2)


def unitriangular_diagonal(F: GF, n: int, q: int) -> list[int]:
    """Pairwise distinct q-th roots of unity b_1..b_n: powers w^0..w^(n-1) of the
    least element w of multiplicative order q."""
    w = next(a for a in range(2, F.q) if F.mult_order(a) == q)
    return [F.pow(w, i) for i in range(n)]


def _ut_positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def ut_multiply(F: GF, n: int, u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    """Product of unitriangular matrices stored by their strictly upper entries."""
    pos = _ut_positions(n)
    A = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    B = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for k, (i, j) in enumerate(pos):
        A[i][j] = u[k]
        B[i][j] = v[k]
    out = []
    for i, j in pos:
        s = 0
        for t in range(i, j + 1):
            s = int(F.add[s, F.mul[A[i][t], B[t][j]]])
        out.append(s)
    return tuple(out)


def unitriangular_frobenius(p: int, f: int, n: int, q: int, cap: int | None = None) -> FiniteGroup:
    """UT_n(F_{p^f}) ⋊ <h>, h = diag(b_1..b_n) acting by conjugation."""
    order = unitriangular_parameters(p, f, n, q)
    check_cap(order, cap)
    F = GF(p ** f)
    pos = _ut_positions(n)
    elems = list(itertools.product(range(F.q), repeat=len(pos)))
    index = {e: i for i, e in enumerate(elems)}
    n_mul = np.array([[index[ut_multiply(F, n, u, v)] for v in elems] for u in elems])
    b = unitriangular_diagonal(F, n, q)
    binv = [int(F.inv[x]) for x in b]
    act = np.zeros((q, len(elems)), dtype=np.int64)
    for t in range(q):
        # h^t u h^-t scales entry (i, j) by (b_i / b_j)^t
        scale = [F.pow(int(F.mul[b[i], binv[j]]), t) for i, j in pos]
        for x, e in enumerate(elems):
            act[t, x] = index[tuple(int(F.mul[s, c]) for s, c in zip(scale, e))]
    table = semidirect_table(n_mul, _cyclic_table(q), act)
    return _make(
        table, f"UT{n}({p ** f}):C{q}", "unitriangular_frobenius", {"p": p, "f": f, "n": n, "q": q},
        check=order <= 200,
    )


def direct_product(factors: list[FiniteGroup], cap: int | None = None) -> FiniteGroup:
    if not factors:
        return cyclic(1)
    order = math.prod(G.order for G in factors)
    check_cap(order, cap)
    table = factors[0].mul.astype(np.int64)
    for G in factors[1:]:
        nn = table.shape[0]
        act = np.tile(np.arange(nn), (G.order, 1))
        table = semidirect_table(table, G.mul.astype(np.int64), act)
    label = "x".join(G.label for G in factors)
    spec = {"construct": "direct_product", "params": {"factors": [G.spec for G in factors]}}
    return FiniteGroup(table, label=label, spec=spec, check=order <= 200)


def semidirect(N: FiniteGroup, H: FiniteGroup, action: dict[int, GroupAutomorphism | dict], cap: int | None = None,
               spec: dict | None = None) -> FiniteGroup:
    """N ⋊ H from automorphisms of N attached to generators of H."""
    check_cap(N.order * H.order, cap)
    autos: dict[int, np.ndarray] = {}
    for h, a in action.items():
        if not isinstance(a, GroupAutomorphism):
            a = automorphism_from_images(N, {int(k): int(v) for k, v in a.items()})
        autos[int(h)] = a.images
    act = np.full((H.order, N.order), -1, dtype=np.int64)
    act[0] = np.arange(N.order)
    frontier = [0]
    while frontier:
        nxt = []
        for w in frontier:
            for g, img in autos.items():
                x = int(H.mul[w, g])
                cand = act[w][img]
                if act[x, 0] < 0:
                    act[x] = cand
                    nxt.append(x)
                elif not np.array_equal(act[x], cand):
                    raise DomainError("action is not a homomorphism H -> Aut(N)")
        frontier = nxt
    if (act < 0).any():
        raise DomainError("action generators do not generate H")
    table = semidirect_table(N.mul.astype(np.int64), H.mul.astype(np.int64), act)
    if spec is None:
        spec = {"table": table.tolist()}
    return FiniteGroup(table, label=f"{N.label}:{H.label}", spec=spec, check=N.order * H.order <= 200)


# ---------------------------------------------------------------- GroupSpec

def _build_semidirect(params: dict, cap) -> FiniteGroup:
    for key in ("normal", "acting", "action"):
        if key not in params:
            raise DomainError(f"semidirect needs {key!r}")
    N = build_group(params["normal"], cap)
    H = build_group(params["acting"], cap)
    action = params["action"]
    if not isinstance(action, dict):
        raise DomainError("semidirect 'action' must map acting generators to image maps")
    parsed = {}
    for h, imgs in action.items():
        if not isinstance(imgs, dict):
            raise DomainError("each action entry must map normal-subgroup generators to images")
        parsed[int(h)] = {int(k): int(v) for k, v in imgs.items()}
    return semidirect(N, H, parsed, cap, spec={"construct": "semidirect", "params": params})


def _build_direct(params: dict, cap) -> FiniteGroup:
    factors = params.get("factors")
    if not isinstance(factors, list):
        raise DomainError("direct_product needs a 'factors' list")
    G = direct_product([build_group(f, cap) for f in factors], cap)
    G.spec = {"construct": "direct_product", "params": params}
    return G


def _build_dicfrob(params: dict, cap) -> FiniteGroup:
    ell = params.get("ell", "auto")
    if ell != "auto":
        ell = _as_int(params, "ell")
    return dicyclic_frobenius(_as_int(params, "p"), ell, cap)


_BUILDERS: dict[str, Callable[[dict, Any], FiniteGroup]] = {
    "trivial": lambda p, cap: cyclic(1, cap),
    "cyclic": lambda p, cap: cyclic(_as_int(p, "n"), cap),
    "dihedral": lambda p, cap: dihedral(_as_int(p, "n"), cap),
    "symmetric": lambda p, cap: symmetric(_as_int(p, "n"), cap),
    "alternating": lambda p, cap: alternating(_as_int(p, "n"), cap),
    "quaternion": lambda p, cap: quaternion(cap),
    "klein": lambda p, cap: klein(cap),
    "dicyclic": lambda p, cap: dicyclic(_as_int(p, "n"), cap),
    "affine": lambda p, cap: affine(_as_int(p, "q"), cap),
    "metacyclic": lambda p, cap: metacyclic(_as_int(p, "ell"), _as_int(p, "q"), cap),
    "affine_frobenius": lambda p, cap: affine_frobenius(
        _as_int(p, "q"), _as_int(p, "p_part") if "p_part" in p else None, cap),
    "unitriangular_frobenius": lambda p, cap: unitriangular_frobenius(
        _as_int(p, "p"), _as_int(p, "f"), _as_int(p, "n"), _as_int(p, "q"), cap),
    "dicyclic_frobenius": _build_dicfrob,
    "direct_product": _build_direct,
    "semidirect": _build_semidirect,
}

CONSTRUCTOR_NAMES = tuple(sorted(_BUILDERS))


def build_group(spec: dict, cap: int | None = None) -> FiniteGroup:
    """Build a FiniteGroup from a GroupSpec dict."""
    if not isinstance(spec, dict):
        raise DomainError("group spec must be a JSON object")
    if "table" in spec:
        table = spec["table"]
        if not isinstance(table, list) or not all(isinstance(r, list) for r in table):
            raise DomainError("'table' must be a list of rows")
        check_cap(len(table), cap)
        try:
            arr = np.array(table, dtype=np.int64)
        except (ValueError, TypeError):
            raise DomainError("'table' must be a rectangular integer array") from None
        return FiniteGroup(arr, label=str(spec.get("label", f"table{len(table)}")), spec={"table": table})
    name = spec.get("construct")
    if name not in _BUILDERS:
        raise DomainError(f"unknown constructor {name!r}; known: {', '.join(CONSTRUCTOR_NAMES)}")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise DomainError("'params' must be an object")
    return _BUILDERS[name](params, cap)


# ---------------------------------------------------------------- shortcuts

_SHORTCUTS = [
    (r"trivial|1", lambda m: {"construct": "trivial", "params": {}}),
    (r"C(\d+)", lambda m: {"construct": "cyclic", "params": {"n": int(m[1])}}),
    (r"D(\d+)", lambda m: {"construct": "dihedral", "params": {"n": _half(int(m[1]))}}),
    (r"S(\d)", lambda m: {"construct": "symmetric", "params": {"n": int(m[1])}}),
    (r"A(\d)", lambda m: {"construct": "alternating", "params": {"n": int(m[1])}}),
    (r"Q8", lambda m: {"construct": "quaternion", "params": {}}),
    (r"V4", lambda m: {"construct": "klein", "params": {}}),
    (r"Dic(\d+)", lambda m: {"construct": "dicyclic", "params": {"n": int(m[1])}}),
    (r"Aff\(?(\d+)\)?", lambda m: {"construct": "affine", "params": {"q": int(m[1])}}),
    (r"C(\d+):C(\d+)", lambda m: {"construct": "metacyclic", "params": {"ell": int(m[1]), "q": int(m[2])}}),
    (r"AffFrob\((\d+)\)", lambda m: {"construct": "affine_frobenius", "params": {"q": int(m[1])}}),
    (r"AffFrob\((\d+),(\d+)\)",
     lambda m: {"construct": "affine_frobenius", "params": {"q": int(m[1]), "p_part": int(m[2])}}),
    (r"DicFrob\((\d+),(\d+)\)",
     lambda m: {"construct": "dicyclic_frobenius", "params": {"p": int(m[1]), "ell": int(m[2])}}),
    (r"DicFrob\((\d+)\)", lambda m: {"construct": "dicyclic_frobenius", "params": {"p": int(m[1]), "ell": "auto"}}),
    (r"UT\((\d+),(\d+),(\d+),(\d+)\)",
     lambda m: {"construct": "unitriangular_frobenius",
                "params": {"p": int(m[1]), "f": int(m[2]), "n": int(m[3]), "q": int(m[4])}}),
]


def _half(n: int) -> int:
    if n % 2:
        raise DomainError(f"dihedral shortcut D<order> needs an even order, got {n}")
    return n // 2


def shortcut_spec(name: str) -> dict:
    """GroupSpec for a named shortcut such as S4, Aff(5), C7:C3 or DicFrob(3,5)."""
    text = name.replace(" ", "")
    for pattern, make in _SHORTCUTS:
        m = re.fullmatch(pattern, text)
        if m:
            return make(m)
    raise DomainError(f"unknown group shortcut {name!r}")


SHORTCUT_EXAMPLES = ("trivial", "C7", "D8", "S4", "A4", "Q8", "V4", "Dic3", "Aff4", "Aff(5)", "C7:C3",
                     "AffFrob(8,7)", "DicFrob(3,5)", "UT(2,2,2,3)")


# ---------------------------------------------------------------- naming

@lru_cache(maxsize=None)
def _catalog_for(order: int) -> tuple[tuple[str, str], ...]:
    """(name, fingerprint key) for nonabelian catalog groups of this order."""
    cands: list[tuple[str, Callable[[], FiniteGroup]]] = []
    for k in range(3, 7):
        if math.factorial(k) == order:
            cands.append((f"S{k}", lambda k=k: symmetric(k)))
        if math.factorial(k) // 2 == order and k >= 4:
            cands.append((f"A{k}", lambda k=k: alternating(k)))
    for q in range(3, 65):
        try:
            prime_power(q)
        except DomainError:
            continue
        if q * (q - 1) == order:
            cands.append((f"Aff({q})", lambda q=q: affine(q)))
    if order % 2 == 0 and order >= 6:
        cands.append((f"D{order}", lambda: dihedral(order // 2)))
    if order % 4 == 0 and order >= 8:
        cands.append(("Q8" if order == 8 else f"Dic{order // 4}", lambda: dicyclic(order // 4)))
    for ell in range(3, order):
        if is_prime(ell) and order % ell == 0:
            qq = order // ell
            if qq > 1 and (ell - 1) % qq == 0:
                cands.append((f"C{ell}⋊C{qq}", lambda ell=ell, qq=qq: metacyclic(ell, qq)))
    out = []
    for name, make in cands:
        try:
            G = make()
        except DomainError:
            continue
        if G.order == order and not G.is_abelian:
            out.append((name, repr(fingerprint(G))))
    return tuple(out)


def _catalog_name(G: FiniteGroup) -> str | None:
    if G.order > 720:
        return None
    key = repr(fingerprint(G))
    for name, fp in _catalog_for(G.order):
        if fp == key:
            return name
    return None


set_catalog_hook(_catalog_name)
