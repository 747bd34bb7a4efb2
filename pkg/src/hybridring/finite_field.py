"""Small finite fields GF(p^f) by polynomial arithmetic.

Elements are integers 0..q-1 whose base-p digits are the coefficients
c_0 + c_1 x + ... of a polynomial reduced modulo a fixed irreducible.
The modulus is the monic irreducible of degree f with the least integer
encoding sum(c_i p^i).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DomainError
from .groups import is_prime, prime_factors


def prime_power(q: int) -> tuple[int, int]:
    """(p, f) with q = p^f, or DomainError."""
    if q < 2:
        raise DomainError(f"{q} is not a prime power")
    ps = prime_factors(q)
    if len(ps) != 1:
        raise DomainError(f"{q} is not a prime power")
    p = ps[0]
    f = 0
    while q % p == 0:
        q //= p
        f += 1
    return p, f


def _digits(x: int, p: int, f: int) -> list[int]:
    out = []
    for _ in range(f):
        out.append(x % p)
        x //= p
    return out


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    """a mod m over F_p (m monic), coefficient lists low -> high."""
    a = [c % p for c in a]
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    a = a[:dm] if dm > 0 else []
    while a and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(poly: list[int], p: int) -> bool:
    deg = len(poly) - 1
    if deg <= 1:
        return True
    # trial division by every monic polynomial of degree 1..deg//2
    for d in range(1, deg // 2 + 1):
        for code in range(p ** d):
            cand = _digits(code, p, d) + [1]
            if not _polymod(poly, cand, p):
                return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Monic irreducible of degree f over F_p with the least encoding (low -> high)."""
    if not is_prime(p) or f < 1:
        raise DomainError(f"GF({p}^{f}) is not a valid field")
    for code in range(p ** f):
        poly = _digits(code, p, f) + [1]
        if f > 1 and poly[0] == 0:
            continue
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class GF:
    """GF(q) with addition and multiplication tables over encoded elements."""

    def __init__(self, q: int):
        p, f = prime_power(q)
        self.q, self.p, self.f = q, p, f
        self.modulus = least_irreducible(p, f)
        digits = np.array([_digits(x, p, f) for x in range(q)], dtype=np.int64)
        weights = p ** np.arange(f)
        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            da = _digits(a, p, f)
            for b in range(a, q):
                db = _digits(b, p, f)
                prod = [0] * (2 * f - 1)
                for i, x in enumerate(da):
                    if x:
                        for j, y in enumerate(db):
                            prod[i + j] += x * y
                red = _polymod(prod, list(self.modulus), p)
                v = sum(c * p ** i for i, c in enumerate(red))
                mul[a, b] = mul[b, a] = v
        self.mul = mul
        self.inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            self.inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        for arr in (self.add, self.neg, self.mul, self.inv):
            arr.flags.writeable = False

    def pow(self, a: int, k: int) -> int:
        r = 1
        for _ in range(k):
            r = int(self.mul[r, a])
        return r

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise DomainError("0 has no multiplicative order")
        k, x = 1, a
        while x != 1:
            x = int(self.mul[x, a])
            k += 1
        return k

    def frobenius(self, a: int, times: int = 1) -> int:
        """a -> a^(p^times)"""
        for _ in range(times):
            a = self.pow(a, self.p)
        return a

    def primitive_element(self) -> int:
        for a in range(1, self.q):
            if self.mult_order(a) == self.q - 1:
                return a
        raise AssertionError  # pragma: no cover

    def roots_of_unity(self, m: int) -> list[int]:
        """Elements with a^m = 1, in encoding order."""
        return [a for a in range(1, self.q) if self.pow(a, m) == 1]
