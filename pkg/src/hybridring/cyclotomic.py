"""Exact arithmetic in cyclotomic fields Q(ζ_e).

A CycloNumber stores integer numerators in the power basis 1, ζ, ..., ζ^(φ(e)-1)
modulo Φ_e plus one positive common denominator, normalised so that the
representation of a value in a given Q(ζ_e) is unique.  Mixed moduli are
lifted to the lcm before arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError
from .groups import is_prime, prime_factors

_INT64_SAFE = 1 << 62


def euler_phi(n: int) -> int:
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result


def mobius(n: int) -> int:
    out = 1
    for p in prime_factors(n):
        if (n // p) % p == 0:
            return 0
        out = -out
    return out


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num):
        raise ArithmeticError("inexact polynomial division")  # pragma: no cover
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(e: int) -> tuple[int, ...]:
    """Φ_e, coefficients low -> high, by dividing x^e - 1 by Φ_d for d | e, d < e."""
    if e < 1:
        raise DomainError("cyclotomic polynomial needs e >= 1")
    poly = [-1] + [0] * (e - 1) + [1]
    for d in range(1, e):
        if e % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def reduction_matrix(e: int) -> np.ndarray:
    """Row k = power-basis coordinates of ζ_e^k, for 0 <= k < e (object ints)."""
    phi = euler_phi(e)
    poly = cyclotomic_poly(e)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(e):
        rows.append(list(cur))
        # multiply by ζ: shift, then replace ζ^phi by -Σ c_i ζ^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * poly[i]
    mat = np.array(rows, dtype=object)
    mat.flags.writeable = False
    return mat


@lru_cache(maxsize=None)
def _reduction_int64(e: int) -> np.ndarray | None:
    mat = reduction_matrix(e)
    if max((abs(int(x)) for x in mat.flat), default=0) < 1 << 20:
        out = mat.astype(np.int64)
        out.flags.writeable = False
        return out
    return None


def _fold(raw: np.ndarray, e: int) -> np.ndarray:
    """Collapse a coefficient vector over exponents 0.. to exponents mod e."""
    if len(raw) <= e:
        out = np.zeros(e, dtype=raw.dtype)
        out[: len(raw)] = raw
        return out
    pad = (-len(raw)) % e
    if pad:
        raw = np.concatenate([raw, np.zeros(pad, dtype=raw.dtype)])
    return raw.reshape(-1, e).sum(axis=0)


def _reduce_exponent_vector(vec: np.ndarray, e: int) -> list[int]:
    """Power-basis coordinates of Σ vec[k] ζ^k (vec indexed by k mod e)."""
    nz = np.nonzero(vec)[0]
    phi = euler_phi(e)
    if len(nz) == 0:
        return [0] * phi
    if nz[-1] < phi:
        out = [0] * phi
        for k in nz:
            out[int(k)] = int(vec[k])
        return out
    small = _reduction_int64(e)
    coeffs = vec[nz]
    if small is not None and coeffs.dtype != object and int(np.abs(coeffs).max()) < 1 << 40:
        res = coeffs.astype(np.int64) @ small[nz]
        return [int(x) for x in res]
    res = np.array([int(c) for c in coeffs], dtype=object) @ reduction_matrix(e)[nz]
    return [int(x) for x in res]


class CycloNumber:
    """An exact element of Q(ζ_e)."""

    __slots__ = ("e", "num", "den")

    def __init__(self, e: int, num: Iterable[int], den: int = 1, *, normalized: bool = False):
        num = tuple(int(x) for x in num)
        if len(num) != euler_phi(e):
            raise DomainError(f"need {euler_phi(e)} coefficients for modulus {e}")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if not normalized:
            if den < 0:
                num, den = tuple(-x for x in num), -den
            g = math.gcd(den, *num)
            if g > 1:
                num, den = tuple(x // g for x in num), den // g
        self.e = e
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, value, e: int = 1) -> "CycloNumber":
        fr = Fraction(value)
        num = [0] * euler_phi(e)
        num[0] = fr.numerator
        return cls(e, num, fr.denominator, normalized=True)

    @classmethod
    def zeta(cls, e: int, k: int = 1) -> "CycloNumber":
        return cls(e, reduction_matrix(e)[k % e], 1, normalized=True)

    @classmethod
    def from_exponents(cls, e: int, terms: Mapping[int, int] | Iterable[tuple[int, int]], den: int = 1) -> "CycloNumber":
        """Σ mult * ζ_e^k over (k, mult) pairs, divided by ``den``."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        vec = np.zeros(e, dtype=object)
        for k, m in items:
            vec[int(k) % e] += int(m)
        return cls(e, _reduce_exponent_vector(vec, e), den)

    # -- basic queries ----------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise DomainError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def lift(self, e2: int) -> "CycloNumber":
        """The same value expressed in Q(ζ_e2), e | e2."""
        if e2 == self.e:
            return self
        if e2 % self.e:
            raise DomainError(f"cannot lift from modulus {self.e} to {e2}")
        step = e2 // self.e
        vec = np.zeros(e2, dtype=object)
        for i, c in enumerate(self.num):
            if c:
                vec[i * step] = c
        return CycloNumber(e2, _reduce_exponent_vector(vec, e2), self.den, normalized=True)

    def galois(self, k: int) -> "CycloNumber":
        """σ_k: ζ_e -> ζ_e^k for k coprime to e."""
        k %= self.e
        if math.gcd(k, self.e) != 1:
            raise DomainError(f"σ_{k} is not defined on Q(ζ_{self.e})")
        if k == 1 % self.e or self.is_rational():
            return self
        vec = np.zeros(self.e, dtype=object)
        for i, c in enumerate(self.num):
            if c:
                vec[(i * k) % self.e] += c
        return CycloNumber(self.e, _reduce_exponent_vector(vec, self.e), self.den, normalized=True)

    def conjugate(self) -> "CycloNumber":
        return self.galois(-1)

    def normalized_trace(self) -> Fraction:
        """Tr_{Q(ζ_e)/Q}(x) / φ(e); independent of the ambient modulus."""
        total = Fraction(0)
        for i, c in enumerate(self.num):
            if c:
                d = self.e // math.gcd(self.e, i)
                mu = mobius(d)
                if mu:
                    total += Fraction(c * mu, euler_phi(d))
        return total / self.den

    def is_p_integral(self, p: int) -> bool:
        """All power-basis coordinates lie in Z_(p) (the power basis is integral)."""
        return self.den % p != 0

    def to_complex(self) -> complex:
        z = complex(math.cos(2 * math.pi / self.e), math.sin(2 * math.pi / self.e))
        return sum(c * z ** i for i, c in enumerate(self.num)) / self.den

    def sort_key(self) -> tuple:
        return tuple(Fraction(x, self.den) for x in self.num)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "CycloNumber":
        if isinstance(other, CycloNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNumber.rational(other, self.e)
        return NotImplemented

    @staticmethod
    def _common(a: "CycloNumber", b: "CycloNumber") -> tuple["CycloNumber", "CycloNumber"]:
        if a.e == b.e:
            return a, b
        e = math.lcm(a.e, b.e)
        return a.lift(e), b.lift(e)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._common(self, other)
        den = a.den * b.den // math.gcd(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return CycloNumber(a.e, [x * fa + y * fb for x, y in zip(a.num, b.num)], den)

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.e, [-x for x in self.num], self.den, normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            fr = Fraction(other)
            return CycloNumber(self.e, [x * fr.numerator for x in self.num], self.den * fr.denominator)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._common(self, other)
        if a.is_rational():
            return b * Fraction(a.num[0], a.den)
        if b.is_rational():
            return a * Fraction(b.num[0], b.den)
        prod = _poly_product(a.num, b.num)
        vec = _fold(prod, a.e)
        return CycloNumber(a.e, _reduce_exponent_vector(vec, a.e), a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CycloNumber):
            if not other.is_rational():
                return self * other.inverse()
            other = other.to_fraction()
        fr = Fraction(other)
        if fr == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / fr)

    def inverse(self) -> "CycloNumber":
        """1/x via the product of the other Galois conjugates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycloNumber.rational(1 / self.to_fraction(), self.e)
        others = CycloNumber.rational(1, self.e)
        for k in range(2, self.e):
            if math.gcd(k, self.e) == 1:
                others = others * self.galois(k)
        norm = (self * others).to_fraction()
        return others * (1 / norm)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = CycloNumber.rational(1, self.e)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = self._common(self, other)
        return a.den == b.den and a.num == b.num

    def __hash__(self) -> int:
        return hash(self.normalized_trace())

    def __repr__(self) -> str:
        return f"CycloNumber({self.e}, {self})"

    def __str__(self) -> str:
        return format_cyclo(self)


def _poly_product(a: tuple[int, ...], b: tuple[int, ...]) -> np.ndarray:
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if ma * mb * min(len(a), len(b)) < _INT64_SAFE:
        return np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    return np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))


def format_cyclo(x: CycloNumber) -> str:
    """Exact string "a/b·z^k + ..." with z = exp(2πi/e)."""
    parts = []
    for i, c in enumerate(x.num):
        if not c:
            continue
        fr = Fraction(c, x.den)
        mag = abs(fr)
        if i == 0:
            term = str(mag)
        else:
            power = "z" if i == 1 else f"z^{i}"
            term = power if mag == 1 else f"{mag}·{power}"
        parts.append(("-" if fr < 0 else "+", term))
    if not parts:
        return "0"
    sign, term = parts[0]
    text = ("-" if sign == "-" else "") + term
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    if not x.is_rational():
        text += f" (z=ζ{x.e})"
    return text


def cyclo_reduce(raw: Mapping[int, int | Fraction], e: int) -> CycloNumber:
    """Canonical form of Σ raw[k] ζ_e^k (rational coefficients allowed)."""
    den = 1
    for c in raw.values():
        den = math.lcm(den, Fraction(c).denominator)
    terms = {}
    for k, c in raw.items():
        fr = Fraction(c)
        terms[int(k) % e] = terms.get(int(k) % e, 0) + fr.numerator * (den // fr.denominator)
    return CycloNumber.from_exponents(e, terms, den)


def galois_apply(x: CycloNumber, k: int) -> CycloNumber:
    return x.galois(k)


def _mult_order(a: int, m: int) -> int:
    if m == 1:
        return 1
    k, x = 1, a % m
    while x != 1:
        x = (x * a) % m
        k += 1
    return k


@dataclass(frozen=True)
class PadicGaloisGroup:
    """Image of Gal(Q_p(ζ_e)/Q_p) in (Z/e)^×."""

    e: int
    p: int
    elements: tuple[int, ...]
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)


@lru_cache(maxsize=None)
def padic_galois_group(e: int, p: int) -> PadicGaloisGroup:
    """{k in (Z/e)^× : k ≡ p^j (mod m)} where e = p^a m with p ∤ m."""
    if e < 1:
        raise DomainError("modulus must be positive")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if e == 1:
        return PadicGaloisGroup(1, p, (1,), ())
    m = e
    while m % p == 0:
        m //= p
    powers = set()
    x = 1 % m
    while x not in powers:
        powers.add(x)
        x = (x * p) % m
    elements = tuple(k for k in range(1, e) if math.gcd(k, e) == 1 and k % m in powers)
    gens: list[int] = []
    span = {1}
    for k in elements:
        if k in span:
            continue
        gens.append(k)
        frontier = list(span)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = (a * g) % e
                    if b not in span:
                        span.add(b)
                        nxt.append(b)
            frontier = nxt
    return PadicGaloisGroup(e, p, elements, tuple(gens))


def padic_galois_order(e: int, p: int) -> int:
    """φ(p^a) * ord_m(p), the closed form for the decomposition group order."""
    a, m = 0, e
    while m % p == 0:
        m //= p
        a += 1
    return euler_phi(p ** a) * _mult_order(p, m)


def field_degree_over_Qp(values: Iterable[CycloNumber], p: int) -> int:
    """[Q_p(values) : Q_p] as the orbit size of the value tuple."""
    vals = list(values)
    if not vals:
        return 1
    e = math.lcm(*(v.e for v in vals))
    vals = [v.lift(e) for v in vals]
    if all(v.is_rational() for v in vals):
        return 1
    G = padic_galois_group(e, p)
    orbit = {tuple((v.galois(k).num, v.den) for v in vals) for k in G.elements}
    return len(orbit)


def lies_in_subfield(x: CycloNumber, m: int) -> bool:
    """True when x ∈ Q(ζ_m) ⊆ Q(ζ_e), m | e: x is fixed by every σ_k with k ≡ 1 mod m."""
    e = math.lcm(x.e, m)
    y = x.lift(e)
    for k in range(1, e, m):
        if math.gcd(k, e) == 1 and y.galois(k) != y:
            return False
    return True


ZERO = CycloNumber.rational(0)
ONE = CycloNumber.rational(1)
