import os
import sys
from functools import lru_cache
from math import gcd

from hypothesis import HealthCheck, settings

from hybridring.constructors import (
    affine,
    affine_frobenius,
    alternating,
    cyclic,
    dicyclic,
    dihedral,
    direct_product,
    metacyclic,
    quaternion,
    symmetric,
    unitriangular_frobenius,
)
from hybridring.errors import DomainError
from hybridring.iwasawa import codescent_from_number_field
from hybridring.groups import automorphism_from_images, inner_automorphism, vp

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("ci", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

CENSUS_PRIMES = (2, 3, 5, 7)
LIE_PRIMES = (3, 5, 7, 11, 13)


@lru_cache(maxsize=None)
def census_groups():
    """Constructed groups of order <= 200 across every constructor family."""
    out = [cyclic(n) for n in (1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 25)]
    out += [direct_product([cyclic(a), cyclic(b)]) for a, b in ((2, 2), (3, 3), (2, 4), (2, 6))]
    out += [dihedral(n) for n in (3, 4, 5, 6, 7, 9, 10)]
    out += [quaternion(), dicyclic(3), dicyclic(4), dicyclic(5)]
    out += [symmetric(3), symmetric(4), symmetric(5), alternating(4), alternating(5)]
    out += [affine(q) for q in (3, 4, 5, 7, 8, 9, 11, 13)]
    out += [metacyclic(ell, q) for ell, q in ((5, 2), (5, 4), (7, 2), (7, 3), (11, 5), (13, 3), (13, 4), (19, 3), (31, 5))]
    out += [affine_frobenius(4), affine_frobenius(8, 7), affine_frobenius(9, 2)]
    out += [unitriangular_frobenius(*a) for a in ((2, 2, 2, 3), (7, 1, 2, 3), (2, 3, 2, 7), (2, 4, 2, 5))]
    out += [direct_product([symmetric(3), cyclic(3)]), direct_product([alternating(4), cyclic(2)])]
    return tuple(G for G in out if G.order <= 200)


def _p_power_order(o: int, p: int) -> bool:
    return o == p ** vp(o, p)


@lru_cache(maxsize=None)
def lie_instances(max_order: int = 200, cap: int = 2000):
    """(H, alpha, p) triples with alpha of p-power order and |H| p^n within the cap.

    alpha runs over the identity, inner automorphisms by p-elements, and for
    cyclic H the power maps x -> x^k of p-power order.
    """
    out = []
    for H in census_groups():
        if H.order > max_order or H.order == 1:
            continue
        for p in LIE_PRIMES:
            autos = [inner_automorphism(H, 0)]
            for r in H.classes.representatives:
                o = int(H.element_orders[r])
                if o > 1 and _p_power_order(o, p):
                    autos.append(inner_automorphism(H, int(r)))
            if H.spec.get("construct") == "cyclic":
                n = H.order
                for k in range(2, n):
                    if gcd(k, n) == 1:
                        autos.append(automorphism_from_images(H, {1: k}))
            seen = set()
            for a in autos:
                key = tuple(a.images.tolist())
                if key in seen or not _p_power_order(a.order, p) or H.order * a.order > cap:
                    continue
                seen.add(key)
                out.append((H, a, p))
    # twists read off from a finite group with a cyclic quotient of order p
    for G in census_groups():
        for p in LIE_PRIMES:
            if G.order % p or G.order // p > max_order:
                continue
            try:
                code = codescent_from_number_field(G, p, h_index=p, cap=cap)
            except DomainError:
                continue
            gd = code.gdata
            if not gd.alpha.is_identity:
                out.append((gd.H, gd.alpha, p))
    return tuple(out)
