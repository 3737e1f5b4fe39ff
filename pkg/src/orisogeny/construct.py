"""Explicit orientations on y^2 = x^3 + x for p = 3 mod 4.

The endomorphism ring of E0: y^2 = x^3 + x is the maximal order
<1, i, (i + j)/2, (1 + k)/2> of the quaternion algebra (-1, -p), with i the
automorphism (x, y) -> (-x, u y) (u^2 = -1) and j the p-power Frobenius. An
element (A + B i + C j + D k)/2 has reduced trace A and reduced norm
(A^2 + B^2 + p C^2 + p D^2)/4, so its discriminant is
-(B^2 + p (C^2 + D^2)).

Orientations by an arbitrary quadratic order are reached from E0 by taking
an element whose discriminant is the target fundamental discriminant times a
square with cheap prime factors, primitivising, and then walking up the
volcanoes of the remaining conductor primes.
"""
from __future__ import annotations

import math
from functools import lru_cache

from .arith.field import get_field, sqrt
from .arith.integers import factor, kronecker
from .curve import Curve, Isomorphism
from .division import divide_by_integer
from .errors import InvalidOrientation, NoSolution
from .isogeny import FrobeniusStep, IsogenyChain, IsogenyExpr, IsoStep, as_expr
from .orientation import OrientedCurve, cheap_primes, primitivise
from .quadratic import QuadOrder


def e0(p: int) -> Curve:
    if p % 4 != 3:
        raise ValueError("y^2 = x^3 + x is supersingular only for p = 3 mod 4")
    return Curve(p, (1, 0))


@lru_cache(maxsize=None)
def quaternion_basis(p: int):
    """Chains for i, j and k = i o j on E0."""
    E = e0(p)
    F = get_field(p, 2)
    u = sqrt(F(-1))
    i = IsogenyChain([IsoStep(Isomorphism(E, E, u, 0, 0, 0))], E)
    j = IsogenyChain([FrobeniusStep(E)], E)
    k = IsogenyChain(j.steps + i.steps, E)
    return E, i, j, k


def element(p: int, A: int, B: int, C: int, D: int) -> IsogenyExpr:
    """(A + B i + C j + D k) / 2 as an expression on E0."""
    if (A - D) % 2 or (B - C) % 2:
        raise InvalidOrientation("not an element of the maximal order")
    E, i, j, k = quaternion_basis(p)
    twice = IsogenyExpr(E, E, [(A, None), (B, i), (C, j), (D, k)],
                        degree=A * A + B * B + p * (C * C + D * D), trace=2 * A)
    half = divide_by_integer(twice, 2)
    half = as_expr(half)
    half._degree = (A * A + B * B + p * (C * C + D * D)) // 4
    half._trace = A
    return half


def element_disc(p: int, B: int, C: int, D: int) -> int:
    return -(B * B + p * (C * C + D * D))


def _smooth_over(n: int, primes) -> bool:
    for ell in primes:
        while n % ell == 0:
            n //= ell
    return n == 1


def find_element(p: int, fundamental_disc: int, primes, bound: int = 60):
    """(A, B, C, D) with disc = fundamental_disc * f^2, f a product of the
    given primes; smallest |disc| first, then lexicographic."""
    best = None
    for C in range(0, bound):
        for D in range(0, bound):
            if C == D == 0:
                continue
            base = p * (C * C + D * D)
            if best is not None and base > best[0]:
                break
            for B in range(0, bound * 8):
                if (B - C) % 2:
                    continue
                m = B * B + base
                if best is not None and m > best[0]:
                    break
                if m % (-fundamental_disc):
                    continue
                f2 = m // (-fundamental_disc)
                f = math.isqrt(f2)
                if f * f != f2 or not _smooth_over(f, primes):
                    continue
                cand = (m, (D % 2, B, C, D))
                if best is None or cand < best:
                    best = cand
    if best is None:
        raise NoSolution(f"no element of discriminant {fundamental_disc} f^2 found")
    return best[1]


def oriented_e0(p: int) -> OrientedCurve:
    """E0 with its Z[i]-orientation."""
    E, i, _, _ = quaternion_basis(p)
    theta = IsogenyExpr(E, E, [(1, i)], degree=1, trace=0)
    return OrientedCurve(E, QuadOrder(-4), theta, primitive=True)


@lru_cache(maxsize=None)
def crater_curve(p: int, fundamental_disc: int) -> OrientedCurve:
    """A curve primitively oriented by the maximal order of the given
    fundamental discriminant, obtained from E0."""
    from .volcano import walk_to_crater
    if fundamental_disc == -4:
        return oriented_e0(p)
    if kronecker(fundamental_disc, p) == 1:
        raise NoSolution(f"{p} splits in discriminant {fundamental_disc}: no supersingular orientation")
    E = e0(p)
    primes = [ell for ell in cheap_primes(E, QuadOrder(fundamental_disc)) if ell <= 13]
    A, B, C, D = find_element(p, fundamental_disc, primes)
    theta = element(p, A, B, C, D)
    X = primitivise(E, theta)
    for ell, _ in factor(X.order.conductor) if X.order.conductor > 1 else []:
        X = walk_to_crater(X, ell).end
    if X.order.disc != fundamental_disc:  # pragma: no cover - walk guarantees it
        raise NoSolution("walk did not reach the maximal order")
    return X


def oriented_curve(p: int, disc: int, seed: int = 0) -> OrientedCurve:
    """A primitively O-oriented curve for the order of discriminant disc,
    descending from the crater along the conductor primes."""
    from .volcano import descend
    O = QuadOrder(disc)
    X = crater_curve(p, O.fundamental_disc)
    for ell, e in factor(O.conductor) if O.conductor > 1 else []:
        for _ in range(e):
            X = descend(X, ell, index=seed)
    return X
