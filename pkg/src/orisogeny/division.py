"""Division of isogenies by integers and by other isogenies.

Given phi: E1 -> E2 and n, decide whether phi = psi o [n] for an isogeny psi
and, if so, return psi as a fresh Velu chain (plus, for endomorphisms, an
integer shift). Divisibility is equivalent to E1[n] lying in ker phi. The
quotient's kernel is [n] ker phi; for endomorphisms we may first add a
multiple of n to phi so the quotient's degree is smooth over primes with
cheap torsion, then subtract the shift again.

The Kani kernel helpers build the order-N'^8 subgroup of E1^4 x E2^4 that
certifies divisibility in the higher-dimensional formulation, and check its
isotropy for the product Weil pairing.
"""
from __future__ import annotations

import math
import random

from .arith.integers import factor, four_squares, is_prime
from .arith.modlin import subgroup_order
from .config import current
from .curve import Point, stable_seed, torsion_basis, weil_pairing
from .errors import (NotDivisible, NotSmooth, TorsionUnreachable, VerificationFailed)
from .isogeny import (IsogenyChain, IsogenyExpr, IsoStep, KernelDescription, _test_points,
                      as_expr, chain_from_kernel, compose, fit_isomorphism, kernel_part)


def _valuation(n: int, ell: int) -> int:
    e = 0
    while n % ell == 0:
        n //= ell
        e += 1
    return e


def torsion_cost(E, n: int, scale: int = 1, cap: int | None = None) -> int | None:
    """Largest extension degree needed to see the kernel of a degree-n map
    after composing with [scale], or None if some prime is out of range.

    For ell | scale the ell-part of the kernel of (map o [scale]) has
    exponent up to ell^(v + e), where ell^v || n and ell^e || scale. `cap`
    defaults to the cheap extension degree."""
    if n == 1:
        return 0
    settings = current()
    cap = settings.cheap_ext_degree if cap is None else cap
    worst = 0
    for ell, v in factor(n):
        if ell == E.p or ell > settings.prime_cap:
            return None
        try:
            d = E.torsion_degree(ell ** (v + _valuation(scale, ell)))
        except TorsionUnreachable:
            return None
        if d > cap:
            return None
        worst = max(worst, d)
    return worst


def choose_shift(E, N: int, t_over_n: int, n: int, window: int = 200) -> int:
    """Shift k so that N + k t/n + k^2 (the degree of psi + k) is cheap.

    The cost of a candidate is the largest extension degree its kernel
    needs; ties go to the smallest |k|, preferring k >= 0. Candidates within
    the cheap extension degree are preferred; if there are none, a ten times
    wider window is searched up to the maximal extension degree."""
    k = _best_shift(E, N, t_over_n, n, window, None)
    if k is None:
        k = _best_shift(E, N, t_over_n, n, 10 * window, current().max_ext_degree)
    if k is None:
        raise NotSmooth("no shift gives a quotient of smooth degree")
    return k


def _best_shift(E, N, t_over_n, n, window, cap):
    best = None
    for a in range(window + 1):
        for k in ((0,) if a == 0 else (a, -a)):
            Nk = N + k * t_over_n + k * k
            if Nk < 0:
                continue
            if Nk == 0:
                return k
            cost = torsion_cost(E, Nk, n, cap)
            if cost is None:
                continue
            key = (cost, a)
            if best is None or key < best[0]:
                best = (key, k)
        if best is not None and best[0][0] <= 1:
            break
    return None if best is None else best[1]


def contains_torsion(phi, n: int) -> bool:
    """Whether E1[n] is contained in ker phi."""
    for ell, e in factor(n):
        B = torsion_basis(phi.domain, ell ** e)
        if not phi(B.P).is_zero() or not phi(B.Q).is_zero():
            return False
    return True


def divide_by_integer(phi, n: int, verify: bool | None = None):
    """psi with psi o [n] = phi, or NotDivisible.

    phi may be an IsogenyChain or an IsogenyExpr. The result is a chain, or
    for endomorphisms an expression chain - k carrying its degree and trace.
    """
    if n < 1:
        raise ValueError("n must be positive")
    verify = current().verify if verify is None else verify
    if n == 1:
        return phi
    cap = current().prime_cap
    for ell, _ in factor(n):
        if ell > cap:
            raise NotSmooth(f"n has prime factor {ell} > {cap}")
    f = as_expr(phi)
    E1, E2 = f.domain, f.codomain
    D = f.degree()
    if D % (n * n):
        raise NotDivisible(f"deg {D} is not divisible by {n * n}")
    N = D // (n * n)
    endo = f.is_endomorphism()
    t_over_n = 0
    if endo:
        t = f.trace()
        if t % n:
            raise NotDivisible("trace is not divisible by n")
        t_over_n = t // n
    if all(c % n == 0 for c, _ in f.terms):
        # every coefficient carries the factor n: divide termwise
        return IsogenyExpr(E1, E2, [(c // n, g) for c, g in f.terms], degree=N,
                           trace=t_over_n if endo else None)
    if not contains_torsion(f, n):
        raise NotDivisible(f"E[{n}] is not contained in the kernel")

    k = choose_shift(E1, N, t_over_n, n) if endo else 0
    Nk = N + k * t_over_n + k * k
    if endo and Nk == 0:
        return IsogenyExpr.scalar(E1, -k)
    X = f + n * k if k else f
    parts = {}
    for ell, v in factor(Nk) if Nk > 1 else []:
        e = _valuation(n, ell)
        gens = kernel_part(X, ell, v + 2 * e)
        if e:
            gens = [(P * ell ** e, 0) for P, _ in gens]
            gens = [(P, P.order(ell ** v)) for P, _ in gens if not P.is_zero()]
        parts[ell] = gens
    kernel = KernelDescription(E1, parts, Nk)
    chain = chain_from_kernel(E1, kernel)
    iso = fit_isomorphism(lambda T: chain(T * n), X, chain.codomain, E2, E1)
    if not (iso.is_identity() and chain.codomain == E2):
        chain = IsogenyChain(chain.steps + [IsoStep(iso)], E1)
    if endo:
        result = IsogenyExpr(E1, E1, [(1, chain), (-k, None)], degree=N, trace=t_over_n)
    else:
        result = chain
    if verify:
        for T in _test_points(E1, 2, tag="verify-division"):
            if result(T) * n != f(T):
                raise VerificationFailed("n * psi differs from phi")
    return result


def divide_general(phi, eta, verify: bool | None = None):
    """psi: E3 -> E2 with psi o eta = phi, for phi: E1 -> E2, eta: E1 -> E3.

    Reduces to dividing phi o eta-dual by deg eta."""
    if as_expr(phi).domain != as_expr(eta).domain:
        raise ValueError("phi and eta must share a domain")
    eta_e = as_expr(eta)
    n = eta_e.degree()
    g = compose(phi, eta_e.dual())
    return divide_by_integer(g, n, verify)


def is_divisible(phi, n: int) -> bool:
    f = as_expr(phi)
    D = f.degree()
    if D % (n * n):
        return False
    if f.is_endomorphism() and f.trace() % n:
        return False
    return contains_torsion(f, n)


# ---------------------------------------------------------------------------
# Kani kernels


def auxiliary_modulus(p: int, deg: int, N: int) -> int:
    """Product of successive primes coprime to p*deg that first exceeds N."""
    out = 1
    ell = 1
    while out <= N:
        ell += 1
        while not is_prime(ell) or (p * deg) % ell == 0:
            ell += 1
        out *= ell
    return out


def quaternion_matrix(m: tuple[int, int, int, int]) -> list[list[int]]:
    m1, m2, m3, m4 = m
    return [[m1, -m2, -m3, -m4],
            [m2, m1, m4, -m3],
            [m3, -m4, m1, m2],
            [m4, m3, -m2, m1]]


class KaniKernel:
    """Generators of H in E1^4 x E2^4, grouped by the prime powers of N'."""

    def __init__(self, domain, codomain, N_prime: int, m_tuple, s: int, blocks):
        self.domain = domain
        self.codomain = codomain
        self.N_prime = N_prime
        self.m_tuple = m_tuple
        self.s = s
        # list of (q, [generator, ...]) with each generator an 8-tuple of points
        self.blocks = blocks

    @property
    def generators(self):
        return [g for _, gens in self.blocks for g in gens]


def kani_kernel(phi, N_prime: int, n: int = 1) -> KaniKernel:
    f = as_expr(phi)
    p = f.domain.p
    D = f.degree()
    if N_prime <= 1:
        raise ValueError("N' must exceed 1")
    if D % (n * n):
        raise NotDivisible("deg phi is not divisible by n^2")
    N = D // (n * n)
    if math.gcd(N_prime, p * D) != 1:
        raise ValueError("N' must be coprime to p * deg phi")
    if N_prime <= N:
        raise ValueError("N' must exceed deg phi / n^2")
    m = four_squares(N_prime - N)
    M = quaternion_matrix(m)
    s = pow(n, -1, N_prime)
    E1, E2 = f.domain, f.codomain
    blocks = []
    for ell, e in factor(N_prime):
        q = ell ** e
        B = torsion_basis(E1, q)
        images = [f(B.P), f(B.Q)]
        gens = []
        for i in range(4):
            for j, P in enumerate((B.P, B.Q)):
                first = tuple(P * M[i][c] for c in range(4))
                img = images[j] * (s % q)
                second = tuple(img if c == i else E2.zero(img.ctx) for c in range(4))
                gens.append(first + second)
        blocks.append((q, gens))
    return KaniKernel(E1, E2, N_prime, m, s, blocks)


def perturb(H: KaniKernel, s_prime: int, index: int = 0) -> KaniKernel:
    """Copy of H with one generator's second block scaled by s'/s.

    The scaled generator is taken from the first prime-power block where
    s' and s differ; the result is then never isotropic, since that
    generator pairs with its partner to a nontrivial root of unity."""
    target = None
    for b, (q, _) in enumerate(H.blocks):
        if (s_prime - H.s) % q:
            target = b
            break
    if target is None:
        raise ValueError("s' agrees with s modulo N'")
    blocks = []
    for b, (q, gens) in enumerate(H.blocks):
        gens = list(gens)
        if b == target:
            g = gens[index]
            ratio = s_prime * pow(H.s, -1, q) % q
            gens[index] = g[:4] + tuple(P * ratio for P in g[4:])
        blocks.append((q, gens))
    return KaniKernel(H.domain, H.codomain, H.N_prime, H.m_tuple, s_prime, blocks)


def verify_isotropy(H: KaniKernel) -> bool:
    """Isotropy for the product Weil pairing and |H| = N'^8.

    Generators in different prime-power blocks pair trivially because their
    orders are coprime, so only pairs inside a block are evaluated."""
    total = 1
    for q, gens in H.blocks:
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                acc = None
                for c in range(8):
                    z = weil_pairing(gens[a][c], gens[b][c], q)
                    acc = z if acc is None else acc * z
                if acc != 1:
                    return False
        B1 = torsion_basis(H.domain, q)
        B2 = torsion_basis(H.codomain, q)
        rows = []
        for g in gens:
            row = []
            for c in range(8):
                B = B1 if c < 4 else B2
                row.extend(B.coordinates(g[c]) if not g[c].is_zero() else (0, 0))
            rows.append(row)
        total *= subgroup_order(rows, q)
    return total == H.N_prime ** 8


def kani_certificate(phi, n: int) -> bool:
    """Build the Kani kernel for (phi, n) with the standard N' and check it."""
    f = as_expr(phi)
    D = f.degree()
    N_prime = auxiliary_modulus(f.domain.p, D, D // (n * n))
    return verify_isotropy(kani_kernel(f, N_prime, n))
