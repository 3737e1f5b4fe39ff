"""Random instances for tests, demos and the acceptance suite.

Instances are built forward (choose the answer, then the question) so a
result can be checked against the planted answer. All randomness comes from
an explicit random.Random.
"""
from __future__ import annotations

import random

from .arith.integers import factor, primes_up_to
from .config import current
from .curve import Curve, torsion_basis
from .errors import TorsionUnreachable
from .isogeny import IsogenyChain, ScalarStep, random_chain


def base_curve(p: int) -> Curve:
    """y^2 = x^3 + x, supersingular for p = 3 mod 4."""
    return Curve(p, (1, 0))


def reachable_exponent(E: Curve, ell: int, cap: int | None = None) -> int:
    """Largest v with E[ell^v] inside the cheap extension degree."""
    cap = current().cheap_ext_degree if cap is None else cap
    v = 0
    while True:
        try:
            d = E.torsion_degree(ell ** (v + 1))
        except TorsionUnreachable:
            return v
        if d > cap:
            return v
        v += 1


def _valuation(n: int, ell: int) -> int:
    e = 0
    while n % ell == 0:
        n //= ell
        e += 1
    return e


def smooth_degree_plan(E: Curve, n: int, rng: random.Random, max_degree: int = 1 << 16,
                       primes=None) -> list[int]:
    """Random list of prime step degrees for psi such that dividing psi o [n]
    by n only needs torsion within the cheap extension degree.

    The ell-part of ker(psi o [n]) has exponent up to ell^(v + e) where
    ell^v is the ell-part of deg psi and ell^e that of n, so each prime gets
    a budget of reachable_exponent - e steps.
    """
    primes = primes or [ell for ell in primes_up_to(13) if ell != E.p]
    budget = {}
    for ell in primes:
        b = reachable_exponent(E, ell) - _valuation(n, ell)
        if b > 0:
            budget[ell] = b
    plan: list[int] = []
    deg = 1
    length = rng.randint(1, 6)
    for _ in range(length):
        options = [ell for ell, b in budget.items() if b > 0 and deg * ell * n * n <= max_degree]
        if not options:
            break
        ell = rng.choice(options)
        budget[ell] -= 1
        deg *= ell
        plan.append(ell)
    return plan


def divisible_instance(p: int, n: int, rng: random.Random):
    """(phi, psi) with phi = psi o [n]; the scalar sits at a random position
    inside the chain so phi is not literally of the form psi o [n]."""
    E = base_curve(p)
    plan = smooth_degree_plan(E, n, rng)
    psi = random_chain(E, plan, rng)
    cut = rng.randint(0, len(psi.steps))
    steps = list(psi.steps)
    at = E if cut == 0 else steps[cut - 1].codomain
    steps.insert(cut, ScalarStep(at, n))
    return IsogenyChain(steps, E), psi


def contains_torsion_by_enumeration(phi, n: int) -> bool:
    """E[n] in ker phi, checked on every point of E[n]."""
    for ell, e in factor(n):
        q = ell ** e
        B = torsion_basis(phi.domain, q)
        for a in range(q):
            for b in range(q):
                if not phi(B.combine(a, b)).is_zero():
                    return False
    return True


def non_divisible_instance(p: int, n: int, rng: random.Random):
    """A chain phi with n^2 | deg phi and E[n] not in ker phi.

    Built as chi o [n / ell] o psi with chi a single ell-step (ell | n), so
    that the degree has the right shape but one factor of ell is missing
    from the scalar part. Candidates that happen to be divisible (a
    backtracking chain) are rejected by full enumeration of E[n].
    """
    E = base_curve(p)
    ells = [ell for ell, _ in factor(n)]
    while True:
        ell = rng.choice(ells)
        # extra ell-steps supply the missing ell^2 in the degree
        plan = smooth_degree_plan(E, n, rng, primes=[q for q in primes_up_to(13) if q != p])
        extra = [ell, ell]
        chain = random_chain(E, plan + extra, rng)
        m = n // ell
        steps = list(chain.steps)
        if m > 1:
            steps.insert(0, ScalarStep(E, m))
        phi = IsogenyChain(steps, E)
        if not contains_torsion_by_enumeration(phi, n):
            return phi
