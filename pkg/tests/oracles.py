"""Independent oracles shared by the tests.

These avoid the class group action entirely: they enumerate curves,
kernels and isomorphisms directly."""
import math

from orisogeny.curve import Curve, canonical_model, isomorphisms_any, torsion_basis
from orisogeny.isogeny import IsoStep, IsogenyChain, IsogenyExpr, VeluStep
from orisogeny.orientation import OrientedCurve, enc
from orisogeny.arith.integers import factor, squarefree_part


def supersingular_curves(p: int) -> list[Curve]:
    """Canonical models of every supersingular j, by a 2-isogeny search."""
    E0 = canonical_model(Curve(p, (1, 0)).j_invariant(), p)
    seen = {E0.j_invariant(): E0}
    frontier = [E0]
    while frontier:
        nxt = []
        for E in frontier:
            B = torsion_basis(E, 2)
            for K in (B.P, B.Q, B.P + B.Q):
                j = VeluStep(E, K, 2).codomain.j_invariant()
                if j not in seen:
                    seen[j] = canonical_model(j, p)
                    nxt.append(seen[j])
        frontier = nxt
    return list(seen.values())


def cyclic_subgroups(E: Curve, m: int):
    """One generator per cyclic subgroup of order m."""
    B = torsion_basis(E, m)
    units = [k for k in range(1, m) if math.gcd(k, m) == 1]
    seen, out = set(), []
    for a in range(m):
        for b in range(m):
            P = B.combine(a, b)
            if P.is_zero() or P.order(m) != m:
                continue
            key = frozenset((P * k).sort_key() for k in units)
            if key not in seen:
                seen.add(key)
                out.append(P)
    return out


def chain_with_kernel(E: Curve, P, m: int):
    steps, cur, Q = [], E, P
    for ell, e in factor(m):
        for _ in range(e):
            o = Q.order(m)
            st = VeluStep(cur, Q * (o // ell), ell)
            steps.append(st)
            Q = st(Q)
            cur = st.codomain
    return steps, cur


def all_oriented_keys(p: int, order) -> set:
    """Keys of every primitively O-oriented curve with O maximal, found by
    enumerating endomorphisms of degree n_omega and trace t_omega."""
    n, t = order.n_omega, order.t_omega
    keys = set()
    for E in supersingular_curves(p):
        for P in cyclic_subgroups(E, n):
            steps, cur = chain_with_kernel(E, P, n)
            for iso in isomorphisms_any(cur, E):
                f = IsogenyExpr(E, E, [(1, IsogenyChain(steps + [IsoStep(iso)], E))])
                if f.trace() == t:
                    keys.add(enc(OrientedCurve(E, order, f, primitive=True)))
    return keys


def scalar_depth(E: Curve, theta, ell: int, cap: int) -> int:
    """Largest e <= cap with theta acting as a scalar on E[ell^e].

    theta is a homomorphism, so acting as s on a basis of E[ell^e] is the
    same as E[ell^e] lying in ker(theta - s)."""
    e = 0
    while e < cap:
        m = ell ** (e + 1)
        B = torsion_basis(E, m)
        a, b = B.coordinates(theta(B.P))
        c, d = B.coordinates(theta(B.Q))
        if b % m or c % m or (a - d) % m:
            break
        e += 1
    return e


def primitive_disc_oracle(E: Curve, theta) -> int:
    """disc Z[theta] divided by the square of every scalar depth."""
    t, n = theta.trace(), theta.degree()
    disc = t * t - 4 * n
    d, _ = squarefree_part(disc)
    DK = d if d % 4 == 1 else 4 * d
    f = math.isqrt(disc // DK)
    out = disc
    for ell, v in factor(f) if f > 1 else []:
        e = scalar_depth(E, theta, ell, v)
        out //= ell ** (2 * e)
    return out
