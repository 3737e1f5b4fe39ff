"""Oriented curves: encoding, twists, primitivisation and ideal actions.

An orientation of E by an imaginary quadratic order O is stored as the
image theta of the standard generator omega = (t + sqrt(disc)) / 2, with
t = disc mod 2. So theta always has trace t in {0, 1} and degree
(t - disc) / 4, and two orientations are compared through enc, which
transports theta to a fixed model of the j-invariant and records its value
on a fixed point.
"""
from __future__ import annotations

import hashlib
import json
from functools import lru_cache

from .arith.integers import factor, squarefree_part
from .arith.modlin import kernel_2x2
from .config import current
from .curve import (Curve, Point, automorphisms, canonical_model, isomorphisms_any,
                    torsion_basis)
from .division import divide_by_integer
from .errors import (ConductorClash, EigenspaceMissing, Inert, InvalidOrientation, NoRoot,
                     NotDivisible, TorsionUnreachable, VerificationFailed)
from .isogeny import (IsogenyChain, IsogenyExpr, VeluStep, _test_points, action_matrix,
                      as_expr, conjugate)
from .quadratic import (QuadForm, QuadOrder, class_group, generator_ideals, prime_factorisation,
                        principal_form)


class OrientedCurve:
    """A curve with theta = iota(omega) for the standard generator of O."""

    def __init__(self, curve: Curve, order: QuadOrder, theta, primitive: bool | None = None):
        self.curve = curve
        self.order = order
        theta = as_expr(theta)
        if theta.domain != curve or theta.codomain != curve:
            raise InvalidOrientation("theta is not an endomorphism of the curve")
        if theta._degree is None:
            theta._degree = order.n_omega
        if theta._trace is None:
            theta._trace = order.t_omega
        if (theta._degree, theta._trace) != (order.n_omega, order.t_omega):
            raise InvalidOrientation("theta does not match the generator of the order")
        self.theta = theta
        self.primitive = primitive

    def __repr__(self):
        return f"OrientedCurve(j={self.curve.j_invariant()}, disc={self.order.disc})"

    @property
    def disc(self) -> int:
        return self.order.disc

    def twist(self) -> "OrientedCurve":
        return twist(self)

    def key(self) -> "ClassKey":
        return enc(self)

    def check(self, count: int = 2) -> bool:
        """theta^2 - t theta + n vanishes on sample points of two fields."""
        t, n = self.order.t_omega, self.order.n_omega
        for degree in (1, 2):
            rng_tag = f"check-{degree}"
            for T in _sample_points(self.curve, degree, count, rng_tag):
                a = self.theta(T)
                if self.theta(a) - a * t + T * n != self.curve.zero(T.ctx):
                    return False
        return True

    def to_json(self):
        return {"curve": self.curve.to_json(), "disc": self.order.disc,
                "theta": self.theta.to_json(), "primitive": self.primitive}

    @classmethod
    def from_json(cls, obj):
        theta = IsogenyExpr.from_json(obj["theta"])
        order = QuadOrder(obj["disc"])
        theta._degree, theta._trace = order.n_omega, order.t_omega
        return cls(theta.domain, order, theta, obj.get("primitive"))


def _sample_points(E: Curve, degree: int, count: int, tag: str):
    import random as _random
    from .curve import stable_seed
    rng = _random.Random(stable_seed("sample", E.key, degree, tag))
    return [E.random_point(degree, rng) for _ in range(count)]


def from_endomorphism(E: Curve, theta) -> tuple[QuadOrder, IsogenyExpr]:
    """Order Z[theta] and the shift of theta that is its standard generator."""
    f = as_expr(theta)
    t, n = f.trace(), f.degree()
    disc = t * t - 4 * n
    if disc >= 0:
        raise InvalidOrientation("theta is a scalar or not an endomorphism")
    O = QuadOrder(disc)
    # theta - k has trace t - 2k; choose it equal to disc mod 2
    k = (t - O.t_omega) // 2
    g = f - k if k else f
    g._degree, g._trace = O.n_omega, O.t_omega
    return O, g


def twist(X: OrientedCurve) -> OrientedCurve:
    """The conjugate orientation: omega maps to t - theta."""
    t = X.order.t_omega
    theta = -X.theta + t
    theta._degree, theta._trace = X.order.n_omega, t
    return OrientedCurve(X.curve, X.order, theta, X.primitive)


# ---------------------------------------------------------------------------
# enc


class ClassKey:
    """Canonical encoding of an oriented curve up to isomorphism.

    Equality and hashing use the serialized bytes."""

    __slots__ = ("data", "bytes")

    def __init__(self, data: dict):
        self.data = data
        self.bytes = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()

    def __eq__(self, other):
        return isinstance(other, ClassKey) and self.bytes == other.bytes

    def __hash__(self):
        return hash(self.bytes)

    def __repr__(self):
        return f"ClassKey({self.hex()})"

    def hex(self, length: int = 16) -> str:
        return hashlib.sha256(self.bytes).hexdigest()[:length]

    def to_json(self):
        return self.data

    @classmethod
    def from_json(cls, obj):
        return cls(obj)


@lru_cache(maxsize=4096)
def _enc_point(C: Curve, bound: int) -> Point:
    """First point of C (lex order of x, canonical root) of order > bound,
    over the smallest field F_{p^{2d}} that has such points."""
    cap = current().max_ext_degree
    for d in range(1, cap + 1):
        N = C.exponent(d)
        if N is None or N <= bound:
            continue
        ctx = C.field(d)
        for x in ctx.elements():
            try:
                P = C.lift_x(x)
            except NoRoot:
                continue
            if P.order(N) > bound:
                return P
    raise TorsionUnreachable(f"no point of order > {bound} within degree {cap}")


def enc(X: OrientedCurve) -> ClassKey:
    E = X.curve
    p = E.p
    j = E.j_invariant()
    C = canonical_model(j, p)
    isos = isomorphisms_any(E, C)
    if not isos:
        raise VerificationFailed("no isomorphism onto the canonical model")
    iso = isos[0]
    back = iso.inverse()
    P = _enc_point(C, 4 * X.order.n_omega)

    def theta_c(R):
        return iso(X.theta(back(R))).descend(R.ctx)

    if j.is_zero() or j == 1728:
        qs = set()
        for s in automorphisms(C):
            si = s.inverse()
            Q = s(theta_c(si(P).descend(P.ctx))).descend(P.ctx)
            qs.add(json.dumps(Q.to_json(), sort_keys=True))
        qlist = [json.loads(q) for q in sorted(qs)]
    else:
        qlist = [theta_c(P).to_json()]
    data = {"p": p, "disc": X.order.disc, "j": list(j.c), "P": P.to_json(), "Q": qlist}
    return ClassKey(data)


# ---------------------------------------------------------------------------
# primitivisation


def _fundamental(disc: int) -> tuple[int, int]:
    d, _ = squarefree_part(disc)
    DK = d if d % 4 == 1 else 4 * d
    f2 = disc // DK
    import math
    f = math.isqrt(f2)
    return DK, f


def primitivise(E: Curve, theta, disc_factorization=None, primes=None,
                verify: bool | None = None) -> OrientedCurve:
    """The primitive orientation extending Z[theta].

    theta' = 2 theta - t generates Z[sqrt(disc)]; it is divided by each
    prime of 2 f (f the conductor of Z[theta]) as long as the quotient stays
    an endomorphism, and finally (theta' + 1) / 2 is tried. `primes`, when
    given, restricts the loop to those primes (plus 2); the caller then
    vouches that the orientation is already maximal at the other primes.
    """
    f = as_expr(theta)
    if f.domain != E or f.codomain != E:
        raise InvalidOrientation("theta is not an endomorphism of E")
    t, N = f.trace(), f.degree()
    disc = t * t - 4 * N
    if disc >= 0:
        raise InvalidOrientation("theta is a scalar")
    if disc_factorization is None:
        disc_factorization = factor(-disc)
    DK, fa = _fundamental(disc)
    cond_primes = sorted({ell for ell, _ in disc_factorization if fa % ell == 0} | {2})
    if primes is not None:
        cond_primes = [ell for ell in cond_primes if ell in set(primes) | {2}]
    th = f * 2 - t
    th._degree, th._trace = -disc, 0
    cur = 4 * disc
    for ell in cond_primes:
        while True:
            try:
                th = as_expr(divide_by_integer(th, ell, verify))
            except NotDivisible:
                break
            cur //= ell * ell
    try:
        th = as_expr(divide_by_integer(th + 1, 2, verify))
        cur //= 4
    except NotDivisible:
        pass
    O = QuadOrder(cur)
    th._degree, th._trace = O.n_omega, O.t_omega
    return OrientedCurve(E, O, th, primitive=primes is None)


# ---------------------------------------------------------------------------
# ideal actions


def eigenvalue(O: QuadOrder, ideal: QuadForm) -> int:
    """theta acts on E[a] as multiplication by (b + t) / 2 mod ell for the
    prime ideal a = ell Z + ((-b + sqrt disc) / 2) Z."""
    ell = ideal.a
    return ((ideal.b + O.t_omega) // 2) % ell


def eigen_kernel(X: OrientedCurve, ideal: QuadForm) -> Point:
    """Generator of E[a] = ker(theta - lambda) on E[ell]."""
    ell = ideal.a
    lam = eigenvalue(X.order, ideal)
    M, B, _ = action_matrix(X.theta, ell)
    A = [[(M[0][0] - lam) % ell, M[0][1] % ell], [M[1][0] % ell, (M[1][1] - lam) % ell]]
    gens = kernel_2x2(A, ell)
    pts = [B.combine(a, b) for a, b in gens]
    pts = [P for P in pts if not P.is_zero()]
    if not pts:
        raise EigenspaceMissing(f"theta has no eigenvalue {lam} on E[{ell}]")
    if len(pts) > 1:
        raise InvalidOrientation(f"theta is scalar on E[{ell}]: orientation not primitive")
    return pts[0]


def check_ideal(X: OrientedCurve, ideal: QuadForm):
    ell = ideal.a
    if ell == X.curve.p:
        raise ConductorClash("the characteristic cannot be a norm here")
    if X.order.conductor % ell == 0:
        raise ConductorClash(f"{ell} divides the conductor")


def prime_step(X: OrientedCurve, ideal: QuadForm, verify: bool | None = None):
    """Action of a prime ideal: (a * X, the Velu step with kernel E[a])."""
    check_ideal(X, ideal)
    ell = ideal.a
    K = eigen_kernel(X, ideal)
    step = VeluStep(X.curve, K, ell)
    phi = IsogenyChain([step], X.curve)
    pushed = conjugate(phi, X.theta)
    try:
        theta = divide_by_integer(pushed, ell, verify)
    except NotDivisible as exc:  # pragma: no cover - would contradict E[a] being stable
        raise VerificationFailed("pushed orientation is not divisible by the norm") from exc
    theta = as_expr(theta)
    return OrientedCurve(step.codomain, X.order, theta, X.primitive), step


def cheap_primes(E: Curve, O: QuadOrder) -> list[int]:
    """Primes up to the prime cap with cheap torsion, coprime to p f."""
    out = []
    settings = current()
    from .arith.integers import primes_up_to
    for ell in primes_up_to(settings.prime_cap):
        if ell == E.p or O.conductor % ell == 0:
            continue
        try:
            d = E.torsion_degree(ell)
        except TorsionUnreachable:
            continue
        if d <= settings.cheap_ext_degree:
            out.append(ell)
    return out


def is_smooth_ideal(X: OrientedCurve, form: QuadForm) -> bool:
    allowed = set(cheap_primes(X.curve, X.order))
    return all(ell in allowed for ell, _ in factor(form.a)) if form.a > 1 else True


def ideal_word(X: OrientedCurve, form: QuadForm):
    """Prime ideals realising the class of `form`, as (ideal, exponent) pairs.

    The ideal of the form itself is used when its norm is smooth over the
    cheap primes; otherwise a shortest word in the cheap prime ideals of the
    same class is taken."""
    if form.disc != X.order.disc:
        raise ValueError("form and orientation have different discriminants")
    if form.a == 1:
        return []
    if is_smooth_ideal(X, form):
        return prime_factorisation(form)
    G = class_group(X.order.disc)
    allowed = set(cheap_primes(X.curve, X.order))
    gens = generator_ideals(X.order, current().prime_cap, allowed)
    return G.word_for(form, gens)


def action_word(X: OrientedCurve, word, verify: bool | None = None) -> OrientedCurve:
    """Apply a word of (prime ideal, exponent) pairs from left to right."""
    return action_word_chain(X, word, verify)[0]


def action_word_chain(X: OrientedCurve, word, verify: bool | None = None):
    steps = []
    cur = X
    for ideal, e in word:
        if e < 0:
            ideal, e = ideal.conjugate(), -e
        for _ in range(e):
            cur, step = prime_step(cur, ideal, verify)
            steps.append(step)
    return cur, IsogenyChain(steps, X.curve)


def ideal_action(X: OrientedCurve, form: QuadForm, verify: bool | None = None) -> OrientedCurve:
    """[a] * X for the class of a form, through smooth prime ideals."""
    return action_word(X, ideal_word(X, form), verify)


def ideal_action_chain(X: OrientedCurve, form: QuadForm, verify: bool | None = None):
    return action_word_chain(X, ideal_word(X, form), verify)


def principal(X: OrientedCurve) -> QuadForm:
    return principal_form(X.order.disc)


__all__ = [
    "OrientedCurve", "ClassKey", "enc", "twist", "primitivise", "from_endomorphism",
    "eigenvalue", "eigen_kernel", "prime_step", "ideal_action", "ideal_action_chain",
    "action_word", "action_word_chain", "ideal_word", "cheap_primes", "Inert",
]
