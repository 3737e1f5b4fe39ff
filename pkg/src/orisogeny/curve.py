"""Supersingular elliptic curves over F_{p^2} and their points.

Curves are stored in long Weierstrass form over the base field F_{p^2};
points may live in any extension F_{p^{2d}}. For curves whose Frobenius is
an integer on some extension (every supersingular curve over F_{p^2}),
the group E(F_{p^{2d}}) is (Z/N)^2 at the right degrees, which is what the
torsion machinery relies on.
"""
from __future__ import annotations

import hashlib
import math
import random
from functools import lru_cache

from .arith.field import (FieldContext, FieldElement, Poly, common_field, descend, embed,
                          get_field, poly_roots, sqrt)
from .arith.integers import discrete_log, factor
from .config import current
from .errors import (InvalidCurve, NoRoot, NotInSubfield, NotOnCurve, TorsionUnreachable)


def stable_seed(*parts) -> int:
    """Seed derived from a hash that does not change between interpreter runs."""
    h = hashlib.sha256(repr(parts).encode()).digest()
    return int.from_bytes(h[:8], "big")


class Curve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_{p^2}."""

    def __init__(self, p: int, a, base: FieldContext | None = None):
        F = base or get_field(p, 2)
        if len(a) == 2:
            a = (0, 0, 0, a[0], a[1])
        self.p = p
        self.F = F
        self.a = tuple(F(x) for x in a)
        if self.discriminant().is_zero():
            raise InvalidCurve("singular curve")
        self._coeff_cache = {}
        self._trace = None
        self.key = (p,) + tuple(x.c for x in self.a)
        self._hash = hash(self.key)

    # -- invariants
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a
        b2 = a1 * a1 + a2 * 4
        b4 = a1 * a3 + a4 * 2
        b6 = a3 * a3 + a6 * 4
        b8 = a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def c_invariants(self):
        b2, b4, b6, _ = self.b_invariants()
        c4 = b2 * b2 - b4 * 24
        c6 = -(b2 * b2 * b2) + b2 * b4 * 36 - b6 * 216
        return c4, c6

    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants()
        return -(b2 * b2 * b8) - b4 * b4 * b4 * 8 - b6 * b6 * 27 + b2 * b4 * b6 * 9

    def j_invariant(self) -> FieldElement:
        c4, _ = self.c_invariants()
        return c4 * c4 * c4 / self.discriminant()

    def is_short(self) -> bool:
        return self.a[0].is_zero() and self.a[1].is_zero() and self.a[2].is_zero()

    def __eq__(self, other):
        return isinstance(other, Curve) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        a1, a2, a3, a4, a6 = self.a
        if self.is_short():
            return f"Curve(p={self.p}: y^2 = x^3 + ({a4})x + ({a6}))"
        return f"Curve(p={self.p}: [{a1}, {a2}, {a3}, {a4}, {a6}])"

    def to_json(self):
        return {"p": self.p, "a": [list(x.c) for x in self.a]}

    @classmethod
    def from_json(cls, obj):
        F = get_field(obj["p"], 2)
        return cls(obj["p"], [F(c) for c in obj["a"]])

    def coeffs(self, ctx: FieldContext):
        c = self._coeff_cache.get(ctx.k)
        if c is None:
            c = tuple(embed(x, ctx) for x in self.a)
            self._coeff_cache[ctx.k] = c
        return c

    def field(self, degree: int) -> FieldContext:
        """F_{p^{2 degree}}."""
        return get_field(self.p, 2 * degree)

    # -- points
    def zero(self, ctx: FieldContext | None = None) -> "Point":
        return Point(self, ctx or self.F, None, None)

    def point(self, x, y, ctx: FieldContext | None = None, check: bool = True) -> "Point":
        ctx = ctx or (x.ctx if isinstance(x, FieldElement) else self.F)
        P = Point(self, ctx, ctx(x), ctx(y))
        if check and not P.on_curve():
            raise NotOnCurve(f"({x}, {y}) is not on {self}")
        return P

    def rhs_and_linear(self, x: FieldElement):
        a1, a2, a3, a4, a6 = self.coeffs(x.ctx)
        return ((x + a2) * x + a4) * x + a6, a1 * x + a3

    def lift_x(self, x: FieldElement) -> "Point":
        """Point with the given abscissa; y from the canonical square root."""
        f, h = self.rhs_and_linear(x)
        disc = h * h + f * 4
        r = sqrt(disc)  # raises NoRoot
        y = (r - h) / 2
        return Point(self, x.ctx, x, y)

    def random_point(self, degree: int, rng: random.Random) -> "Point":
        ctx = self.field(degree)
        while True:
            x = ctx.random(rng)
            f, h = self.rhs_and_linear(x)
            disc = h * h + f * 4
            if disc.is_square():
                r = sqrt(disc)
                if rng.random() < 0.5:
                    r = -r
                return Point(self, ctx, x, (r - h) / 2)

    # -- Frobenius and group orders
    def frobenius_trace(self) -> int:
        """Trace of the p^2-Frobenius, from the supersingular candidate set."""
        if self._trace is None:
            p = self.p
            q = p * p
            candidates = [-2 * p, 2 * p, 0, p, -p]
            rng = random.Random(stable_seed("trace", self.key))
            alive = list(candidates)
            for _ in range(8):
                R = self.random_point(1, rng)
                alive = [t for t in alive if (R * (q + 1 - t)).is_zero()]
                if len(alive) <= 1:
                    break
            if len(alive) != 1:
                raise InvalidCurve("curve is not supersingular or trace is ambiguous")
            self._trace = alive[0]
        return self._trace

    def frobenius_power_traces(self, d: int) -> int:
        """Trace of pi^d where pi is the p^2-Frobenius."""
        t = self.frobenius_trace()
        q = self.p * self.p
        s0, s1 = 2, t
        if d == 0:
            return 2
        for _ in range(d - 1):
            s0, s1 = s1, t * s1 - q * s0
        return s1

    def order(self, degree: int = 1) -> int:
        return (self.p * self.p) ** degree + 1 - self.frobenius_power_traces(degree)

    def frobenius_scalar(self, degree: int) -> int | None:
        """The integer pi^degree if that power of Frobenius is a scalar."""
        s = self.frobenius_power_traces(degree)
        if s * s == 4 * (self.p * self.p) ** degree:
            return s // 2
        return None

    def exponent(self, degree: int) -> int | None:
        """N with E(F_{p^{2 degree}}) = E[N], when Frobenius is scalar there."""
        lam = self.frobenius_scalar(degree)
        if lam is None:
            return None
        return abs(lam - 1)

    def torsion_degree(self, m: int, cap: int | None = None) -> int:
        """Smallest degree d with E[m] contained in E(F_{p^{2d}})."""
        cap = cap or current().max_ext_degree
        return _torsion_degree(self.p, self.frobenius_trace(), m, cap)


@lru_cache(maxsize=None)
def _torsion_degree(p: int, t: int, m: int, cap: int) -> int:
    q = p * p
    s0, s1 = 2, t
    for d in range(1, cap + 1):
        if s1 * s1 == 4 * q ** d and (s1 // 2 - 1) % m == 0:
            return d
        s0, s1 = s1, t * s1 - q * s0
    raise TorsionUnreachable(f"E[{m}] needs extension degree beyond {cap}")


def torsion_degree_for(p: int, m: int, trace: int | None = None, cap: int | None = None) -> int:
    """Torsion degree for curves with Frobenius -p (or the given trace)."""
    return _torsion_degree(p, -2 * p if trace is None else trace, m, cap or current().max_ext_degree)


class Point:
    __slots__ = ("curve", "ctx", "x", "y")

    def __init__(self, curve: Curve, ctx: FieldContext, x, y):
        self.curve = curve
        self.ctx = ctx
        self.x = x
        self.y = y

    @property
    def degree(self) -> int:
        return self.ctx.k // 2

    def is_zero(self) -> bool:
        return self.x is None

    def on_curve(self) -> bool:
        if self.x is None:
            return True
        a1, a2, a3, a4, a6 = self.curve.coeffs(self.ctx)
        x, y = self.x, self.y
        return y * y + a1 * x * y + a3 * y == ((x + a2) * x + a4) * x + a6

    def __repr__(self):
        if self.x is None:
            return "Point(inf)"
        return f"Point({self.x}, {self.y})"

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        if self.curve != other.curve:
            return False
        if self.x is None or other.x is None:
            return self.x is None and other.x is None
        if self.ctx is not other.ctx:
            k = common_field(self.curve.p, self.ctx.k, other.ctx.k)
            a, b = self.lift(k), other.lift(k)
            return a.x == b.x and a.y == b.y
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        if self.x is None:
            return hash(("inf", self.curve.key))
        return hash((self.ctx.k, self.x.c, self.y.c))

    def sort_key(self):
        if self.x is None:
            return (0,)
        return (1, self.x.c, self.y.c)

    def lift(self, ctx: FieldContext) -> "Point":
        if ctx is self.ctx:
            return self
        if self.x is None:
            return Point(self.curve, ctx, None, None)
        return Point(self.curve, ctx, embed(self.x, ctx), embed(self.y, ctx))

    def descend(self, ctx: FieldContext) -> "Point":
        if ctx is self.ctx:
            return self
        if self.x is None:
            return Point(self.curve, ctx, None, None)
        return Point(self.curve, ctx, descend(self.x, ctx), descend(self.y, ctx))

    def minimal(self) -> "Point":
        """The same point over the smallest field F_{p^{2d}} that contains it."""
        if self.x is None:
            return self.lift(self.curve.F)
        k = self.ctx.k
        for d in range(1, k // 2 + 1):
            if (k // 2) % d:
                continue
            ctx = get_field(self.curve.p, 2 * d)
            try:
                return self.descend(ctx)
            except NotInSubfield:
                continue
        return self

    def to_json(self):
        if self.x is None:
            return {"inf": True}
        return {"k": self.ctx.k, "x": list(self.x.c), "y": list(self.y.c)}

    @classmethod
    def from_json(cls, curve: Curve, obj):
        if obj.get("inf"):
            return curve.zero()
        ctx = get_field(curve.p, obj["k"])
        return Point(curve, ctx, ctx(obj["x"]), ctx(obj["y"]))

    # -- group law
    def __neg__(self):
        if self.x is None:
            return self
        a1, _, a3, _, _ = self.curve.coeffs(self.ctx)
        return Point(self.curve, self.ctx, self.x, -self.y - a1 * self.x - a3)

    def __add__(self, other: "Point") -> "Point":
        if self.x is None:
            return other
        if other.x is None:
            return self
        if other.ctx is not self.ctx:
            ctx = common_field(self.curve.p, self.ctx.k, other.ctx.k)
            return self.lift(ctx) + other.lift(ctx)
        a1, a2, a3, a4, a6 = self.curve.coeffs(self.ctx)
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        if x1 == x2:
            if (y1 + y2 + a1 * x2 + a3).is_zero():
                return Point(self.curve, self.ctx, None, None)
            lam = (x1 * x1 * 3 + a2 * x1 * 2 + a4 - a1 * y1) / (y1 * 2 + a1 * x1 + a3)
        else:
            lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return Point(self.curve, self.ctx, x3, y3)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, n: int) -> "Point":
        if n < 0:
            return (-self) * (-n)
        result = Point(self.curve, self.ctx, None, None)
        if n == 0 or self.x is None:
            return result
        addend = self
        result = self
        for bit in bin(n)[3:]:
            result = result + result
            if bit == "1":
                result = result + addend
        return result

    __rmul__ = __mul__

    def order(self, multiple: int | None = None) -> int:
        """Exact order, given a multiple of it (defaults to the group exponent)."""
        if self.x is None:
            return 1
        if multiple is None:
            multiple = self.curve.exponent(self.degree)
            if multiple is None:
                multiple = self.curve.order(self.degree)
        n = multiple
        for ell, e in factor(multiple):
            for _ in range(e):
                if (self * (n // ell)).is_zero():
                    n //= ell
                else:
                    break
        if not (self * n).is_zero():
            raise ValueError("given multiple is not a multiple of the order")
        return n


# ---------------------------------------------------------------------------
# Weil pairing


def _line(T: Point, S: Point, Q: Point):
    """Value at Q of the line through T and S, and of the vertical at T+S.

    Returns (numerator, denominator, T+S)."""
    a1, a2, a3, a4, a6 = T.curve.coeffs(T.ctx)
    xq, yq = Q.x, Q.y
    if T.x == S.x and (T.y + S.y + a1 * S.x + a3).is_zero():
        return xq - T.x, T.ctx.one, Point(T.curve, T.ctx, None, None)
    if T.x == S.x:
        lam = (T.x * T.x * 3 + a2 * T.x * 2 + a4 - a1 * T.y) / (T.y * 2 + a1 * T.x + a3)
    else:
        lam = (S.y - T.y) / (S.x - T.x)
    nu = T.y - lam * T.x
    x3 = lam * lam + a1 * lam - a2 - T.x - S.x
    y3 = -(lam + a1) * x3 - nu - a3
    return yq - T.y - lam * (xq - T.x), xq - x3, Point(T.curve, T.ctx, x3, y3)


def miller(P: Point, Q: Point, m: int):
    """f_{m,P}(Q) for the normalised Miller function; None if degenerate."""
    num = P.ctx.one
    den = P.ctx.one
    T = P
    for bit in bin(m)[3:]:
        # lines through the point at infinity cancel against verticals
        if T.x is None:
            num = num * num
            den = den * den
        else:
            ln, ld, T2 = _line(T, T, Q)
            num = num * num * ln
            den = den * den * ld
            T = T2
        if bit == "1":
            if T.x is None:
                T = P
                continue
            ln, ld, T2 = _line(T, P, Q)
            num = num * ln
            den = den * ld
            T = T2
    if num.is_zero() or den.is_zero():
        return None
    return num / den


def weil_pairing(P: Point, Q: Point, m: int) -> FieldElement:
    """Weil pairing e_m(P, Q) for P, Q in E[m]."""
    if P.ctx is not Q.ctx:
        ctx = common_field(P.curve.p, P.ctx.k, Q.ctx.k)
        P, Q = P.lift(ctx), Q.lift(ctx)
    ctx = P.ctx
    if P.is_zero() or Q.is_zero() or P == Q:
        return ctx.one
    a = miller(P, Q, m)
    b = miller(Q, P, m)
    if a is not None and b is not None:
        e = a / b
        return -e if m % 2 else e
    # Degenerate evaluation: use shifted divisors with an auxiliary point.
    rng = random.Random(stable_seed("weil", P.x.c if P.x else 0, Q.x.c if Q.x else 0, m))
    for _ in range(50):
        S = P.curve.random_point(ctx.k // 2, rng)
        try:
            f1 = miller(P, Q + S, m)
            f2 = miller(P, S, m)
            g1 = miller(Q, P - S, m)
            g2 = miller(Q, -S, m)
        except ZeroDivisionError:
            continue
        if None in (f1, f2, g1, g2) or (Q + S).is_zero() or (P - S).is_zero():
            continue
        return (f1 / f2) / (g1 / g2)
    raise ArithmeticError("Weil pairing evaluation failed")


# ---------------------------------------------------------------------------
# torsion bases and discrete logarithms


class TorsionBasis:
    """A basis (P, Q) of E[m] with points over F_{p^{2 degree}}."""

    def __init__(self, curve: Curve, m: int, P: Point, Q: Point, zeta: FieldElement):
        self.curve = curve
        self.m = m
        self.P = P
        self.Q = Q
        self.zeta = zeta  # e_m(P, Q), a primitive m-th root of unity
        self.degree = P.degree
        self._log_table = None

    def __iter__(self):
        return iter((self.P, self.Q))

    def _dlog_mu(self, z: FieldElement) -> int:
        m = self.m
        if m <= 512:
            if self._log_table is None:
                table = {}
                cur = self.zeta.ctx.one
                for i in range(m):
                    table[cur.c] = i
                    cur = cur * self.zeta
                self._log_table = table
            try:
                return self._log_table[z.c]
            except KeyError:
                raise NoRoot("value is not an m-th root of unity") from None
        one = self.zeta.ctx.one
        return discrete_log(z, self.zeta, m, lambda a, b: a * b, lambda a, e: a ** (e % m), one)

    def coordinates(self, R: Point) -> tuple[int, int]:
        """(a, b) with R = aP + bQ."""
        if R.curve != self.curve:
            raise ValueError("point on a different curve")
        R = R.lift(common_field(self.curve.p, R.ctx.k, self.P.ctx.k)) if R.ctx is not self.P.ctx else R
        P, Q = self.P.lift(R.ctx), self.Q.lift(R.ctx)
        zeta = weil_pairing(P, Q, self.m)
        if zeta.ctx is not self.zeta.ctx:
            a = self._dlog_mu(descend(weil_pairing(R, Q, self.m), self.zeta.ctx))
            b = self._dlog_mu(descend(weil_pairing(P, R, self.m), self.zeta.ctx))
        else:
            a = self._dlog_mu(weil_pairing(R, Q, self.m))
            b = self._dlog_mu(weil_pairing(P, R, self.m))
        return a, b

    def combine(self, a: int, b: int) -> Point:
        return self.P * (a % self.m) + self.Q * (b % self.m)


_basis_cache: dict = {}


def torsion_basis(E: Curve, m: int, seed: int = 0) -> TorsionBasis:
    """Deterministic basis of E[m] over the smallest extension containing it."""
    if m < 2:
        raise ValueError("torsion basis needs m >= 2")
    key = (E.key, m, seed)
    hit = _basis_cache.get(key)
    if hit is not None:
        return hit
    d = E.torsion_degree(m)
    N = E.exponent(d)
    cof = N // m
    rng = random.Random(stable_seed("basis", E.key, m, seed))
    primes = [ell for ell, _ in factor(m)] if m > 1 else []

    def full_order(R):
        return all(not (R * (m // ell)).is_zero() for ell in primes)

    while True:
        P = E.random_point(d, rng) * cof
        if not full_order(P):
            continue
        Q = E.random_point(d, rng) * cof
        if not full_order(Q):
            continue
        zeta = weil_pairing(P, Q, m)
        if all(zeta ** (m // ell) != 1 for ell in primes):
            basis = TorsionBasis(E, m, P, Q, zeta)
            _basis_cache[key] = basis
            return basis


def clear_caches():
    _basis_cache.clear()


# ---------------------------------------------------------------------------
# Isomorphisms


class Isomorphism:
    """(x, y) -> (u^2 x + r, u^3 y + u^2 s x + t) from domain to codomain."""

    def __init__(self, domain: Curve, codomain: Curve, u, r, s, t):
        self.domain = domain
        self.codomain = codomain
        ctx = u.ctx
        self.ctx = ctx
        self.u, self.r, self.s, self.t = u, ctx(r), ctx(s), ctx(t)
        self._lifted = {}

    def __repr__(self):
        return f"Isomorphism(u={self.u}, r={self.r}, s={self.s}, t={self.t})"

    def _params(self, ctx):
        c = self._lifted.get(ctx.k)
        if c is None:
            u = embed(self.u, ctx)
            c = (u * u, u * u * u, embed(self.r, ctx), embed(self.s, ctx), embed(self.t, ctx))
            self._lifted[ctx.k] = c
        return c

    def __call__(self, P: Point) -> Point:
        if P.curve != self.domain:
            raise ValueError("point is not on the domain")
        if P.is_zero():
            return self.codomain.zero(P.ctx)
        ctx = P.ctx
        if ctx.k % self.ctx.k:
            ctx = common_field(P.curve.p, ctx.k, self.ctx.k)
            P = P.lift(ctx)
        u2, u3, r, s, t = self._params(ctx)
        return Point(self.codomain, ctx, u2 * P.x + r, u3 * P.y + u2 * s * P.x + t)

    def inverse(self) -> "Isomorphism":
        ui = self.u.inverse()
        ui3 = ui * ui * ui
        return Isomorphism(self.codomain, self.domain, ui, -self.r * ui * ui, -self.s * ui,
                           (self.s * self.r - self.t) * ui3)

    def compose(self, first: "Isomorphism") -> "Isomorphism":
        """self o first."""
        ctx = common_field(self.domain.p, self.ctx.k, first.ctx.k)
        u1, r1, s1, t1 = (embed(v, ctx) for v in (first.u, first.r, first.s, first.t))
        u2, r2, s2, t2 = (embed(v, ctx) for v in (self.u, self.r, self.s, self.t))
        # x'' = u2^2 (u1^2 x + r1) + r2, y'' = u2^3 y' + u2^2 s2 x' + t2
        u = u1 * u2
        r = u2 * u2 * r1 + r2
        s = s1 * u2 + s2
        t = u2 * u2 * u2 * t1 + u2 * u2 * s2 * r1 + t2
        return Isomorphism(first.domain, self.codomain, u, r, s, t)

    def to_json(self):
        return {"k": self.ctx.k, "u": list(self.u.c), "r": list(self.r.c), "s": list(self.s.c),
                "t": list(self.t.c)}

    def is_identity(self) -> bool:
        return self.u == 1 and self.r.is_zero() and self.s.is_zero() and self.t.is_zero()


def _nth_roots(rho: FieldElement, n: int) -> list[FieldElement]:
    ctx = rho.ctx
    coeffs = [-rho] + [ctx.zero] * (n - 1) + [ctx.one]
    return poly_roots(Poly(ctx, coeffs))


def isomorphisms(E: Curve, E2: Curve, degree: int = 1) -> list[Isomorphism]:
    """All isomorphisms E -> E2 defined over F_{p^{2 degree}}, in a fixed order."""
    if E.p != E2.p:
        return []
    if E.j_invariant() != E2.j_invariant():
        return []
    ctx = E.field(degree)
    c4, c6 = (embed(c, ctx) for c in E.c_invariants())
    d4, d6 = (embed(c, ctx) for c in E2.c_invariants())
    if c4.is_zero():
        us = _nth_roots(d6 / c6, 6)
    elif c6.is_zero():
        us = _nth_roots(d4 / c4, 4)
    else:
        w = (d6 / c6) / (d4 / c4)
        if not w.is_square():
            return []
        r0 = sqrt(w)
        us = sorted([r0, -r0], key=lambda z: z.c)
    a = E.coeffs(ctx)
    b = E2.coeffs(ctx)
    out = []
    for u in us:
        s = (u * a[0] - b[0]) / 2
        r = (u * u * a[1] - b[1] + s * b[0] + s * s) / 3
        t = (u * u * u * a[2] - b[2] - r * b[0]) / 2
        iso = Isomorphism(E, E2, u, r, s, t)
        out.append(iso)
    return out


def isomorphisms_any(E: Curve, E2: Curve, max_degree: int = 6) -> list[Isomorphism]:
    """Isomorphisms over the smallest extension where any exist."""
    for d in (1, 2, 3, 6):
        if d > max_degree:
            break
        isos = isomorphisms(E, E2, d)
        if isos:
            return isos
    return []


def automorphisms(E: Curve) -> list[Isomorphism]:
    return isomorphisms(E, E, 1)


def short_model(E: Curve) -> tuple[Curve, Isomorphism]:
    """Short Weierstrass model and the isomorphism with u = 1 onto it."""
    c4, c6 = E.c_invariants()
    S = Curve(E.p, (0, 0, 0, -c4 / 48, -c6 / 864))
    b2 = E.b_invariants()[0]
    one = E.F.one
    iso = Isomorphism(E, S, one, b2 / 12, E.a[0] / 2, E.a[2] / 2)
    return S, iso


def canonical_model(j: FieldElement, p: int) -> Curve:
    """Fixed representative of the isomorphism class with the given j."""
    F = get_field(p, 2)
    j = F(j)
    if j.is_zero():
        return Curve(p, (0, 0, 1, 0, 0))
    if j == 1728:
        return Curve(p, (0, 0, 0, 1, 0))
    c = (j - 1728).inverse()
    return Curve(p, (1, 0, 0, c * -36, -c))


def is_supersingular(E: Curve) -> bool:
    try:
        E.frobenius_trace()
    except InvalidCurve:
        return False
    return True
