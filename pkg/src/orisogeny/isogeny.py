"""Isogenies as composable chains and endomorphisms as integer combinations.

A chain is a list of elementary steps (Velu steps of prime degree,
isomorphisms, multiplication by integers, Frobenius). An expression is a
Z-linear combination of chains with common domain and codomain. Both can be
evaluated on points over any extension, and both expose degree, dual and
(for endomorphisms) trace. Degrees and traces of expressions are recovered
from their action on torsion, so nothing here needs the algebraic
structure of the endomorphism ring.
"""
from __future__ import annotations

import math
import random

from .arith.field import Poly, descend, embed, get_field
from .arith.integers import crt, factor
from .arith.modlin import kernel_2x2, subgroup_order
from .config import current
from .curve import (Curve, Isomorphism, Point, isomorphisms, short_model, stable_seed,
                    torsion_basis, weil_pairing)
from .errors import (DegenerateKernel, NotSeparable, NotSmooth, TorsionUnreachable,
                     VerificationFailed)


# ---------------------------------------------------------------------------
# elementary steps


class Step:
    domain: Curve
    codomain: Curve
    degree: int

    def __call__(self, P: Point) -> Point:  # pragma: no cover - interface
        raise NotImplementedError

    def dual(self) -> list["Step"]:  # pragma: no cover - interface
        raise NotImplementedError


class VeluStep(Step):
    """Separable isogeny of prime degree ell with kernel generated by `kernel`."""

    def __init__(self, domain: Curve, kernel: Point, ell: int):
        if kernel.curve != domain:
            raise ValueError("kernel point not on domain")
        if kernel.is_zero() or not (kernel * ell).is_zero():
            raise DegenerateKernel(f"kernel generator does not have order {ell}")
        self.domain = domain
        self.kernel = kernel
        self.ell = ell
        self.degree = ell
        if domain.is_short():
            self.pre = None
            S = domain
            K = kernel
        else:
            S, self.pre = short_model(domain)
            K = self.pre(kernel)
        self.short = S
        a, b = S.a[3], S.a[4]
        F = S.F
        one = F.one
        x = Poly(F, [0, 1])
        f = Poly(F, [b, a, 0, 1])
        if ell == 2:
            try:
                x0 = descend(K.x, F)
            except Exception as exc:
                raise DegenerateKernel("2-torsion kernel point is not rational") from exc
            v = x0 * x0 * 3 + a
            w = x0 * v
            psi = Poly(F, [-x0, one])
            xn = x * psi + Poly(F, [v])
            xd = psi
            yn = xn.derivative() * xd - xn * xd.derivative()
            yd = xd * xd
        else:
            n = (ell - 1) // 2
            ctx = K.ctx
            xs = []
            T = K
            for _ in range(n):
                xs.append(T.x)
                T = T + K
            psi_ext = Poly(ctx, [1])
            for xq in xs:
                psi_ext = psi_ext * Poly(ctx, [-xq, ctx.one])
            try:
                psi = Poly(F, [descend(c, F) for c in psi_ext.c])
            except Exception as exc:
                raise DegenerateKernel("kernel is not Galois stable") from exc
            c = psi.c
            s1 = -c[n - 1] if n >= 1 else F.zero
            s2 = c[n - 2] if n >= 2 else F.zero
            s3 = -c[n - 3] if n >= 3 else F.zero
            p2 = s1 * s1 - s2 * 2
            p3 = s1 * s1 * s1 - s1 * s2 * 3 + s3 * 3
            v = p2 * 6 + a * (2 * n)
            w = p3 * 10 + a * s1 * 6 + b * (4 * n)
            dpsi = psi.derivative()
            ddpsi = dpsi.derivative()
            xn = (Poly(F, [-s1 * 2, ell]) * psi * psi - f.derivative() * dpsi * psi * 2
                  + f * (dpsi * dpsi - psi * ddpsi) * 4)
            xd = psi * psi
            yn = xn.derivative() * psi - xn * dpsi * 2
            yd = psi * psi * psi
        self.psi = psi
        self.codomain = Curve(domain.p, (0, 0, 0, a - v * 5, b - w * 7))
        self._polys = (xn, xd, yn, yd)
        self._lifted = {}

    def __repr__(self):
        return f"VeluStep(ell={self.ell})"

    def _coeffs(self, ctx):
        c = self._lifted.get(ctx.k)
        if c is None:
            c = tuple([embed(a, ctx) for a in poly.c] for poly in self._polys)
            self._lifted[ctx.k] = c
        return c

    def __call__(self, P: Point) -> Point:
        if P.is_zero():
            return self.codomain.zero(P.ctx)
        if self.pre is not None:
            P = self.pre(P)
        ctx = P.ctx
        xn, xd, yn, yd = self._coeffs(ctx)
        x = P.x

        def ev(cs):
            acc = ctx.zero
            for c in reversed(cs):
                acc = acc * x + c
            return acc

        den = ev(xd)
        if den.is_zero():
            return self.codomain.zero(ctx)
        X = ev(xn) / den
        Y = P.y * ev(yn) / ev(yd)
        return Point(self.codomain, ctx, X, Y)

    def dual(self) -> list[Step]:
        ell = self.ell
        B = torsion_basis(self.domain, ell)
        R = B.P
        if weil_pairing(self.kernel, B.P, ell) == 1:
            R = B.Q
        back = VeluStep(self.codomain, self(R), ell)
        iso = fit_isomorphism(lambda T: back(self(T)), lambda T: T * ell, back.codomain,
                              self.domain, self.domain)
        return [back, IsoStep(iso)]

    def to_json(self):
        return {"type": "velu", "ell": self.ell, "kernel": self.kernel.to_json()}


class IsoStep(Step):
    def __init__(self, iso: Isomorphism):
        self.iso = iso
        self.domain = iso.domain
        self.codomain = iso.codomain
        self.degree = 1

    def __repr__(self):
        return f"IsoStep({self.iso})"

    def __call__(self, P):
        return self.iso(P)

    def dual(self):
        return [IsoStep(self.iso.inverse())]

    def to_json(self):
        return {"type": "iso", **self.iso.to_json()}


class ScalarStep(Step):
    def __init__(self, curve: Curve, n: int):
        self.domain = self.codomain = curve
        self.n = n
        self.degree = n * n

    def __repr__(self):
        return f"[{self.n}]"

    def __call__(self, P):
        return P * self.n

    def dual(self):
        return [self]

    def to_json(self):
        return {"type": "scalar", "n": self.n}


class FrobeniusStep(Step):
    """The p-power Frobenius (x, y) -> (x^p, y^p) onto the conjugate curve."""

    def __init__(self, curve: Curve):
        self.domain = curve
        self.codomain = Curve(curve.p, [a.frobenius() for a in curve.a])
        self.degree = curve.p

    def __repr__(self):
        return "Frob"

    def __call__(self, P):
        if P.is_zero():
            return self.codomain.zero(P.ctx)
        return Point(self.codomain, P.ctx, P.x.frobenius(), P.y.frobenius())

    def dual(self):
        # Only used on curves over F_p with Frobenius squaring to -p, where
        # the dual of Frobenius is its negative.
        if self.codomain != self.domain:
            raise NotImplementedError("dual of Frobenius between distinct curves")
        return [self, ScalarStep(self.domain, -1)]

    def to_json(self):
        return {"type": "frobenius"}


def step_from_json(curve: Curve, obj) -> Step:
    kind = obj["type"]
    if kind == "velu":
        return VeluStep(curve, Point.from_json(curve, obj["kernel"]), obj["ell"])
    if kind == "scalar":
        return ScalarStep(curve, obj["n"])
    if kind == "frobenius":
        return FrobeniusStep(curve)
    if kind == "iso":
        raise ValueError("isomorphism steps need their codomain; use chain_from_json")
    raise ValueError(f"unknown step type {kind}")


# ---------------------------------------------------------------------------
# chains and expressions


class IsogenyChain:
    """Composition of steps; evaluation applies them first to last."""

    def __init__(self, steps: list[Step], domain: Curve | None = None):
        self.steps = list(steps)
        if not self.steps and domain is None:
            raise ValueError("empty chain needs a domain")
        self.domain = domain or self.steps[0].domain
        self.codomain = self.steps[-1].codomain if self.steps else self.domain
        for a, b in zip(self.steps, self.steps[1:]):
            if a.codomain != b.domain:
                raise ValueError("steps do not compose")
        if self.steps and self.steps[0].domain != self.domain:
            raise ValueError("first step has the wrong domain")

    def __repr__(self):
        return "Chain[" + ", ".join(repr(s) for s in self.steps) + "]"

    def __call__(self, P: Point) -> Point:
        for s in self.steps:
            P = s(P)
        return P

    def degree(self) -> int:
        d = 1
        for s in self.steps:
            d *= s.degree
        return d

    def then(self, other: "IsogenyChain") -> "IsogenyChain":
        """other o self."""
        if other.domain != self.codomain:
            raise ValueError("chains do not compose")
        return IsogenyChain(self.steps + other.steps, self.domain)

    def dual(self) -> "IsogenyChain":
        steps = []
        for s in reversed(self.steps):
            steps.extend(s.dual())
        return IsogenyChain(steps, self.codomain)

    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    def to_json(self):
        out = []
        for s in self.steps:
            js = s.to_json()
            if isinstance(s, IsoStep):
                js["codomain"] = s.codomain.to_json()
            out.append(js)
        return {"domain": self.domain.to_json(), "steps": out}

    @classmethod
    def from_json(cls, obj):
        E = Curve.from_json(obj["domain"])
        steps = []
        cur = E
        for js in obj["steps"]:
            if js["type"] == "iso":
                cod = Curve.from_json(js["codomain"])
                ctx = get_field(E.p, js["k"])
                iso = Isomorphism(cur, cod, ctx(js["u"]), ctx(js["r"]), ctx(js["s"]), ctx(js["t"]))
                st = IsoStep(iso)
            else:
                st = step_from_json(cur, js)
            steps.append(st)
            cur = st.codomain
        return cls(steps, E)


def identity(E: Curve) -> IsogenyChain:
    return IsogenyChain([], E)


class IsogenyExpr:
    """sum_i c_i * f_i for chains f_i : E -> E'.

    A term with chain None stands for the identity (only when E = E').
    Known degree and trace may be attached by constructions that know them
    exactly; otherwise they are computed from torsion on demand.
    """

    def __init__(self, domain: Curve, codomain: Curve, terms, degree: int | None = None,
                 trace: int | None = None):
        self.domain = domain
        self.codomain = codomain
        merged: list[list] = []
        for c, f in terms:
            if c == 0:
                continue
            if f is not None and (f.domain != domain or f.codomain != codomain):
                raise ValueError("term has the wrong domain or codomain")
            if f is None and domain != codomain:
                raise ValueError("scalar term in a non-endomorphism")
            for m in merged:
                if m[1] is f:
                    m[0] += c
                    break
            else:
                merged.append([c, f])
        self.terms = [(c, f) for c, f in merged if c != 0]
        self._degree = degree
        self._trace = trace

    def __repr__(self):
        parts = [f"{c}*{'1' if f is None else f}" for c, f in self.terms]
        return "Expr(" + " + ".join(parts) + ")"

    @classmethod
    def of(cls, f) -> "IsogenyExpr":
        if isinstance(f, IsogenyExpr):
            return f
        return cls(f.domain, f.codomain, [(1, f)], degree=f.degree())

    @classmethod
    def scalar(cls, E: Curve, n: int) -> "IsogenyExpr":
        return cls(E, E, [(n, None)], degree=n * n, trace=2 * n)

    def __call__(self, P: Point) -> Point:
        acc = self.codomain.zero(P.ctx)
        for c, f in self.terms:
            Q = P if f is None else f(P)
            if Q.curve != self.codomain:
                raise ValueError("term evaluated to the wrong curve")
            acc = acc + Q * c
        return acc

    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    def __add__(self, other):
        if isinstance(other, int):
            d = t = None
            if self._degree is not None and self._trace is not None:
                d = self._degree + other * self._trace + other * other
                t = self._trace + 2 * other
            return IsogenyExpr(self.domain, self.codomain, self.terms + [(other, None)], d, t)
        other = IsogenyExpr.of(other)
        return IsogenyExpr(self.domain, self.codomain, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        return self + (IsogenyExpr.of(other) * -1)

    def __rsub__(self, other):
        return (self * -1) + other

    def __mul__(self, n: int):
        d = None if self._degree is None else self._degree * n * n
        t = None if self._trace is None else self._trace * n
        return IsogenyExpr(self.domain, self.codomain, [(c * n, f) for c, f in self.terms], d, t)

    __rmul__ = __mul__

    def term_bound(self) -> int:
        """Upper bound for the degree: (sum |c_i| sqrt(deg f_i))^2."""
        s = 0.0
        for c, f in self.terms:
            s += abs(c) * math.sqrt(1 if f is None else f.degree())
        return int(s * s) + 2

    def degree(self) -> int:
        if self._degree is None:
            if len(self.terms) == 1:
                c, f = self.terms[0]
                self._degree = c * c * (1 if f is None else f.degree())
            else:
                self._degree = degree_from_torsion(self, self.term_bound())
        return self._degree

    def trace(self) -> int:
        if self._trace is None:
            self._trace = trace_from_torsion(self, 2 * math.isqrt(self.degree()) + 2)
        return self._trace

    def dual(self) -> "IsogenyExpr":
        terms = [(c, None if f is None else f.dual()) for c, f in self.terms]
        return IsogenyExpr(self.codomain, self.domain, terms, self._degree, self._trace)

    def to_json(self):
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(),
                "terms": [[c, None if f is None else f.to_json()] for c, f in self.terms]}

    @classmethod
    def from_json(cls, obj):
        E = Curve.from_json(obj["domain"])
        E2 = Curve.from_json(obj["codomain"])
        terms = [(c, None if f is None else IsogenyChain.from_json(f)) for c, f in obj["terms"]]
        return cls(E, E2, terms)


def as_expr(f) -> IsogenyExpr:
    return IsogenyExpr.of(f)


def compose(second, first) -> IsogenyExpr:
    """second o first, distributing over sums."""
    a, b = as_expr(first), as_expr(second)
    if b.domain != a.codomain:
        raise ValueError("maps do not compose")
    terms = []
    for c1, f1 in a.terms:
        for c2, f2 in b.terms:
            if f1 is None and f2 is None:
                terms.append((c1 * c2, None))
            elif f1 is None:
                terms.append((c1 * c2, f2))
            elif f2 is None:
                terms.append((c1 * c2, f1))
            else:
                terms.append((c1 * c2, f1.then(f2)))
    d = None
    if a._degree is not None and b._degree is not None:
        d = a._degree * b._degree
    return IsogenyExpr(a.domain, b.codomain, terms, d)


def conjugate(phi: IsogenyChain, theta, phi_dual: IsogenyChain | None = None) -> IsogenyExpr:
    """phi o theta o phi_dual as an endomorphism of the codomain of phi."""
    theta = as_expr(theta)
    phi_dual = phi_dual or phi.dual()
    n = phi.degree()
    terms = []
    for c, f in theta.terms:
        if f is None:
            terms.append((c * n, None))
        else:
            terms.append((c, phi_dual.then(f).then(phi)))
    d = t = None
    if theta._degree is not None:
        d = theta._degree * n * n
    if theta._trace is not None:
        t = theta._trace * n
    return IsogenyExpr(phi.codomain, phi.codomain, terms, d, t)


# ---------------------------------------------------------------------------
# matching codomains by isomorphisms


def _test_points(E: Curve, count: int = 3, tag=""):
    rng = random.Random(stable_seed("testpts", E.key, tag))
    pts = []
    N = E.exponent(1) or E.order(1)
    while len(pts) < count:
        P = E.random_point(1, rng)
        if P.order(N) > 4:
            pts.append(P)
    return pts


def fit_isomorphism(f, target, source: Curve, codomain: Curve, domain: Curve,
                    count: int = 3) -> Isomorphism:
    """The isomorphism u: source -> codomain with u(f(T)) = target(T) on
    random test points T of `domain`."""
    tests = _test_points(domain, count)
    images = [(f(T), target(T)) for T in tests]
    for iso in isomorphisms(source, codomain):
        if all(iso(a) == b for a, b in images):
            return iso
    raise VerificationFailed("no isomorphism matches the target map")


# ---------------------------------------------------------------------------
# degree and trace from the action on torsion


def _cheap_moduli(E: Curve, exclude: int, need: int):
    """Coprime prime powers m_i (not dividing exclude) with cheap E[m_i],
    whose product exceeds `need`."""
    cap = current().max_ext_degree
    cheap = current().cheap_ext_degree
    candidates = []
    for ell in _small_primes(200):
        if ell == E.p or exclude % ell == 0:
            continue
        # largest power of ell whose torsion is at the cheapest degree found
        best = None
        e = 1
        while ell ** e <= need * 4 + 4:
            try:
                d = E.torsion_degree(ell ** e, cap)
            except TorsionUnreachable:
                break
            if d > cheap:
                break
            best = (d, ell ** e)
            e += 1
        if best is not None:
            candidates.append(best)
    # prefer low extension degree, then larger modulus
    candidates.sort(key=lambda t: (t[0], -t[1]))
    chosen, prod = [], 1
    for d, m in candidates:
        chosen.append(m)
        prod *= m
        if prod > need:
            return chosen
    raise TorsionUnreachable("not enough cheap torsion to pin down the value")


_PRIMES_CACHE: list[int] = []


def _small_primes(bound: int) -> list[int]:
    global _PRIMES_CACHE
    if not _PRIMES_CACHE or _PRIMES_CACHE[-1] < bound:
        from .arith.integers import primes_up_to
        _PRIMES_CACHE = primes_up_to(bound)
    return [p for p in _PRIMES_CACHE if p <= bound]


def action_matrix(f, m: int):
    """Matrix of f on E[m] in the cached bases: columns are coordinates of
    f(P), f(Q) in the codomain basis."""
    B1 = torsion_basis(f.domain, m)
    B2 = torsion_basis(f.codomain, m)
    a, c = B2.coordinates(f(B1.P))
    b, d = B2.coordinates(f(B1.Q))
    return [[a, b], [c, d]], B1, B2


def degree_mod(f, m: int) -> int:
    """deg f mod m from e'(f P, f Q) = e(P, Q)^deg."""
    M, B1, B2 = action_matrix(f, m)
    det = (M[0][0] * M[1][1] - M[0][1] * M[1][0]) % m
    if f.domain == f.codomain:
        return det
    # bases differ: compare the two pairings
    z1 = B1.zeta
    z2 = B2.zeta
    k = None
    cur = z2.ctx.one
    target = embed(z1, z2.ctx) if z1.ctx.k <= z2.ctx.k else z1
    for i in range(m):
        if cur == target:
            k = i
            break
        cur = cur * z2
    # e2(fP, fQ) = z2^det = e1(P, Q)^deg = z2^(k deg)
    return det * pow(k, -1, m) % m


def degree_from_torsion(f, bound: int) -> int:
    moduli = _cheap_moduli(f.domain, 1, bound + 1)
    r, M = crt([(degree_mod(f, m), m) for m in moduli])
    return r


def trace_from_torsion(f, bound: int) -> int:
    if f.domain != f.codomain:
        raise ValueError("trace of a non-endomorphism")
    moduli = _cheap_moduli(f.domain, 1, 2 * bound + 1)
    res = []
    for m in moduli:
        M, _, _ = action_matrix(f, m)
        res.append(((M[0][0] + M[1][1]) % m, m))
    r, M = crt(res)
    return r if r <= M // 2 else r - M


# ---------------------------------------------------------------------------
# kernels


class KernelDescription:
    """Generators of a finite subgroup, grouped by prime."""

    def __init__(self, curve: Curve, parts: dict, size: int):
        self.curve = curve
        self.parts = parts  # ell -> list of (point, order)
        self.size = size

    def order(self) -> int:
        return self.size

    def __repr__(self):
        return f"Kernel({ {ell: [o for _, o in g] for ell, g in self.parts.items()} })"


def smooth_check(n: int, p: int):
    cap = current().prime_cap
    for ell, _ in factor(n):
        if ell == p:
            raise NotSeparable(f"degree {n} is divisible by the characteristic")
        if ell > cap:
            raise NotSmooth(f"degree {n} has prime factor {ell} > {cap}")


def kernel_part(f, ell: int, v: int) -> list[tuple[Point, int]]:
    """Generators of the ell-primary part of ker f, known to have order ell^v."""
    E = f.domain
    cap = current().max_ext_degree
    target = ell ** v
    for k in range((v + 1) // 2, v + 1):
        m = ell ** k
        d = E.torsion_degree(m)
        if d > cap:
            raise TorsionUnreachable(f"E[{m}] lies in degree {d} > {cap}")
        M, B1, _ = action_matrix(f, m)
        image = subgroup_order([[M[0][0], M[1][0]], [M[0][1], M[1][1]]], m)
        size = m * m // image
        if size == target:
            gens = []
            for a, b in kernel_2x2(M, m):
                P = B1.combine(a, b)
                if P.is_zero():
                    continue
                gens.append((P, P.order(m)))
            return gens
        if size > target:
            raise VerificationFailed("kernel larger than the degree allows")
    raise VerificationFailed(f"could not recover the {ell}-part of the kernel")


def kernel_of(f, primes_only=None) -> KernelDescription:
    """Kernel of a separable isogeny with smooth degree, prime by prime."""
    deg = f.degree()
    smooth_check(deg, f.domain.p)
    parts = {}
    size = 1
    for ell, v in factor(deg) if deg > 1 else []:
        if primes_only is not None and ell not in primes_only:
            continue
        parts[ell] = kernel_part(f, ell, v)
        size *= ell ** v
    return KernelDescription(f.domain, parts, size)


def chain_from_kernel(E: Curve, kernel: KernelDescription) -> IsogenyChain:
    """Velu chain with the given kernel, one prime-degree step at a time."""
    gens = [(ell, P, o) for ell in sorted(kernel.parts) for P, o in kernel.parts[ell]]
    steps: list[Step] = []
    cur = E
    for ell in sorted(kernel.parts):
        while True:
            mine = [(i, P, o) for i, (l2, P, o) in enumerate(gens) if l2 == ell and o > 1]
            if not mine:
                break
            i, G, o = max(mine, key=lambda t: (t[2], -t[0]))
            K = G * (o // ell)
            step = VeluStep(cur, K, ell)
            steps.append(step)
            cur = step.codomain
            new = []
            for l2, P, o2 in gens:
                Q = step(P)
                if o2 > 1:
                    o2 = Q.order(o2)
                new.append((l2, Q, o2))
            gens = new
    return IsogenyChain(steps, E)


def realise(f, count: int = 3) -> IsogenyChain:
    """A Velu chain followed by an isomorphism that agrees with f pointwise."""
    K = kernel_of(f)
    chain = chain_from_kernel(f.domain, K)
    iso = fit_isomorphism(chain, f, chain.codomain, f.codomain, f.domain, count)
    steps = chain.steps + ([] if iso.is_identity() and chain.codomain == f.codomain else [IsoStep(iso)])
    return IsogenyChain(steps, f.domain)


def random_chain(E: Curve, ells: list[int], rng: random.Random) -> IsogenyChain:
    """Chain of Velu steps of the given prime degrees with random kernels."""
    steps = []
    cur = E
    for ell in ells:
        B = torsion_basis(cur, ell)
        while True:
            a, b = rng.randrange(ell), rng.randrange(ell)
            if a or b:
                break
        if a == 0:
            K = B.Q
        else:
            K = B.P + B.Q * (b * pow(a, -1, ell) % ell)
        st = VeluStep(cur, K, ell)
        steps.append(st)
        cur = st.codomain
    return IsogenyChain(steps, E)
