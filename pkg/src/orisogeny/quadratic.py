"""Imaginary quadratic orders, binary quadratic forms and class groups.

An ideal class is represented by a primitive positive definite form
(a, b, c) of discriminant b^2 - 4ac. The form (a, b, c) stands for the ideal
a Z + ((-b + sqrt(D)) / 2) Z, so that sqrt(D) = b modulo that ideal.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

from .arith.integers import factor, kronecker, primes_up_to, squarefree_part, xgcd
from .errors import ConductorClash, DiscCap, InvalidForm, Inert

DISC_CAP = 10 ** 6


class QuadOrder:
    """The order of discriminant disc < 0, generated by
    omega = (t + sqrt(disc)) / 2 with t = disc mod 2, so that
    omega^2 - t omega + n = 0."""

    def __init__(self, disc: int):
        if disc >= 0 or disc % 4 not in (0, 1):
            raise InvalidForm(f"{disc} is not a negative discriminant")
        self.disc = disc
        d, _ = squarefree_part(disc)
        self.fundamental_disc = d if d % 4 == 1 else 4 * d
        self.conductor = math.isqrt(disc // self.fundamental_disc)
        self.t_omega = disc % 2
        self.n_omega = (self.t_omega - disc) // 4

    def __eq__(self, other):
        return isinstance(other, QuadOrder) and other.disc == self.disc

    def __hash__(self):
        return hash(("order", self.disc))

    def __repr__(self):
        return f"QuadOrder({self.disc})"

    def is_maximal(self) -> bool:
        return self.conductor == 1

    def conductor_primes(self) -> list[int]:
        return [ell for ell, _ in factor(self.conductor)] if self.conductor > 1 else []

    def suborder(self, c: int) -> "QuadOrder":
        return QuadOrder(self.disc * c * c)

    def superorder(self, c: int) -> "QuadOrder":
        if self.conductor % c:
            raise ValueError(f"{c} does not divide the conductor {self.conductor}")
        return QuadOrder(self.disc // (c * c))

    def maximal(self) -> "QuadOrder":
        return QuadOrder(self.fundamental_disc)

    def to_json(self):
        return {"disc": self.disc}


class QuadForm:
    """Binary quadratic form a x^2 + b xy + c y^2 with a > 0 and negative
    discriminant."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a: int, b: int, c: int):
        if a <= 0 or b * b - 4 * a * c >= 0:
            raise InvalidForm(f"({a}, {b}, {c}) is not positive definite")
        self.a, self.b, self.c = a, b, c

    @classmethod
    def from_ab(cls, a: int, b: int, disc: int) -> "QuadForm":
        num = b * b - disc
        if num % (4 * a):
            raise InvalidForm(f"no form ({a}, {b}, ?) of discriminant {disc}")
        return cls(a, b, num // (4 * a))

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def key(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def __eq__(self, other):
        return isinstance(other, QuadForm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return f"({self.a},{self.b},{self.c})"

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduced(self) -> "QuadForm":
        a, b, c = self.a, self.b, self.c
        while True:
            # bring b into (-a, a]
            if not (-a < b <= a):
                k = (a - b) // (2 * a)
                c = a * k * k + b * k + c
                b = b + 2 * a * k
            if a > c:
                a, b, c = c, -b, a
                continue
            break
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c).reduced()

    def conjugate(self) -> "QuadForm":
        """(a, -b, c) without reduction: the conjugate ideal."""
        return QuadForm(self.a, -self.b, self.c)

    def norm(self) -> int:
        return self.a

    def compose(self, other: "QuadForm") -> "QuadForm":
        return compose(self, other)

    __mul__ = compose

    def __pow__(self, e: int) -> "QuadForm":
        return power(self, e)

    def is_principal(self) -> bool:
        return self.reduced() == principal_form(self.disc)

    def to_json(self):
        return [self.a, self.b, self.c]

    @classmethod
    def from_json(cls, obj):
        return cls(*obj)


def principal_form(disc: int) -> QuadForm:
    t = disc % 2
    return QuadForm(1, t, (t - disc) // 4)


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Reduced representative of the product class (Shanks' composition)."""
    D = f.disc
    if g.disc != D:
        raise InvalidForm(f"discriminants differ: {D} and {g.disc}")
    if f.a > g.a:
        f, g = g, f
    a1, b1 = f.a, f.b
    a2, b2, c2 = g.a, g.b, g.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, v = xgcd(s, d)
        y2 = -v
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return QuadForm(a3, b3, c3).reduced()


def power(f: QuadForm, e: int) -> QuadForm:
    if e < 0:
        return power(f.inverse(), -e)
    result = principal_form(f.disc)
    base = f.reduced()
    while e:
        if e & 1:
            result = compose(result, base)
        base = compose(base, base)
        e >>= 1
    return result


def reduced_forms(disc: int) -> list[QuadForm]:
    """All primitive reduced forms of discriminant disc, sorted by (a, b)."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise InvalidForm(f"{disc} is not a negative discriminant")
    if -disc > DISC_CAP:
        raise DiscCap(f"|disc| = {-disc} exceeds {DISC_CAP}")
    out = []
    amax = math.isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = QuadForm(a, b, c)
            if f.is_reduced() and f.is_primitive():
                out.append(f)
    return out


def prime_form(O: QuadOrder, ell: int) -> QuadForm:
    """The form (ell, b, c) with b the smallest non-negative solution of
    b^2 = disc mod 4 ell; Inert when disc is a non-square mod ell."""
    if O.conductor % ell == 0:
        raise ConductorClash(f"{ell} divides the conductor {O.conductor}")
    if kronecker(O.disc, ell) == -1:
        raise Inert(f"{ell} is inert in the order of discriminant {O.disc}")
    for b in range(0, 2 * ell + 1):
        if (b * b - O.disc) % (4 * ell) == 0:
            return QuadForm.from_ab(ell, b, O.disc)
    raise Inert(f"no form of norm {ell}")  # pragma: no cover - excluded by the symbol


def prime_ideals(O: QuadOrder, ell: int) -> list[QuadForm]:
    """The prime ideals above ell as forms (ell, +-b, c); one if ramified."""
    f = prime_form(O, ell)
    g = QuadForm(ell, -f.b, f.c)
    if (f.b - g.b) % (2 * ell) == 0:
        return [f]
    return [f, g]


def cayley_generators(O: QuadOrder, x: int, allowed=None) -> list[QuadForm]:
    """Reduced forms of the classes of prime ideals of norm <= x coprime
    to the conductor, closed under inverses, one entry per class."""
    return [cls for cls, _ in generator_ideals(O, x, allowed)]


def generator_ideals(O: QuadOrder, x: int, allowed=None) -> list[tuple[QuadForm, QuadForm]]:
    """Pairs (class, prime ideal) for the Cayley generator set.

    Each class keeps the first prime ideal found for it, scanning primes in
    increasing order; `allowed` optionally restricts the primes used (for
    example to those whose torsion is cheap to reach). The principal class
    is dropped unless it is the only one."""
    seen: dict[QuadForm, QuadForm] = {}
    principal = principal_form(O.disc)
    for ell in primes_up_to(x):
        if allowed is not None and ell not in allowed:
            continue
        try:
            ideals = prime_ideals(O, ell)
        except (Inert, ConductorClash):
            continue
        for P in ideals:
            cls = P.reduced()
            if cls not in seen:
                seen[cls] = P
            inv = P.inverse()
            if inv not in seen:
                seen[inv] = P.conjugate()
    out = [(c, P) for c, P in seen.items() if c != principal]
    if not out and principal in seen:
        out = [(principal, seen[principal])]
    return out


def prime_factorisation(form: QuadForm) -> list[tuple[QuadForm, int]]:
    """Split the ideal of a primitive form into prime ideals (ell, b_ell).

    The ell-part of a Z + ((-b + sqrt D)/2) Z is the e-th power of the prime
    ideal (ell, b mod 2 ell) where ell^e exactly divides a."""
    D = form.disc
    out = []
    if form.a == 1:
        return out
    f = QuadOrder(D).conductor
    for ell, e in factor(form.a):
        if f % ell == 0:
            raise ConductorClash(f"norm {form.a} shares {ell} with the conductor {f}")
        b = form.b % (2 * ell)
        out.append((QuadForm.from_ab(ell, b, D), e))
    return out


class ClassGroup:
    """The class group of an order by enumeration of reduced forms."""

    def __init__(self, O: QuadOrder):
        self.order = O
        self.elements = reduced_forms(O.disc)
        self.index = {f: i for i, f in enumerate(self.elements)}
        self.identity = principal_form(O.disc)
        self._basis = None
        self._dlog = None

    @property
    def h(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, f):
        return f.reduced() in self.index

    def mul(self, f: QuadForm, g: QuadForm) -> QuadForm:
        return compose(f, g)

    def element_order(self, f: QuadForm) -> int:
        return _element_order(f.reduced())

    # -- decomposition ----------------------------------------------------

    def decomposition(self) -> list[tuple[QuadForm, int]]:
        """Basis [(b_1, n_1), ...] with Cl = direct sum of <b_i>, each n_i a
        prime power, listed prime by prime."""
        if self._basis is None:
            self._basis = self._decompose()
        return self._basis

    def _decompose(self):
        h = self.h
        basis: list[tuple[QuadForm, int]] = []
        for ell, e in factor(h) if h > 1 else []:
            cof = h // ell ** e
            sylow = sorted({power(g, cof) for g in self.elements})
            chosen: list[tuple[QuadForm, int]] = []
            while True:
                span = _span(chosen, self.identity)
                best = None
                for x in sylow:
                    k, y = 0, x
                    while y not in span:
                        y = compose(y, power(y, ell - 1))  # y^ell
                        k += 1
                    if best is None or k > best[0]:
                        best = (k, x, y)
                k, x, y = best
                if k == 0:
                    break
                q = ell ** k
                coeffs = span[y]
                adjust = self.identity
                for (b, _), c in zip(chosen, coeffs):
                    if c % q:
                        raise ArithmeticError("greedy decomposition failed")
                    adjust = compose(adjust, power(b, -(c // q)))
                chosen.append((compose(x, adjust), q))
            basis.extend(chosen)
        return basis

    def dlog(self, f: QuadForm) -> tuple[int, ...]:
        """Exponent vector of f in the decomposition basis."""
        if self._dlog is None:
            basis = self.decomposition()
            table = {}
            for vec in itertools.product(*[range(n) for _, n in basis]):
                g = self.identity
                for (b, _), x in zip(basis, vec):
                    g = compose(g, power(b, x))
                table[g] = vec
            self._dlog = table
        return self._dlog[f.reduced()]

    def from_vector(self, vec) -> QuadForm:
        g = self.identity
        for (b, n), x in zip(self.decomposition(), vec):
            g = compose(g, power(b, x % n))
        return g

    def word_for(self, f: QuadForm, gens: list[tuple[QuadForm, QuadForm]]):
        """Shortest word in the generator ideals whose product lies in the
        class of f, as a list of (prime ideal, exponent) pairs.

        Breadth-first search over the class group; ties resolved by the
        generator order, so the result is deterministic."""
        target = f.reduced()
        start = self.identity
        if target == start:
            return []
        prev = {start: None}
        frontier = [start]
        while frontier:
            nxt = []
            for g in frontier:
                for i, (cls, _) in enumerate(gens):
                    y = compose(g, cls)
                    if y in prev:
                        continue
                    prev[y] = (g, i)
                    if y == target:
                        word = []
                        cur = y
                        while prev[cur] is not None:
                            cur, j = prev[cur]
                            word.append(gens[j][1])
                        word.reverse()
                        return _collapse(word)
                    nxt.append(y)
            frontier = nxt
        raise ValueError(f"{f} is not in the span of the generators")

    def to_json(self):
        return {"disc": self.order.disc, "h": self.h,
                "elements": [f.to_json() for f in self.elements],
                "decomposition": [[b.to_json(), n] for b, n in self.decomposition()]}


def _collapse(word: list[QuadForm]) -> list[tuple[QuadForm, int]]:
    out: list[list] = []
    for P in word:
        if out and out[-1][0] == P:
            out[-1][1] += 1
        else:
            out.append([P, 1])
    return [(P, e) for P, e in out]


def _span(chosen, identity) -> dict:
    span = {identity: tuple(0 for _ in chosen)}
    for i, (b, n) in enumerate(chosen):
        new = {}
        for g, vec in span.items():
            y = g
            for x in range(n):
                new[y] = vec[:i] + (x,) + vec[i + 1:]
                y = compose(y, b)
        span = new
    return span


@lru_cache(maxsize=None)
def _element_order(f: QuadForm) -> int:
    one = principal_form(f.disc)
    g, k = f, 1
    while g != one:
        g = compose(g, f)
        k += 1
    return k


@lru_cache(maxsize=64)
def class_group(disc: int) -> ClassGroup:
    return ClassGroup(QuadOrder(disc))


def class_number(disc: int) -> int:
    return class_group(disc).h


def word_class(word) -> QuadForm:
    """Reduced form of the product of a word of (ideal, exponent) pairs."""
    it = iter(word)
    first = next(it, None)
    if first is None:
        raise ValueError("empty word has no discriminant")
    acc = power(first[0], first[1])
    for P, e in it:
        acc = compose(acc, power(P, e))
    return acc
