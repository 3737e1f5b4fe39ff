"""Finite fields F_{p^k} = F_p[x]/(m(x)) with compatible embeddings.

Elements are coefficient tuples, constant term first. The defining
polynomial of F_{p^k} is the lexicographically smallest monic irreducible
of degree k (coefficients read constant term first). Every field above
F_{p^2} carries a fixed embedding of F_{p^2}, and embeddings between
intermediate fields are chosen compatibly with it, so points can be moved
between extension degrees without ambiguity.
"""
from __future__ import annotations

import itertools
import math
import random
from functools import lru_cache

from ..errors import NoRoot, NotInSubfield
from .integers import factor, is_prime
from .modlin import solve_mod_p

# ---------------------------------------------------------------------------
# Polynomials over F_p (lists of ints, constant term first), used only to
# find defining polynomials and to invert field elements.


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [x % p for x in out]


def _pmulmod(a, b, m, p):
    return _pmod(_pmul(a, b, p), m, p)


def _ppowmod(a, e, m, p):
    result = [1]
    base = _pmod(a, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _is_irreducible(m: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    k = len(m) - 1
    x = [0, 1]
    for q, _ in factor(k):
        h = _ppowmod(x, p ** (k // q), m, p)
        if len(_pgcd(m, _psub(h, x, p), p)) != 1:
            return False
    return _psub(_ppowmod(x, p ** k, m, p), _pmod(x, m, p), p) == []


@lru_cache(maxsize=None)
def defining_polynomial(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p."""
    if k == 1:
        return (0, 1)
    # a zero constant term is never irreducible, so start the scan at 1
    for tail in itertools.product(range(1, p), *[range(p)] * (k - 1)):
        m = list(tail) + [1]
        if _is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------


class FieldContext:
    """The field F_{p^k}."""

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.k = k
        self.order = p ** k
        self.modulus = defining_polynomial(p, k)
        self.zero = FieldElement(self, (0,) * k)
        self.one = FieldElement(self, (1,) + (0,) * (k - 1))
        self._frob = None
        self._nonresidue = None
        # x^2 = -m1 x - m0 for the quadratic case
        if k == 2:
            self._m0, self._m1 = self.modulus[0], self.modulus[1]

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    def __reduce__(self):
        return (get_field, (self.p, self.k))

    # -- constructors
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.ctx is self:
                return value
            return embed(value, self)
        if isinstance(value, int):
            return FieldElement(self, (value % self.p,) + (0,) * (self.k - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.k:
            raise ValueError("too many coefficients")
        return FieldElement(self, tuple(coeffs) + (0,) * (self.k - len(coeffs)))

    def gen(self) -> "FieldElement":
        if self.k == 1:
            return self(-self.modulus[0])
        return self([0, 1])

    def random(self, rng: random.Random) -> "FieldElement":
        return FieldElement(self, tuple(rng.randrange(self.p) for _ in range(self.k)))

    def elements(self):
        """All elements in lexicographic order of coefficient tuples."""
        for c in itertools.product(range(self.p), repeat=self.k):
            yield FieldElement(self, c)

    # -- raw arithmetic on coefficient tuples
    def _mul(self, a: tuple, b: tuple) -> tuple:
        p = self.p
        k = self.k
        if k == 2:
            a0, a1 = a
            b0, b1 = b
            hi = a1 * b1
            return ((a0 * b0 - hi * self._m0) % p, (a0 * b1 + a1 * b0 - hi * self._m1) % p)
        if k == 1:
            return (a[0] * b[0] % p,)
        out = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        m = self.modulus
        for i in range(2 * k - 2, k - 1, -1):
            c = out[i] % p
            if c:
                base = i - k
                for j in range(k):
                    out[base + j] -= c * m[j]
        return tuple(x % p for x in out[:k])

    def _inv(self, a: tuple) -> tuple:
        p = self.p
        if self.k == 1:
            if a[0] == 0:
                raise ZeroDivisionError("inverse of zero")
            return (pow(a[0], -1, p),)
        if self.k == 2:
            a0, a1 = a
            n = (a0 * a0 - self._m1 * a0 * a1 + self._m0 * a1 * a1) % p
            if n == 0:
                raise ZeroDivisionError("inverse of zero")
            ni = pow(n, -1, p)
            return ((a0 - self._m1 * a1) * ni % p, (-a1) * ni % p)
        # extended Euclid in F_p[x]
        r0, r1 = list(self.modulus), _trim(list(a))
        if not r1:
            raise ZeroDivisionError("inverse of zero")
        s0, s1 = [], [1]
        while len(r1) > 1:
            inv = pow(r1[-1], -1, p)
            q = [0] * (len(r0) - len(r1) + 1)
            r = list(r0)
            while len(r) >= len(r1):
                c = r[-1] * inv % p
                shift = len(r) - len(r1)
                q[shift] = c
                for i, y in enumerate(r1):
                    r[shift + i] = (r[shift + i] - c * y) % p
                _trim(r)
                if not r:
                    break
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        c = pow(r1[0], -1, p)
        out = [x * c % p for x in s1] + [0] * self.k
        return tuple(out[: self.k])

    def frobenius_matrix(self):
        """Columns are the images of x^i under x -> x^p."""
        if self._frob is None:
            m = list(self.modulus)
            cols = []
            xp = _ppowmod([0, 1], self.p, m, self.p)
            cur = [1]
            for _ in range(self.k):
                cols.append(tuple(cur + [0] * (self.k - len(cur))))
                cur = _pmulmod(cur, xp, m, self.p)
            self._frob = cols
        return self._frob

    def nonresidue(self) -> "FieldElement":
        if self._nonresidue is None:
            for z in self.elements():
                if not z.is_zero() and not z.is_square():
                    self._nonresidue = z
                    break
        return self._nonresidue


class FieldElement:
    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldContext, c: tuple):
        self.ctx = ctx
        self.c = c

    # -- coercion helper
    def _other(self, b):
        if isinstance(b, FieldElement):
            if b.ctx is self.ctx:
                return b.c
            return self.ctx(b).c
        if isinstance(b, int):
            return (b % self.ctx.p,) + (0,) * (self.ctx.k - 1)
        return NotImplemented

    def __add__(self, b):
        o = self._other(b)
        if o is NotImplemented:
            return o
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((x + y) % p for x, y in zip(self.c, o)))

    __radd__ = __add__

    def __sub__(self, b):
        o = self._other(b)
        if o is NotImplemented:
            return o
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((x - y) % p for x, y in zip(self.c, o)))

    def __rsub__(self, b):
        o = self._other(b)
        if o is NotImplemented:
            return o
        p = self.ctx.p
        return FieldElement(self.ctx, tuple((y - x) % p for x, y in zip(self.c, o)))

    def __neg__(self):
        p = self.ctx.p
        return FieldElement(self.ctx, tuple(-x % p for x in self.c))

    def __mul__(self, b):
        if isinstance(b, int):
            p = self.ctx.p
            return FieldElement(self.ctx, tuple(x * b % p for x in self.c))
        o = self._other(b)
        if o is NotImplemented:
            return o
        return FieldElement(self.ctx, self.ctx._mul(self.c, o))

    __rmul__ = __mul__

    def __truediv__(self, b):
        o = self._other(b)
        if o is NotImplemented:
            return o
        return FieldElement(self.ctx, self.ctx._mul(self.c, self.ctx._inv(o)))

    def __rtruediv__(self, b):
        o = self._other(b)
        if o is NotImplemented:
            return o
        return FieldElement(self.ctx, self.ctx._mul(o, self.ctx._inv(self.c)))

    def inverse(self):
        return FieldElement(self.ctx, self.ctx._inv(self.c))

    def __pow__(self, e: int):
        ctx = self.ctx
        if e < 0:
            return self.inverse() ** (-e)
        result = ctx.one.c
        base = self.c
        while e:
            if e & 1:
                result = ctx._mul(result, base)
            e >>= 1
            if e:
                base = ctx._mul(base, base)
        return FieldElement(ctx, result)

    def square(self):
        return FieldElement(self.ctx, self.ctx._mul(self.c, self.c))

    def __eq__(self, b):
        if isinstance(b, FieldElement):
            if b.ctx is self.ctx:
                return self.c == b.c
            if b.ctx.p != self.ctx.p:
                return False
            big, small = (self, b) if self.ctx.k >= b.ctx.k else (b, self)
            if big.ctx.k % small.ctx.k:
                return False
            return big.c == embed(small, big.ctx).c
        if isinstance(b, int):
            return self.c == self._other(b)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.k, self.c))

    def __lt__(self, b):
        return self.c < b.c

    def __bool__(self):
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def __repr__(self):
        if self.ctx.k == 1:
            return str(self.c[0])
        terms = []
        for i, x in enumerate(self.c):
            if x:
                terms.append(str(x) if i == 0 else (f"{x}*z" if i == 1 else f"{x}*z^{i}"))
        return " + ".join(reversed(terms)) if terms else "0"

    def to_list(self) -> list[int]:
        return list(self.c)

    # -- structure
    def frobenius(self, power: int = 1):
        ctx = self.ctx
        if ctx.k == 1:
            return self
        cols = ctx.frobenius_matrix()
        p = ctx.p
        c = self.c
        for _ in range(power % ctx.k):
            out = [0] * ctx.k
            for ci, col in zip(c, cols):
                if ci:
                    for j, y in enumerate(col):
                        out[j] += ci * y
            c = tuple(x % p for x in out)
        return FieldElement(ctx, c)

    def norm_to_prime_field(self) -> int:
        ctx = self.ctx
        acc = self
        cur = self
        for _ in range(ctx.k - 1):
            cur = cur.frobenius()
            acc = acc * cur
        return acc.c[0]

    def is_square(self) -> bool:
        if self.is_zero():
            return True
        p = self.ctx.p
        if p == 2:
            return True
        n = self.norm_to_prime_field()
        return pow(n, (p - 1) // 2, p) == 1

    def multiplicative_order(self) -> int:
        q1 = self.ctx.order - 1
        order = q1
        for ell, e in factor(q1):
            for _ in range(e):
                if self ** (order // ell) == 1:
                    order //= ell
                else:
                    break
        return order

    def in_subfield_degree(self) -> int:
        """Smallest k' dividing k with self in F_{p^k'}."""
        ctx = self.ctx
        for d in sorted(d for d in range(1, ctx.k + 1) if ctx.k % d == 0):
            if self.frobenius(d) == self:
                return d
        return ctx.k


@lru_cache(maxsize=None)
def get_field(p: int, k: int) -> FieldContext:
    return FieldContext(p, k)


def sqrt(a: FieldElement) -> FieldElement:
    """Square root of a; of the two roots returns the lexicographically smaller."""
    ctx = a.ctx
    if a.is_zero():
        return a
    if not a.is_square():
        raise NoRoot(f"{a} is not a square in {ctx}")
    q = ctx.order
    if q % 4 == 3:
        r = a ** ((q + 1) // 4)
    else:
        s, t = 0, q - 1
        while t % 2 == 0:
            t //= 2
            s += 1
        z = ctx.nonresidue()
        m, c, tt, r = s, z ** t, a ** t, a ** ((t + 1) // 2)
        while tt != 1:
            i, t2 = 0, tt
            while t2 != 1:
                t2 = t2.square()
                i += 1
            b = c
            for _ in range(m - i - 1):
                b = b.square()
            m, c = i, b.square()
            tt, r = tt * c, r * b
    r2 = -r
    return r if r.c <= r2.c else r2


# ---------------------------------------------------------------------------
# Polynomials over a FieldContext: lists of FieldElements, constant first.


class Poly:
    """Dense univariate polynomial over a finite field."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldContext, coeffs):
        self.ctx = ctx
        c = [ctx(x) for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        self.c = c

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __repr__(self):
        return f"Poly({self.c})"

    def __call__(self, x):
        acc = self.ctx.zero if isinstance(x, FieldElement) and x.ctx is self.ctx else None
        if acc is None:
            # evaluate in the field of x
            acc = x.ctx.zero
            for a in reversed(self.c):
                acc = acc * x + x.ctx(a)
            return acc
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def __add__(self, o):
        n = max(len(self.c), len(o.c))
        z = self.ctx.zero
        return Poly(self.ctx, [(self.c[i] if i < len(self.c) else z) + (o.c[i] if i < len(o.c) else z) for i in range(n)])

    def __sub__(self, o):
        n = max(len(self.c), len(o.c))
        z = self.ctx.zero
        return Poly(self.ctx, [(self.c[i] if i < len(self.c) else z) - (o.c[i] if i < len(o.c) else z) for i in range(n)])

    def __neg__(self):
        return Poly(self.ctx, [-a for a in self.c])

    def __mul__(self, o):
        if not isinstance(o, Poly):
            o = self.ctx(o)
            return Poly(self.ctx, [a * o for a in self.c])
        if not self.c or not o.c:
            return Poly(self.ctx, [])
        out = [self.ctx.zero] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    out[i + j] = out[i + j] + a * b
        return Poly(self.ctx, out)

    __rmul__ = __mul__

    def __eq__(self, o):
        return isinstance(o, Poly) and [x.c for x in self.c] == [x.c for x in o.c]

    def derivative(self):
        return Poly(self.ctx, [a * i for i, a in enumerate(self.c)][1:])

    def monic(self):
        inv = self.c[-1].inverse()
        return Poly(self.ctx, [a * inv for a in self.c])

    def divmod(self, o):
        if not o.c:
            raise ZeroDivisionError
        r = list(self.c)
        inv = o.c[-1].inverse()
        dq = len(r) - len(o.c)
        if dq < 0:
            return Poly(self.ctx, []), self
        q = [self.ctx.zero] * (dq + 1)
        for i in range(dq, -1, -1):
            coef = r[i + len(o.c) - 1] * inv
            q[i] = coef
            if coef:
                for j, b in enumerate(o.c):
                    r[i + j] = r[i + j] - coef * b
        return Poly(self.ctx, q), Poly(self.ctx, r[: len(o.c) - 1])

    def __mod__(self, o):
        return self.divmod(o)[1]

    def __floordiv__(self, o):
        return self.divmod(o)[0]

    def powmod(self, e: int, m: "Poly"):
        result = Poly(self.ctx, [1])
        base = self % m
        while e:
            if e & 1:
                result = (result * base) % m
            e >>= 1
            if e:
                base = (base * base) % m
        return result

    def gcd(self, o):
        a, b = self, o
        while b.c:
            a, b = b, a % b
        return a.monic() if a.c else a


def poly_roots(f: Poly) -> list[FieldElement]:
    """Distinct roots of f in its coefficient field, sorted lexicographically."""
    ctx = f.ctx
    if f.degree < 1:
        return []
    f = f.monic()
    x = Poly(ctx, [0, 1])
    g = f.gcd(x.powmod(ctx.order, f) - x)
    roots: list[FieldElement] = []
    _split(g, roots)
    return sorted(roots, key=lambda r: r.c)


def _split(g: Poly, out: list):
    ctx = g.ctx
    if g.degree == 0:
        return
    if g.degree == 1:
        out.append(-g.c[0] / g.c[1])
        return
    if ctx.p == 2:
        raise NotImplementedError("characteristic 2")
    e = (ctx.order - 1) // 2
    # Shifts come from a fixed-seed generator: sequential shifts can hit
    # symmetric root configurations many times in a row.
    rng = random.Random(g.degree * 1000003 + sum(sum(a.c) for a in g.c))
    for _ in range(200):
        shift = ctx.random(rng)
        h = Poly(ctx, [shift, 1]).powmod(e, g) - Poly(ctx, [1])
        d = g.gcd(h)
        if 0 < d.degree < g.degree:
            _split(d, out)
            _split(g // d, out)
            return
    raise AssertionError("equal-degree splitting failed")


# ---------------------------------------------------------------------------
# Embeddings between fields of the same characteristic.


class Embedding:
    """A field homomorphism F_{p^a} -> F_{p^b}, a | b."""

    def __init__(self, src: FieldContext, dst: FieldContext, image_of_gen: FieldElement):
        self.src = src
        self.dst = dst
        self.image = image_of_gen
        # columns: images of x^i
        cols = []
        cur = dst.one
        for _ in range(src.k):
            cols.append(cur.c)
            cur = cur * image_of_gen
        self.cols = cols
        self._solver = None

    def __call__(self, a: FieldElement) -> FieldElement:
        if a.ctx is not self.src:
            raise ValueError("element not in source field")
        p = self.dst.p
        out = [0] * self.dst.k
        for ci, col in zip(a.c, self.cols):
            if ci:
                for j, y in enumerate(col):
                    out[j] += ci * y
        return FieldElement(self.dst, tuple(x % p for x in out))

    def preimage(self, b: FieldElement) -> FieldElement:
        if b.ctx is not self.dst:
            b = self.dst(b)
        if self._solver is None:
            # Choose src.k independent rows once; solve the square system.
            a = [[self.cols[i][j] for i in range(self.src.k)] for j in range(self.dst.k)]
            rows = _independent_rows(a, self.src.p)
            inv = _invert_square([a[r] for r in rows], self.src.p)
            self._solver = (rows, inv)
        rows, inv = self._solver
        p = self.src.p
        rhs = [b.c[r] for r in rows]
        sol = tuple(sum(x * y for x, y in zip(row, rhs)) % p for row in inv)
        cand = FieldElement(self.src, sol)
        if self(cand).c != b.c:
            raise NotInSubfield(f"{b} is not in the image of {self.src}")
        return cand


def _independent_rows(a: list[list[int]], p: int) -> list[int]:
    chosen: list[int] = []
    basis: list[list[int]] = []
    for idx, row in enumerate(a):
        v = [x % p for x in row]
        for brow, piv in basis:
            if v[piv]:
                f = v[piv]
                v = [(x - f * y) % p for x, y in zip(v, brow)]
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            continue
        inv = pow(v[piv], -1, p)
        v = [x * inv % p for x in v]
        basis.append((v, piv))
        chosen.append(idx)
        if len(chosen) == len(a[0]):
            break
    return chosen


def _invert_square(m: list[list[int]], p: int) -> list[list[int]]:
    n = len(m)
    cols = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        cols.append(solve_mod_p(m, e, p))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@lru_cache(maxsize=None)
def _embedding(p: int, a: int, b: int) -> Embedding:
    src, dst = get_field(p, a), get_field(p, b)
    if b % a:
        raise ValueError(f"F_{p}^{a} does not embed in F_{p}^{b}")
    if a == 1:
        return Embedding(src, dst, dst.zero)
    if a == b:
        return Embedding(src, dst, dst.gen())
    roots = poly_roots(Poly(dst, [dst(c) for c in src.modulus]))
    if a == 2 or b % 2 or a % 2:
        return Embedding(src, dst, roots[0])
    # compatibility with the fixed embedding of F_{p^2}
    base_in_src = _embedding(p, 2, a).image
    base_in_dst = _embedding(p, 2, b).image
    poly = Poly(dst, [dst(c) for c in base_in_src.c])
    for r in roots:
        if poly(r) == base_in_dst:
            return Embedding(src, dst, r)
    raise AssertionError("no compatible embedding")


def embedding(src: FieldContext, dst: FieldContext) -> Embedding:
    return _embedding(src.p, src.k, dst.k)


def embed(a: FieldElement, dst: FieldContext) -> FieldElement:
    if a.ctx is dst:
        return a
    if a.ctx.k == 1:
        return dst(a.c[0])
    if dst.k % a.ctx.k:
        # try to bring a down first
        d = a.in_subfield_degree()
        if dst.k % d:
            raise NotInSubfield(f"{a} does not lie in a subfield of {dst}")
        a = descend(a, get_field(a.ctx.p, d))
    return _embedding(a.ctx.p, a.ctx.k, dst.k)(a)


def descend(a: FieldElement, dst: FieldContext) -> FieldElement:
    if a.ctx is dst:
        return a
    if dst.k == 1:
        if any(a.c[1:]):
            # a might be a prime-field element in a nontrivial basis: check frobenius
            if a.frobenius() != a:
                raise NotInSubfield(f"{a} not in F_{dst.p}")
            return dst(_embedding(a.ctx.p, 1, a.ctx.k).preimage(a).c[0])
        return dst(a.c[0])
    return _embedding(a.ctx.p, dst.k, a.ctx.k).preimage(a)


def common_field(p: int, *ks: int) -> FieldContext:
    k = 1
    for x in ks:
        k = k * x // math.gcd(k, x)
    return get_field(p, k)
