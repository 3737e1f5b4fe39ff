"""Integer arithmetic: primality, factoring, symbols, CRT, sums of squares."""
from __future__ import annotations

import math
from functools import reduce

from ..errors import InputTooLarge, NoRoot, NotCoprime

FACTOR_BOUND = 1 << 64

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, math.isqrt(p) + 1))]
# Deterministic Miller-Rabin witnesses, valid for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, flag in enumerate(sieve) if flag]


def next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


def _pollard_brent(n: int) -> int:
    # Deterministic sequence of constants keeps factor() reproducible.
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = 2
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")


def factor(n: int, bound: int = FACTOR_BOUND) -> list[tuple[int, int]]:
    """Prime factorisation of |n| as a sorted list of (prime, exponent)."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    if n > bound:
        raise InputTooLarge(f"{n} exceeds factoring bound {bound}")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m)
        stack += [d, m // d]
    return sorted(out.items())


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factor(n)]


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factor(n):
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def squarefree_part(n: int) -> tuple[int, int]:
    """Write n = s * f^2 with s squarefree (sign kept on s). Returns (s, f)."""
    sign = -1 if n < 0 else 1
    s, f = 1, 1
    for p, e in factor(n):
        s *= p ** (e % 2)
        f *= p ** (e // 2)
    return sign * s, f


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def crt(pairs: list[tuple[int, int]]) -> tuple[int, int]:
    """Combine residues (r_i mod m_i) with pairwise coprime moduli."""
    r, m = 0, 1
    for ri, mi in pairs:
        if math.gcd(m, mi) != 1:
            raise NotCoprime(f"moduli {m} and {mi} share a factor")
        g, u, _ = xgcd(m, mi)
        r = (r + (ri - r) * u * m) % (m * mi)
        m *= mi
    return r % m, m


def sqrt_mod_prime(a: int, p: int) -> int:
    """Smallest non-negative square root of a modulo an odd prime p."""
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        raise NoRoot(f"{a} is not a square mod {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def four_squares(m: int) -> tuple[int, int, int, int]:
    """Lexicographically smallest (m1, m2, m3, m4), m1 >= m2 >= m3 >= m4 >= 0,
    with m1^2 + m2^2 + m3^2 + m4^2 = m."""
    if m < 0:
        raise ValueError("negative input")
    if m == 0:
        return (0, 0, 0, 0)

    def ceil_sqrt(x: int) -> int:
        r = math.isqrt(x)
        return r if r * r == x else r + 1

    for m1 in range(ceil_sqrt((m + 3) // 4), math.isqrt(m) + 1):
        r1 = m - m1 * m1
        for m2 in range(ceil_sqrt((r1 + 2) // 3), min(m1, math.isqrt(r1)) + 1):
            r2 = r1 - m2 * m2
            for m3 in range(ceil_sqrt((r2 + 1) // 2), min(m2, math.isqrt(r2)) + 1):
                r3 = r2 - m3 * m3
                if _is_square(r3) and math.isqrt(r3) <= m3:
                    return (m1, m2, m3, math.isqrt(r3))
    raise AssertionError("unreachable: every integer is a sum of four squares")


def discrete_log(target, base, order: int, mul, power, one):
    """Solve base^x = target in a cyclic group of the given order.

    Group operations are passed in so this works for F_q^* and for
    subgroups of curve points alike. Pohlig-Hellman plus baby-step giant-step.
    """
    residues = []
    for ell, e in factor(order):
        q = ell ** e
        cof = order // q
        g = power(base, cof)
        h = power(target, cof)
        gamma = power(g, ell ** (e - 1))
        x = 0
        for k in range(e):
            hk = power(mul(power(g, -x), h), ell ** (e - 1 - k))
            dk = _bsgs(gamma, hk, ell, mul, power, one)
            if dk is None:
                raise NoRoot("target not in the subgroup generated by base")
            x += dk * ell ** k
        residues.append((x, q))
    x, _ = crt(residues) if residues else (0, 1)
    if power(base, x) != target:
        raise NoRoot("target not in the subgroup generated by base")
    return x


def _bsgs(g, h, n: int, mul, power, one):
    m = math.isqrt(n) + 1
    table = {}
    cur = one
    for j in range(m):
        table.setdefault(cur, j)
        cur = mul(cur, g)
    step = power(g, -m)
    cur = h
    for i in range(m + 1):
        if cur in table:
            return (i * m + table[cur]) % n
        cur = mul(cur, step)
    return None


def prod(xs) -> int:
    return reduce(lambda a, b: a * b, xs, 1)
