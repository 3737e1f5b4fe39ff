"""Vectorisation by meet-in-the-middle random walks, and a toy hidden shift.

Given primitively O-oriented X and X', phase 1 tabulates keys of w * X for
random words w of fixed length in the smooth prime ideals until the table
holds ceil(sqrt h) classes; phase 2 walks from X' until a key collides. A
collision a * X' = b * X gives X' = (conj(a) b) * X.
"""
from __future__ import annotations

import math
import random

from .arith.integers import factor, kronecker, primes_up_to
from .config import current
from .curve import stable_seed
from .errors import (ConductorClash, GroupTooLarge, Inert, InvalidOrientation, NoShift, NoSolution, NoSplitPrimes,
                     Timeout, VerificationFailed)
from .orientation import (OrientedCurve, action_word, action_word_chain, cheap_primes, enc,
                          from_endomorphism, prime_step, primitivise, twist)
from .quadratic import class_group, generator_ideals, prime_ideals, principal_form, word_class

HIDDEN_SHIFT_CAP = 200


def smooth_bound(disc: int, epsilon: float = 1.0) -> int:
    """ceil(log|disc|^(2 + epsilon)), natural logarithm."""
    return math.ceil(math.log(abs(disc)) ** (2 + epsilon))


def walk_length(disc: int) -> int:
    return max(1, math.ceil(math.log(abs(disc))))


class ActionCache:
    """Memo of single prime steps keyed by (ClassKey, prime ideal).

    Two K-isomorphic oriented curves give K-isomorphic images under a prime
    ideal, so any stored representative has the right key."""

    def __init__(self):
        self.table: dict = {}
        self.hits = 0
        self.misses = 0

    def step(self, X: OrientedCurve, key, ideal, verify):
        k = (key, ideal.key())
        hit = self.table.get(k)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        Y, _ = prime_step(X, ideal, verify)
        out = (Y, enc(Y))
        self.table[k] = out
        return out

    def apply(self, X: OrientedCurve, word, verify=None):
        """(w * X, its key) for a list of prime ideals applied left to right."""
        cur, key = X, enc(X)
        for ideal in word:
            cur, key = self.step(cur, key, ideal, verify)
        return cur, key


def _collapse(word):
    out = []
    for P in word:
        if out and out[-1][0] == P:
            out[-1] = (P, out[-1][1] + 1)
        else:
            out.append((P, 1))
    return out


class MitmTable:
    def __init__(self, target_size: int):
        self.entries: dict = {}
        self.target_size = target_size

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries

    def __getitem__(self, key):
        return self.entries[key]

    def full(self) -> bool:
        return len(self.entries) >= self.target_size

    def insert(self, key, word) -> bool:
        """Insert if absent; the first writer wins."""
        if key in self.entries:
            return False
        self.entries[key] = list(word)
        return True


class VectorisationResult:
    def __init__(self, word, disc: int, smooth_bound: int, twisted: bool = False, transcript=None):
        self.word = list(word)          # prime ideals, applied left to right
        self.disc = disc
        self.smooth_bound = smooth_bound
        self.twisted = twisted
        self.transcript = transcript or {}

    @property
    def ideal(self):
        """Reduced form of the class of the word."""
        if not self.word:
            return principal_form(self.disc)
        return word_class([(P, 1) for P in self.word])

    @property
    def prime_factor_count(self) -> int:
        return len(self.word)

    @property
    def norm(self) -> int:
        n = 1
        for P in self.word:
            n *= P.a
        return n

    def collapsed(self):
        return _collapse(self.word)

    def to_json(self):
        return {"ideal": self.ideal.to_json(), "word": [P.to_json() for P in self.word],
                "smooth_bound": self.smooth_bound, "prime_factor_count": self.prime_factor_count,
                "norm": self.norm, "twisted": self.twisted, "transcript": self.transcript}


def _generators(X: OrientedCurve, x: int):
    """Every prime ideal of norm <= x over the cheap primes.

    Classes are not deduplicated: a principal prime ideal keeps walks of a
    fixed length from being trapped in a coset of an index-2 subgroup."""
    allowed = set(cheap_primes(X.curve, X.order))
    gens = []
    for ell in primes_up_to(x):
        if ell not in allowed:
            continue
        try:
            gens.extend(prime_ideals(X.order, ell))
        except (Inert, ConductorClash):
            continue
    if not gens:
        raise NoSplitPrimes(f"no usable split prime ideal of norm <= {x} for disc {X.order.disc}")
    return gens


def _random_word(gens, length: int, rng: random.Random):
    # sequential uniform choice: uniform over words, not over exponent vectors
    return [gens[rng.randrange(len(gens))] for _ in range(length)]


def _check_pair(X: OrientedCurve, X2: OrientedCurve):
    if X.order.disc != X2.order.disc:
        raise InvalidOrientation("the two curves are oriented by different orders")
    if X.curve.p != X2.curve.p:
        raise InvalidOrientation("the two curves live over different fields")


def _phase_one(X, gens, length, target, rng, cache, verify, stats):
    T = MitmTable(target)
    T.insert(enc(X), [])
    budget = 64 * target * target + 256
    drawn = 0
    while not T.full():
        if drawn >= budget:
            raise Timeout(f"table stuck at {len(T)} of {target} entries")
        w = _random_word(gens, length, rng)
        drawn += 1
        stats["phase1_words"] += 1
        _, key = cache.apply(X, w, verify)
        if T.insert(key, w) and verify and len(T) % 8 == 0:
            # spot check: the stored word applied without the memo
            if enc(action_word(X, _collapse(w), verify)) != key:
                raise VerificationFailed("table entry does not reproduce its key")
    return T


def _conjugate_word(word):
    return [P.conjugate() for P in reversed(word)]


def _search(bases, X2, epsilon, seed, max_attempts, verify):
    """Shared driver: one table per base, a single phase-2 walk from X2
    checked against all tables in turn."""
    verify = current().verify if verify is None else verify
    X = bases[0][1]
    disc = X.order.disc
    x = smooth_bound(disc, epsilon)
    gens = _generators(X, x)
    length = walk_length(disc)
    h = class_group(disc).h
    target = math.ceil(math.sqrt(h))
    rng = random.Random(stable_seed("vectorise", seed, disc))
    cache = ActionCache()
    stats = {"phase1_words": 0, "phase2_words": 0, "walk_length": length,
             "generators": [P.to_json() for P in gens], "table_target": target, "seed": seed}
    tables = [(twisted, B, _phase_one(B, gens, length, target, rng, cache, verify, stats))
              for twisted, B in bases]
    stats["table_sizes"] = [len(T) for _, _, T in tables]
    key2 = enc(X2)
    if max_attempts is None:
        max_attempts = 64 * h + 256
    attempt, w = 0, []
    while True:
        if attempt:
            w = _random_word(gens, length, rng)
            stats["phase2_words"] += 1
            _, key2 = cache.apply(X2, w, verify)
        for twisted, B, T in tables:
            if key2 in T:
                word = _conjugate_word(w) + T[key2]
                res = VectorisationResult(word, disc, x, twisted, stats)
                stats["cache_hits"], stats["cache_misses"] = cache.hits, cache.misses
                if verify and enc(action_word(B, res.collapsed(), verify)) != enc(X2):
                    raise VerificationFailed("vectorisation result fails the key check")
                return res
        attempt += 1
        if attempt > max_attempts:
            raise Timeout(f"no collision after {max_attempts} walks")


def vectorise_same_orbit(X: OrientedCurve, X2: OrientedCurve, epsilon: float = 1.0, seed: int = 0,
                         max_attempts: int | None = None, verify: bool | None = None):
    """A smooth ideal a with a * X = X', assuming both lie in one orbit."""
    _check_pair(X, X2)
    return _search([(False, X)], X2, epsilon, seed, max_attempts, verify)


def one_orbit(X: OrientedCurve) -> bool:
    """The action has a single orbit when p ramifies in the order."""
    return kronecker(X.order.disc, X.curve.p) == 0


def vectorise(X: OrientedCurve, X2: OrientedCurve, epsilon: float = 1.0, seed: int = 0,
              max_attempts: int | None = None, verify: bool | None = None):
    """Vectorise X' against X or its twist, whichever orbit holds X'.

    The flag `twisted` on the result says the ideal maps twist(X) to X'."""
    _check_pair(X, X2)
    bases = [(False, X)]
    if not one_orbit(X):
        bases.append((True, twist(X)))
    return _search(bases, X2, epsilon, seed, max_attempts, verify)


def vectorise_effective(X: OrientedCurve, X2: OrientedCurve, F: OrientedCurve, epsilon: float = 1.0,
                        seed: int = 0, max_attempts: int | None = None, verify: bool | None = None):
    """(result, isogeny chain F -> a * F) for a with a * X = X'.

    Raises NoSolution when X' lies in the orbit of the twist of X only."""
    _check_pair(X, F)
    res = vectorise(X, X2, epsilon, seed, max_attempts, verify)
    if res.twisted:
        raise NoSolution("X' is not in the orbit of X")
    _, chain = action_word_chain(F, res.collapsed(), verify)
    return res, chain


def exhaustive_class(X: OrientedCurve, X2: OrientedCurve):
    """The class a with a * X = X', by trying every class; None if absent."""
    from .orientation import ideal_action
    target = enc(X2)
    for f in class_group(X.order.disc).elements:
        if enc(ideal_action(X, f)) == target:
            return f
    return None


# ---------------------------------------------------------------------------
# hidden shift


class HiddenShiftInstance:
    """f_j(x) = enc(b^x * X_j) on the group Z/n_1 x ... x Z/n_k.

    The maps are tabulated once, so evaluation is a lookup."""

    def __init__(self, group, basis, f0_table, f1_table, true_shift=None):
        self.group = tuple(group)
        self.basis = basis
        self._f0 = f0_table
        self._f1 = f1_table
        self.true_shift = true_shift

    def elements(self):
        out = [()]
        for n in self.group:
            out = [v + (i,) for v in out for i in range(n)]
        return out

    def add(self, x, y):
        return tuple((a + b) % n for a, b, n in zip(x, y, self.group))

    def f0(self, x):
        return self._f0[tuple(x)]

    def f1(self, x):
        return self._f1[tuple(x)]

    def order(self) -> int:
        return math.prod(self.group)


def _tabulate(X: OrientedCurve, G, elements, cache: ActionCache, verify):
    """enc(b^x * X) for every x, built along the group by one basis step at a
    time from an already tabulated neighbour."""
    basis = G.decomposition()
    table = {}
    curves = {}
    zero = tuple(0 for _ in basis)
    allowed = set(cheap_primes(X.curve, X.order))
    gen_ideals = generator_ideals(X.order, current().prime_cap, allowed)
    words = [G.word_for(b, gen_ideals) for b, _ in basis]
    curves[zero] = (X, enc(X))
    table[zero] = curves[zero][1]
    for x in elements:
        if x in curves:
            continue
        i = max(k for k, v in enumerate(x) if v)
        prev = x[:i] + (x[i] - 1,) + x[i + 1:]
        Y, key = curves[prev]
        for P, e in words[i]:
            if e < 0:
                P, e = P.conjugate(), -e
            for _ in range(e):
                Y, key = cache.step(Y, key, P, verify)
        curves[x] = (Y, key)
        table[x] = key
    return table


def hidden_shift_instance(X: OrientedCurve, X2: OrientedCurve, true_shift=None,
                          verify: bool | None = None) -> HiddenShiftInstance:
    _check_pair(X, X2)
    G = class_group(X.order.disc)
    if G.h > HIDDEN_SHIFT_CAP:
        raise GroupTooLarge(f"class number {G.h} above {HIDDEN_SHIFT_CAP}")
    basis = G.decomposition()
    group = [n for _, n in basis]
    inst = HiddenShiftInstance(group, basis, {}, {}, true_shift)
    elements = sorted(inst.elements(), key=lambda v: (sum(v), v))
    cache = ActionCache()
    inst._f0 = _tabulate(X, G, elements, cache, verify)
    inst._f1 = _tabulate(X2, G, elements, cache, verify)
    return inst


def solve_hidden_shift_bruteforce(inst: HiddenShiftInstance):
    """The unique s with f1(x) = f0(s + x) for every x."""
    elems = inst.elements()
    for s in elems:
        if all(inst.f1(x) == inst.f0(inst.add(s, x)) for x in elems):
            return s
    raise NoShift("f1 is not a shift of f0")


# ---------------------------------------------------------------------------
# end-to-end pipeline


def alpha_endring_pipeline(E, theta, base: OrientedCurve | None = None, epsilon: float = 1.0,
                           seed: int = 0, verify: bool | None = None):
    """Factor disc Z[theta], primitivise, and vectorise against a base curve.

    Returns (primitive oriented curve, vectorisation result, report). The
    last reduction, from vectorisation to a basis of the endomorphism ring,
    is not carried out; the report says so."""
    O_in, _ = from_endomorphism(E, theta)
    disc_in = O_in.disc
    fac = factor(-disc_in)
    X = primitivise(E, theta, fac, verify=verify)
    if base is None:
        from .construct import oriented_curve
        base = oriented_curve(E.p, X.order.disc, seed)
    res = vectorise(base, X, epsilon, seed, verify=verify)
    report = {
        "disc_input": disc_in,
        "factorisation": [[ell, e] for ell, e in fac],
        "primitive_disc": X.order.disc,
        "vectorisation": res.to_json(),
        "base": enc(base).hex(),
        "target": enc(X).hex(),
        "endomorphism_basis": "not computed: the reduction from vectorisation to a basis "
                              "of End(E) is out of scope; the pipeline stops here",
    }
    return X, res, report
