"""Small linear algebra over Z/NZ."""
from __future__ import annotations

from .integers import factor, xgcd


def _val(x: int, ell: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % ell == 0 and v < cap:
        x //= ell
        v += 1
    return v


def local_invariants(rows: list[list[int]], ell: int, e: int) -> list[int]:
    """Invariant factors of the subgroup of (Z/ell^e)^n spanned by `rows`.

    Returns exponents a_i such that the subgroup is the product of Z/ell^{a_i}.
    Full pivoting by minimal valuation works because Z/ell^e is a local ring.
    """
    q = ell ** e
    mat = [[x % q for x in r] for r in rows]
    out = []
    while mat and mat[0]:
        best = None
        for i, r in enumerate(mat):
            for j, x in enumerate(r):
                if x:
                    v = _val(x, ell, e)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        out.append(e - v)
        piv_row = mat.pop(i)
        unit = piv_row[j] // ell ** v
        inv = pow(unit, -1, q)
        piv_row = [x * inv % q for x in piv_row]  # pivot entry is now ell^v
        new = []
        for r in mat:
            if r[j]:
                c = r[j] // ell ** v
                r = [(x - c * y) % q for x, y in zip(r, piv_row)]
            new.append(r)
        # Column operations clear the rest of the pivot row; they do not
        # change the isomorphism type, so just drop column j.
        mat = [r[:j] + r[j + 1:] for r in new]
    return out


def subgroup_order(rows: list[list[int]], modulus: int) -> int:
    """Order of the subgroup of (Z/modulus)^n generated by the rows."""
    total = 1
    for ell, e in factor(modulus):
        q = ell ** e
        for a in local_invariants([[x % q for x in r] for r in rows], ell, e):
            total *= ell ** a
    return total


def kernel_2x2(m: list[list[int]], n: int) -> list[tuple[int, int]]:
    """Generators of {v in (Z/n)^2 : m v = 0} for a 2x2 integer matrix m.

    Uses a Smith decomposition m = U D V over the integers; the kernel is
    V^{-1} applied to the kernel of the diagonal matrix D.
    """
    a, b = m[0]
    c, d = m[1]
    # Track V^{-1} as we do column operations (columns of V^{-1}).
    vinv = [[1, 0], [0, 1]]
    mat = [[a, b], [c, d]]

    def colop(mat, vinv, i, j, x, y, z, w):
        # new col i = x*col i + y*col j ; new col j = z*col i + w*col j (det +-1)
        for r in (mat, vinv):
            for row in r:
                ci, cj = row[i], row[j]
                row[i], row[j] = x * ci + y * cj, z * ci + w * cj

    def rowop(mat, i, j, x, y, z, w):
        ri, rj = mat[i], mat[j]
        mat[i] = [x * u + y * v for u, v in zip(ri, rj)]
        mat[j] = [z * u + w * v for u, v in zip(ri, rj)]

    for _ in range(64):
        # Clear row 0 beyond the pivot with column ops.
        if mat[0][1]:
            g, x, y = xgcd(mat[0][0], mat[0][1])
            p0, p1 = mat[0][0] // g, mat[0][1] // g
            colop(mat, vinv, 0, 1, x, y, -p1, p0)
        # Clear column 0 below the pivot with row ops.
        if mat[1][0]:
            g, x, y = xgcd(mat[0][0], mat[1][0])
            p0, p1 = mat[0][0] // g, mat[1][0] // g
            rowop(mat, 0, 1, x, y, -p1, p0)
        if mat[0][1] == 0 and mat[1][0] == 0:
            if mat[0][0] and mat[1][1] % mat[0][0]:
                rowop(mat, 0, 1, 1, 1, 0, 1)
                continue
            break
    d1, d2 = mat[0][0], mat[1][1]
    gens = []
    for idx, dd in enumerate((d1, d2)):
        from math import gcd
        g = gcd(dd, n)
        step = n // g if g else 1
        if step % n == 0:
            continue
        vec = [0, 0]
        vec[idx] = step
        x = (vinv[0][0] * vec[0] + vinv[0][1] * vec[1]) % n
        y = (vinv[1][0] * vec[0] + vinv[1][1] * vec[1]) % n
        gens.append((x, y))
    return gens


def solve_mod_p(a: list[list[int]], b: list[int], p: int) -> list[int] | None:
    """One solution x of a x = b over F_p, or None if inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [[x % p for x in a[i]] + [b[i] % p] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [x * inv % p for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if aug[i][cols]:
            return None
    x = [0] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][cols]
    return x


def nullspace_mod_p(a: list[list[int]], p: int) -> list[list[int]]:
    """Basis of the right kernel of a over F_p."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [[x % p for x in row] for row in a]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc] % p
        basis.append(v)
    return basis
