"""Independent reference computations used by the tests.

Nothing here imports the package: arithmetic is done with Python ints
modulo p^M and Fractions.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def vp(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def frac_mod(x: Fraction, p: int, m: int) -> int:
    """A p-integral rational reduced mod p^m."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError("not p-integral")
    mod = p ** m
    return x.numerator * pow(x.denominator, -1, mod) % mod


def iwasawa_log_unit(u: int, p: int, n: int) -> int:
    """Log u = (1/(p-1)) sum_i (1 - u^(p-1))^i / i mod p^n, for a p-adic unit u.

    This is the branch sign used throughout (minus the usual logarithm).
    """
    m = n + 10
    mod = p ** m
    y = (1 - pow(u, p - 1, mod)) % mod
    total = 0
    term = 1
    for i in range(1, m + 12):
        # y^i is divisible by p^i, so the quotient by p^v(i) is exact
        term = term * y % mod
        k = vp(i, p)
        total = (total + (term // p ** k) * pow(i // p ** k, -1, mod)) % mod
    total = total * pow(p - 1, -1, mod) % mod
    return total % p ** n


def iwasawa_plog(x: Fraction, p: int, n: int):
    """(unit part mod p^n, coefficient of L) for the branch Log of a rational."""
    x = Fraction(x)
    v = vp(x.numerator, p) - vp(x.denominator, p)
    unit = x / Fraction(p) ** v
    u = frac_mod(unit, p, n + 12)
    return iwasawa_log_unit(u, p, n), v


def series_polylog(k: int, z: Fraction, p: int, n: int) -> int:
    """sum_{j>=1} z^j / j^k mod p^n for p | z (z p-integral)."""
    m = n + 4 * k + 10
    mod = p ** m
    zz = frac_mod(z, p, m)
    total = 0
    power = 1
    for j in range(1, m + 8 * k + 20):
        power = power * zz % mod
        kv = vp(j, p) * k
        # z^j is divisible by p^j >= p^(k v(j)) for the range used here
        total = (total + (power // p ** kv) * pow((j // p ** vp(j, p)) ** k, -1, mod)) % mod
    return total % p ** (n)


# ---------------------------------------------------------------------------
# Taylor ODE oracle


def _series_of_rational(num, den, x0, terms):
    """Taylor coefficients at x0 of num(z)/den(z) for polynomial coefficient lists."""

    def shift(c):
        # coefficients of P(x0 + t)
        out = [Fraction(0)] * len(c)
        for k, a in enumerate(c):
            for j in range(k + 1):
                out[j] += Fraction(a) * math.comb(k, j) * Fraction(x0) ** (k - j)
        return out

    n = shift(num) + [Fraction(0)] * terms
    d = shift(den) + [Fraction(0)] * terms
    out = []
    for k in range(terms):
        acc = n[k] - sum(out[j] * d[k - j] for j in range(k))
        out.append(acc / d[0])
    return out


def taylor_transport(forms, x0, x1, terms: int):
    """Solve dY = A Y, Y(x0) = I by power series in t = z - x0 and evaluate at x1.

    ``forms`` maps (i, j) to (numerator, denominator) coefficient lists of the
    dz-coefficient of A_ij.  Returns the matrix of Fractions (truncated sum).
    """
    r = 1 + max(max(i, j) for i, j in forms)
    a = {key: _series_of_rational(nu, de, x0, terms) for key, (nu, de) in forms.items()}
    ys = [[[Fraction(int(i == j)) for j in range(r)] for i in range(r)]]
    for k in range(terms - 1):
        nxt = [[Fraction(0)] * r for _ in range(r)]
        for (i, l), coeffs in a.items():
            for j in range(r):
                acc = Fraction(0)
                for q in range(k + 1):
                    acc += coeffs[q] * ys[k - q][l][j]
                nxt[i][j] += acc
        ys.append([[c / (k + 1) for c in row] for row in nxt])
    t = Fraction(x1) - Fraction(x0)
    out = [[Fraction(0)] * r for _ in range(r)]
    for k, y in enumerate(ys):
        tk = t ** k
        for i in range(r):
            for j in range(r):
                out[i][j] += y[i][j] * tk
    return out


# ---------------------------------------------------------------------------
# brute-force monodromy filtration (plain Fraction elimination)


def _rref_rows(rows):
    """Reduced row echelon basis (tuple of tuples) of the span of ``rows``."""
    m = [list(map(Fraction, r)) for r in rows if any(r)]
    if not m:
        return ()
    ncol = len(m[0])
    out, r = [], 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r])


def _apply(mat, v):
    return tuple(sum(mat[i][j] * v[j] for j in range(len(v))) for i in range(len(mat)))


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _kernel(mat):
    n = len(mat)
    red = _rref_rows(mat)
    pivots = [next(j for j, x in enumerate(row) if x != 0) for row in red]
    basis = []
    for free in (j for j in range(n) if j not in pivots):
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[free]
        basis.append(tuple(v))
    return _rref_rows(basis)


def _image(mat, space):
    return _rref_rows([_apply(mat, v) for v in space])


def _plus(a, b):
    return _rref_rows(list(a) + list(b))


def _meet(a, b, n):
    if not a or not b:
        return ()
    # x in a and b  <=>  x = sum s_i a_i with the sum in b
    cols = [[a[i][k] for i in range(len(a))] + [-b[j][k] for j in range(len(b))] for k in range(n)]
    sols = _kernel_rect(cols, len(a) + len(b))
    return _rref_rows([tuple(sum(s[i] * a[i][k] for i in range(len(a))) for k in range(n)) for s in sols])


def _kernel_rect(rows, ncol):
    red = _rref_rows(rows) if rows else ()
    pivots = [next(j for j, x in enumerate(row) if x != 0) for row in red]
    out = []
    for free in (j for j in range(ncol) if j not in pivots):
        v = [Fraction(0)] * ncol
        v[free] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[free]
        out.append(v)
    return out


def _le(a, b):
    return len(_plus(a, b)) == len(b)


def subspace_lattice(N):
    """Closure of {ker N^a, im N^b} under sum and intersection (N a list of rows)."""
    n = len(N)
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    spaces = set()
    for _ in range(n + 1):
        spaces.add(_kernel(power))
        spaces.add(_rref_rows([tuple(power[i][j] for i in range(n)) for j in range(n)]))
        power = _matmul(power, N)
    changed = True
    while changed:
        changed = False
        items = list(spaces)
        for x, y in itertools.combinations(items, 2):
            for z in (_plus(x, y), _meet(x, y, n)):
                if z not in spaces:
                    spaces.add(z)
                    changed = True
    return sorted(spaces, key=len)


def brute_force_monodromy(N):
    """Every filtration drawn from the lattice satisfying both axioms, as {i: dim M_i}.

    Axioms: M_(-n) = 0, M_n = V, M_(i-1) in M_i, N M_i in M_(i-2), and for
    r >= 1 the map N^r: gr_r -> gr_(-r) is bijective (equal dimensions and
    N^r M_r + M_(-r-1) = M_(-r)).
    """
    N = [[Fraction(x) for x in row] for row in N]
    n = len(N)
    lattice = subspace_lattice(N)
    k = len(lattice)
    le = [[_le(lattice[a], lattice[b]) for b in range(k)] for a in range(k)]
    img = [_image(N, s) for s in lattice]
    img_le = [[_le(img[a], lattice[b]) for b in range(k)] for a in range(k)]
    powers = {1: N}
    for r in range(2, n + 1):
        powers[r] = _matmul(powers[r - 1], N)
    zero_idx = lattice.index(())
    lo, hi = -n, n
    found = []

    def idx(chosen, i):
        return chosen[i] if i >= lo else zero_idx

    def rec(i, chosen):
        if i > hi:
            if len(lattice[chosen[hi]]) != n:
                return
            for r in range(1, n + 1):
                d = lambda j: len(lattice[idx(chosen, j)])
                if d(r) - d(r - 1) != d(-r) - d(-r - 1):
                    return
                total = _plus(_image(powers[r], lattice[idx(chosen, r)]), lattice[idx(chosen, -r - 1)])
                if len(total) != d(-r):
                    return
            found.append({j: len(lattice[s]) for j, s in chosen.items()})
            return
        for s in range(k):
            if i == lo and s != zero_idx:
                continue
            if i > lo and not le[chosen[i - 1]][s]:
                continue
            if not img_le[s][idx(chosen, i - 2)]:
                continue
            chosen[i] = s
            rec(i + 1, chosen)
            del chosen[i]

    rec(lo, {})
    return found
