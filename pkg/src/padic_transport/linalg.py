"""Dense linear algebra over Q (Fractions) and K_0 (PadicNumbers).

Elimination always pivots on the entry of least valuation (for p-adic
entries) so that precision loss stays visible; an all-zero pivot column
simply means the column is dependent to working precision.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import PrecisionError
from .padic import PadicNumber


def _skippable(x) -> bool:
    """A zero that cannot lower the precision of a product."""
    if isinstance(x, PadicNumber):
        return x.is_zero() and x.prec >= x.ctx.precision
    return is_zero(x)


def is_zero(x) -> bool:
    if isinstance(x, PadicNumber):
        return x.is_zero()
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return x == 0


def _pivot_key(x):
    if isinstance(x, PadicNumber):
        return x.valuation
    return 0


def zeros(n, m, zero):
    return [[zero for _ in range(m)] for _ in range(n)]


def identity(n, zero, one):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a):
    return [[-x for x in row] for row in a]


def mat_scale(a, c):
    return [[x * c for x in row] for row in a]


def mat_mul(a, b, zero=None):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                x = a[i][t]
                if _skippable(x):
                    continue
                y = b[t][j]
                if _skippable(y):
                    continue
                acc = x * y if acc is None else acc + x * y
            if acc is None:
                acc = zero if zero is not None else a[i][0] * 0
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a, v):
    return [col[0] for col in mat_mul(a, [[x] for x in v], zero=v[0] * 0 if v else None)]


def transpose(a):
    return [list(r) for r in zip(*a)] if a else []


def mat_map(a, fn):
    return [[fn(x) for x in row] for row in a]


def mat_pow(a, n, zero, one):
    out = identity(len(a), zero, one)
    for _ in range(n):
        out = mat_mul(out, a, zero)
    return out


def is_zero_matrix(a) -> bool:
    return all(is_zero(x) for row in a for x in row)


def kron(a, b, zero):
    n, m = len(a), len(b)
    out = zeros(n * m, n * m, zero)
    for i in range(n):
        for j in range(n):
            if is_zero(a[i][j]):
                continue
            for k in range(m):
                for l in range(m):
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l]
    return out


def block_diag(a, b, zero):
    n, m = len(a), len(b)
    out = zeros(n + m, n + m, zero)
    for i in range(n):
        for j in range(n):
            out[i][j] = a[i][j]
    for i in range(m):
        for j in range(m):
            out[n + i][n + j] = b[i][j]
    return out


# ---------------------------------------------------------------------------
# elimination


def rref(a):
    """Reduced row echelon form and pivot columns (copies the input)."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        best = None
        for i in range(r, rows):
            if not is_zero(m[i][c]) and (best is None or _pivot_key(m[i][c]) < _pivot_key(m[best][c])):
                best = i
        if best is None:
            continue
        m[r], m[best] = m[best], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], PadicNumber) else m[r][c].invert()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not is_zero(m[i][c]):
                factor = m[i][c]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a, zero, one):
    """Basis (list of vectors) of {v : a v = 0}."""
    cols = len(a[0]) if a else 0
    if not a:
        return [[one if i == j else zero for i in range(cols)] for j in range(cols)]
    m, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [zero] * cols
        v[fcol] = one
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fcol]
        basis.append(v)
    return basis


def solve(a, b, zero, one):
    """One solution x of a x = b (b a vector), or None if inconsistent."""
    n = len(a)
    cols = len(a[0]) if n else 0
    aug = [list(a[i]) + [b[i]] for i in range(n)]
    m, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [zero] * cols
    for r, pc in enumerate(pivots):
        x[pc] = m[r][cols]
    return x


def inverse(a, zero, one):
    n = len(a)
    aug = [list(a[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular to working precision")
    return [row[n:] for row in m[:n]]


def det(a, zero, one):
    n = len(a)
    m = [list(r) for r in a]
    d = one
    for c in range(n):
        best = None
        for i in range(c, n):
            if not is_zero(m[i][c]) and (best is None or _pivot_key(m[i][c]) < _pivot_key(m[best][c])):
                best = i
        if best is None:
            return zero
        if best != c:
            m[c], m[best] = m[best], m[c]
            d = -d
        piv = m[c][c]
        d = d * piv
        inv = 1 / piv if not isinstance(piv, PadicNumber) else piv.invert()
        for i in range(c + 1, n):
            if not is_zero(m[i][c]):
                factor = m[i][c] * inv
                m[i] = [x - factor * y for x, y in zip(m[i], m[c])]
    return d


# ---------------------------------------------------------------------------
# subspaces are lists of row vectors (a spanning set, reduced to a basis)


def span_basis(vectors):
    vectors = [list(v) for v in vectors]
    if not vectors:
        return []
    m, pivots = rref(vectors)
    return [m[i] for i in range(len(pivots))]


def subspace_sum(u, w):
    return span_basis(list(u) + list(w))


def subspace_intersection(u, w, dim, zero, one):
    """Intersection of span(u) and span(w) inside K^dim."""
    if not u or not w:
        return []
    # solve sum a_i u_i = sum b_j w_j
    mat = [[u[i][k] for i in range(len(u))] + [-w[j][k] for j in range(len(w))] for k in range(dim)]
    null = nullspace(mat, zero, one)
    vecs = []
    for v in null:
        vec = [zero] * dim
        for i in range(len(u)):
            if not is_zero(v[i]):
                vec = [x + v[i] * y for x, y in zip(vec, u[i])]
        vecs.append(vec)
    return span_basis(vecs)


def contains(u, v) -> bool:
    """Is the vector v in span(u)?"""
    if all(is_zero(x) for x in v):
        return True
    if not u:
        return False
    return rank(list(u) + [list(v)]) == rank(u)


def is_subspace(u, w) -> bool:
    u = [v for v in u if not all(is_zero(x) for x in v)]
    if not u:
        return True
    if not w:
        return False
    return rank(list(w) + list(u)) == rank(w)


def image_basis(a, zero, one):
    """Basis of the column space of a."""
    return span_basis(transpose(a))


def kernel_basis(a, zero, one):
    return span_basis(nullspace(a, zero, one)) if a else []


def apply_to_subspace(a, basis):
    """Basis of a(span(basis)), a acting on column vectors."""
    return span_basis([mat_vec(a, v) for v in basis])


def preimage(a, target, dim, zero, one):
    """{v : a v in span(target)}."""
    # v with a v = sum c_j t_j: kernel of [a | -T]
    n_rows = len(a)
    t = list(target)
    mat = [list(a[k]) + [-t[j][k] for j in range(len(t))] for k in range(n_rows)]
    null = nullspace(mat, zero, one)
    return span_basis([v[:dim] for v in null])


def is_nilpotent(a, zero, one):
    n = len(a)
    p = a
    for k in range(1, n + 1):
        if is_zero_matrix(p):
            return True, k
        p = mat_mul(p, a, zero)
    if is_zero_matrix(p):
        return True, n + 1
    return False, None


def check_precision(x, floor, what="pivot"):
    if isinstance(x, PadicNumber) and x.relative_precision < floor:
        raise PrecisionError(f"{what} below the precision floor")


def as_fraction_matrix(a):
    return [[Fraction(x) for x in row] for row in a]


# ---------------------------------------------------------------------------
# restriction of scalars from K_0 to Q_p


def field_units(sample):
    """(zero, one) of the field containing ``sample``."""
    if isinstance(sample, PadicNumber):
        return sample.ctx.zero(), sample.ctx.one()
    return Fraction(0), Fraction(1)


def multiplication_block(a: PadicNumber):
    """The f x f matrix over Q_p of multiplication by a in the basis 1, t, ..."""
    ctx = a.ctx
    gen = ctx.gen()
    cols = []
    tk = ctx.one()
    for _ in range(ctx.f):
        cols.append((a * tk).coordinates())
        tk = tk * gen
    return transpose(cols)


def sigma_block(ctx):
    """The f x f matrix over Q_p of sigma in the basis 1, t, ..."""
    gen = ctx.gen()
    cols = []
    tk = ctx.one()
    for _ in range(ctx.f):
        cols.append(tk.frobenius().coordinates())
        tk = tk * gen
    return transpose(cols)


def restrict_scalars(mat, ctx):
    """A K_0-linear map (n x m matrix) as an (n f) x (m f) matrix over Q_p."""
    f = ctx.f
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    qp_zero = ctx.zero().coordinates()[0] * 0
    out = zeros(rows * f, cols * f, qp_zero)
    for i in range(rows):
        for j in range(cols):
            a = mat[i][j]
            if a.is_zero() and a.prec >= ctx.precision:
                continue
            blk = multiplication_block(a)
            for k in range(f):
                for l in range(f):
                    out[i * f + k][j * f + l] = blk[k][l]
    return out


def semilinear_restrict(mat, ctx, power=1):
    """The Q_p-linear map v -> mat * sigma^power(v) on Q_p^(n f)."""
    big = restrict_scalars(mat, ctx)
    n = len(mat[0]) if mat else 0
    s = sigma_block(ctx)
    qp_zero = big[0][0] * 0 if big else None
    sp = identity(ctx.f, qp_zero, qp_zero + 1)
    for _ in range(power % ctx.f):
        sp = mat_mul(s, sp, qp_zero)
    diag = zeros(n * ctx.f, n * ctx.f, qp_zero)
    for b in range(n):
        for k in range(ctx.f):
            for l in range(ctx.f):
                diag[b * ctx.f + k][b * ctx.f + l] = sp[k][l]
    return mat_mul(big, diag, qp_zero)


def to_qp_vector(v):
    """Concatenated Q_p coordinates of a K_0 vector."""
    out = []
    for a in v:
        out.extend(a.coordinates())
    return out


def from_qp_vector(w, ctx):
    """Inverse of to_qp_vector."""
    f = ctx.f
    out = []
    gen = ctx.gen()
    for i in range(len(w) // f):
        total = ctx.zero()
        tk = ctx.one()
        for k in range(f):
            c = w[i * f + k]
            total = total + embed_qp(c, ctx) * tk
            tk = tk * gen
        out.append(total)
    return out


def embed_qp(c, ctx):
    """A Q_p element (PadicNumber with f = 1) viewed in K_0."""
    if c.ctx.same_field(ctx):
        return c
    if c.is_zero():
        return ctx(0, prec=c.prec) if c.prec < ctx.precision else ctx.zero()
    return PadicNumber(ctx, c.val, (c.unit[0],) + (0,) * (ctx.f - 1), min(c.prec, ctx.precision))
