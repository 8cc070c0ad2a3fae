"""Frobenius structures for graded log connections on the projective line.

The connection is A = sum_b M_b dlog(z - b) over the finite singular
points b (all p-integral and distinct mod p), and the Frobenius lift is
z -> z^p.  Transport solves dY = A Y, so a Frobenius structure is a matrix
Phi(z) with

    dPhi = A Phi - Phi F*A,      F* dlog(z - b) = p dlog(z - b) + dlog g_b,

where g_b = (z^p - b) / (z - b)^p.  When A is graded (A_ij != 0 only if
w_j = w_i + 1) we take the diagonal blocks of Phi to be p^(w_i) and solve
for the rest one weight step at a time.  Each entry lives in the space of
functions

    c + sum_a sum_{n >= 1} c_{a,n} (z - a)^(-n)

converging on the complement of the open residue disks D(a); an entry is
stored as a PrincipalFunction.  Integration constants are carried as
unknowns and fixed at the end by requiring every simple-pole coefficient
of dPhi to vanish.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import linalg as la
from .errors import PrecisionError, PreconditionError
from .padic import PadicContext, PadicNumber


class PrincipalFunction:
    """const + sum over a of sum_n parts[a][n-1] (z - a)^(-n)."""

    __slots__ = ("ctx", "const", "parts")

    def __init__(self, ctx, const=None, parts=None):
        self.ctx = ctx
        self.const = const if const is not None else ctx.zero()
        self.parts = parts or {}

    def is_zero(self):
        return self.const.is_zero() and all(c.is_zero() for cs in self.parts.values() for c in cs)

    def __add__(self, other):
        return PrincipalFunction(self.ctx, self.const + other.const, _add_parts(self.parts, other.parts))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not isinstance(c, PadicNumber):
            c = self.ctx(c)
        return PrincipalFunction(self.ctx, self.const * c, {a: [x * c for x in cs] for a, cs in self.parts.items()})

    def evaluate(self, x: PadicNumber, target: int = None):
        """Value at a point with |x - a| >= 1 for every pole a."""
        from .linalg import embed_qp

        xctx = x.ctx
        total = embed_qp(self.const, xctx)
        target = xctx.precision if target is None else target
        for a, cs in self.parts.items():
            if not cs:
                continue
            u = x - xctx(a)
            if u.is_zero() or u.valuation > 0:
                raise PreconditionError(f"point lies in the residue disk of the pole {a}")
            tail = [c.valuation for c in cs[-max(1, len(cs) // 8):] if not c.is_zero()]
            if tail and min(tail) < target:
                raise PrecisionError(f"principal part at {a} truncated before reaching O(p^{target})")
            t = u.invert()
            acc = xctx.zero()
            for c in reversed(cs):
                acc = (acc + embed_qp(c, xctx)) * t
            total = total + acc
        return total


def _add_parts(p1, p2):
    out = {a: list(cs) for a, cs in p1.items()}
    for a, cs in p2.items():
        if a in out:
            mine = out[a]
            n = max(len(mine), len(cs))
            z = cs[0] * 0 if cs else None
            mine += [z] * (n - len(mine))
            for k, c in enumerate(cs):
                mine[k] = mine[k] + c
        else:
            out[a] = list(cs)
    return out


class PrincipalForm:
    """sum over a of sum_n parts[a][n-1] (z - a)^(-n) dz; n = 1 is the residue."""

    __slots__ = ("ctx", "parts")

    def __init__(self, ctx, parts=None):
        self.ctx = ctx
        self.parts = parts or {}

    def __add__(self, other):
        return PrincipalForm(self.ctx, _add_parts(self.parts, other.parts))

    def scale(self, c):
        if not isinstance(c, PadicNumber):
            c = self.ctx(c)
        return PrincipalForm(self.ctx, {a: [x * c for x in cs] for a, cs in self.parts.items()})

    def residue(self, a):
        cs = self.parts.get(a)
        return cs[0] if cs else self.ctx.zero()

    def integrate(self):
        """A primitive with zero constant term, ignoring the residues."""
        parts = {}
        for a, cs in self.parts.items():
            # d_n u^(-n) du integrates to -d_n / (n - 1) u^(-(n-1))
            parts[a] = [-cs[n - 1] / (n - 1) for n in range(2, len(cs) + 1)]
        return PrincipalFunction(self.ctx, None, parts)


def times_dlog(f: PrincipalFunction, b, nmax) -> PrincipalForm:
    """f(z) dz / (z - b) by partial fractions."""
    ctx = f.ctx
    parts = {}
    res_b = f.const
    for a, cs in f.parts.items():
        if a == b:
            shifted = [ctx.zero()] + list(cs)
            parts[b] = _add_parts(parts, {b: shifted[:nmax]})[b]
            continue
        delta = ctx(Fraction(a) - Fraction(b))
        dinv = delta.invert()
        n = len(cs)
        e = [ctx.zero()] * (n + 1)
        # e_k = (c_k - e_(k+1)) / delta; the residue at b is sum c_n (-delta)^(-n)
        for k in range(n, 0, -1):
            e[k - 1] = (cs[k - 1] - (e[k] if k < n else ctx.zero())) * dinv
        parts = _add_parts(parts, {a: e[:n]})
        val = ctx.zero()
        mdinv = -dinv
        for c in reversed(cs):
            val = (val + c) * mdinv
        res_b = res_b + val
    parts = _add_parts(parts, {b: [res_b]})
    return PrincipalForm(ctx, parts)


def times_form(f: PrincipalFunction, w: PrincipalForm, nmax) -> PrincipalForm:
    """f times a form whose poles are all at one point b."""
    ctx = f.ctx
    out = w.scale(f.const)
    for b, ds in w.parts.items():
        for a, cs in f.parts.items():
            if a == b:
                conv = [ctx.zero()] * nmax
                for i, c in enumerate(cs):
                    if c.is_zero():
                        continue
                    for j, d in enumerate(ds):
                        k = i + j + 1
                        if k >= nmax:
                            break
                        conv[k] = conv[k] + c * d
                out = out + PrincipalForm(ctx, {b: conv})
            else:
                out = out + _two_center_product(cs, a, ds, b, ctx, nmax)
    return out


def _taylor_at(cs, a, b, ctx, kmax):
    """Taylor coefficients at b of sum_m cs[m-1] (z - a)^(-m)."""
    delta = ctx(Fraction(b) - Fraction(a))
    dinv = delta.invert()
    out = []
    for k in range(kmax):
        acc = ctx.zero()
        dpow = dinv ** k
        for m, c in enumerate(cs, start=1):
            if c.is_zero():
                dpow = dpow * dinv
                continue
            # binom(-m, k) = (-1)^k binom(m + k - 1, k)
            coeff = (-1) ** k * math.comb(m + k - 1, k)
            acc = acc + c * (dpow * dinv) * coeff
            dpow = dpow * dinv
        out.append(acc)
    return out


def _two_center_product(cs, a, ds, b, ctx, nmax):
    """Principal parts at a and at b of P_a(z) Q_b(z) dz."""
    t = _taylor_at(cs, a, b, ctx, len(ds))
    at_b = [ctx.zero()] * len(ds)
    for n in range(1, len(ds) + 1):
        acc = ctx.zero()
        for k in range(0, len(ds) - n + 1):
            acc = acc + t[k] * ds[n + k - 1]
        at_b[n - 1] = acc
    s = _taylor_at(ds, b, a, ctx, len(cs))
    at_a = [ctx.zero()] * len(cs)
    for m in range(1, len(cs) + 1):
        acc = ctx.zero()
        for k in range(0, len(cs) - m + 1):
            acc = acc + s[k] * cs[m + k - 1]
        at_a[m - 1] = acc
    return PrincipalForm(ctx, {a: at_a[:nmax], b: at_b[:nmax]})


# ---------------------------------------------------------------------------


def dlog_g(b, ctx: PadicContext, nmax: int) -> PrincipalForm:
    """dlog of g_b = (z^p - b)/(z - b)^p as a principal part at b."""
    p = ctx.p
    b = Fraction(b)
    if b == 0:
        return PrincipalForm(ctx, {})
    # g_b = 1 + h(w), w = 1/(z - b)
    h = [ctx.zero()] * (nmax + 1)
    for j in range(1, p):
        if j <= nmax:
            h[j] = ctx(math.comb(p, j) * b ** j)
    if p <= nmax:
        h[p] = h[p] + ctx(b ** p - b)
    logs = [ctx.zero()] * (nmax + 1)
    power = [ctx.one()] + [ctx.zero()] * nmax
    i = 0
    while True:
        i += 1
        if i > nmax or i - math.log(i, p) > ctx.precision + 1:
            break
        nxt = [ctx.zero()] * (nmax + 1)
        for d1, c1 in enumerate(power):
            if c1.is_zero():
                continue
            for d2 in range(1, min(p, nmax - d1) + 1):
                if not h[d2].is_zero():
                    nxt[d1 + d2] = nxt[d1 + d2] + c1 * h[d2]
        power = nxt
        sign = 1 if i % 2 else -1
        for d in range(nmax + 1):
            if not power[d].is_zero():
                logs[d] = logs[d] + power[d] * Fraction(sign, i)
    # d/dz of sum l_n (z - b)^(-n) = sum -n l_n (z - b)^(-n-1)
    form = [ctx.zero()] * nmax
    for n in range(1, nmax):
        form[n] = logs[n] * (-n)
    return PrincipalForm(ctx, {b: form})


def principal_length(p: int, precision: int, levels: int) -> int:
    """Number of principal-part terms kept so that the tail is below p^precision."""
    n = p
    while n / p - (levels + 1) * math.log(n, p) - 2 < precision:
        n += p
    return n


class _Affine:
    """A PrincipalFunction-valued affine function of unknown constants."""

    def __init__(self, comps=None):
        self.comps = comps or {}

    def add(self, other, scale=None):
        out = dict(self.comps)
        for k, f in other.comps.items():
            g = f if scale is None else f.scale(scale)
            out[k] = out[k] + g if k in out else g
        return _Affine(out)


def frobenius_structure(residues: dict, weights, ctx: PadicContext, nmax: int = None):
    """The matrix Phi (PrincipalFunctions) for A = sum_b M_b dlog(z - b).

    ``residues`` maps each finite singular point b to an r x r matrix of
    Fractions; ``weights`` grades the basis.  Raises PreconditionError when
    no Frobenius structure of this shape exists.
    """
    r = len(weights)
    p = ctx.p
    levels = max(weights) - min(weights) if weights else 0
    nmax = nmax or principal_length(p, ctx.precision, levels)
    points = sorted(residues)
    dlogs = {b: dlog_g(b, ctx, nmax) for b in points}
    zero_fn = PrincipalFunction(ctx)
    phi = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            if i == j:
                phi[i][j] = _Affine({0: PrincipalFunction(ctx, ctx(p) ** weights[i])})
            elif weights[j] == weights[i]:
                phi[i][j] = _Affine({})
    unknowns = 0
    equations = []  # (component dict of residues)
    for m in range(1, levels + 1):
        for i in range(r):
            for j in range(r):
                if weights[j] - weights[i] != m:
                    continue
                form = {}
                for b in points:
                    mb = residues[b]
                    t = _Affine({})
                    u = _Affine({})
                    for k in range(r):
                        if mb[i][k] and weights[k] == weights[i] + 1:
                            t = t.add(phi[k][j], Fraction(mb[i][k]))
                        if mb[k][j] and weights[j] == weights[k] + 1:
                            t = t.add(phi[i][k], -p * Fraction(mb[k][j]))
                            u = u.add(phi[i][k], Fraction(mb[k][j]))
                    for key, f in t.comps.items():
                        w = times_dlog(f, b, nmax)
                        form[key] = form[key] + w if key in form else w
                    if dlogs[b].parts:
                        for key, f in u.comps.items():
                            w = times_form(f, dlogs[b], nmax).scale(-1)
                            form[key] = form[key] + w if key in form else w
                for b in points:
                    equations.append({key: w.residue(b) for key, w in form.items()})
                unknowns += 1
                comps = {key: w.integrate() for key, w in form.items()}
                comps[unknowns] = PrincipalFunction(ctx, ctx.one())
                phi[i][j] = _Affine(comps)
    values = _solve_constants(equations, unknowns, ctx)
    out = [[zero_fn] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            if phi[i][j] is None:
                continue
            acc = zero_fn
            for key, f in phi[i][j].comps.items():
                acc = acc + (f if key == 0 else f.scale(values[key - 1]))
            out[i][j] = acc
    return FrobeniusMatrix(out, ctx, nmax)


def _solve_constants(equations, unknowns, ctx):
    """Solve sum_u e[u] x_u + e[0] = 0, treating entries below the floor as zero."""
    floor = ctx.precision - 3
    zero = ctx.zero()

    def clean(x):
        return zero if x.is_zero() or x.valuation >= floor else x

    rows, rhs = [], []
    for eq in equations:
        row = [clean(eq.get(u, zero)) for u in range(1, unknowns + 1)]
        c = clean(-eq.get(0, zero))
        if all(x.is_zero() for x in row) and c.is_zero():
            continue
        rows.append(row)
        rhs.append(c)
    if unknowns == 0:
        if rows:
            raise PreconditionError("no Frobenius structure: residue conditions fail")
        return []
    if not rows:
        return [zero] * unknowns
    aug = [row + [c] for row, c in zip(rows, rhs)]
    m, pivots = la.rref(aug)
    if unknowns in pivots:
        raise PreconditionError("no Frobenius structure: residue conditions are inconsistent")
    x = [zero] * unknowns
    for k, pc in enumerate(pivots):
        x[pc] = m[k][unknowns]
    return x


class FrobeniusMatrix:
    """Phi as a matrix of PrincipalFunctions; evaluate() gives a K_0 matrix."""

    def __init__(self, entries, ctx, nmax):
        self.entries = entries
        self.ctx = ctx
        self.nmax = nmax

    @property
    def poles(self):
        return sorted({a for row in self.entries for f in row for a, cs in f.parts.items() if cs})

    def evaluate(self, x: PadicNumber, target=None):
        return [[f.evaluate(x, target) for f in row] for row in self.entries]
