"""Unipotent logarithmic connections on a punctured disk.

A connection is nabla = d + A with A = Q(x) dlog x, Q an r x r matrix of
power series.  Its residue is N0 = Q(0).  When N0 is nilpotent there is a
unique gauge G(x) with G(0) = I such that G^{-1} nabla G = d + N0 dlog x,
and H = G exp(-N0 l(x)) is a frame of horizontal sections over A_Log.

Parallel transport solves dY = A Y (the horizontal sections of d - A), so
it is computed from the frame of the negated connection; with this
orientation the Kummer connection [[0, dlog x], [0, 0]] transports with
upper right entry plog(x0) - plog(x1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .errors import PrecisionError, PreconditionError
from .logring import KstElement, plog
from .padic import PadicContext, PadicNumber
from .series import DiskFunction, LogExtElement, LogOneForm, expand_form, logext_theta


class NotUnipotentError(PreconditionError):
    """The residue is not nilpotent, so there is no unipotent frame."""


def std_log(pt: PadicNumber) -> KstElement:
    """The branch of l(x) used for evaluating frames: minus plog."""
    return -plog(pt)


# ---------------------------------------------------------------------------
# matrices of p-adic numbers


def _pzero(ctx):
    return ctx.zero()


def pmat_identity(ctx, r):
    return la.identity(r, ctx.zero(), ctx.one())


def pmat_mul(a, b, ctx):
    return la.mat_mul(a, b, ctx.zero())


def pmat_inverse(a, ctx):
    return la.inverse(a, ctx.zero(), ctx.one())


def pmat_exp_nilpotent(n, t, ctx):
    """exp(t * n) for nilpotent n; t a PadicNumber or KstElement."""
    r = len(n)
    if isinstance(t, KstElement):
        out = [[KstElement(ctx, [ctx.one()] if i == j else []) for j in range(r)] for i in range(r)]
    else:
        out = pmat_identity(ctx, r)
    power = pmat_identity(ctx, r)
    tp = None
    for m in range(1, r + 1):
        power = pmat_mul(power, n, ctx)
        if la.is_zero_matrix(power):
            break
        tp = t if tp is None else tp * t
        fact = math.factorial(m)
        for i in range(r):
            for j in range(r):
                if not power[i][j].is_zero():
                    out[i][j] = out[i][j] + tp * (power[i][j] / fact)
    return out


# ---------------------------------------------------------------------------


class LogConnection:
    """nabla = d + A on the punctured disk, stored as A = Q(x) dlog x.

    ``q`` is an r x r matrix of DiskFunctions sharing one truncation order
    (the entries of A are then known modulo x^(order-1) dx).
    """

    def __init__(self, q, ctx: PadicContext = None):
        self.rank = len(q)
        if any(len(row) != self.rank for row in q):
            raise PreconditionError("connection matrix must be square")
        self.ctx = ctx or q[0][0].ctx
        order = min(f.order for row in q for f in row)
        rho = max(f.rho for row in q for f in row)
        self.q = [[DiskFunction(self.ctx, f.coeffs[:order], rho) for f in row] for row in q]
        self.order = order
        self.rho = rho

    # constructors -------------------------------------------------------
    @classmethod
    def from_forms(cls, forms, ctx=None):
        """From an r x r matrix of LogOneForms."""
        return cls([[w.dlog_coefficient() for w in row] for row in forms], ctx)

    @classmethod
    def from_rational(cls, matrix, center, ctx: PadicContext, order: int):
        """Expand a matrix of rational functions r(z) (meaning r dz) at ``center``.

        ``order`` is the truncation order of the dlog coefficients.
        """
        forms = [[expand_form(r, center, ctx, order - 1) for r in row] for row in matrix]
        return cls.from_forms(forms, ctx)

    @classmethod
    def from_spec(cls, spec, center, ctx: PadicContext, order: int):
        return cls.from_rational(spec.rational_matrix(), center, ctx, order)

    @classmethod
    def model(cls, n0, ctx, order):
        """d + N0 dlog x."""
        r = len(n0)
        return cls([[DiskFunction.constant(ctx, n0[i][j], order) for j in range(r)] for i in range(r)], ctx)

    @classmethod
    def trivial(cls, rank, ctx, order):
        return cls.model([[ctx.zero()] * rank for _ in range(rank)], ctx, order)

    # views --------------------------------------------------------------
    @property
    def matrix(self):
        """The entries of A as LogOneForms."""
        return [[LogOneForm.from_dlog_coefficient(f) for f in row] for row in self.q]

    def coefficient_matrix(self, k):
        """Q_k, the x^k coefficient of Q."""
        return [[f.coeffs[k] for f in row] for row in self.q]

    def __repr__(self):
        return f"LogConnection(rank={self.rank}, order={self.order})"

    # operations producing new connections -------------------------------
    def negated(self):
        return LogConnection([[-f for f in row] for row in self.q], self.ctx)

    def direct_sum(self, other):
        zero = DiskFunction.zero(self.ctx, min(self.order, other.order))
        return LogConnection(la.block_diag(self.q, other.q, zero), self.ctx)

    def tensor(self, other):
        order = min(self.order, other.order)
        zero = DiskFunction.zero(self.ctx, order)
        one = DiskFunction.constant(self.ctx, 1, order)
        i1 = la.identity(self.rank, zero, one)
        i2 = la.identity(other.rank, zero, one)
        return LogConnection(la.mat_add(la.kron(self.q, i2, zero), la.kron(i1, other.q, zero)), self.ctx)

    def dual(self):
        return LogConnection([[-self.q[j][i] for j in range(self.rank)] for i in range(self.rank)], self.ctx)

    def gauge_transform(self, g):
        """The connection A' = G A G^{-1} + dG G^{-1} for a matrix G of series.

        Its transport is G(x1) T G(x0)^{-1}.
        """
        order = self.order
        zero = DiskFunction.zero(self.ctx, order)
        g = [[f.truncate(order) if f.order > order else f for f in row] for row in g]
        ginv = series_matrix_inverse(g, self.ctx, order)
        qn = la.mat_mul(la.mat_mul(g, self.q, zero), ginv, zero)
        dg = [[f.theta() for f in row] for row in g]
        qn = la.mat_add(qn, la.mat_mul(dg, ginv, zero))
        return LogConnection(qn, self.ctx)


def series_matrix_inverse(g, ctx, order):
    """Inverse of a matrix of DiskFunctions whose value at 0 is invertible."""
    r = len(g)
    g0 = [[f.coeffs[0] for f in row] for row in g]
    g0inv = pmat_inverse(g0, ctx)
    coeffs = [[[f.coeffs[k] if k < f.order else ctx.zero() for f in row] for row in g] for k in range(order)]
    inv = [g0inv]
    for k in range(1, order):
        acc = [[ctx.zero()] * r for _ in range(r)]
        for j in range(1, k + 1):
            if la.is_zero_matrix(coeffs[j]):
                continue
            acc = la.mat_add(acc, pmat_mul(coeffs[j], inv[k - j], ctx))
        inv.append(la.mat_neg(pmat_mul(g0inv, acc, ctx)))
    return [[DiskFunction(ctx, [inv[k][i][j] for k in range(order)]) for j in range(r)] for i in range(r)]


# ---------------------------------------------------------------------------


@dataclass
class ResidueData:
    N0: list
    nilpotent: bool
    nilpotency_index: int = None


@dataclass
class HorizontalFrame:
    """H = gauge * exp(-N0 l(x)); gauge_coeffs[k] is the x^k matrix of the gauge."""

    ctx: PadicContext
    N0: list
    gauge_coeffs: list
    order: int
    rho: Fraction = Fraction(0)

    @property
    def rank(self):
        return len(self.N0)

    @property
    def gauge(self):
        r = self.rank
        return [
            [DiskFunction(self.ctx, [g[i][j] for g in self.gauge_coeffs], self.rho) for j in range(r)]
            for i in range(r)
        ]

    @property
    def H(self):
        """The frame as a matrix of LogExtElements."""
        ctx, r, order = self.ctx, self.rank, self.order
        g = self.gauge
        zero = DiskFunction.zero(ctx, order)
        terms = [[{} for _ in range(r)] for _ in range(r)]
        power = pmat_identity(ctx, r)
        neg = la.mat_neg(self.N0)
        m = 0
        while not la.is_zero_matrix(power):
            scaled = [[c / math.factorial(m) for c in row] for row in power]
            coeff = la.mat_mul(g, [[DiskFunction.constant(ctx, c, order) for c in row] for row in scaled], zero)
            for i in range(r):
                for j in range(r):
                    terms[i][j][(m, 0)] = coeff[i][j]
            power = pmat_mul(power, neg, ctx)
            m += 1
        return [[LogExtElement(ctx, terms[i][j], order) for j in range(r)] for i in range(r)]

    def gauge_at(self, pt, check=True):
        r = self.rank
        acc = [[self.ctx.zero()] * r for _ in range(r)]
        for g in reversed(self.gauge_coeffs):
            acc = la.mat_add([[c * pt for c in row] for row in acc], g)
        if check:
            _check_convergence(self, pt)
        return acc

    def evaluate(self, pt, branch=std_log):
        """H(pt) over K_st, with l(pt) := branch(pt)."""
        g = self.gauge_at(pt)
        e = pmat_exp_nilpotent(la.mat_neg(self.N0), branch(pt), self.ctx)
        ctx = self.ctx
        gk = [[KstElement(ctx, [c]) for c in row] for row in g]
        return la.mat_mul(gk, e, KstElement(ctx, []))


def _check_convergence(frame, pt):
    if pt.is_zero():
        raise PreconditionError("cannot evaluate a frame at the puncture")
    v = pt.valuation
    target = frame.ctx.precision
    tail = [c for g in frame.gauge_coeffs[-3:] for row in g for c in row if not c.is_zero()]
    lowest = min((c.valuation for c in tail), default=0)
    if v <= 0 or frame.order * v + min(0, lowest) < target:
        raise PrecisionError(
            f"gauge truncated at order {frame.order} does not converge to O(p^{target}) at a point of valuation {v}"
        )


@dataclass
class PsiModule:
    dimension: int
    N_psi: list
    phi: list = None


def residue(conn: LogConnection) -> ResidueData:
    n0 = conn.coefficient_matrix(0)
    nil, index = la.is_nilpotent(n0, conn.ctx.zero(), conn.ctx.one())
    return ResidueData(n0, nil, index)


def certified_radius(frame: HorizontalFrame):
    """Largest rho (as a Fraction) at which the computed gauge terms decay.

    Returns the least rho with v(G_k) + k rho increasing past the tail, a
    term-valuation certificate rather than a closed-form radius.
    """
    vals = []
    for k, g in enumerate(frame.gauge_coeffs):
        entries = [c.valuation for row in g for c in row if not c.is_zero()]
        if entries and k:
            vals.append((k, min(entries)))
    if not vals:
        return Fraction(0)
    return max(Fraction(max(0, -v), k) for k, v in vals)


def canonical_gauge(conn: LogConnection, min_order_factor=0) -> HorizontalFrame:
    """Solve (k + ad N0) G_k = -sum_{j=1..k} Q_j G_{k-j} with G_0 = I."""
    ctx, r = conn.ctx, conn.rank
    need = math.ceil(Fraction(min_order_factor) * r * ctx.precision)
    if conn.order < need:
        raise PrecisionError(f"truncation order {conn.order} below the required {need}")
    res = residue(conn)
    if not res.nilpotent:
        raise NotUnipotentError("residue is not nilpotent")
    n0 = res.N0
    qk = [conn.coefficient_matrix(k) for k in range(conn.order)]
    gs = [pmat_identity(ctx, r)]
    for k in range(1, conn.order):
        b = [[ctx.zero()] * r for _ in range(r)]
        for j in range(1, k + 1):
            if la.is_zero_matrix(qk[j]):
                continue
            b = la.mat_sub(b, pmat_mul(qk[j], gs[k - j], ctx))
        gs.append(_solve_shifted_ad(n0, b, k, ctx))
    return HorizontalFrame(ctx, n0, gs, conn.order, conn.rho)


def _solve_shifted_ad(n0, b, k, ctx):
    """X with k X + N0 X - X N0 = B; ad N0 is nilpotent so the Neumann series ends."""
    r = len(n0)
    if la.is_zero_matrix(b):
        return b
    x = [[c / k for c in row] for row in b]
    term = x
    for _ in range(2 * r):
        ad = la.mat_sub(pmat_mul(n0, term, ctx), pmat_mul(term, n0, ctx))
        if la.is_zero_matrix(ad):
            break
        term = [[-c / k for c in row] for row in ad]
        x = la.mat_add(x, term)
    return x


def horizontality_residual(conn: LogConnection, frame: HorizontalFrame):
    """theta(H) + Q H computed in A_Log; zero for a horizontal frame."""
    h = frame.H
    r = conn.rank
    out = []
    for i in range(r):
        row = []
        for j in range(r):
            acc = logext_theta(h[i][j])
            for k in range(r):
                if not conn.q[i][k].is_zero():
                    acc = acc + LogExtElement.from_function(conn.q[i][k]) * h[k][j]
            row.append(acc)
        out.append(row)
    return out


def psi_un(conn: LogConnection):
    """(PsiModule, frame); N_psi is the residue N0."""
    frame = canonical_gauge(conn)
    resid = horizontality_residual(conn, frame)
    for row in resid:
        for v in row:
            for f in v.terms.values():
                # the top coefficient of theta(G) + QG mixes in unknown terms
                if any(not c.is_zero() for c in f.coeffs[: conn.order - 1]):
                    raise NotUnipotentError("horizontality residual is nonzero at working truncation")
    return PsiModule(conn.rank, [list(row) for row in frame.N0]), frame


def is_unipotent(conn: LogConnection):
    """(True, level) with level the length of the shortest unipotent filtration."""
    try:
        psi, frame = psi_un(conn)
    except NotUnipotentError:
        return False, None
    if psi.dimension != conn.rank:
        return False, None
    return True, residue(conn).nilpotency_index


def local_transport(conn: LogConnection, x0, x1, frame: HorizontalFrame = None):
    """T(x0 -> x1) = H(x1) H(x0)^{-1} for the system dY = A Y, over K_st."""
    ctx = conn.ctx
    x0 = ctx(x0) if not isinstance(x0, PadicNumber) else x0
    x1 = ctx(x1) if not isinstance(x1, PadicNumber) else x1
    if x0.is_zero() or x1.is_zero():
        raise PreconditionError("transport endpoints must avoid the puncture")
    if frame is None:
        frame = canonical_gauge(conn.negated())
    # frame of d - A: gauge * exp(N0 l); the transport is
    # G(x1) exp(N0 (l(x1) - l(x0))) G(x0)^{-1}
    g1 = frame.gauge_at(x1)
    g0inv = pmat_inverse(frame.gauge_at(x0), ctx)
    dl = std_log(x1) - std_log(x0)
    e = pmat_exp_nilpotent(la.mat_neg(frame.N0), dl, ctx)
    kz = KstElement(ctx, [])
    to_k = lambda m: [[KstElement(ctx, [c]) for c in row] for row in m]
    return la.mat_mul(la.mat_mul(to_k(g1), e, kz), to_k(g0inv), kz)


def kst_identity(ctx, r):
    return [[KstElement(ctx, [ctx.one()] if i == j else []) for j in range(r)] for i in range(r)]


def kst_mat_mul(a, b, ctx):
    return la.mat_mul(a, b, KstElement(ctx, []))


def kst_mat_equal(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))
