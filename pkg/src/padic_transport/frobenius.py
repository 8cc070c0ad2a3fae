"""Frobenius structures on disk connections.

A Frobenius lift is F(x) = x^p u(x) with u(0) = 1 mod p.  A Frobenius
structure is a matrix Phi of series with

    theta(Phi) + Q Phi = Phi * F^*Q,    F^*Q = Q^sigma(F(x)) (p + theta(u)/u),

the horizontality of Phi: F^*E -> E written with dlog coefficients.  With
the frame H = G exp(-N0 l) one has Phi * F^*H = H * phi, and the constant
matrix phi is the Frobenius on the nearby cycles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .connection import (
    LogConnection,
    PsiModule,
    canonical_gauge,
    pmat_identity,
    pmat_inverse,
    pmat_mul,
    psi_un,
    series_matrix_inverse,
)
from .errors import PrecisionError, PreconditionError
from .padic import PadicContext, PadicNumber
from .ratfunc import Poly
from .series import DiskFunction


class FrobLift:
    """F(x) = x^p u(x) as a DiskFunction."""

    def __init__(self, series: DiskFunction):
        ctx = series.ctx
        p = ctx.p
        cs = series.coeffs
        if any(not c.is_zero() for c in cs[:p]) or len(cs) <= p:
            raise PreconditionError("a Frobenius lift must vanish to order exactly p at 0")
        u0 = cs[p]
        if (u0 - 1).valuation < 1:
            raise PreconditionError("a Frobenius lift must be x^p times a series congruent to 1")
        self.series = series
        self.ctx = ctx

    @classmethod
    def standard(cls, ctx: PadicContext, order: int):
        cs = [ctx.zero()] * max(order, ctx.p + 1)
        cs[ctx.p] = ctx.one()
        return cls(DiskFunction(ctx, cs))

    @classmethod
    def from_polynomial(cls, poly: Poly, ctx: PadicContext, order: int):
        cs = [ctx(c) for c in poly.c] + [ctx.zero()] * order
        return cls(DiskFunction(ctx, cs[: max(order, poly.degree + 1)]))

    @property
    def order(self):
        return self.series.order

    def unit_part(self, order) -> DiskFunction:
        """u(x) = F(x) / x^p."""
        p = self.ctx.p
        cs = list(self.series.coeffs[p:]) + [self.ctx.zero()] * order
        return DiskFunction(self.ctx, cs[:order])

    def log_unit(self, order) -> DiskFunction:
        """The ordinary logarithm of u(x) (so that l(F x) = p l(x) + log u)."""
        return self.unit_part(order).log_of_unit()

    def dlog_factor(self, order) -> DiskFunction:
        """dlog F / dlog x = p + theta(u)/u."""
        u = self.unit_part(order)
        return u.theta() / u + DiskFunction.constant(self.ctx, self.ctx.p, order)

    def apply(self, f: DiskFunction, order) -> DiskFunction:
        """f^sigma(F(x))."""
        return f.frobenius().compose(self.series.truncate(min(order, self.order)) if self.order > order else self.series, order)

    def is_standard(self) -> bool:
        p = self.ctx.p
        return all(c.is_zero() for k, c in enumerate(self.series.coeffs) if k != p) and self.series.coeffs[p] == 1

    def evaluate(self, pt):
        return self.series.evaluate(pt)


def _pad(f: DiskFunction, order):
    cs = list(f.coeffs[:order]) + [f.ctx.zero()] * max(0, order - f.order)
    return DiskFunction(f.ctx, cs, f.rho)


def pullback_q(conn: LogConnection, lift: FrobLift):
    """The dlog coefficient matrix of F^*A."""
    order = conn.order
    fac = lift.dlog_factor(order)
    return [[(lift.apply(f, order) * fac) if not f.is_zero() else f for f in row] for row in conn.q]


@dataclass
class FCrystal:
    conn: LogConnection
    Phi: list
    lift: FrobLift

    def __post_init__(self):
        r = self.conn.rank
        order = self.conn.order
        self.Phi = [[_pad(f, order) for f in row] for row in self.Phi]
        phi0 = [[f.coeffs[0] for f in row] for row in self.Phi]
        if la.det(phi0, self.conn.ctx.zero(), self.conn.ctx.one()).is_zero():
            raise PreconditionError("Phi must be invertible")
        if len(self.Phi) != r:
            raise PreconditionError("Phi has the wrong size")

    @property
    def ctx(self):
        return self.conn.ctx

    def phi_at(self, pt):
        return [[f.evaluate(pt) for f in row] for row in self.Phi]


def _series_zero(ctx, order):
    return DiskFunction.zero(ctx, order)


def horizontality_residual(cr: FCrystal):
    """theta(Phi) + Q Phi - Phi F^*Q as a matrix of series."""
    ctx, order = cr.ctx, cr.conn.order
    zero = _series_zero(ctx, order)
    qf = pullback_q(cr.conn, cr.lift)
    lhs = la.mat_add([[f.theta() for f in row] for row in cr.Phi], la.mat_mul(cr.conn.q, cr.Phi, zero))
    return la.mat_sub(lhs, la.mat_mul(cr.Phi, qf, zero))


def check_horizontality(cr: FCrystal) -> int:
    """Valuation deficit of the horizontality residual: 0 iff the axiom holds.

    The deficit is precision minus the least valuation among the residual
    coefficients known to full truncation.
    """
    prec = cr.ctx.precision
    worst = prec
    for row in horizontality_residual(cr):
        for f in row:
            for c in f.coeffs[: cr.conn.order - 1]:
                if not c.is_zero():
                    worst = min(worst, c.valuation)
    return max(0, prec - worst)


def solve_frobenius_structure(conn: LogConnection, lift: FrobLift, phi0):
    """Phi with Phi(0) = phi0 for an upper triangular nilpotent connection.

    Phi is found superdiagonal by superdiagonal from
    theta(Phi_ij) = sum_k Phi_ik (F^*Q)_kj - Q_ik Phi_kj; constant terms come
    from phi0 and the right side must have no constant term.
    """
    ctx, r, order = conn.ctx, conn.rank, conn.order
    for i in range(r):
        for j in range(i + 1):
            if not conn.q[i][j].is_zero():
                raise PreconditionError("connection matrix must be strictly upper triangular")
    qf = pullback_q(conn, lift)
    phi = [[DiskFunction.zero(ctx, order) for _ in range(r)] for _ in range(r)]
    for i in range(r):
        phi[i][i] = DiskFunction.constant(ctx, phi0[i][i], order)
    for dist in range(1, r):
        for i in range(r - dist):
            j = i + dist
            rhs = DiskFunction.zero(ctx, order)
            for k in range(i, j + 1):
                if k < j and not qf[k][j].is_zero():
                    rhs = rhs + phi[i][k] * qf[k][j]
                if k > i and not conn.q[i][k].is_zero():
                    rhs = rhs - conn.q[i][k] * phi[k][j]
            if not rhs.coeffs[0].is_zero():
                raise PreconditionError("no Frobenius structure with the given value at 0")
            cs = [ctx(phi0[i][j])] + [c / k for k, c in enumerate(rhs.coeffs) if k > 0]
            phi[i][j] = DiskFunction(ctx, cs)
    return phi


# ---------------------------------------------------------------------------


def _exp_nilpotent_series(n0, t: DiskFunction, ctx, order):
    """exp(t(x) * n0) as a matrix of series."""
    r = len(n0)
    zero = DiskFunction.zero(ctx, order)
    one = DiskFunction.constant(ctx, 1, order)
    out = la.identity(r, zero, one)
    power = pmat_identity(ctx, r)
    tp = one
    for m in range(1, r + 1):
        power = pmat_mul(power, n0, ctx)
        if la.is_zero_matrix(power):
            break
        tp = tp * t
        for i in range(r):
            for j in range(r):
                if not power[i][j].is_zero():
                    out[i][j] = out[i][j] + tp.scale(power[i][j] / math.factorial(m))
    return out


def _frame_pullback(frame, lift: FrobLift, order):
    """G^sigma(F(x)) as a matrix of series."""
    return [[lift.apply(f, order) for f in row] for row in frame.gauge]


@dataclass
class PhiOnPsi:
    matrix: list
    psi: PsiModule

    def apply(self, v):
        """phi(v) = matrix * sigma(v)."""
        return la.mat_vec(self.matrix, [c.frobenius() for c in v])


def phi_on_psi(cr: FCrystal) -> PhiOnPsi:
    """phi = G^{-1} Phi G^sigma(F) exp(-N0 log u), checked constant."""
    ctx, order = cr.ctx, cr.conn.order
    psi, frame = psi_un(cr.conn)
    n0 = frame.N0
    n0s = [[c.frobenius() for c in row] for row in n0]
    zero = DiskFunction.zero(ctx, order)
    g = frame.gauge
    ginv = series_matrix_inverse(g, ctx, order)
    gf = _frame_pullback(frame, cr.lift, order)
    ex = _exp_nilpotent_series(la.mat_neg(n0s), cr.lift.log_unit(order), ctx, order)
    m = la.mat_mul(la.mat_mul(la.mat_mul(ginv, cr.Phi, zero), gf, zero), ex, zero)
    for row in m:
        for f in row:
            if any(not c.is_zero() for c in f.coeffs[1 : order - 1]):
                raise PrecisionError("Frobenius on nearby cycles is not constant at working truncation")
    m0 = [[f.coeffs[0] for f in row] for row in m]
    lhs = pmat_mul(n0, m0, ctx)
    rhs = pmat_mul(m0, n0s, ctx)
    rhs = [[c * ctx.p for c in row] for row in rhs]
    if not la.is_zero_matrix(la.mat_sub(lhs, rhs)):
        raise PreconditionError("the relation N phi = p phi N fails: Phi is not a Frobenius structure")
    psi.phi = m0
    return PhiOnPsi(m0, psi)


def relation_holds(phi: PhiOnPsi) -> bool:
    ctx = phi.matrix[0][0].ctx
    n = phi.psi.N_psi
    ns = [[c.frobenius() for c in row] for row in n]
    lhs = pmat_mul(n, phi.matrix, ctx)
    rhs = [[c * ctx.p for c in row] for row in pmat_mul(phi.matrix, ns, ctx)]
    return la.is_zero_matrix(la.mat_sub(lhs, rhs))


def change_of_lift(cr: FCrystal, newlift: FrobLift) -> FCrystal:
    """Phi' = Phi G(F1) exp(-N0 (log u1 - log u2)) G(F2)^{-1}."""
    ctx, order = cr.ctx, cr.conn.order
    frame = canonical_gauge(cr.conn)
    n0s = [[c.frobenius() for c in row] for row in frame.N0]
    zero = DiskFunction.zero(ctx, order)
    g1 = _frame_pullback(frame, cr.lift, order)
    g2 = _frame_pullback(frame, newlift, order)
    dlu = cr.lift.log_unit(order) - newlift.log_unit(order)
    ex = _exp_nilpotent_series(la.mat_neg(n0s), dlu, ctx, order)
    new_phi = la.mat_mul(la.mat_mul(la.mat_mul(cr.Phi, g1, zero), ex, zero), series_matrix_inverse(g2, ctx, order), zero)
    return FCrystal(cr.conn, new_phi, newlift)


# ---------------------------------------------------------------------------
# Dwork's trick


def contraction_radius(lift_series: DiskFunction, rho):
    """A lower bound for v(F(y)) when v(y) >= rho: min_k v(b_k) + k rho."""
    best = math.inf
    for k, b in enumerate(lift_series.coeffs):
        if k == 0 or b.is_zero():
            continue
        best = min(best, b.valuation + k * Fraction(rho))
    return best


class ExtendedFrame:
    """H(y) = Phi(y) Phi(Fy) ... Phi(F^(M-1) y) H_small(F^M y) Phi(0)^(-M)."""

    def __init__(self, phi, lift_series, small_frame, rho_small, rho_target, steps):
        self.phi = phi
        self.lift_series = lift_series
        self.small_frame = small_frame
        self.rho_small = rho_small
        self.rho_target = rho_target
        self.steps = steps
        self.ctx = lift_series.ctx

    def evaluate(self, pt):
        ctx = self.ctx
        pt = ctx(pt) if not isinstance(pt, PadicNumber) else pt
        if pt.valuation < self.rho_target:
            raise PreconditionError("point outside the target disk")
        r = len(self.phi)
        acc = pmat_identity(ctx, r)
        y = pt
        for _ in range(self.steps):
            acc = pmat_mul(acc, [[f.evaluate(y, check=False) for f in row] for row in self.phi], ctx)
            y = self.lift_series.evaluate(y, check=False)
        small = [[f.evaluate(y) if not y.is_zero() else f.coeffs[0] for f in row] for row in self.small_frame]
        acc = pmat_mul(acc, small, ctx)
        phi0 = [[f.coeffs[0] for f in row] for row in self.phi]
        inv = pmat_inverse(phi0, ctx)
        for _ in range(self.steps):
            acc = pmat_mul(acc, inv, ctx)
        return acc


def dwork_extend(phi, lift_series: DiskFunction, small_frame, rho_small, rho_target, cap=None) -> ExtendedFrame:
    """Extend a horizontal frame (H(0) = I) from |y| <= p^-rho_small to |y| <= p^-rho_target.

    ``phi`` and ``lift_series`` describe the Frobenius structure in the
    coordinate y around a Frobenius-fixed point (lift_series(0) = 0).
    """
    ctx = lift_series.ctx
    if not lift_series.coeffs[0].is_zero():
        raise PreconditionError("the center must be fixed by the Frobenius lift")
    cap = ctx.precision if cap is None else cap
    rho = Fraction(rho_target)
    steps = 0
    while rho < rho_small:
        if steps >= cap:
            raise PrecisionError(f"no iterate of the lift maps the target disk into the small disk within {cap} steps")
        new = contraction_radius(lift_series, rho)
        if new <= rho:
            raise PrecisionError("the Frobenius lift does not contract the target disk")
        rho = new
        steps += 1
    return ExtendedFrame(phi, lift_series, small_frame, Fraction(rho_small), Fraction(rho_target), steps)


# ---------------------------------------------------------------------------
# catalog


def kummer_crystal(ctx: PadicContext, order: int) -> FCrystal:
    """d + [[0, 1], [0, 0]] dlog x with Phi = diag(1, p) and F(x) = x^p."""
    n = [[ctx.zero(), ctx.one()], [ctx.zero(), ctx.zero()]]
    conn = LogConnection.model(n, ctx, order)
    phi = [[DiskFunction.constant(ctx, 1, order), DiskFunction.zero(ctx, order)],
           [DiskFunction.zero(ctx, order), DiskFunction.constant(ctx, ctx.p, order)]]
    return FCrystal(conn, phi, FrobLift.standard(ctx, order))


def polylog_connection_at_zero(ctx: PadicContext, level: int, order: int) -> LogConnection:
    """Rank ``level`` connection with A[0][1] = dlog(1 - x), A[j-1][j] = dlog x."""
    from .ratfunc import RationalFunction

    x = RationalFunction(Poly.x())
    one_minus = RationalFunction(Poly([1, -1]))
    r = level
    mat = [[RationalFunction(0) for _ in range(r)] for _ in range(r)]
    if r > 1:
        mat[0][1] = one_minus.dlog()
    for j in range(2, r):
        mat[j - 1][j] = x.dlog()
    return LogConnection.from_rational(mat, 0, ctx, order)


def polylog_crystal(ctx: PadicContext, level: int, order: int, lift: FrobLift = None) -> FCrystal:
    """The polylog connection with the Frobenius structure Phi(0) = diag(1, p, ..., p^(level-1))."""
    conn = polylog_connection_at_zero(ctx, level, order)
    lift = lift or FrobLift.standard(ctx, order)
    phi0 = [[ctx(ctx.p ** i) if i == j else ctx.zero() for j in range(level)] for i in range(level)]
    return FCrystal(conn, solve_frobenius_structure(conn, lift, phi0), lift)
