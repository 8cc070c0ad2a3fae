"""Truncated power series on a disk, log 1-forms and the ring A_Log.

A DiskFunction is sum_{k<T} a_k x^k known modulo x^T, meant to converge
on |x| <= p^(-rho).  The ring A_Log adjoins the symbols l(x) (with
d l(x) = dlog x and N l(x) = 1) and L = l(p) (killed by d and N).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import PrecisionError, PreconditionError
from .logring import KstElement, plog
from .padic import PadicContext, PadicNumber
from .ratfunc import Poly, RationalFunction


class DiskFunction:
    __slots__ = ("ctx", "coeffs", "rho")

    def __init__(self, ctx: PadicContext, coeffs, rho=Fraction(0)):
        self.ctx = ctx
        self.coeffs = tuple(c if isinstance(c, PadicNumber) else ctx(c) for c in coeffs)
        self.rho = Fraction(rho)

    @classmethod
    def constant(cls, ctx, c, order, rho=0):
        return cls(ctx, [ctx(c)] + [ctx.zero()] * (order - 1), rho)

    @classmethod
    def zero(cls, ctx, order, rho=0):
        return cls(ctx, [ctx.zero()] * order, rho)

    @classmethod
    def variable(cls, ctx, order, rho=0):
        cs = [ctx.zero()] * order
        if order > 1:
            cs[1] = ctx.one()
        return cls(ctx, cs, rho)

    @property
    def order(self) -> int:
        """Truncation order T: the series is known modulo x^T."""
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def truncate(self, order: int) -> "DiskFunction":
        if order > self.order:
            raise PreconditionError("cannot extend a truncated series")
        return DiskFunction(self.ctx, self.coeffs[:order], self.rho)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_constant(self) -> bool:
        return all(c.is_zero() for c in self.coeffs[1:])

    def weighted_valuation(self, rho=None):
        """min_k v(a_k) + k*rho over the known coefficients."""
        rho = self.rho if rho is None else Fraction(rho)
        return min((c.valuation + k * rho for k, c in enumerate(self.coeffs) if not c.is_zero()), default=math.inf)

    # arithmetic ---------------------------------------------------------
    def _co(self, other):
        if isinstance(other, DiskFunction):
            return other
        return DiskFunction.constant(self.ctx, other, self.order, self.rho)

    def __add__(self, other):
        o = self._co(other)
        n = min(self.order, o.order)
        return DiskFunction(self.ctx, [a + b for a, b in zip(self.coeffs[:n], o.coeffs[:n])], max(self.rho, o.rho))

    __radd__ = __add__

    def __neg__(self):
        return DiskFunction(self.ctx, [-a for a in self.coeffs], self.rho)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def scale(self, c) -> "DiskFunction":
        c = self.ctx(c) if not isinstance(c, PadicNumber) else c
        return DiskFunction(self.ctx, [a * c for a in self.coeffs], self.rho)

    def __mul__(self, other):
        if not isinstance(other, DiskFunction):
            return self.scale(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        cap = self.ctx.precision
        # zeros known only to reduced precision still limit the product
        nz_a = [(i, a[i]) for i in range(n) if not a[i].is_zero() or a[i].prec < cap]
        out = [self.ctx.zero()] * n
        for j in range(n):
            bj = b[j]
            if bj.is_zero() and bj.prec >= cap:
                continue
            for i, ai in nz_a:
                if i + j >= n:
                    break
                out[i + j] = out[i + j] + ai * bj
        return DiskFunction(self.ctx, out, max(self.rho, other.rho))

    __rmul__ = __mul__

    def shift_up(self, k: int = 1) -> "DiskFunction":
        """x^k * self (truncation grows by k)."""
        return DiskFunction(self.ctx, [self.ctx.zero()] * k + list(self.coeffs), self.rho)

    def derivative(self) -> "DiskFunction":
        return DiskFunction(self.ctx, [c * k for k, c in enumerate(self.coeffs)][1:], self.rho)

    def theta(self) -> "DiskFunction":
        """x d/dx."""
        return DiskFunction(self.ctx, [c * k for k, c in enumerate(self.coeffs)], self.rho)

    def integral(self) -> "DiskFunction":
        """Antiderivative vanishing at 0."""
        return DiskFunction(self.ctx, [self.ctx.zero()] + [c / (k + 1) for k, c in enumerate(self.coeffs)], self.rho)

    def inverse(self) -> "DiskFunction":
        a0 = self.coeffs[0]
        if a0.is_zero():
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = a0.invert()
        out = [inv0]
        for k in range(1, self.order):
            acc = self.ctx.zero()
            for i in range(1, k + 1):
                if not self.coeffs[i].is_zero():
                    acc = acc + self.coeffs[i] * out[k - i]
            out.append(-acc * inv0)
        return DiskFunction(self.ctx, out, self.rho)

    def __truediv__(self, other):
        if isinstance(other, DiskFunction):
            return self * other.inverse()
        return self.scale(self.ctx(other).invert() if not isinstance(other, PadicNumber) else other.invert())

    def __pow__(self, n: int):
        out = DiskFunction.constant(self.ctx, 1, self.order, self.rho)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def frobenius(self) -> "DiskFunction":
        """sigma applied to the coefficients."""
        return DiskFunction(self.ctx, [c.frobenius() for c in self.coeffs], self.rho)

    def compose(self, g: "DiskFunction", order=None) -> "DiskFunction":
        """self(g(x)) for g with g(0) = 0; result known to min(order, T_g)."""
        if not g.coeffs[0].is_zero():
            raise PreconditionError("inner series must vanish at 0")
        n = g.order if order is None else min(order, g.order)
        gt = g.truncate(n)
        ord_g = next((k for k, c in enumerate(gt.coeffs) if not c.is_zero()), n)
        needed = self.order
        if ord_g > 0:
            needed = min(self.order, (n - 1) // ord_g + 1)
        acc = DiskFunction.zero(self.ctx, n, g.rho)
        power = DiskFunction.constant(self.ctx, 1, n, g.rho)
        for k in range(needed):
            if k:
                power = power * gt
            if not self.coeffs[k].is_zero():
                acc = acc + power.scale(self.coeffs[k])
        if ord_g and self.order * ord_g < n:
            acc = acc.truncate(self.order * ord_g)
        new_rho = g.rho
        return DiskFunction(self.ctx, acc.coeffs, new_rho)

    def evaluate(self, pt, check: bool = True, target=None) -> PadicNumber:
        """Sum the series at pt; the last known term must be negligible."""
        pt = self.ctx(pt) if not isinstance(pt, PadicNumber) else pt
        if target is None:
            target = self.ctx.precision
        acc = self.ctx.zero()
        for c in reversed(self.coeffs):
            acc = acc * pt + c
        if check and self.order > 0 and not pt.is_zero():
            v = pt.valuation
            tail = self.order * v + min(0, min((c.valuation for c in self.coeffs[-3:] if not c.is_zero()), default=0))
            if v <= 0 or tail < target:
                raise PrecisionError(
                    f"series truncated at order {self.order} does not converge to O(p^{target}) at a point of valuation {v}"
                )
        return acc

    def log_of_unit(self) -> "DiskFunction":
        """The standard logarithm of a series u with u(0) = 1 (mod p)."""
        from .logring import log_one_unit

        a0 = self.coeffs[0]
        if (a0 - 1).valuation < 1:
            raise PreconditionError("log needs a series congruent to 1")
        c0 = -log_one_unit(a0)
        w = self / a0
        y = DiskFunction.constant(self.ctx, 1, self.order) - w
        acc = DiskFunction.zero(self.ctx, self.order, self.rho)
        power = DiskFunction.constant(self.ctx, 1, self.order)
        for i in range(1, self.order):
            power = power * y
            acc = acc - power.scale(self.ctx(Fraction(1, i)))
        acc.coeffs = (acc.coeffs[0] + c0,) + acc.coeffs[1:]
        return acc

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                terms.append(f"[{c}]*x^{k}")
        return "DiskFunction(" + (" + ".join(terms) if terms else "0") + f"; O(x^{self.order}))"


class LogOneForm:
    """regular(x) dx + residue * dlog x, the residue being a constant."""

    __slots__ = ("regular_part", "residue")

    def __init__(self, regular_part: DiskFunction, residue=None):
        ctx = regular_part.ctx
        self.regular_part = regular_part
        self.residue = ctx.zero() if residue is None else (residue if isinstance(residue, PadicNumber) else ctx(residue))

    @classmethod
    def from_dlog_coefficient(cls, q: DiskFunction) -> "LogOneForm":
        """The form q(x) dlog x, folding x^k dlog x (k >= 1) into dx terms."""
        return cls(DiskFunction(q.ctx, q.coeffs[1:], q.rho), q.coeffs[0])

    @property
    def ctx(self):
        return self.regular_part.ctx

    @property
    def polar_part(self) -> DiskFunction:
        return DiskFunction.constant(self.ctx, self.residue, max(self.regular_part.order, 1), self.regular_part.rho)

    def dlog_coefficient(self) -> DiskFunction:
        """q with form = q(x) dlog x; known to order T + 1."""
        return DiskFunction(self.ctx, [self.residue] + list(self.regular_part.coeffs), self.regular_part.rho)

    def __add__(self, other):
        return LogOneForm(self.regular_part + other.regular_part, self.residue + other.residue)

    def __neg__(self):
        return LogOneForm(-self.regular_part, -self.residue)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return LogOneForm(self.regular_part.scale(c), self.residue * c)

    def multiply(self, g: DiskFunction) -> "LogOneForm":
        return LogOneForm.from_dlog_coefficient(self.dlog_coefficient() * g)

    def is_zero(self) -> bool:
        return self.residue.is_zero() and self.regular_part.is_zero()

    def __eq__(self, other):
        if not isinstance(other, LogOneForm):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"LogOneForm(regular={self.regular_part}, residue={self.residue})"


# ---------------------------------------------------------------------------


class LogExtElement:
    """sum f_{a,b}(x) l(x)^a L^b with DiskFunction coefficients."""

    __slots__ = ("ctx", "terms", "order")

    def __init__(self, ctx: PadicContext, terms=None, order: int = 1):
        self.ctx = ctx
        self.order = order
        self.terms = {}
        for key, f in (terms or {}).items():
            if not isinstance(f, DiskFunction):
                f = DiskFunction.constant(ctx, f, order)
            if not f.is_zero():
                self.terms[key] = f

    @classmethod
    def from_function(cls, f: DiskFunction):
        return cls(f.ctx, {(0, 0): f}, f.order)

    @classmethod
    def ell(cls, ctx, order):
        """l(x)."""
        return cls(ctx, {(1, 0): DiskFunction.constant(ctx, 1, order)}, order)

    @classmethod
    def ell_p(cls, ctx, order):
        """L = l(p)."""
        return cls(ctx, {(0, 1): DiskFunction.constant(ctx, 1, order)}, order)

    def _co(self, other):
        if isinstance(other, LogExtElement):
            return other
        if isinstance(other, DiskFunction):
            return LogExtElement.from_function(other)
        return LogExtElement(self.ctx, {(0, 0): DiskFunction.constant(self.ctx, other, self.order)}, self.order)

    def __add__(self, other):
        o = self._co(other)
        terms = dict(self.terms)
        for k, f in o.terms.items():
            terms[k] = terms[k] + f if k in terms else f
        return LogExtElement(self.ctx, terms, min(self.order, o.order))

    __radd__ = __add__

    def __neg__(self):
        return LogExtElement(self.ctx, {k: -f for k, f in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        terms = {}
        for (a1, b1), f in self.terms.items():
            for (a2, b2), g in o.terms.items():
                key = (a1 + a2, b1 + b2)
                prod = f * g
                terms[key] = terms[key] + prod if key in terms else prod
        return LogExtElement(self.ctx, terms, min(self.order, o.order))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.terms.values())

    def __eq__(self, other):
        return (self - self._co(other)).is_zero()

    __hash__ = None

    def degree_ell(self) -> int:
        return max((a for (a, _), f in self.terms.items() if not f.is_zero()), default=-1)

    def degree_L(self) -> int:
        return max((b for (_, b), f in self.terms.items() if not f.is_zero()), default=-1)

    def coefficient(self, a: int, b: int = 0) -> DiskFunction:
        return self.terms.get((a, b), DiskFunction.zero(self.ctx, self.order))

    def __repr__(self):
        parts = [f"{f}*l^{a}*L^{b}" for (a, b), f in sorted(self.terms.items())]
        return "LogExtElement(" + (" + ".join(parts) if parts else "0") + ")"


class LogExtForm:
    """A 1-form with A_Log coefficients: sum omega_{a,b} l(x)^a L^b."""

    def __init__(self, terms):
        self.terms = {k: w for k, w in terms.items() if not w.is_zero()}

    def __eq__(self, other):
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            a = self.terms.get(k)
            b = other.terms.get(k)
            if a is None:
                if not b.is_zero():
                    return False
            elif b is None:
                if not a.is_zero():
                    return False
            elif not (a == b):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        return f"LogExtForm({self.terms})"


def logext_d(v: LogExtElement) -> LogExtForm:
    """d(f l^a L^b) = df l^a L^b + a f l^(a-1) dlog x L^b."""
    out = {}
    for (a, b), f in v.terms.items():
        w = LogOneForm(f.derivative(), None)
        out[(a, b)] = out[(a, b)] + w if (a, b) in out else w
        if a > 0:
            w2 = LogOneForm.from_dlog_coefficient(f.scale(a))
            key = (a - 1, b)
            out[key] = out[key] + w2 if key in out else w2
    return LogExtForm(out)


def logext_theta(v: LogExtElement) -> LogExtElement:
    """The contraction of d(v) with x d/dx (theta l(x) = 1)."""
    terms = {}
    for (a, b), f in v.terms.items():
        t = f.theta()
        terms[(a, b)] = terms[(a, b)] + t if (a, b) in terms else t
        if a > 0:
            key = (a - 1, b)
            g = f.scale(a)
            terms[key] = terms[key] + g if key in terms else g
    return LogExtElement(v.ctx, terms, v.order)


def logext_N(v: LogExtElement) -> LogExtElement:
    """The derivation with N l(x) = 1 killing A and L."""
    terms = {}
    for (a, b), f in v.terms.items():
        if a > 0:
            terms[(a - 1, b)] = f.scale(a)
    return LogExtElement(v.ctx, terms, v.order)


def evaluate(v: LogExtElement, pt, branch=None) -> KstElement:
    """Evaluate at a nonzero point: series summed, l(x) -> branch(pt), L -> L.

    ``branch`` defaults to plog; the connection module passes -plog, the
    ordinary logarithm, which is the choice compatible with d l(x) = dlog x.
    """
    ctx = v.ctx
    pt = ctx(pt) if not isinstance(pt, PadicNumber) else pt
    if pt.is_zero():
        raise PreconditionError("cannot evaluate at the puncture x = 0")
    branch = plog if branch is None else branch
    lx = branch(pt) if v.degree_ell() > 0 else None
    total = KstElement(ctx, [])
    L = KstElement.symbol(ctx)
    for (a, b), f in v.terms.items():
        val = KstElement(ctx, [f.evaluate(pt)])
        if a:
            val = val * lx ** a
        if b:
            val = val * L ** b
        total = total + val
    return total


def dlog(f: RationalFunction, center, ctx: PadicContext, order: int) -> LogOneForm:
    """df/f expanded at the point ``center`` (a rational number or 'inf')."""
    if f.is_zero():
        raise PreconditionError("dlog of the zero function")
    return expand_form(f.dlog(), center, ctx, order)


# ---------------------------------------------------------------------------
# local expansions of rational data


def _poly_to_padic(poly: Poly, ctx):
    return [ctx(c) for c in poly.c]


def _padic_shift(coeffs, c, ctx):
    """Coefficients of P(c + x) from those of P, with p-adic c."""
    n = len(coeffs)
    out = list(coeffs)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + c * out[j + 1]
    return out


def laurent_at(f: RationalFunction, center, ctx: PadicContext, order: int):
    """(m, series) with f(center + x) = x^m * series(x), series(0) != 0.

    The center is a Fraction (exact), a PadicNumber (assumed away from the
    zeros and poles of f) or the string 'inf' (then x = 1/z).
    """
    if f.is_zero():
        return 0, DiskFunction.zero(ctx, order)
    if isinstance(center, str):
        if center != "inf":
            raise PreconditionError(f"unknown center {center!r}")
        dn, dd = f.num.degree, f.den.degree
        num = f.num.reverse(dn)
        den = f.den.reverse(dd)
        m0 = dd - dn
        return _laurent_from_polys(num, den, ctx, order, m0)
    if isinstance(center, (int, Fraction)):
        c = Fraction(center)
        return _laurent_from_polys(f.num.shift(c), f.den.shift(c), ctx, order, 0)
    # p-adic center
    num = _padic_shift(_poly_to_padic(f.num, ctx), center, ctx)
    den = _padic_shift(_poly_to_padic(f.den, ctx), center, ctx)
    if num[0].is_zero() or den[0].is_zero():
        raise PreconditionError("p-adic expansion point too close to a zero or pole")
    n_s = DiskFunction(ctx, (num + [ctx.zero()] * order)[:order])
    d_s = DiskFunction(ctx, (den + [ctx.zero()] * order)[:order])
    return 0, n_s / d_s


def _laurent_from_polys(num: Poly, den: Poly, ctx, order, m0):
    kn = num.order_at_zero()
    kd = den.order_at_zero()
    num = Poly(num.c[kn:])
    den = Poly(den.c[kd:])
    n_s = DiskFunction(ctx, ([ctx(c) for c in num.c] + [ctx.zero()] * order)[:order])
    d_s = DiskFunction(ctx, ([ctx(c) for c in den.c] + [ctx.zero()] * order)[:order])
    return m0 + kn - kd, n_s / d_s


def expand_form(r: RationalFunction, center, ctx: PadicContext, order: int) -> LogOneForm:
    """The 1-form r(z) dz in the local coordinate at ``center``.

    At a finite center x = z - center, at 'inf' x = 1/z.  Raises if the
    form has a pole of order > 1 (not logarithmic).
    """
    if isinstance(center, str) and center == "inf":
        # r(z) dz = -r(1/x) / x^2 dx
        m, s = laurent_at(r, "inf", ctx, order + 2)
        m -= 2
        s = -s
    else:
        m, s = laurent_at(r, center, ctx, order + 2)
    if r.is_zero():
        return LogOneForm(DiskFunction.zero(ctx, order))
    if m < -1:
        raise PreconditionError("form has a pole of order > 1: not logarithmic")
    # form = x^m s(x) dx = x^(m+1) s(x) dlog x
    q = s.shift_up(m + 1) if m + 1 > 0 else s
    q = q.truncate(order + 1)
    return LogOneForm.from_dlog_coefficient(q)
