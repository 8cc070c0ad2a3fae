"""The ring K_st = K[L] of polynomials in the branch symbol L = l(p).

Sign convention: the branch homomorphism ``plog`` is given on 1-units by
the series sum_{i>=1} (1 - z)^i / i.  This is the NEGATIVE of the usual
p-adic logarithm sum (-1)^(i+1) (z - 1)^i / i.  It sends p to L and every
root of unity to 0.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ContextMismatch, PreconditionError
from .padic import PadicContext, PadicNumber, teichmuller


class KstElement:
    """sum_k coeffs[k] * L^k with p-adic coefficients; e is N(L)."""

    __slots__ = ("ctx", "coeffs", "e")

    def __init__(self, ctx: PadicContext, coeffs=(), e: int = 1):
        self.ctx = ctx
        self.e = e
        cs = [ctx(c) if not isinstance(c, PadicNumber) else c for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c, ctx=None, e=1):
        if isinstance(c, PadicNumber):
            ctx = c.ctx if ctx is None else ctx
        return cls(ctx, [ctx(c)], e)

    @classmethod
    def symbol(cls, ctx, e=1):
        return cls(ctx, [ctx.zero(), ctx.one()], e)

    # queries ------------------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree in L (-1 for zero)."""
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> PadicNumber:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ctx.zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_precision(self) -> float:
        return min((c.prec for c in self.coeffs), default=self.ctx.precision)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, KstElement):
            if not self.ctx.same_field(other.ctx):
                raise ContextMismatch("K_st elements over different fields")
            return other
        if isinstance(other, (int, Fraction, PadicNumber)):
            return KstElement(self.ctx, [self.ctx(other)], self.e)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return KstElement(self.ctx, [self.coefficient(k) + other.coefficient(k) for k in range(n)], self.e)

    __radd__ = __add__

    def __neg__(self):
        return KstElement(self.ctx, [-c for c in self.coeffs], self.e)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return KstElement(self.ctx, [], self.e)
        out = [self.ctx.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return KstElement(self.ctx, out, self.e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a scalar, or by a K_st element of degree 0."""
        if isinstance(other, KstElement):
            if other.degree != 0:
                raise PreconditionError("only division by constants is defined in K_st")
            other = other.coeffs[0]
        inv = self.ctx(other).invert() if not isinstance(other, PadicNumber) else other.invert()
        return KstElement(self.ctx, [c * inv for c in self.coeffs], self.e)

    def __pow__(self, n: int):
        result = KstElement(self.ctx, [self.ctx.one()], self.e)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def frobenius(self) -> "KstElement":
        """sigma on coefficients; L is left fixed."""
        return KstElement(self.ctx, [c.frobenius() for c in self.coeffs], self.e)

    def add_bigoh(self, n: int) -> "KstElement":
        return KstElement(self.ctx, [c.add_bigoh(n) for c in self.coeffs], self.e)

    def lift_to(self, ctx: PadicContext) -> "KstElement":
        return KstElement(ctx, [c.lift_to(ctx) for c in self.coeffs], self.e)

    def __repr__(self):
        return render_kst(self)

    __str__ = __repr__


def render_kst(v: KstElement, symbol: str = "L") -> str:
    if v.is_zero():
        return f"0 + O({v.ctx.p}^{v.ctx.precision})"
    parts = []
    for k, c in enumerate(v.coeffs):
        if c.is_zero():
            continue
        s = str(c)
        if k == 0:
            parts.append(s)
        elif k == 1:
            parts.append(f"({s})*{symbol}")
        else:
            parts.append(f"({s})*{symbol}^{k}")
    return " + ".join(parts)


def kst_derivation_N(v: KstElement) -> KstElement:
    """The K-linear derivation with N(L) = e."""
    out = [c * (k * v.e) for k, c in enumerate(v.coeffs) if k > 0]
    return KstElement(v.ctx, out, v.e)


def kst_specialize(v: KstElement, t) -> PadicNumber:
    """Substitute L := t."""
    t = v.ctx(t) if not isinstance(t, PadicNumber) else t
    acc = v.ctx.zero()
    for c in reversed(v.coeffs):
        acc = acc * t + c
    return acc


def _series_terms(p: int, n: int) -> int:
    """Number of terms i with i - log_p(i) guaranteed to pass n."""
    i = 1
    while i - math.log(i, p) < n + 1:
        i += 1
    return i + 1


def log_one_unit(u: PadicNumber) -> PadicNumber:
    """sum_{i>=1} (1 - u)^i / i for u congruent to 1 mod p (the branch sign)."""
    ctx = u.ctx
    y = ctx.one() - u
    if y.valuation < 1:
        raise PreconditionError("series only converges on 1-units")
    if y.is_zero():
        return ctx.zero().add_bigoh(u.prec)
    target = min(u.prec, ctx.precision)
    terms = _series_terms(ctx.p, target)
    guard = int(math.log(terms, ctx.p)) + 2
    work = ctx.with_precision(target + guard)
    yw = y.lift_to(work)
    acc = work.zero()
    power = work.one()
    for i in range(1, terms + 1):
        power = power * yw
        if power.valuation >= target + guard:
            break
        acc = acc + power / i
    return acc.lift_to(ctx).add_bigoh(target)


def split_unit(x: PadicNumber):
    """x = p^v * omega * u with omega a root of unity and u a 1-unit."""
    if x.is_zero():
        raise PreconditionError("plog of zero")
    ctx = x.ctx
    unit = x.shift(-x.val)
    omega = teichmuller(unit)
    return x.val, omega, unit / omega


def plog(x, ctx: PadicContext = None, e: int = 1) -> KstElement:
    """The universal branch Log: K* -> K_st with Log p = L."""
    if not isinstance(x, PadicNumber):
        if ctx is None:
            raise PreconditionError("a context is needed for non p-adic input")
        x = ctx(x)
    ctx = x.ctx
    v, _, u = split_unit(x)
    series = log_one_unit(u)
    return KstElement(ctx, [series, ctx(v)], e)
