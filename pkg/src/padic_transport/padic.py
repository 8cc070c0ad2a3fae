"""Capped-precision arithmetic in Q_p and its unramified extensions.

An element of K_0 = Q_p[t]/(modulus) is stored as p^v * u where u is a
tuple of f integers (the coordinates of a unit in the basis 1, t, ...,
t^(f-1)) known modulo p^(N - v), N being the absolute precision of the
element.  Every element remembers its own absolute precision, which never
exceeds the cap of its context.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

from .errors import ContextMismatch, ParseError, PrecisionError, PreconditionError

INFINITY = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def valuation_int(n: int, p: int) -> float:
    """p-adic valuation of an integer (infinity for 0)."""
    if n == 0:
        return INFINITY
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation_fraction(x, p: int) -> float:
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return valuation_int(x.numerator, p) - valuation_int(x.denominator, p)


# ---------------------------------------------------------------------------
# polynomial helpers over Z / p^k and F_p


def _poly_trim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _polymul_mod(a, b, modulus, m):
    """Product of two coordinate tuples reduced by the monic modulus, mod m."""
    f = len(modulus) - 1
    if f == 1:
        return ((a[0] * b[0]) % m,)
    prod = [0] * (2 * f - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            prod[i + j] += ai * bj
    for k in range(2 * f - 2, f - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(f):
                prod[k - f + j] -= c * modulus[j]
    return tuple(x % m for x in prod[:f])


def _fp_poly_divmod(a, b, p):
    a = [x % p for x in a]
    b = _poly_trim([x % p for x in b])
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(1, len(a) - len(b) + 1)
    while len(_poly_trim(a)) >= len(b) and any(a):
        a = _poly_trim(a)
        shift = len(a) - len(b)
        c = a[-1] * inv_lead % p
        q[shift] = c
        for i, bi in enumerate(b):
            a[i + shift] = (a[i + shift] - c * bi) % p
        a = _poly_trim(a)
        if len(a) < len(b):
            break
    return _poly_trim(q), _poly_trim(a)


def _fp_poly_gcd(a, b, p):
    a = _poly_trim([x % p for x in a])
    b = _poly_trim([x % p for x in b])
    while any(b):
        _, r = _fp_poly_divmod(a, b, p)
        a, b = b, r
    return a


def _fp_powmod(base, e, modulus, p):
    result = tuple([1] + [0] * (len(modulus) - 2))
    base = tuple(base)
    while e:
        if e & 1:
            result = _polymul_mod(result, base, modulus, p)
        base = _polymul_mod(base, base, modulus, p)
        e >>= 1
    return result


def is_irreducible_mod_p(poly, p: int) -> bool:
    """Rabin's test for a monic polynomial (coefficients low to high) over F_p."""
    poly = [c % p for c in poly]
    f = len(poly) - 1
    if f < 1 or poly[-1] != 1:
        return False
    if f == 1:
        return True
    x = tuple([0, 1] + [0] * (f - 2))
    prime_divisors = [q for q in range(2, f + 1) if f % q == 0 and is_prime(q)]
    for q in prime_divisors:
        h = _fp_powmod(x, p ** (f // q), poly, p)
        diff = list(h)
        diff[1] = (diff[1] - 1) % p
        g = _fp_poly_gcd(poly, diff, p)
        if len(g) > 1:
            return False
    h = _fp_powmod(x, p ** f, poly, p)
    return tuple(c % p for c in h) == x


@lru_cache(maxsize=None)
def default_modulus(p: int, f: int):
    """Lexicographically first monic irreducible polynomial of degree f over F_p."""
    if f == 1:
        return (0, 1)
    for code in range(p ** f):
        coeffs = []
        c = code
        for _ in range(f):
            coeffs.append(c % p)
            c //= p
        if coeffs[0] == 0:
            continue
        poly = tuple(coeffs) + (1,)
        if is_irreducible_mod_p(poly, p):
            return poly
    raise PreconditionError(f"no irreducible polynomial of degree {f} mod {p}")


# ---------------------------------------------------------------------------


class PadicContext:
    """The field K_0 of residue degree f over Q_p with a precision cap."""

    def __init__(self, p: int, precision: int, f: int = 1, modulus=None):
        if not isinstance(p, int) or not is_prime(p) or p < 3:
            raise PreconditionError(f"p must be an odd prime, got {p!r}")
        if not isinstance(precision, int) or precision < 1:
            raise PreconditionError("precision must be a positive integer")
        if not isinstance(f, int) or f < 1:
            raise PreconditionError("residue degree f must be a positive integer")
        if modulus is None:
            modulus = default_modulus(p, f)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != f + 1 or modulus[-1] != 1:
            raise PreconditionError("modulus must be monic of degree f")
        if not is_irreducible_mod_p(modulus, p):
            raise PreconditionError("modulus is not irreducible mod p")
        self.p = p
        self.precision = precision
        self.f = f
        self.modulus = modulus
        self._sigma_t = None

    # identity -----------------------------------------------------------
    def same_field(self, other: "PadicContext") -> bool:
        return (self.p, self.f, self.modulus) == (other.p, other.f, other.modulus)

    def __eq__(self, other):
        return isinstance(other, PadicContext) and self.same_field(other) and self.precision == other.precision

    def __hash__(self):
        return hash((self.p, self.f, self.modulus, self.precision))

    def __repr__(self):
        if self.f == 1:
            return f"PadicContext(p={self.p}, precision={self.precision})"
        return f"PadicContext(p={self.p}, precision={self.precision}, f={self.f}, modulus={self.modulus})"

    def with_precision(self, precision: int) -> "PadicContext":
        return PadicContext(self.p, precision, self.f, self.modulus)

    # constructors -------------------------------------------------------
    def __call__(self, x, prec=None) -> "PadicNumber":
        if isinstance(x, PadicNumber):
            if not self.same_field(x.ctx):
                raise ContextMismatch("element belongs to a different field")
            cap = x.prec if prec is None else min(prec, x.prec)
            return _make(self, x.val, x.unit, cap)
        if isinstance(x, str):
            return parse_padic(x, self)
        if isinstance(x, (tuple, list)):
            # coordinates in the basis 1, t, ..., t^(f-1)
            if len(x) != self.f:
                raise PreconditionError("coordinate tuple has wrong length")
            total = self.zero()
            tpow = self.one()
            gen = self.gen()
            for c in x:
                total = total + self(c) * tpow
                tpow = tpow * gen
            return total if prec is None else total.add_bigoh(prec)
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            x = Fraction(x)
        if isinstance(x, Fraction):
            cap = self.precision if prec is None else min(prec, self.precision)
            if x == 0:
                return _make(self, cap, (0,) * self.f, cap)
            num, den = x.numerator, x.denominator
            vn = int(valuation_int(num, self.p))
            vd = int(valuation_int(den, self.p))
            num //= self.p ** vn
            den //= self.p ** vd
            v = vn - vd
            if v >= cap:
                return _make(self, cap, (0,) * self.f, cap)
            m = self.p ** (cap - v)
            u = num * pow(den, -1, m) % m
            return _make(self, v, (u,) + (0,) * (self.f - 1), cap)
        raise TypeError(f"cannot convert {type(x).__name__} to a p-adic number")

    def zero(self) -> "PadicNumber":
        return self(0)

    def one(self) -> "PadicNumber":
        return self(1)

    def gen(self) -> "PadicNumber":
        """The class of t generating the unramified extension."""
        if self.f == 1:
            return self(-self.modulus[0])
        return _make(self, 0, (0, 1) + (0,) * (self.f - 2), self.precision)

    def sigma_of_gen(self) -> tuple:
        """Coordinates of sigma(t): the root of the modulus congruent to t^p."""
        if self._sigma_t is None:
            if self.f == 1:
                self._sigma_t = (self.gen().unit[0],)
            else:
                work = self.with_precision(self.precision + 2)
                g = [work(c) for c in self.modulus]
                dg = [work(c * i) for i, c in enumerate(self.modulus)][1:]
                x = work.gen() ** self.p
                for _ in range(self.precision.bit_length() + 3):
                    gx = _horner(g, x, work)
                    dgx = _horner(dg, x, work)
                    x = x - gx / dgx
                m = self.p ** self.precision
                self._sigma_t = tuple(c % m for c in _absolute_coords(x, self.precision))
        return self._sigma_t

    def random_element(self, rng, min_val=0, max_val=None) -> "PadicNumber":
        """Random element with valuation in [min_val, max_val] (tests)."""
        if max_val is None:
            max_val = min_val + 2
        v = rng.randint(min_val, max_val)
        m = self.p ** max(self.precision - v, 1)
        coords = [rng.randrange(m) for _ in range(self.f)]
        if all(c % self.p == 0 for c in coords):
            coords[0] += 1
        return _make(self, v, tuple(coords), self.precision)


def _horner(coeffs, x, ctx):
    acc = ctx.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _absolute_coords(x: "PadicNumber", n: int):
    """Integer coordinates of x (valuation >= 0 assumed) modulo p^n."""
    if x.is_zero():
        return (0,) * x.ctx.f
    if x.val < 0:
        raise PreconditionError("element is not integral")
    scale = x.ctx.p ** x.val
    return tuple(c * scale for c in x.unit)


@lru_cache(maxsize=4096)
def _ppow(p: int, k: int) -> int:
    return p ** k


def _make(ctx: PadicContext, e: int, raw, prec) -> "PadicNumber":
    """Normalize p^e * raw known modulo p^prec into a PadicNumber."""
    prec = min(int(prec), ctx.precision) if prec != INFINITY else ctx.precision
    p = ctx.p
    if prec - e <= 0:
        return PadicNumber(ctx, prec, (0,) * ctx.f, prec)
    m = _ppow(p, prec - e)
    if ctx.f == 1:
        c = raw[0] % m
        if not c:
            return PadicNumber(ctx, prec, (0,), prec)
        v = e
        while c % p == 0:
            c //= p
            v += 1
        return PadicNumber(ctx, v, (c,), prec)
    raw = [c % m for c in raw]
    if not any(raw):
        return PadicNumber(ctx, prec, (0,) * ctx.f, prec)
    shift = min(int(valuation_int(c, p)) for c in raw if c)
    if shift:
        d = _ppow(p, shift)
        raw = [c // d for c in raw]
    v = e + shift
    m2 = _ppow(p, prec - v)
    return PadicNumber(ctx, v, tuple(c % m2 for c in raw), prec)


class PadicNumber:
    """An element p^val * unit + O(p^prec) of K_0.  Treat as immutable."""

    __slots__ = ("ctx", "val", "unit", "prec")

    def __init__(self, ctx, val, unit, prec):
        self.ctx = ctx
        self.val = val
        self.unit = unit
        self.prec = prec

    # basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.unit)

    @property
    def valuation(self):
        return INFINITY if self.is_zero() else self.val

    @property
    def precision(self) -> int:
        return self.prec

    @property
    def relative_precision(self) -> int:
        return 0 if self.is_zero() else self.prec - self.val

    def is_unit(self) -> bool:
        return not self.is_zero() and self.val == 0

    def __bool__(self):
        return not self.is_zero()

    # coercion -----------------------------------------------------------
    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if not self.ctx.same_field(other.ctx):
                raise ContextMismatch("operands live in different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx(other)
        return NotImplemented

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        e = min(self.val, other.val)
        p = self.ctx.p
        sa = _ppow(p, self.val - e)
        sb = _ppow(p, other.val - e)
        raw = [a * sa + b * sb for a, b in zip(self.unit, other.unit)]
        return _make(self.ctx, e, raw, prec)

    __radd__ = __add__

    def __neg__(self):
        return _make(self.ctx, self.val, [-c for c in self.unit], self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec + other.val, other.prec + self.val)
        e = self.val + other.val
        if self.is_zero() or other.is_zero():
            return _make(self.ctx, prec, (0,) * self.ctx.f, prec)
        m = _ppow(self.ctx.p, max(prec - e, 1))
        raw = _polymul_mod(self.unit, other.unit, self.ctx.modulus, m)
        return _make(self.ctx, e, raw, prec)

    __rmul__ = __mul__

    def invert(self) -> "PadicNumber":
        if self.is_zero():
            raise ZeroDivisionError("p-adic division by zero (to working precision)")
        rel = self.prec - self.val
        inv_unit = _unit_inverse(self.unit, self.ctx, rel)
        return _make(self.ctx, -self.val, inv_unit, -self.val + rel)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.invert()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.invert()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except ContextMismatch:
            return False
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def shift(self, k: int) -> "PadicNumber":
        """Multiply by p^k (exact, relative precision is kept)."""
        return _make(self.ctx, self.val + k, self.unit, self.prec + k)

    def add_bigoh(self, n: int) -> "PadicNumber":
        return _make(self.ctx, self.val, self.unit, min(self.prec, n))

    def lift_to(self, ctx: PadicContext) -> "PadicNumber":
        """The same element viewed in a context of a different cap."""
        if not ctx.same_field(self.ctx):
            raise ContextMismatch("cannot move between different fields")
        return _make(ctx, self.val, self.unit, self.prec)

    # field structure ----------------------------------------------------
    def frobenius(self) -> "PadicNumber":
        """The arithmetic Frobenius sigma (identity when f = 1)."""
        ctx = self.ctx
        if ctx.f == 1 or self.is_zero():
            return self
        rel = self.prec - self.val
        m = ctx.p ** rel
        st = tuple(c % m for c in ctx.sigma_of_gen())
        acc = [0] * ctx.f
        power = (1,) + (0,) * (ctx.f - 1)
        for j, c in enumerate(self.unit):
            if j:
                power = _polymul_mod(power, st, ctx.modulus, m)
            if c:
                for k in range(ctx.f):
                    acc[k] += c * power[k]
        return _make(ctx, self.val, acc, self.prec)

    def frobenius_power(self, k: int) -> "PadicNumber":
        x = self
        for _ in range(k % self.ctx.f):
            x = x.frobenius()
        return x

    def coordinates(self):
        """Coordinates over Q_p in the basis 1, t, ..., t^(f-1)."""
        ctx = self.ctx
        out = []
        for c in self.unit:
            out.append(_make(_qp_context(ctx), self.val, (c,), self.prec))
        return out

    def residue(self):
        """Reduction mod p as an int (f = 1) or coordinate tuple."""
        if self.valuation < 0:
            raise PreconditionError("element is not integral")
        if self.valuation > 0:
            return 0 if self.ctx.f == 1 else (0,) * self.ctx.f
        red = tuple(c % self.ctx.p for c in self.unit)
        return red[0] if self.ctx.f == 1 else red

    def lift(self) -> int:
        """The integer representative in [0, p^prec) of an integral Q_p element."""
        if self.ctx.f != 1:
            raise PreconditionError("lift() only applies to Q_p elements")
        if self.is_zero():
            return 0
        if self.val < 0:
            raise PreconditionError("element is not integral")
        return self.unit[0] * self.ctx.p ** self.val

    def to_fraction(self) -> Fraction:
        """The rational p^v * u with 0 <= u < p^(N - v) (Q_p elements only)."""
        if self.ctx.f != 1:
            if any(self.unit[1:]):
                raise PreconditionError("element is not in Q_p")
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit[0]) * Fraction(self.ctx.p) ** self.val

    def is_rational_coordinate(self) -> bool:
        return self.ctx.f == 1 or not any(self.unit[1:])

    def __repr__(self):
        return render_padic(self)

    __str__ = __repr__


@lru_cache(maxsize=None)
def _qp_context_cached(p, precision):
    return PadicContext(p, precision)


def _qp_context(ctx: PadicContext) -> PadicContext:
    return _qp_context_cached(ctx.p, ctx.precision)


def _unit_inverse(unit, ctx: PadicContext, rel: int):
    p = ctx.p
    m = p ** rel
    if ctx.f == 1:
        return (pow(unit[0], -1, m),)
    q = p ** ctx.f
    red = tuple(c % p for c in unit)
    x = _fp_powmod(red, q - 2, ctx.modulus, p)
    k = 1
    two = (2,) + (0,) * (ctx.f - 1)
    while k < rel:
        k = min(2 * k, rel)
        mk = p ** k
        ux = _polymul_mod(unit, x, ctx.modulus, mk)
        corr = tuple((a - b) % mk for a, b in zip(two, ux))
        x = _polymul_mod(x, corr, ctx.modulus, mk)
    return tuple(c % m for c in x)


# ---------------------------------------------------------------------------
# named operations


def add(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    return a + b


def mul(a: PadicNumber, b: PadicNumber) -> PadicNumber:
    return a * b


def invert(a: PadicNumber) -> PadicNumber:
    return a.invert()


def frobenius(x: PadicNumber) -> PadicNumber:
    return x.frobenius()


def teichmuller(a, ctx: PadicContext = None) -> PadicNumber:
    """The (p^f - 1)-th root of unity congruent to a modulo p."""
    if isinstance(a, PadicNumber):
        ctx = a.ctx if ctx is None else ctx
        x = ctx(a)
    else:
        if ctx is None:
            raise PreconditionError("a context is needed for a residue input")
        x = ctx(a)
    if x.valuation != 0:
        raise PreconditionError("Teichmuller lift needs a unit residue")
    q = ctx.p ** ctx.f
    x = _make(ctx, 0, x.unit, ctx.precision)
    for _ in range(ctx.precision + 1):
        y = x ** q
        if y == x:
            return y
        x = y
    raise PrecisionError("Teichmuller iteration did not stabilize")  # pragma: no cover


def rational_reconstruct(x: PadicNumber, bound=None):
    """A fraction a/b with |a|, |b| <= bound congruent to the Q_p element x.

    Returns None when no such fraction exists (Wang's algorithm on the
    unit part, the p-power is put back afterwards).
    """
    if x.ctx.f != 1 and any(x.unit[1:]):
        return None
    if x.is_zero():
        return Fraction(0)
    p = x.ctx.p
    rel = x.prec - x.val
    m = p ** rel
    if bound is None:
        bound = math.isqrt(m // 2)
    r0, r1 = m, x.unit[0] % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, s1) != 1:
        return None
    return Fraction(r1, s1) * Fraction(p) ** x.val


# ---------------------------------------------------------------------------
# rendering and parsing


def _digits(n: int, p: int, count: int):
    out = []
    for _ in range(count):
        out.append(n % p)
        n //= p
    return out


def _render_digit(d, p):
    if isinstance(d, int):
        return str(d)
    parts = []
    for j, c in enumerate(d):
        if c == 0:
            continue
        if j == 0:
            parts.append(str(c))
        elif j == 1:
            parts.append("t" if c == 1 else f"{c}*t")
        else:
            parts.append(f"t^{j}" if c == 1 else f"{c}*t^{j}")
    return "(" + (" + ".join(parts) if parts else "0") + ")"


def render_padic(x: PadicNumber) -> str:
    """Render as p^v * (d0 + d1*p + ...) + O(p^N) with digits in [0, p)."""
    p = x.ctx.p
    if x.is_zero():
        return f"0 + O({p}^{x.prec})"
    rel = x.prec - x.val
    if x.ctx.f == 1:
        digits = _digits(x.unit[0], p, rel)
    else:
        cols = [_digits(c, p, rel) for c in x.unit]
        digits = [tuple(col[k] for col in cols) for k in range(rel)]
    terms = []
    for k, d in enumerate(digits):
        zero = d == 0 if isinstance(d, int) else not any(d)
        if zero and k > 0:
            continue
        ds = _render_digit(d, p)
        if k == 0:
            terms.append(ds)
        elif k == 1:
            terms.append(f"{ds}*{p}")
        else:
            terms.append(f"{ds}*{p}^{k}")
    return f"{p}^{x.val} * ({' + '.join(terms)}) + O({p}^{x.prec})"


_PADIC_RE = re.compile(
    r"^\s*(?:(?P<base>\d+)\^(?P<val>-?\d+)\s*\*\s*)?\((?P<body>.*)\)\s*\+\s*O\(\s*(?P<obase>\d+)\^(?P<prec>-?\d+)\s*\)\s*$"
)
_ZERO_RE = re.compile(r"^\s*0\s*\+\s*O\(\s*(?P<obase>\d+)\^(?P<prec>-?\d+)\s*\)\s*$")
_RATIONAL_RE = re.compile(r"^\s*[-+]?\d+(\s*/\s*\d+)?\s*$")


def _split_top(s: str, sep: str = "+"):
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [q.strip() for q in parts]


def _parse_digit(s: str, ctx: PadicContext):
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    coords = [0] * ctx.f
    for term in _split_top(s):
        if not term:
            raise ParseError(f"empty digit term in {s!r}")
        m = re.fullmatch(r"(\d+)?\s*\*?\s*(t(?:\^(\d+))?)?", term)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ParseError(f"bad digit {term!r}")
        c = int(m.group(1)) if m.group(1) is not None else 1
        j = 0
        if m.group(2):
            j = int(m.group(3)) if m.group(3) else 1
        if j >= ctx.f:
            raise ParseError(f"power t^{j} out of range for f = {ctx.f}")
        coords[j] += c
    if any(c >= ctx.p or c < 0 for c in coords):
        raise ParseError(f"digit {s!r} not in [0, p)")
    return coords


def parse_padic(text: str, ctx: PadicContext) -> PadicNumber:
    """Inverse of render_padic; plain integers and fractions are also accepted."""
    p = ctx.p
    if _RATIONAL_RE.match(text):
        return ctx(Fraction(text.replace(" ", "")))
    m = _ZERO_RE.match(text)
    if m:
        if int(m.group("obase")) != p:
            raise ParseError("prime in O-term does not match the context")
        n = int(m.group("prec"))
        return _make(ctx, n, (0,) * ctx.f, n)
    m = _PADIC_RE.match(text)
    if not m:
        raise ParseError(f"cannot parse p-adic literal {text!r}")
    if int(m.group("obase")) != p or (m.group("base") and int(m.group("base")) != p):
        raise ParseError("prime in literal does not match the context")
    v = int(m.group("val") or 0)
    prec = int(m.group("prec"))
    raw = [0] * ctx.f
    for term in _split_top(m.group("body")):
        tm = re.fullmatch(r"(?P<d>\(.*\)|\d+)\s*(?:\*\s*(?P<b>\d+)(?:\^(?P<k>\d+))?)?", term)
        if not tm:
            raise ParseError(f"bad digit term {term!r}")
        if tm.group("b") and int(tm.group("b")) != p:
            raise ParseError("digit base does not match the prime")
        k = 0
        if tm.group("b"):
            k = int(tm.group("k")) if tm.group("k") else 1
        d = _parse_digit(tm.group("d"), ctx)
        for j in range(ctx.f):
            raw[j] += d[j] * p ** k
    if prec > ctx.precision:
        raise ParseError(f"literal precision {prec} exceeds the context cap {ctx.precision}")
    return _make(ctx, v, raw, prec)
