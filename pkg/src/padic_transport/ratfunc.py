"""Polynomials and rational functions over Q in one variable."""

from __future__ import annotations

from fractions import Fraction


class Poly:
    """Dense polynomial with Fraction coefficients, lowest degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, a):
        return cls([a])

    @classmethod
    def x(cls):
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lead(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.c), len(other.c))
        return Poly([(self.c[i] if i < len(self.c) else 0) + (other.c[i] if i < len(other.c) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.c])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly([1])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly([other])
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def divmod(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        q = [Fraction(0)] * max(0, len(r) - len(other.c) + 1)
        lead = other.c[-1]
        for k in range(len(r) - len(other.c), -1, -1):
            coef = r[k + len(other.c) - 1] / lead
            q[k] = coef
            if coef:
                for j, b in enumerate(other.c):
                    r[k + j] -= coef * b
        return Poly(q), Poly(r[: max(len(other.c) - 1, 0)])

    def monic(self):
        return Poly([a / self.lead() for a in self.c]) if self.c else self

    def derivative(self):
        return Poly([i * a for i, a in enumerate(self.c)][1:])

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def compose(self, other):
        other = _as_poly(other)
        acc = Poly()
        for a in reversed(self.c):
            acc = acc * other + a
        return acc

    def shift(self, a):
        """The polynomial x -> self(x + a)."""
        return self.compose(Poly([a, 1]))

    def reverse(self, n=None):
        """x^n * self(1/x)."""
        n = self.degree if n is None else n
        c = list(self.c) + [Fraction(0)] * (n + 1 - len(self.c))
        return Poly(list(reversed(c[: n + 1])))

    def order_at_zero(self) -> int:
        for i, a in enumerate(self.c):
            if a:
                return i
        raise ValueError("zero polynomial")

    def render(self, var="z") -> str:
        if not self.c:
            return "0"
        parts = []
        for k in range(len(self.c) - 1, -1, -1):
            a = self.c[k]
            if a == 0:
                continue
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if k == 0:
                body = _render_frac(mag)
            else:
                mon = var if k == 1 else f"{var}^{k}"
                body = mon if mag == 1 else f"{_render_frac(mag)}*{mon}"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({self.render('x')})"


def _render_frac(a: Fraction) -> str:
    return str(a.numerator) if a.denominator == 1 else f"({a.numerator}/{a.denominator})"


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly([x])
    raise TypeError(f"not a polynomial: {x!r}")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic() if not a.is_zero() else Poly([1])


class RationalFunction:
    """num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num)
        den = Poly([1]) if den is None else _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly([1])
            return
        g = poly_gcd(num, den)
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
        lead = den.lead()
        self.num = Poly([a / lead for a in num.c])
        self.den = Poly([a / lead for a in den.c])

    @classmethod
    def variable(cls):
        return cls(Poly.x())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def _co(self, other):
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction(_as_poly(other))

    def __add__(self, other):
        o = self._co(other)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._co(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(1) / (self ** (-n))
        return RationalFunction(self.num ** n, self.den ** n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RationalFunction(other)
        return isinstance(other, RationalFunction) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self):
        return RationalFunction(self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den)

    def dlog(self):
        """f'/f."""
        if self.is_zero():
            raise ZeroDivisionError("dlog of the zero function")
        return self.derivative() / self

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def compose(self, other: "RationalFunction") -> "RationalFunction":
        other = self._co(other)
        acc_n = RationalFunction(0)
        for a in reversed(self.num.c):
            acc_n = acc_n * other + a
        acc_d = RationalFunction(0)
        for a in reversed(self.den.c):
            acc_d = acc_d * other + a
        return acc_n / acc_d

    def order_at(self, a) -> int:
        """Order of vanishing at the rational point a (negative for poles)."""
        a = Fraction(a)
        n = self.num.shift(a)
        d = self.den.shift(a)
        return n.order_at_zero() - d.order_at_zero()

    def render(self, var="z") -> str:
        if self.den.degree == 0:
            return self.num.render(var)
        return f"({self.num.render(var)})/({self.den.render(var)})"

    def __repr__(self):
        return f"RationalFunction({self.render()})"


def rational_roots(poly: Poly):
    """Rational roots with multiplicities, found with sympy."""
    import sympy

    if poly.degree < 1:
        return {}
    z = sympy.Symbol("z")
    sp = sympy.Poly([sympy.Rational(a.numerator, a.denominator) for a in reversed(poly.c)], z, domain="QQ")
    out = {}
    for r, m in sympy.roots(sp, filter="Q").items():
        out[Fraction(int(r.p), int(r.q))] = int(m)
    return out


def simple_fraction_residues(f: RationalFunction):
    """Write f = sum_a r_a / (z - a) exactly; None if that is impossible."""
    if f.is_zero():
        return {}
    if f.num.degree >= f.den.degree:
        return None
    roots = rational_roots(f.den)
    if sum(roots.values()) != f.den.degree or any(m != 1 for m in roots.values()):
        return None
    dd = f.den.derivative()
    return {a: f.num(a) / dd(a) for a in roots}
