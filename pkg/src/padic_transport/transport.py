"""Canonical transport on the projective line minus rational points.

Within one residue disk the transport is the local analytic one.  Between
disks it is the unique Frobenius-fixed element of the transport tower:
writing X = T(x0 -> x1), Frobenius equivariance for the lift z -> z^p
reads

    X = Phi(x1) L1 sigma(X) L0 Phi(x0)^(-1),

with L1 = T(sigma x1 -> x1^p) and L0 = T(x0^p -> sigma x0) local
transports (each pair shares a disk).  The tower Pi_1, ..., Pi_r records X
modulo entries of weight difference >= i; phimod.canonical_element solves
the fixed-point problem level by level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .connection import LogConnection, canonical_gauge, is_unipotent, pmat_exp_nilpotent, std_log
from .errors import PreconditionError
from .globalphi import frobenius_structure
from .logring import KstElement, render_kst
from .padic import PadicContext, PadicNumber, teichmuller
from .parser import ConnectionSpec, FormExpr, parse_connection, parse_form, parse_rational
from .phimod import PhiNModule, TowerOfModules, canonical_element
from .ratfunc import RationalFunction, simple_fraction_residues

INF = "inf"


def _guard(rank: int, p: int, precision: int) -> int:
    return 2 * rank + 4 + math.ceil(math.log(precision + 2, p))


# ---------------------------------------------------------------------------
# curves with a global connection


@dataclass
class CurveSpec:
    """A connection dY = A Y on P^1 minus finitely many rational points.

    ``matrix`` holds the dz-coefficients of A as rational functions;
    ``residues`` maps each finite singular point to its residue matrix, and
    ``weights`` is a grading with A_ij != 0 only when w_j = w_i + 1.
    """

    p: int
    matrix: list
    residues: dict
    weights: list
    singular: list
    infinity_singular: bool

    @property
    def rank(self):
        return len(self.matrix)

    @property
    def max_level(self):
        return max(self.weights) - min(self.weights) + 1

    @classmethod
    def from_rational(cls, matrix, p: int, singular=None):
        r = len(matrix)
        residues = {}
        for i in range(r):
            for j in range(r):
                f = matrix[i][j]
                res = simple_fraction_residues(f)
                if res is None:
                    raise PreconditionError(
                        f"entry ({i},{j}) is not a sum of c dlog(z - a) with rational a"
                    )
                for a, c in res.items():
                    residues.setdefault(a, [[Fraction(0)] * r for _ in range(r)])[i][j] = Fraction(c)
        for a in singular or ():
            if a != INF:
                residues.setdefault(Fraction(a), [[Fraction(0)] * r for _ in range(r)])
        points = sorted(residues)
        total = [[sum(residues[a][i][j] for a in points) for j in range(r)] for i in range(r)]
        inf_sing = any(x != 0 for row in total for x in row) or (singular is not None and INF in singular)
        for a in points:
            _check_nilpotent(residues[a], a)
        _check_nilpotent([[-x for x in row] for row in total], INF)
        curve = cls(p, [list(row) for row in matrix], residues, _grading(residues, r), points, inf_sing)
        curve.check_reduction()
        return curve

    @classmethod
    def from_spec(cls, spec: ConnectionSpec, p: int = None):
        p = p or spec.prime
        if p is None:
            raise PreconditionError("a prime is required")
        return cls.from_rational(spec.rational_matrix(), p, spec.singularities)

    @classmethod
    def from_document(cls, document, p: int = None):
        return cls.from_spec(parse_connection(document), p)

    def check_reduction(self):
        """Finite singular points must be p-integral and distinct mod p."""
        p = self.p
        seen = {}
        for a in self.singular:
            if a.denominator % p == 0:
                raise PreconditionError(f"singular point {a} reduces to infinity mod {p}")
            red = a.numerator * pow(a.denominator, -1, p) % p
            if red in seen:
                raise PreconditionError(f"singular points {seen[red]} and {a} collide mod {p}")
            seen[red] = a

    def tensor(self, other: "CurveSpec") -> "CurveSpec":
        if self.p != other.p:
            raise PreconditionError("curves over different primes")
        n, m = self.rank, other.rank
        zero = RationalFunction(0)
        mat = [[zero] * (n * m) for _ in range(n * m)]
        for i in range(n):
            for k in range(m):
                for j in range(n):
                    for l in range(m):
                        v = zero
                        if k == l:
                            v = v + self.matrix[i][j]
                        if i == j:
                            v = v + other.matrix[k][l]
                        mat[i * m + k][j * m + l] = v
        return CurveSpec.from_rational(mat, self.p)

    def local_connection(self, center, ctx: PadicContext, order: int) -> LogConnection:
        return LogConnection.from_rational(self.matrix, center, ctx, order)

    def check_unipotent(self, ctx: PadicContext = None):
        """is_unipotent on the local expansion at every singular point."""
        ctx = ctx or PadicContext(self.p, 10)
        centers = list(self.singular) + ([INF] if self.infinity_singular else [])
        return all(is_unipotent(self.local_connection(c, ctx, 6))[0] for c in centers)


def _check_nilpotent(m, where):
    r = len(m)
    nil, _ = la.is_nilpotent(m, Fraction(0), Fraction(1))
    if not nil:
        from .connection import NotUnipotentError

        raise NotUnipotentError(f"residue at {where} is not nilpotent")


def _grading(residues, r):
    """Weights with A_ij != 0 only when w_j = w_i + 1 (one component at a time)."""
    adj = {i: [] for i in range(r)}
    for m in residues.values():
        for i in range(r):
            for j in range(r):
                if m[i][j] != 0:
                    adj[i].append((j, 1))
                    adj[j].append((i, -1))
    w = [None] * r
    for s in range(r):
        if w[s] is not None:
            continue
        w[s] = 0
        comp = [s]
        stack = [s]
        while stack:
            i = stack.pop()
            for j, d in adj[i]:
                if w[j] is None:
                    w[j] = w[i] + d
                    comp.append(j)
                    stack.append(j)
                elif w[j] != w[i] + d:
                    raise PreconditionError(
                        "connection is not graded by weight (global transport needs A_ij = 0 unless w_j = w_i + 1)"
                    )
        low = min(w[i] for i in comp)
        for i in comp:
            w[i] -= low
    return w


# ---------------------------------------------------------------------------
# built-in curves


def _forms_matrix(entries, r):
    zero = RationalFunction(0)
    mat = [[zero] * r for _ in range(r)]
    for (i, j), f in entries.items():
        mat[i][j] = f if isinstance(f, RationalFunction) else _letter(f)
    return mat


def _letter(w) -> RationalFunction:
    if isinstance(w, RationalFunction):
        return w
    if isinstance(w, FormExpr):
        return w.rational_form()
    return parse_form(str(w)).rational_form()


def kummer_curve(p: int, m: int = 1) -> CurveSpec:
    """[[0, m dlog z], [0, 0]] on G_m."""
    return CurveSpec.from_rational(_forms_matrix({(0, 1): parse_rational(f"{m}/z")}, 2), p)


def jordan_curve(p: int, r: int) -> CurveSpec:
    """d - N dlog z with N the full Jordan block: the level-r tower of G_m."""
    return CurveSpec.from_rational(_forms_matrix({(i, i + 1): parse_rational("1/z") for i in range(r - 1)}, r), p)


def word_curve(word, p: int) -> CurveSpec:
    """A_(k-1),k = k-th letter, so the (0, n) transport entry is the iterated integral."""
    n = len(word)
    return CurveSpec.from_rational(_forms_matrix({(k, k + 1): word[k] for k in range(n)}, n + 1), p)


def polylog_curve(k: int, p: int) -> CurveSpec:
    """Horizontal vector (Li_k, ..., Li_1, 1): dLi_j = Li_(j-1) dlog z, dLi_1 = -dlog(1 - z)."""
    entries = {(j, j + 1): parse_rational("1/z") for j in range(k - 1)}
    entries[(k - 1, k)] = parse_rational("1/(1-z)")
    return CurveSpec.from_rational(_forms_matrix(entries, k + 1), p, singular=[Fraction(0), Fraction(1), INF])


def parse_word(text: str):
    """'dlog(z),dlog(1-z)' -> list of FormExpr (commas at depth 0 split letters)."""
    letters, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            letters.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        letters.append(cur)
    return [parse_form(w.strip()) for w in letters if w.strip()]


# ---------------------------------------------------------------------------
# residue disks and local transport


@dataclass
class Disk:
    kind: str  # 'singular', 'infinity' or 'good'
    center: object  # Fraction, PadicNumber or INF

    def coordinate(self, x: PadicNumber) -> PadicNumber:
        if self.center == INF:
            return x.invert()
        return x - x.ctx(self.center) if not isinstance(self.center, PadicNumber) else x - self.center

    def key(self):
        return (self.kind, str(self.center))


def locate(curve: CurveSpec, x: PadicNumber) -> Disk:
    """The residue disk of x, checking the endpoint is allowed."""
    if x.is_zero():
        if Fraction(0) in curve.singular:
            raise PreconditionError("endpoint is a singular point")
        return Disk("good", Fraction(0))
    if x.valuation < 0:
        return Disk("infinity", INF)
    for a in curve.singular:
        u = x - x.ctx(a)
        if u.is_zero():
            raise PreconditionError(f"endpoint is the singular point {a}")
        if u.valuation > 0:
            if a != 0:
                raise PreconditionError(f"endpoint lies in the residue disk of the singular point {a}")
            return Disk("singular", Fraction(0))
    if x.ctx.f == 1 or x.valuation > 0:
        return Disk("good", Fraction(x.residue()) if x.ctx.f == 1 else Fraction(0))
    # over an unramified extension the residue is not rational: center the
    # disk at the Teichmuller representative
    return Disk("good", teichmuller(x))


class _LocalFrames:
    """Frames of the negated connection, cached per residue disk."""

    def __init__(self, curve: CurveSpec, ctx: PadicContext, order: int):
        self.curve, self.ctx, self.order = curve, ctx, order
        self.frames = {}

    def frame(self, disk: Disk):
        k = disk.key()
        if k not in self.frames:
            conn = self.curve.local_connection(disk.center, self.ctx, self.order)
            self.frames[k] = canonical_gauge(conn.negated())
        return self.frames[k]

    def transport(self, disk: Disk, x0: PadicNumber, x1: PadicNumber):
        """T(x0 -> x1) for two points of one disk, over K_st."""
        ctx = self.ctx
        frame = self.frame(disk)
        y0, y1 = disk.coordinate(x0), disk.coordinate(x1)
        nilp = not la.is_zero_matrix(frame.N0)

        def gauge(y):
            if y.is_zero():
                if nilp:
                    raise PreconditionError("endpoint at the puncture")
                return la.identity(len(frame.N0), ctx.zero(), ctx.one())
            return frame.gauge_at(y)

        g1 = gauge(y1)
        g0inv = la.inverse(gauge(y0), ctx.zero(), ctx.one())
        kz = KstElement(ctx, [])
        to_k = lambda m: [[KstElement(ctx, [c]) for c in row] for row in m]
        out = la.mat_mul(to_k(g1), to_k(g0inv), kz)
        if nilp:
            e = pmat_exp_nilpotent(la.mat_neg(frame.N0), std_log(y1) - std_log(y0), ctx)
            out = la.mat_mul(la.mat_mul(to_k(g1), e, kz), to_k(g0inv), kz)
        return out


# ---------------------------------------------------------------------------
# the transport tower


class TransportTower:
    """Pi_1, ..., Pi_r between x0 and x1 with phi(X) = F1 sigma(X) F0.

    Coordinates of Pi_i: one scalar for the diagonal, then for every entry
    (a, b) with 0 < w_b - w_a = m < i the coefficients of L^0, ..., L^m.
    """

    def __init__(self, weights, F1, F0, ctx: PadicContext, level: int):
        self.weights = weights
        self.F1, self.F0 = F1, F0
        self.ctx = ctx
        self.level = level
        r = len(weights)
        self.entries = [
            (a, b, k)
            for m in range(1, level)
            for a in range(r)
            for b in range(r)
            if weights[b] - weights[a] == m
            for k in range(m + 1)
        ]

    def coords(self, i):
        """Coordinate labels of Pi_i (None is the diagonal scalar)."""
        w = self.weights
        return [None] + [e for e in self.entries if w[e[1]] - w[e[0]] < i]

    def to_matrix(self, vec, labels):
        ctx, r = self.ctx, len(self.weights)
        coeffs = [[{} for _ in range(r)] for _ in range(r)]
        for lab, c in zip(labels, vec):
            if lab is None:
                for a in range(r):
                    coeffs[a][a][0] = c
            else:
                a, b, k = lab
                coeffs[a][b][k] = c
        out = []
        for a in range(r):
            row = []
            for b in range(r):
                d = coeffs[a][b]
                n = max(d) + 1 if d else 0
                row.append(KstElement(ctx, [d.get(k, ctx.zero()) for k in range(n)]))
            out.append(row)
        return out

    def from_matrix(self, mat, labels):
        out = []
        for lab in labels:
            if lab is None:
                out.append(mat[0][0].coefficient(0))
            else:
                a, b, k = lab
                out.append(mat[a][b].coefficient(k))
        return out

    def phi_map(self, x):
        kz = KstElement(self.ctx, [])
        return la.mat_mul(la.mat_mul(self.F1, x, kz), self.F0, kz)

    def module(self, i) -> PhiNModule:
        labels = self.coords(i)
        ctx = self.ctx
        cols = []
        for n in range(len(labels)):
            vec = [ctx.one() if t == n else ctx.zero() for t in range(len(labels))]
            image = self.phi_map(self.to_matrix(vec, labels))
            cols.append(self.from_matrix(image, labels))
        phi = la.transpose(cols)
        d = len(labels)
        W = self.weight_filtration(i, labels)
        return PhiNModule(phi, la.zeros(d, d, ctx.zero()), c=ctx.f, W=W)

    def weight_filtration(self, i, labels):
        """W_(-j) = ker(Pi_i -> Pi_(j+1)) for 1 <= j < i, W_0 = Pi_i."""
        ctx = self.ctx
        w = self.weights
        d = len(labels)
        out = {0: la.identity(d, ctx.zero(), ctx.one())}
        for j in range(1, i):
            vecs = []
            for n, lab in enumerate(labels):
                if lab is not None and w[lab[1]] - w[lab[0]] >= j:
                    vecs.append([ctx.one() if t == n else ctx.zero() for t in range(d)])
            out[-j] = vecs
        return out

    def projection(self, i):
        """Pi_(i+1) -> Pi_i as a coordinate selection matrix."""
        big, small = self.coords(i + 1), self.coords(i)
        ctx = self.ctx
        return [[ctx.one() if lab == blab else ctx.zero() for blab in big] for lab in small]

    def tower(self) -> TowerOfModules:
        levels = [self.module(i) for i in range(1, self.level + 1)]
        projections = [self.projection(i) for i in range(1, self.level)]
        return TowerOfModules(levels, projections, [self.ctx.one()])


# ---------------------------------------------------------------------------


@dataclass
class TransportResult:
    matrix: list
    prime: int
    precision: int
    x0: object
    x1: object
    level: int
    path: str
    dimensions: list = field(default_factory=list)

    def entry(self, i, j):
        return self.matrix[i][j]

    def render(self):
        return [[render_kst(v) for v in row] for row in self.matrix]

    def as_dict(self):
        return {
            "prime": self.prime,
            "precision": self.precision,
            "from": str(self.x0),
            "to": str(self.x1),
            "level": self.level,
            "path": self.path,
            "tower_dimensions": self.dimensions,
            "matrix": self.render(),
        }


def _point(x, ctx: PadicContext) -> PadicNumber:
    if isinstance(x, PadicNumber):
        return x.lift_to(ctx) if x.ctx.precision < ctx.precision and x.ctx.same_field(ctx) else ctx(x)
    return ctx(x)


def _local_order(precision, rank, p):
    return precision + 4 + 2 * rank * math.ceil(math.log(2 * precision + 2, p))


class TransportEngine:
    """Everything shared between transports on one curve at one precision."""

    def __init__(self, curve: CurveSpec, precision: int, f: int = 1, ctx: PadicContext = None):
        self.curve = curve
        self.precision = precision
        work = precision + _guard(curve.rank, curve.p, precision)
        self.ctx = ctx.with_precision(work) if ctx is not None else PadicContext(curve.p, work, f)
        self.qp = PadicContext(curve.p, work)
        self.frames = _LocalFrames(curve, self.ctx, _local_order(work, curve.rank, curve.p))
        self._phi = None

    @property
    def phi(self):
        if self._phi is None:
            self._phi = frobenius_structure(self.curve.residues, self.curve.weights, self.qp)
        return self._phi

    def transport(self, x0, x1, level=None, method="auto") -> TransportResult:
        curve, ctx = self.curve, self.ctx
        level = curve.max_level if level is None else level
        if level < 1:
            raise PreconditionError("level must be at least 1")
        a0, a1 = _point(x0, ctx), _point(x1, ctx)
        d0, d1 = locate(curve, a0), locate(curve, a1)
        dims = []
        if method == "auto" and d0.key() == d1.key():
            mat = self.frames.transport(d0, a0, a1)
            path = f"local transport inside the disk {_disk_name(d0)}"
        else:
            mat, dims = self._frobenius_transport(a0, a1, d0, d1, level)
            path = f"Frobenius fixed point between {_disk_name(d0)} and {_disk_name(d1)}"
        mat = _truncate_level(mat, curve.weights, level)
        mat = [[v.add_bigoh(self.precision).lift_to(ctx.with_precision(self.precision)) for v in row] for row in mat]
        return TransportResult(mat, curve.p, self.precision, x0, x1, level, path, dims)

    def _frobenius_transport(self, a0, a1, d0, d1, level):
        ctx, p = self.ctx, self.curve.p
        if level == 1:
            return _truncate_level(la.identity(self.curve.rank, KstElement(ctx, []), KstElement(ctx, [ctx.one()])), self.curve.weights, 1), [1]
        # sigma(x) and x^p share the disk of x^p, which is the disk of x when f = 1
        l1 = self.frames.transport(locate(self.curve, a1 ** p), a1.frobenius(), a1 ** p)
        l0 = self.frames.transport(locate(self.curve, a0 ** p), a0 ** p, a0.frobenius())
        phi1 = self.phi.evaluate(a1)
        phi0inv = la.inverse(self.phi.evaluate(a0), ctx.zero(), ctx.one())
        kz = KstElement(ctx, [])
        to_k = lambda m: [[KstElement(ctx, [c]) for c in row] for row in m]
        f1 = la.mat_mul(to_k(phi1), l1, kz)
        f0 = la.mat_mul(l0, to_k(phi0inv), kz)
        tower = TransportTower(self.curve.weights, f1, f0, ctx, level)
        can = canonical_element(tower.tower())
        return tower.to_matrix(can.element, tower.coords(level)), can.dimensions

    def build_tower(self, x0, x1, level=None) -> TransportTower:
        """The tower used for cross-disk transport (exposed for inspection)."""
        level = self.curve.max_level if level is None else level
        ctx, p = self.ctx, self.curve.p
        a0, a1 = _point(x0, ctx), _point(x1, ctx)
        # sigma(x) and x^p share the disk of x^p, which is the disk of x when f = 1
        l1 = self.frames.transport(locate(self.curve, a1 ** p), a1.frobenius(), a1 ** p)
        l0 = self.frames.transport(locate(self.curve, a0 ** p), a0 ** p, a0.frobenius())
        kz = KstElement(ctx, [])
        to_k = lambda m: [[KstElement(ctx, [c]) for c in row] for row in m]
        f1 = la.mat_mul(to_k(self.phi.evaluate(a1)), l1, kz)
        f0 = la.mat_mul(l0, to_k(la.inverse(self.phi.evaluate(a0), ctx.zero(), ctx.one())), kz)
        return TransportTower(self.curve.weights, f1, f0, ctx, level)


def _disk_name(d: Disk):
    if d.center == INF:
        return "D(inf)"
    if isinstance(d.center, PadicNumber):
        return f"D({d.center.residue()})"
    return f"D({d.center})"


def _truncate_level(mat, weights, level):
    r = len(weights)
    out = []
    for a in range(r):
        row = []
        for b in range(r):
            v = mat[a][b]
            if weights[b] - weights[a] >= level:
                v = KstElement(v.ctx, [])
            row.append(v)
        out.append(row)
    return out


def canonical_transport(curve: CurveSpec, x0, x1, level=None, precision: int = 20, f: int = 1, method="auto"):
    """The canonical level-r transport T(x0 -> x1) as a TransportResult."""
    return TransportEngine(curve, precision, f).transport(x0, x1, level, method)


def iterated_integral(word, x0, x1, p: int, precision: int = 20, method="auto") -> KstElement:
    """The (0, n) entry of the transport of the word connection."""
    if isinstance(word, str):
        word = parse_word(word)
    if not word:
        return KstElement(PadicContext(p, precision), [1])
    curve = word_curve(list(word), p)
    res = canonical_transport(curve, x0, x1, precision=precision, method=method)
    return res.matrix[0][len(word)]


def series_polylog(k: int, z: PadicNumber) -> PadicNumber:
    """sum_{n >= 1} z^n / n^k for v(z) > 0."""
    ctx = z.ctx
    v = z.valuation
    if v <= 0:
        raise PreconditionError("the polylog series needs |z| < 1")
    acc = ctx.zero()
    zn = ctx.one()
    n = 0
    while True:
        n += 1
        zn = zn * z
        if n * v - k * math.log(n, ctx.p) > ctx.precision + 1:
            break
        acc = acc + zn / Fraction(n) ** k
    return acc


def polylog(k: int, z, p: int, precision: int = 20, base=None, method="auto") -> KstElement:
    """Li_k(z): the polylog vector at ``base`` (series values) transported to z."""
    if k < 1:
        raise PreconditionError("k must be positive")
    curve = polylog_curve(k, p)
    eng = TransportEngine(curve, precision)
    ctx = eng.ctx
    base = ctx(p) if base is None else _point(base, ctx)
    if base.valuation <= 0:
        raise PreconditionError("the base point must lie in the residue disk of 0")
    res = eng.transport(base, z, method=method)
    out = ctx.with_precision(precision)
    vec = [series_polylog(k - j, base).lift_to(out) for j in range(k)] + [out.one()]
    total = KstElement(out, [])
    for j in range(k + 1):
        total = total + res.matrix[0][j] * vec[j]
    return total


def polylog_entry(k: int, z0, z1, p: int, precision: int = 20, method="auto") -> KstElement:
    """The raw (0, k) transport entry of the polylog connection from z0 to z1."""
    res = canonical_transport(polylog_curve(k, p), z0, z1, precision=precision, method=method)
    return res.matrix[0][k]


def pushforward_check(m: int, x0, x1, p: int, precision: int = 20) -> bool:
    """For f(z) = z^m: T_(f* Kummer)(x0 -> x1) equals T_Kummer(f(x0) -> f(x1))."""
    ctx = PadicContext(p, precision)
    a0, a1 = ctx(x0) if not isinstance(x0, PadicNumber) else x0, ctx(x1) if not isinstance(x1, PadicNumber) else x1
    pulled = canonical_transport(kummer_curve(p, m), a0, a1, precision=precision)
    pushed = canonical_transport(kummer_curve(p), a0 ** m, a1 ** m, precision=precision)
    return all(x == y for ra, rb in zip(pulled.matrix, pushed.matrix) for x, y in zip(ra, rb))
