"""(phi, N)-modules over K_0 at finite precision.

phi acts sigma-semilinearly: phi(v) = Phi * sigma(v) on coordinate
columns, and sigma^c = id on K_0.  Weights are read from the linear map
Phi_c = Phi sigma(Phi) ... sigma^(c-1)(Phi), whose eigenvalues are
compared archimedeanly: weight i means |root| = p^(c i / 2).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .errors import ParseError, PrecisionError, PreconditionError, UniquenessError
from .padic import PadicContext, PadicNumber, parse_padic, rational_reconstruct

WEIGHT_TOLERANCE = 2.0 ** -30


def _units(mat):
    return la.field_units(mat[0][0])


def _sigma(x, k=1):
    if isinstance(x, PadicNumber):
        return x.frobenius_power(k)
    return x


def _sigma_mat(m, k=1):
    return [[_sigma(x, k) for x in row] for row in m]


# ---------------------------------------------------------------------------


class PhiNModule:
    """(V, phi, N) with optional weight filtration W and Hodge filtration F.

    ``W`` maps an integer index i to a basis of W_i (an increasing
    filtration); ``hodge`` lists the jump of each vector of ``hodge_basis``
    (default: the standard basis), so F^i is spanned by the basis vectors
    with jump >= i.
    """

    def __init__(self, phi, N=None, c=1, W=None, hodge=None, hodge_basis=None, p=None):
        self.dimension = len(phi)
        self.phi = [list(row) for row in phi]
        zero, one = _units(self.phi) if self.dimension else (Fraction(0), Fraction(1))
        self.zero, self.one = zero, one
        if isinstance(zero, PadicNumber):
            self.ctx = zero.ctx
            self.p = zero.ctx.p
        else:
            self.ctx = None
            self.p = p
        if self.p is None:
            raise PreconditionError("the prime p must be given for rational modules")
        d = self.dimension
        self.N = [list(row) for row in N] if N is not None else la.zeros(d, d, zero)
        if self.ctx is not None and self.ctx.f > 1 and c % self.ctx.f:
            raise PreconditionError("c must be a multiple of the residue degree f")
        self.c = c
        if d:
            nil, _ = la.is_nilpotent(self.N, zero, one)
            if not nil:
                raise PreconditionError("N must be nilpotent")
            if la.is_zero(la.det(self.phi, zero, one)):
                raise PreconditionError("phi must be invertible")
        self.W = {int(k): [list(v) for v in vs] for k, vs in (W or {}).items()}
        self.hodge = list(hodge) if hodge is not None else None
        if self.hodge is not None:
            if len(self.hodge) != d:
                raise PreconditionError("one Hodge jump per basis vector is required")
            self.hodge_basis = [list(v) for v in hodge_basis] if hodge_basis is not None else la.identity(d, zero, one)
            if d and la.rank(self.hodge_basis) != d:
                raise PreconditionError("Hodge basis is not a basis")
        else:
            self.hodge_basis = None

    # semilinear action ---------------------------------------------------
    def apply_phi(self, v):
        return la.mat_vec(self.phi, [_sigma(x) for x in v])

    def apply_N(self, v):
        return la.mat_vec(self.N, v)

    def phi_c(self):
        """Phi sigma(Phi) ... sigma^(c-1)(Phi), a K_0-linear map."""
        out = la.identity(self.dimension, self.zero, self.one)
        for k in range(self.c):
            out = la.mat_mul(out, _sigma_mat(self.phi, k), self.zero)
        return out

    def relation_holds(self) -> bool:
        """N Phi = p Phi sigma(N)."""
        lhs = la.mat_mul(self.N, self.phi, self.zero)
        rhs = la.mat_scale(la.mat_mul(self.phi, _sigma_mat(self.N), self.zero), self.p)
        return la.is_zero_matrix(la.mat_sub(lhs, rhs))

    def is_stable(self, basis) -> bool:
        return all(la.contains(basis, self.apply_phi(v)) and la.contains(basis, self.apply_N(v)) for v in basis)

    def __repr__(self):
        return f"PhiNModule(dim={self.dimension}, c={self.c})"


# ---------------------------------------------------------------------------
# monodromy filtration


@dataclass
class MonodromyFiltration:
    """M[i] is a basis of M_i for low <= i <= high; M_(low-1) = 0, M_high = V."""

    M: dict
    low: int
    high: int
    dimension: int

    def level(self, i):
        if i < self.low:
            return []
        if i >= self.high:
            return self.M[self.high]
        return self.M[i]

    def dims(self):
        return {i: len(self.M[i]) for i in range(self.low, self.high + 1)}

    def graded_dims(self):
        return {i: len(self.level(i)) - len(self.level(i - 1)) for i in range(self.low, self.high + 1)}


def monodromy_filtration(N) -> MonodromyFiltration:
    """M_k = sum_{j >= max(0, -k)} N^j ker N^(k + 2j + 1)."""
    d = len(N)
    if d == 0:
        return MonodromyFiltration({0: []}, 0, 0, 0)
    zero, one = _units(N)
    nil, index = la.is_nilpotent(N, zero, one)
    if not nil:
        raise PreconditionError("monodromy filtration needs a nilpotent operator")
    r = index - 1  # N^(r+1) = 0
    full = la.identity(d, zero, one)
    kers = {0: []}
    power = full
    for m in range(1, r + 1):
        power = la.mat_mul(power, N, zero)
        kers[m] = la.kernel_basis(power, zero, one)
    kers[r + 1] = full
    # images[m][j] = N^j ker N^m, built by repeated application of N
    images = {}
    for m in range(1, r + 2):
        row = [kers[m]]
        for _ in range(r):
            row.append(la.apply_to_subspace(N, row[-1]) if row[-1] else [])
        images[m] = row
    M = {}
    for k in range(-r, r + 1):
        acc = []
        for j in range(max(0, -k), r + 1):
            m = min(k + 2 * j + 1, r + 1)
            if m > 0:
                acc.extend(images[m][j])
        M[k] = la.span_basis(acc)
    return MonodromyFiltration(M, -r, r, d)


def check_monodromy_axioms(N, filt: MonodromyFiltration) -> bool:
    """N M_i in M_(i-2) and N^r: gr_r -> gr_(-r) bijective for r >= 0."""
    d = len(N)
    zero, one = _units(N) if d else (Fraction(0), Fraction(1))
    lo, hi = filt.low - 2, filt.high + 2
    for i in range(lo, hi + 1):
        image = la.apply_to_subspace(N, filt.level(i)) if filt.level(i) else []
        if not la.is_subspace(image, filt.level(i - 2)):
            return False
    if len(filt.level(hi)) != d or filt.level(lo):
        return False
    nr = la.identity(d, zero, one)
    for r in range(0, hi + 1):
        if r:
            nr = la.mat_mul(nr, N, zero)
        gr_r = len(filt.level(r)) - len(filt.level(r - 1))
        gr_mr = len(filt.level(-r)) - len(filt.level(-r - 1))
        if gr_r != gr_mr:
            return False
        if gr_r == 0:
            continue
        image = la.apply_to_subspace(nr, filt.level(r))
        if not la.is_subspace(image, filt.level(-r)):
            return False
        # injectivity on gr_r: N^r(M_r) + M_(-r-1) has dimension gr_r + dim M_(-r-1)
        total = la.subspace_sum(image, filt.level(-r - 1))
        if len(total) - len(filt.level(-r - 1)) != gr_r:
            return False
    return True


# ---------------------------------------------------------------------------
# weights


def _to_rational_matrix(m):
    out = []
    for row in m:
        new = []
        for x in row:
            if isinstance(x, PadicNumber):
                q = rational_reconstruct(x)
                if q is None:
                    raise PreconditionError("entries of the twisted product must be rational for the weight test")
                new.append(q)
            else:
                new.append(Fraction(x))
        out.append(new)
    return out


def _factor_weights(mat, p, c, tol=WEIGHT_TOLERANCE):
    """[(factor coefficients high-to-low, multiplicity, weight)] for a rational matrix."""
    import mpmath
    import sympy

    z = sympy.Symbol("z")
    sm = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in mat])
    poly = sm.charpoly(z)
    _, factors = sympy.factor_list(poly.as_expr(), z)
    out = []
    for fac, mult in factors:
        fp = sympy.Poly(fac, z)
        coeffs = [Fraction(int(sympy.fraction(a)[0]), int(sympy.fraction(a)[1])) for a in fp.all_coeffs()]
        mpmath.mp.prec = 120
        roots = mpmath.polyroots([mpmath.mpf(a.numerator) / a.denominator for a in coeffs], maxsteps=200, extraprec=200)
        mods = [abs(r) for r in roots]
        ref = mods[0]
        if any(abs(m - ref) > tol * ref for m in mods):
            raise PreconditionError("a factor has roots of different absolute values: not a Weil situation")
        w = 2 * mpmath.log(ref, p) / c
        wi = int(mpmath.nint(w))
        if abs(w - wi) > tol * max(1, abs(w)):
            raise PreconditionError(f"root absolute value gives non-integral weight {float(w)}")
        out.append((coeffs, int(mult), wi))
    return out


def _poly_of_matrix(coeffs, m, zero, one):
    """coeffs (high to low) evaluated at the matrix m."""
    d = len(m)
    acc = la.zeros(d, d, zero)
    for a in coeffs:
        acc = la.mat_mul(acc, m, zero)
        for i in range(d):
            acc[i][i] = acc[i][i] + _coerce(a, zero)
    return acc


def _coerce(a, zero):
    if isinstance(zero, PadicNumber):
        return zero.ctx(a)
    return Fraction(a)


def weights_of_linear_map(m, p, c):
    """{weight: multiplicity} for a linear map whose char poly is rational."""
    if not m:
        return {}
    out = {}
    for coeffs, mult, w in _factor_weights(_to_rational_matrix(m), p, c):
        out[w] = out.get(w, 0) + mult * (len(coeffs) - 1)
    return out


@dataclass
class WeightDecomposition:
    pieces: dict

    def dims(self):
        return {w: len(b) for w, b in self.pieces.items()}


def weight_decomposition(m: PhiNModule) -> WeightDecomposition:
    """Group generalized eigenspaces of Phi_c by the weight of their eigenvalues."""
    d = m.dimension
    if d == 0:
        return WeightDecomposition({})
    pc = m.phi_c()
    pieces = {}
    for coeffs, mult, w in _factor_weights(_to_rational_matrix(pc), m.p, m.c):
        g = _poly_of_matrix(coeffs, pc, m.zero, m.one)
        gm = la.mat_pow(g, mult, m.zero, m.one)
        ker = la.kernel_basis(gm, m.zero, m.one)
        pieces[w] = la.subspace_sum(pieces.get(w, []), ker)
    total = sum(len(b) for b in pieces.values())
    if total != d:
        raise PrecisionError("generalized eigenspaces do not fill the space at working precision")
    return WeightDecomposition(pieces)


def _complement(sub, sup, dim, zero, one):
    """Vectors of sup extending a basis of sub to a basis of sup."""
    out = []
    current = list(sub)
    for v in sup:
        if not la.contains(current, v):
            out.append(v)
            current.append(v)
    return out


def induced_map(a, sub, sup, zero, one):
    """Matrix of the linear map a on sup/sub (both a-stable), in a complement basis."""
    comp = _complement(sub, sup, len(a), zero, one)
    basis = list(sub) + comp
    k = len(sub)
    cols = []
    mat_t = la.transpose(basis)
    for v in comp:
        img = la.mat_vec(a, v)
        coords = la.solve(mat_t, img, zero, one)
        if coords is None:
            raise PreconditionError("subspace is not stable under the map")
        cols.append(coords[k:])
    return la.transpose(cols) if cols else []


def _pure_linear(pc, N, p, c, i, zero, one) -> bool:
    filt = monodromy_filtration(N)
    for r in range(filt.low, filt.high + 1):
        sub, sup = filt.level(r - 1), filt.level(r)
        if len(sup) == len(sub):
            continue
        induced = induced_map(pc, sub, sup, zero, one)
        ws = weights_of_linear_map(induced, p, c)
        if set(ws) != {r + i}:
            return False
    return True


def is_pure(m: PhiNModule, i: int) -> bool:
    """phi^c on gr^M_r has all weights r + i, for every r."""
    if m.dimension == 0:
        return True
    return _pure_linear(m.phi_c(), m.N, m.p, m.c, i, m.zero, m.one)


def is_mixed(m: PhiNModule) -> bool:
    """gr^W_i is pure of weight i for every i."""
    if not m.W:
        raise PreconditionError("is_mixed needs a weight filtration")
    idx = sorted(m.W)
    prev = []
    for i in idx:
        cur = la.span_basis(m.W[i])
        if not la.is_subspace(prev, cur):
            raise PreconditionError("W is not increasing")
        if not m.is_stable(cur):
            raise PreconditionError(f"W_{i} is not stable under phi and N")
        prev = cur
    if len(prev) != m.dimension:
        raise PreconditionError("the last step of W must be the whole space")
    pc = m.phi_c()
    prev = []
    for i in idx:
        cur = la.span_basis(m.W[i])
        if len(cur) > len(prev):
            gp = induced_map(pc, prev, cur, m.zero, m.one)
            gn = induced_map(m.N, prev, cur, m.zero, m.one)
            if not _pure_linear(gp, gn, m.p, m.c, i, m.zero, m.one):
                return False
        prev = cur
    return True


# ---------------------------------------------------------------------------
# fixed vectors and canonical elements


def _require_ctx(m: PhiNModule):
    if m.ctx is None:
        raise PreconditionError("a p-adic context is needed here")
    return m.ctx


def _annihilator_rows(basis, dim, zero, one):
    """Rows P with {v : P v = 0} = span(basis)."""
    if not basis:
        return la.identity(dim, zero, one)
    return la.nullspace(basis, zero, one)


def _qp_kernel(blocks, ctx):
    """Q_p kernel of stacked Q_p matrices; vectors over Q_p."""
    rows = [row for b in blocks for row in b]
    qz = ctx.zero().coordinates()[0] * 0
    return la.nullspace(rows, qz, qz + 1)


def fixed_vectors(m: PhiNModule, extra=()):
    """Q_p basis (as K_0 vectors) of {v : phi v = v} cut down by K_0-linear conditions P v = 0."""
    ctx = _require_ctx(m)
    d = m.dimension
    lin = la.semilinear_restrict(m.phi, ctx)
    ident = la.identity(d * ctx.f, lin[0][0] * 0, lin[0][0] * 0 + 1)
    blocks = [la.mat_sub(lin, ident)]
    for P in extra:
        if P:
            blocks.append(la.restrict_scalars(P, ctx))
    return [la.from_qp_vector(v, ctx) for v in _qp_kernel(blocks, ctx)]


def v_r_subspace(m: PhiNModule, r: int):
    """{v : phi v = v and N^a v in W_(-a-1) for 0 < a < r}, a Q_p basis."""
    if not m.W and r > 1:
        raise PreconditionError("v_r_subspace needs a weight filtration")
    d = m.dimension
    conds = []
    for a in range(1, r):
        target = [] if not m.W else _w_level(m.W, -a - 1)
        ann = _annihilator_rows(target, d, m.zero, m.one) if len(target) < d else []
        if ann:
            conds.append(la.mat_mul(ann, la.mat_pow(m.N, a, m.zero, m.one), m.zero))
    return fixed_vectors(m, conds)


def _w_level(W, i):
    keys = [k for k in W if k <= i]
    if not keys:
        return []
    return la.span_basis(W[max(keys)])


@dataclass
class TowerOfModules:
    """Levels Pi_1, ..., Pi_r with projections proj[i]: Pi_(i+2) -> Pi_(i+1) and unit in Pi_1."""

    levels: list
    projections: list
    unit: list

    def __post_init__(self):
        if len(self.projections) != len(self.levels) - 1:
            raise PreconditionError("one projection per consecutive pair of levels")
        base = self.levels[0]
        if base.dimension != 1:
            raise PreconditionError("the first level must be one-dimensional")
        diff = [a - b for a, b in zip(base.apply_phi(self.unit), self.unit)]
        if not all(la.is_zero(x) for x in diff):
            raise PreconditionError("the unit must be fixed by phi")

    def kernel(self, i):
        """ker(Pi_(i+1) -> Pi_i) for i >= 1 as a basis."""
        m = self.levels[i]
        return la.kernel_basis(self.projections[i - 1], m.zero, m.one)


@dataclass
class CanonicalElement:
    element: list
    per_level: list
    dimensions: list = field(default_factory=list)


def canonical_element(t: TowerOfModules) -> CanonicalElement:
    """The element of Pi_r restricting to the unit, fixed by phi, with N^i C_(i+1) = 0.

    At level i+1 the candidates form the Q_p space
    L_(i+1) = {y : phi y = y, N^i y = 0, proj(y) in Q_p C_i}; it must be a line.
    """
    current = list(t.unit)
    per_level = [current]
    dims = [1]
    for i in range(1, len(t.levels)):
        m = t.levels[i]
        ctx = _require_ctx(m)
        d = m.dimension
        proj = t.projections[i - 1]
        # unknowns: y (d f coordinates over Q_p) and lambda (Q_p)
        lin = la.semilinear_restrict(m.phi, ctx)
        qz = lin[0][0] * 0
        qo = qz + 1
        f = ctx.f
        rows = []
        fix = la.mat_sub(lin, la.identity(d * f, qz, qo))
        rows += [row + [qz] for row in fix]
        ni = la.restrict_scalars(la.mat_pow(m.N, i, m.zero, m.one), ctx)
        rows += [row + [qz] for row in ni]
        pr = la.restrict_scalars(proj, ctx)
        cur = la.to_qp_vector(current)
        for k, row in enumerate(pr):
            rows.append(row + [-cur[k]])
        kern = la.nullspace(rows, qz, qo)
        dims.append(len(kern))
        if len(kern) != 1:
            raise UniquenessError(f"dim L_{i + 1} = {len(kern)}, expected 1", level=i + 1, dimension=len(kern))
        v = kern[0]
        lam = v[-1]
        if lam.is_zero():
            raise UniquenessError(f"L_{i + 1} lies in the kernel of the projection", level=i + 1, dimension=1)
        y = la.from_qp_vector([c / lam for c in v[:-1]], ctx)
        current = y
        per_level.append(current)
    return CanonicalElement(current, per_level, dims)


# ---------------------------------------------------------------------------
# Hodge invariants and weak admissibility


def _hodge_levels(m: PhiNModule):
    jumps = sorted(set(m.hodge))
    return {j: [m.hodge_basis[k] for k in range(m.dimension) if m.hodge[k] >= j] for j in jumps}


def t_H(m: PhiNModule, sub=None) -> int:
    """sum of i * dim gr^i_F, for V or for the subspace ``sub`` with the induced filtration."""
    if m.hodge is None:
        raise PreconditionError("t_H needs Hodge jumps")
    if sub is None:
        return sum(m.hodge)
    sub = la.span_basis(sub)
    if not sub:
        return 0
    levels = _hodge_levels(m)
    jumps = sorted(levels)
    dims = [len(la.subspace_intersection(levels[j], sub, m.dimension, m.zero, m.one)) for j in jumps] + [0]
    return sum(j * (dims[k] - dims[k + 1]) for k, j in enumerate(jumps))


def _restricted_phi(m: PhiNModule, basis):
    """Matrix of the semilinear phi on span(basis): phi(b_j) = sum_i A_ij b_i."""
    mat_t = la.transpose(basis)
    cols = []
    for b in basis:
        coords = la.solve(mat_t, m.apply_phi(b), m.zero, m.one)
        if coords is None:
            raise PreconditionError("subspace is not phi-stable")
        cols.append(coords)
    return la.transpose(cols)


def t_N(m: PhiNModule, sub=None) -> Fraction:
    """v_p of det phi (on V or on a phi-stable subspace)."""
    if sub is None:
        basis = la.identity(m.dimension, m.zero, m.one)
    else:
        basis = la.span_basis(sub)
    if not basis:
        return Fraction(0)
    a = _restricted_phi(m, basis)
    det = la.det(a, m.zero, m.one)
    if isinstance(det, PadicNumber):
        if det.is_zero():
            raise PrecisionError("determinant vanishes at working precision")
        return Fraction(det.valuation)
    num, den = det.numerator, det.denominator
    v = 0
    while num % m.p == 0:
        num //= m.p
        v += 1
    while den % m.p == 0:
        den //= m.p
        v -= 1
    return Fraction(v)


def eigen_atoms(m: PhiNModule):
    """Generalized eigenspaces of Phi_c (split into eigenlines where Phi_c is diagonalizable on them)."""
    d = m.dimension
    pc = m.phi_c()
    atoms = []
    for coeffs, mult, w in _factor_weights(_to_rational_matrix(pc), m.p, m.c):
        g = _poly_of_matrix(coeffs, pc, m.zero, m.one)
        gen_space = la.kernel_basis(la.mat_pow(g, mult, m.zero, m.one), m.zero, m.one)
        eig = la.kernel_basis(g, m.zero, m.one)
        if len(coeffs) == 2 and len(eig) == len(gen_space):
            atoms.extend([[v] for v in eig])
        else:
            atoms.append(gen_space)
    return atoms


@dataclass
class AdmissibilityResult:
    admissible: bool
    witness: list = None
    t_H: int = None
    t_N: Fraction = None
    reason: str = ""
    checked: int = 0


def is_weakly_admissible(m: PhiNModule, subobjects=(), max_atoms: int = 12) -> AdmissibilityResult:
    """Top equality t_H = t_N plus t_H(V') <= t_N(V') on the checked subobjects."""
    d = m.dimension
    if d == 0:
        return AdmissibilityResult(True, None, 0, Fraction(0), "zero module")
    th, tn = t_H(m), t_N(m)
    if th != tn:
        return AdmissibilityResult(False, la.identity(d, m.zero, m.one), th, tn, f"t_H(V) = {th} != t_N(V) = {tn}")
    candidates = []
    for sub in subobjects:
        sub = la.span_basis(sub)
        if not m.is_stable(sub):
            raise PreconditionError("a listed subobject is not stable under phi and N")
        candidates.append(sub)
    atoms = eigen_atoms(m)
    if len(atoms) <= max_atoms:
        for k in range(1, len(atoms)):
            for combo in itertools.combinations(atoms, k):
                sub = la.span_basis([v for a in combo for v in a])
                if 0 < len(sub) < d and m.is_stable(sub):
                    candidates.append(sub)
    checked = 0
    for sub in candidates:
        checked += 1
        h, n = t_H(m, sub), t_N(m, sub)
        if h > n:
            return AdmissibilityResult(False, sub, h, n, f"subobject with t_H = {h} > t_N = {n}", checked)
    return AdmissibilityResult(True, None, th, tn, "all checked subobjects satisfy t_H <= t_N", checked)


# ---------------------------------------------------------------------------
# file format


def _parse_entry(x, ctx):
    if isinstance(x, bool):
        raise ParseError("booleans are not matrix entries")
    if isinstance(x, int):
        return ctx(x)
    if isinstance(x, str):
        try:
            return ctx(Fraction(x))
        except (ValueError, ZeroDivisionError):
            return parse_padic(x, ctx)
    raise ParseError(f"bad matrix entry {x!r}")


def _parse_matrix(data, name, d, ctx):
    if not isinstance(data, list) or len(data) != d or any(not isinstance(r, list) or len(r) != d for r in data):
        raise ParseError(f"field {name!r} must be a {d}x{d} matrix")
    return [[_parse_entry(x, ctx) for x in row] for row in data]


def parse_module(document, precision: int = 30) -> PhiNModule:
    """Module description: p, f, c, phi, N, optional weights, hodge, hodge_basis."""
    if isinstance(document, str):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    else:
        data = document
    if not isinstance(data, dict):
        raise ParseError("module document must be a JSON object")
    p = data.get("p")
    if not isinstance(p, int):
        raise ParseError("field 'p' must be an integer")
    f = data.get("f", 1)
    c = data.get("c", f)
    prec = data.get("precision", precision)
    if not isinstance(f, int) or not isinstance(c, int) or not isinstance(prec, int):
        raise ParseError("fields 'f', 'c' and 'precision' must be integers")
    ctx = PadicContext(p, prec, f)
    phi_raw = data.get("phi")
    if not isinstance(phi_raw, list):
        raise ParseError("field 'phi' must be a matrix")
    d = len(phi_raw)
    phi = _parse_matrix(phi_raw, "phi", d, ctx)
    N = _parse_matrix(data["N"], "N", d, ctx) if "N" in data else None
    W = None
    if "weights" in data:
        raw = data["weights"]
        if not isinstance(raw, dict):
            raise ParseError("field 'weights' must map indices to lists of vectors")
        W = {}
        for k, vs in raw.items():
            try:
                idx = int(k)
            except ValueError:
                raise ParseError(f"weight index {k!r} is not an integer") from None
            if not isinstance(vs, list) or any(not isinstance(v, list) or len(v) != d for v in vs):
                raise ParseError(f"weights[{k}] must be a list of vectors of length {d}")
            W[idx] = [[_parse_entry(x, ctx) for x in v] for v in vs]
    hodge = data.get("hodge")
    if hodge is not None and (not isinstance(hodge, list) or any(not isinstance(j, int) for j in hodge)):
        raise ParseError("field 'hodge' must be a list of integers")
    hb = data.get("hodge_basis")
    if hb is not None:
        hb = _parse_matrix(hb, "hodge_basis", d, ctx)
    return PhiNModule(phi, N, c, W, hodge, hb)


def analyze(m: PhiNModule) -> dict:
    """Summary used by the command line."""
    out = {"dimension": m.dimension}
    filt = monodromy_filtration(m.N)
    out["monodromy_dims"] = filt.dims()
    out["monodromy_graded"] = filt.graded_dims()
    out["relation"] = m.relation_holds()
    try:
        wd = weight_decomposition(m)
        out["weights"] = wd.dims()
        pure = [i for i in range(-4 * m.dimension - 4, 4 * m.dimension + 5) if is_pure(m, i)]
        out["pure_of_weight"] = pure[0] if pure else None
    except PreconditionError as exc:
        out["weights"] = None
        out["weight_error"] = str(exc)
    if m.W:
        out["mixed"] = is_mixed(m)
    out["t_N"] = str(t_N(m))
    if m.hodge is not None:
        out["t_H"] = t_H(m)
        res = is_weakly_admissible(m)
        out["weakly_admissible"] = res.admissible
        out["admissibility_reason"] = res.reason
    return out


def parse_tower(document, precision: int = 30) -> TowerOfModules:
    """Tower description: p, f, levels (module documents without p), projections, unit."""
    if isinstance(document, str):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    else:
        data = document
    if not isinstance(data, dict) or not isinstance(data.get("levels"), list) or not data["levels"]:
        raise ParseError("tower document needs a non-empty 'levels' list")
    base = {k: data[k] for k in ("p", "f", "precision") if k in data}
    levels = [parse_module({**base, **lvl}, precision) for lvl in data["levels"]]
    ctx = levels[0].ctx
    projections = []
    raw = data.get("projections", [])
    if not isinstance(raw, list) or len(raw) != len(levels) - 1:
        raise ParseError("one projection matrix per consecutive pair of levels")
    for k, mat in enumerate(raw):
        rows, cols = levels[k].dimension, levels[k + 1].dimension
        if not isinstance(mat, list) or len(mat) != rows or any(not isinstance(r, list) or len(r) != cols for r in mat):
            raise ParseError(f"projection {k} must be a {rows}x{cols} matrix")
        projections.append([[_parse_entry(x, ctx) for x in row] for row in mat])
    unit = data.get("unit", [1])
    if not isinstance(unit, list) or len(unit) != levels[0].dimension:
        raise ParseError("field 'unit' must be a vector in the first level")
    return TowerOfModules(levels, projections, [_parse_entry(x, ctx) for x in unit])
