"""Exponential sums and integrals on lattice cones.

A lattice cone pairs a rational cone with a lattice of its linear span.  The
generating function of the lattice points of a smooth simplicial cone
factors over its generators as a product of 1/(1 - e^x) terms; each factor
splits into an exact polar piece -1/x and a holomorphic tail whose Taylor
coefficients are Bernoulli-number data.  We keep the pole structure exact
and truncate only the transcendental tails, so the highest-order residue of
the sum — which only sees the exact polar top — reproduces the lattice
normalized cone integral with no approximation at all.

Floating point appears in exactly one place: the direct lattice-summation
oracle used to sanity-check truncated germs numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import exp
from itertools import product as iter_product
from typing import Sequence

from .errors import (
    NoSmoothSubdivisionAvailable,
    NotASubdivision,
    NotDimensionTwo,
    NotSimplicial,
    NotSmooth,
)
from .exact import (
    ONE,
    ZERO,
    AmbientSpace,
    Polynomial,
    Vec,
    det,
    frac,
    mat_from_columns,
    mat_identity,
    mat_rank,
    nullspace,
    primitive_vector,
    solve,
    vec,
    vec_dot,
)
from .cones import (
    PolyCone,
    SimplicialCone,
    is_subdivision,
    make_simplicial_cone,
    triangulate_cone,
)
from .germs import (
    GermSum,
    PolarGerm,
    as_mero,
    canonicalize_polar,
    decompose,
    evaluate,
    make_germ_sum,
    make_mero,
    mero_add,
    mero_mul,
)
from .residues import p_res

DEFAULT_TRUNCATION = 8

__all__ = [
    "DEFAULT_TRUNCATION",
    "LatticeCone",
    "TruncatedGerm",
    "make_lattice_cone",
    "make_truncated",
    "is_smooth",
    "bernoulli_tail_coeffs",
    "exp_sum_smooth",
    "exp_integral",
    "smooth_subdivide_2d",
    "p_res_exp_sum",
    "truncated_add",
    "truncated_mul",
    "evaluate_truncated",
    "lattice_sum_numeric",
]


@dataclass(frozen=True)
class LatticeCone:
    """A cone together with a lattice basis of its linear span.

    Generators are normalized at construction to the primitive lattice
    vector of their ray, so the stored cone depends only on (cone, lattice)
    as geometric data.
    """

    cone: SimplicialCone | PolyCone
    lattice_basis: tuple[Vec, ...]

    @property
    def ambient(self) -> int:
        return self.cone.ambient

    @property
    def rays(self) -> tuple[Vec, ...]:
        if isinstance(self.cone, SimplicialCone):
            return self.cone.generators
        return self.cone.rays

    @property
    def dim(self) -> int:
        return len(self.lattice_basis)


def _integer_kernel(rows: Sequence[Vec], k: int) -> list[Vec]:
    """Basis of the lattice { x in Z^k : rows . x = 0 } (saturated).

    Unimodular column elimination: reduce the matrix to column echelon form
    while tracking the operations on an identity matrix; the tracked columns
    over the zeroed-out part are exactly a kernel lattice basis.
    """
    if not rows:
        return [tuple(ONE if j == i else ZERO for j in range(k))
                for i in range(k)]
    ints = []
    for r in rows:
        p = primitive_vector(r)
        ints.append([int(c) for c in p])
    a = [[row[j] for j in range(k)] for row in ints]
    u = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    start = 0

    def colop(j2: int, j1: int, q: int):
        for row in a:
            row[j2] -= q * row[j1]
        for row in u:
            row[j2] -= q * row[j1]

    def colswap(j1: int, j2: int):
        for row in a:
            row[j1], row[j2] = row[j2], row[j1]
        for row in u:
            row[j1], row[j2] = row[j2], row[j1]

    for r in range(len(a)):
        while True:
            nz = [j for j in range(start, k) if a[r][j] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: abs(a[r][j]))
            colop(nz[1], nz[0], a[r][nz[1]] // a[r][nz[0]])
        nz = [j for j in range(start, k) if a[r][j] != 0]
        if nz:
            colswap(start, nz[0])
            start += 1
    return [tuple(Fraction(u[i][j]) for i in range(k))
            for j in range(start, k)]


def _lattice_coords(basis: Sequence[Vec], v: Vec) -> Vec:
    coords = solve(mat_from_columns(list(basis)), v)
    if coords is None:
        raise ValueError("vector lies outside the lattice span")
    recon = tuple(sum((coords[j] * b[i] for j, b in enumerate(basis)), ZERO)
                  for i in range(len(v)))
    if recon != v:
        raise ValueError("vector lies outside the lattice span")
    return coords


def _from_coords(basis: Sequence[Vec], coords: Sequence[Fraction]) -> Vec:
    k = len(basis[0])
    return tuple(sum((c * b[i] for c, b in zip(coords, basis)), ZERO)
                 for i in range(k))


def make_lattice_cone(generators, lattice_basis=None) -> LatticeCone:
    """Build a lattice cone; defaults to the integer points of the span.

    ``generators`` may be a SimplicialCone, a PolyCone, or raw generator
    rows.  Basis vectors must be independent integer vectors spanning the
    cone's linear span, and every generator must be an integer combination
    of them; each generator is then rescaled to the primitive lattice vector
    of its ray.
    """
    if isinstance(generators, (SimplicialCone, PolyCone)):
        cone = generators
        raw_rows = None
    else:
        raw_rows = [vec(r) for r in generators]
        cone = make_simplicial_cone(raw_rows)
    rays = cone.generators if isinstance(cone, SimplicialCone) else cone.rays
    k = cone.ambient
    d = mat_rank(rays)
    if lattice_basis is None:
        if d == k:
            basis = [tuple(ONE if j == i else ZERO for j in range(k))
                     for i in range(k)]
        else:
            basis = _integer_kernel(nullspace(rays), k)
    else:
        basis = [vec(b) for b in lattice_basis]
        for b in basis:
            if any(c.denominator != 1 for c in b):
                raise ValueError("lattice basis vectors must be integer")
    if mat_rank(tuple(basis)) != len(basis) or len(basis) != d:
        raise ValueError("lattice basis must be independent and span lin(C)")
    if mat_rank(tuple(rays) + tuple(basis)) != d:
        raise ValueError("lattice basis must span the same space as the cone")
    if raw_rows is not None:
        # membership is a condition on the vectors the caller supplied;
        # cone objects carry only ray directions, which always rescale
        for r in raw_rows:
            coords = _lattice_coords(basis, r)
            if any(c.denominator != 1 for c in coords):
                raise ValueError(f"generator {r} is not a lattice vector")
    normalized = []
    for g in rays:
        prim = primitive_vector(_lattice_coords(basis, g))
        normalized.append(_from_coords(basis, prim))
    if isinstance(cone, SimplicialCone):
        new_cone: SimplicialCone | PolyCone = SimplicialCone(
            tuple(sorted(normalized)))
    else:
        new_cone = PolyCone(tuple(sorted(normalized)))
    return LatticeCone(new_cone, tuple(basis))


def is_smooth(lc: LatticeCone) -> bool:
    """Generators form a lattice basis of the span (unimodular coordinates)."""
    if not isinstance(lc.cone, SimplicialCone):
        raise NotSimplicial("smoothness is defined for simplicial cones")
    coords = [_lattice_coords(lc.lattice_basis, g)
              for g in lc.cone.generators]
    return abs(det(tuple(coords))) == 1


def bernoulli_tail_coeffs(n: int) -> list[Fraction]:
    """Taylor coefficients c_0..c_n of 1/(1-e^x) + 1/x at zero.

    Obtained by exact power-series inversion of (e^x - 1)/x and a sign flip:
    1/(1-e^x) = -(1/x) * [x/(e^x-1)].
    """
    g = [ONE / _factorial(j + 1) for j in range(n + 2)]
    b = [ONE]
    for m in range(1, n + 2):
        acc = ZERO
        for i in range(1, m + 1):
            acc += g[i] * b[m - i]
        b.append(-acc)
    return [-b[j + 1] for j in range(n + 1)]


def _factorial(n: int) -> Fraction:
    out = ONE
    for i in range(2, n + 1):
        out *= i
    return out


@dataclass(frozen=True)
class TruncatedGerm:
    """Exact polar data plus a Taylor tail known up to a stated degree."""

    polar_part: GermSum
    taylor_tail: Polynomial
    truncation_order: int

    @property
    def nvars(self) -> int:
        return self.taylor_tail.nvars

    def as_germ_sum(self) -> GermSum:
        """The whole datum as one exact object (tail read literally)."""
        return make_germ_sum(list(self.polar_part.terms),
                             self.polar_part.poly + self.taylor_tail)

    def __repr__(self):
        return (f"TruncatedGerm({len(self.polar_part.terms)} polar terms, "
                f"tail to degree {self.truncation_order})")


def _truncate_poly(p: Polynomial, n: int) -> Polynomial:
    return Polynomial(p.nvars, {e: c for e, c in p.terms.items()
                                if sum(e) <= n})


def make_truncated(space: AmbientSpace, f, n: int) -> TruncatedGerm:
    """Split a germ into exact polar part and degree-n truncated tail."""
    s = decompose(space, as_mero(f))
    polar = make_germ_sum(list(s.terms), Polynomial.zero(s.nvars))
    return TruncatedGerm(polar, _truncate_poly(s.poly, n), n)


def truncated_add(a: TruncatedGerm, b: TruncatedGerm) -> TruncatedGerm:
    n = min(a.truncation_order, b.truncation_order)
    polar = make_germ_sum(list(a.polar_part.terms) + list(b.polar_part.terms),
                          a.polar_part.poly + b.polar_part.poly)
    return TruncatedGerm(polar,
                         _truncate_poly(a.taylor_tail + b.taylor_tail, n), n)


def truncated_mul(space: AmbientSpace, a: TruncatedGerm,
                  b: TruncatedGerm) -> TruncatedGerm:
    """Product, re-decomposed exactly, with tails truncated at the shared
    order."""
    n = min(a.truncation_order, b.truncation_order)
    fa = mero_add(as_mero(a.polar_part), make_mero(a.taylor_tail))
    fb = mero_add(as_mero(b.polar_part), make_mero(b.taylor_tail))
    s = decompose(space, mero_mul(fa, fb))
    polar = make_germ_sum(list(s.terms), Polynomial.zero(s.nvars))
    return TruncatedGerm(polar, _truncate_poly(s.poly, n), n)


def evaluate_truncated(tg: TruncatedGerm, point: Sequence) -> Fraction:
    return evaluate(tg.as_germ_sum(), point)


# ---------------------------------------------------------------------------
# exponential sums and integrals

def exp_sum_smooth(lc: LatticeCone, trunc: int = DEFAULT_TRUNCATION,
                   space: AmbientSpace | None = None) -> TruncatedGerm:
    """Generating function of the lattice points of a smooth cone.

    Factorizes as the product over generators of (-1/<v,eps> + tail); the
    expansion of the product keeps every pole exact and truncates only the
    holomorphic content at total degree ``trunc``.  The highest-order polar
    term is exactly (-1)^d / (L_1 ... L_d) independent of the truncation.
    """
    if not is_smooth(lc):
        raise NotSmooth("the generators are not a lattice basis of the span")
    assert isinstance(lc.cone, SimplicialCone)
    gens = lc.cone.generators
    k = lc.ambient
    if space is None:
        space = AmbientSpace.standard(k)
    coeffs = bernoulli_tail_coeffs(trunc)
    tails = []
    for g in gens:
        form = Polynomial.linear_form(g)
        tail = Polynomial.zero(k)
        power = Polynomial.constant(k, ONE)
        for j, c in enumerate(coeffs):
            if j > 0:
                power = _truncate_poly(power * form, trunc)
            tail = tail + power.scale(c)
        tails.append(tail)
    total = make_mero(Polynomial.zero(k))
    d = len(gens)
    for mask in range(1 << d):
        polar_idx = [i for i in range(d) if mask & (1 << i)]
        num = Polynomial.constant(k, (-ONE) ** len(polar_idx))
        for i in range(d):
            if i not in polar_idx:
                num = _truncate_poly(num * tails[i], trunc)
        piece = make_mero(num, [(gens[i], 1) for i in polar_idx])
        total = mero_add(total, piece)
    s = decompose(space, total)
    polar = make_germ_sum(list(s.terms), Polynomial.zero(k))
    return TruncatedGerm(polar, _truncate_poly(s.poly, trunc), trunc)


def exp_integral(lc: LatticeCone, dim_cap: int | None = None) -> GermSum:
    """Cone valuation normalized against the lattice.

    Per simplicial piece of a triangulation: (-1)^d |det| / (L_1 ... L_d)
    with the determinant of the generators taken in lattice coordinates.
    Per-generator scaling invariance makes the choice of ray representatives
    irrelevant, and the weight makes the result subdivision-invariant.
    """
    k = lc.ambient
    pieces = triangulate_cone(lc.cone, dim_cap)
    d = lc.dim
    terms = []
    for piece in pieces:
        coords = tuple(_lattice_coords(lc.lattice_basis, g)
                       for g in piece.generators)
        weight = abs(det(coords))
        sign = -ONE if d % 2 else ONE
        num = Polynomial.constant(k, sign * weight)
        terms.append(canonicalize_polar(
            None, num, tuple((v, 1) for v in piece.generators)))
    return make_germ_sum(terms, Polynomial.zero(k))


# ---------------------------------------------------------------------------
# smooth subdivision in rank two

def _unimodular_to_first_axis(u: Vec) -> tuple[tuple[int, ...], ...]:
    """Integer 2x2 matrix T with det +-1 and T u = (1, 0); u primitive."""
    a, b = int(u[0]), int(u[1])
    # extended gcd: x*a + y*b == 1
    x, y = _ext_gcd(a, b)
    return ((x, y), (-b, a))


def _ext_gcd(a: int, b: int) -> tuple[int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def _mat2_mul(m, n):
    return tuple(tuple(sum(m[i][l] * n[l][j] for l in range(2))
                       for j in range(2)) for i in range(2))


def _mat2_inv(m):
    d = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    assert abs(d) == 1
    return ((m[1][1] // d, -m[0][1] // d), (-m[1][0] // d, m[0][0] // d))


def _mat2_apply(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


def smooth_subdivide_2d(lc: LatticeCone) -> list[LatticeCone]:
    """Subdivide a two-dimensional lattice cone into smooth pieces.

    After a unimodular change of lattice coordinates the cone is spanned by
    (1,0) and (p,q) with 0 <= p < q.  The inserted rays are the lattice
    points on the bounded edge of the convex hull of the nonzero lattice
    points of the cone; consecutive rays always span unimodular pieces.
    """
    rays = lc.rays
    if len(rays) != 2 or lc.dim != 2:
        raise NotDimensionTwo("smooth subdivision needs a rank-two cone")
    if isinstance(lc.cone, SimplicialCone) and is_smooth(lc):
        return [lc]
    u1 = _lattice_coords(lc.lattice_basis, rays[0])
    u2 = _lattice_coords(lc.lattice_basis, rays[1])
    u1i = (int(u1[0]), int(u1[1]))
    u2i = (int(u2[0]), int(u2[1]))
    t = _unimodular_to_first_axis(u1i)
    w = _mat2_apply(t, u2i)
    if w[1] < 0:
        t = _mat2_mul(((1, 0), (0, -1)), t)
        w = (w[0], -w[1])
    p, q = w
    shift = -(p // q)  # shear so 0 <= p < q; fixes (1,0)
    shear = ((1, shift), (0, 1))
    t = _mat2_mul(shear, t)
    p = p + shift * q
    # lattice points of the fundamental parallelogram of (1,0), (p,q)
    candidates = []
    for x in range(0, p + 2):
        for y in range(0, q + 1):
            if (x, y) == (0, 0):
                continue
            tt = Fraction(y, q)
            ss = Fraction(x) - tt * p
            if 0 <= ss <= 1 and tt <= 1:
                candidates.append((x, y))
    # one representative per direction, the shortest
    by_dir = {}
    for pt in candidates:
        g = _gcd2(pt)
        key = (pt[0] // g, pt[1] // g)
        if key not in by_dir or g < by_dir[key][1]:
            by_dir[key] = (pt, g)
    points = [v for v, _ in by_dir.values()]
    points.sort(key=_AngularKey)
    # convex chain from (1,0) to (p,q), keeping collinear boundary points
    chain = []
    for pt in points:
        while len(chain) >= 2 and _cross(
                _sub2(chain[-1], chain[-2]), _sub2(pt, chain[-1])) > 0:
            chain.pop()
        chain.append(pt)
    assert chain[0] == (1, 0) and chain[-1] == (p, q)
    tinv = _mat2_inv(t)
    out = []
    for a, b in zip(chain, chain[1:]):
        assert abs(_cross(a, b)) == 1, "hull pieces must be unimodular"
        back = [_mat2_apply(tinv, a), _mat2_apply(tinv, b)]
        gens = [_from_coords(lc.lattice_basis, vec(c)) for c in back]
        out.append(LatticeCone(SimplicialCone(tuple(sorted(
            primitive_vector(g) for g in gens))), lc.lattice_basis))
    return out


def _gcd2(v):
    from math import gcd
    return gcd(abs(v[0]), abs(v[1])) or 1


def _sub2(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


class _AngularKey:
    __slots__ = ("pt",)

    def __init__(self, pt):
        self.pt = pt

    def __lt__(self, other):
        a, b = self.pt, other.pt
        c = _cross(a, b)
        if c != 0:
            return c > 0
        return abs(a[0]) + abs(a[1]) < abs(b[0]) + abs(b[1])


def p_res_exp_sum(lc: LatticeCone,
                  smooth_pieces: Sequence[LatticeCone] | None = None,
                  space: AmbientSpace | None = None) -> GermSum:
    """Highest-order residue of the lattice-point generating function.

    Computed piecewise over a smooth subdivision (found automatically in
    rank <= 2, otherwise caller-supplied and validated); the result equals
    the lattice cone integral exactly, with no truncation involved anywhere.
    """
    k = lc.ambient
    if space is None:
        space = AmbientSpace.standard(k)
    if smooth_pieces is None:
        if isinstance(lc.cone, SimplicialCone) and is_smooth(lc):
            smooth_pieces = [lc]
        elif lc.dim == 2:
            smooth_pieces = smooth_subdivide_2d(lc)
        else:
            raise NoSmoothSubdivisionAvailable(
                "no automatic smooth subdivision above rank two; "
                "pass smooth_pieces explicitly")
    else:
        smooth_pieces = [
            piece if isinstance(piece, LatticeCone)
            else make_lattice_cone(piece, lc.lattice_basis)
            for piece in smooth_pieces]
        for piece in smooth_pieces:
            if piece.lattice_basis != lc.lattice_basis:
                raise ValueError("pieces must share the cone's lattice")
            if not is_smooth(piece):
                raise NotSmooth(f"piece {piece.cone!r} is not smooth")
        if not is_subdivision([p.cone for p in smooth_pieces], lc.cone):
            raise NotASubdivision("pieces do not tile the lattice cone")
    terms: list[PolarGerm] = []
    poly = Polynomial.zero(k)
    for piece in smooth_pieces:
        part = p_res(space, exp_sum_smooth(piece, trunc=2, space=space))
        terms.extend(part.terms)
        poly = poly + part.poly
    return make_germ_sum(terms, poly)


def lattice_sum_numeric(lc: LatticeCone, point: Sequence,
                        height: int) -> float:
    """Direct summation oracle: sum e^{<n, point>} over monoid elements with
    generator coefficients at most ``height`` (smooth cones only)."""
    if not is_smooth(lc):
        raise NotSmooth("direct summation enumerates a free monoid")
    assert isinstance(lc.cone, SimplicialCone)
    gens = lc.cone.generators
    pt = tuple(frac(c) for c in point)
    pairings = [float(vec_dot(g, pt)) for g in gens]
    total = 0.0
    for combo in iter_product(range(height + 1), repeat=len(gens)):
        total += exp(sum(a * p for a, p in zip(combo, pairings)))
    return total
