"""Exact polyhedral cone geometry for expansion supports.

Cones live in the ambient rational space (no inner product is involved in
any of the geometry here).  Simplicial cones carry independent primitive
generators in a canonical sorted order; general pointed cones are handled
through exact half-space representations and extreme-ray enumeration, which
at the desk-scale dimensions this package targets (ambient dimension capped
at 6 by default) is done by straightforward subset enumeration over the
constraints — robust, exact, and fast enough.

The refinement algorithm makes a family of cones "properly positioned"
(pairwise intersections are common faces and the union contains no line):
every defining hyperplane of every member is collected, every cone is sliced
to pieces lying on one closed side of every hyperplane, and the pieces are
triangulated by the canonical pulling triangulation keyed to a single global
lexicographic order on primitive rays.  Sign-pure pieces over one hyperplane
set always intersect in common faces, and pulling triangulations restrict
consistently to faces, so the output is properly positioned by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    DimensionCapExceeded,
    NotASubdivision,
    NotSimplicial,
    NotStrictlyConvexUnion,
)
from .exact import (
    ONE,
    ZERO,
    Polynomial,
    Vec,
    is_pseudo_positive,
    mat_from_columns,
    mat_inverse,
    mat_rank,
    max_minor_abs_sum,
    nullspace,
    primitive_vector,
    solve,
    vec_dot,
    vec_is_zero,
    vec_scale,
    vec_sub,
)
from .germs import GermSum, PolarGerm, canonicalize_polar, make_germ_sum

DEFAULT_DIMENSION_CAP = 6

__all__ = [
    "DEFAULT_DIMENSION_CAP",
    "SimplicialCone",
    "PolyCone",
    "ConeFamily",
    "make_simplicial_cone",
    "make_poly_cone",
    "is_pseudo_positive",
    "cone_contains",
    "cones_meet_along_face",
    "union_contains_line",
    "is_properly_positioned",
    "common_refinement",
    "triangulate_cone",
    "is_subdivision",
    "I_simplicial",
    "I_cone",
]


def _check_cap(k: int, dim_cap: int | None):
    cap = DEFAULT_DIMENSION_CAP if dim_cap is None else dim_cap
    if k > cap:
        raise DimensionCapExceeded(
            f"ambient dimension {k} exceeds the cap {cap}")


@dataclass(frozen=True)
class SimplicialCone:
    """Cone spanned by linearly independent primitive generators."""

    generators: tuple[Vec, ...]

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def ambient(self) -> int:
        return len(self.generators[0])

    def __repr__(self):
        gens = "; ".join(",".join(str(c) for c in g) for g in self.generators)
        return f"SimplicialCone<{gens}>"


@dataclass(frozen=True)
class PolyCone:
    """Pointed cone given by its extreme rays (primitive, sorted)."""

    rays: tuple[Vec, ...]

    @property
    def ambient(self) -> int:
        return len(self.rays[0])


@dataclass(frozen=True)
class ConeFamily:
    """A finite family of simplicial cones (an expansion support)."""

    cones: tuple[SimplicialCone, ...]

    def __len__(self):
        return len(self.cones)

    def __iter__(self):
        return iter(self.cones)


def make_simplicial_cone(generators: Iterable[Sequence]) -> SimplicialCone:
    gens = []
    for g in generators:
        v = tuple(Fraction(c) for c in g)
        if vec_is_zero(v):
            raise NotSimplicial("zero vector cannot generate a cone")
        gens.append(primitive_vector(v))
    gens = tuple(sorted(gens))
    if mat_rank(gens) != len(gens):
        raise NotSimplicial("generators must be linearly independent")
    return SimplicialCone(gens)


def make_poly_cone(rays: Iterable[Sequence],
                   dim_cap: int | None = None) -> PolyCone:
    """Pointed cone from (possibly redundant) generating rays."""
    raw = [primitive_vector(tuple(Fraction(c) for c in r)) for r in rays]
    raw = [r for r in raw if not vec_is_zero(r)]
    if not raw:
        raise ValueError("a cone needs at least one nonzero ray")
    k = len(raw[0])
    _check_cap(k, dim_cap)
    eqs, ineqs = _hrep_from_rays(k, raw)
    # a nontrivial lineality space means the cone contains a line
    if mat_rank(tuple(eqs) + tuple(ineqs)) < k:
        raise NotStrictlyConvexUnion("rays do not span a pointed cone")
    extreme = _extreme_rays(k, eqs, ineqs)
    if not extreme:
        raise NotStrictlyConvexUnion("rays do not span a pointed cone")
    return PolyCone(tuple(sorted(extreme)))


def cone_contains(cone: SimplicialCone, x: Sequence) -> bool:
    """Exact membership in a simplicial cone."""
    v = tuple(Fraction(c) for c in x)
    coords = _simplicial_coords(cone, v)
    return coords is not None and all(c >= 0 for c in coords)


def _simplicial_coords(cone: SimplicialCone, v: Vec) -> Vec | None:
    """Coordinates of v in the generator basis, or None if v is off-span."""
    m = mat_from_columns(list(cone.generators))
    coords = solve(m, v)
    if coords is None:
        return None
    # solve() only guarantees consistency of pivot rows; verify exactly
    recon = tuple(sum((coords[j] * g[i] for j, g in enumerate(cone.generators)),
                      ZERO) for i in range(len(v)))
    return coords if recon == v else None


# ---------------------------------------------------------------------------
# half-space representations and extreme rays

def _simplicial_hrep(cone: SimplicialCone) -> tuple[tuple[Vec, ...], tuple[Vec, ...]]:
    """(equalities, inequalities) cutting out the cone exactly."""
    k = cone.ambient
    n = cone.dim
    comp = nullspace(tuple(cone.generators))  # annihilator of the span
    m = mat_from_columns(list(cone.generators) + comp)
    rows = mat_inverse(m)
    ineqs = tuple(primitive_vector(rows[i]) for i in range(n))
    eqs = tuple(primitive_vector(rows[i]) for i in range(n, k))
    return eqs, ineqs


def _hrep_from_rays(k: int, rays: Sequence[Vec]) -> tuple[tuple[Vec, ...], tuple[Vec, ...]]:
    """H-representation of the pointed cone generated by the rays."""
    span_ann = tuple(nullspace(tuple(rays)))
    # facet normals = extreme rays of the dual cone within the span
    normals = _extreme_rays(k, span_ann, tuple(rays))
    return span_ann, tuple(normals)


def _extreme_rays(k: int, eqs: Sequence[Vec], ineqs: Sequence[Vec]) -> list[Vec]:
    """Extreme rays of { x : eqs x = 0, ineqs x >= 0 }.

    Works for pointed cones; if the set contains a line, representatives of
    both directions are returned (useful for emptiness tests).  Every extreme
    ray is the kernel of a rank-(k-1) subsystem of active constraints, so
    enumerating constraint subsets finds them all.
    """
    eqs = tuple(dict.fromkeys(primitive_vector(e) for e in eqs if not vec_is_zero(e)))
    ineqs = tuple(dict.fromkeys(primitive_vector(c) for c in ineqs if not vec_is_zero(c)))
    rank_e = mat_rank(eqs) if eqs else 0
    need = k - 1 - rank_e
    if need < 0:
        return []
    found: set[Vec] = set()

    def consider(v: Vec):
        for sign in (1, -1):
            w = v if sign == 1 else vec_scale(-1, v)
            if all(vec_dot(c, w) >= 0 for c in ineqs):
                found.add(primitive_vector(w))

    if need == 0:
        kernel = nullspace(eqs) if eqs else ([primitive_vector((ONE,))] if k == 1 else nullspace(((ZERO,) * k,)))
        if len(kernel) == 1:
            consider(kernel[0])
        return sorted(found)
    for subset in combinations(ineqs, need):
        stack = eqs + subset
        if mat_rank(stack) != k - 1:
            continue
        kernel = nullspace(stack)
        if len(kernel) != 1:
            continue
        consider(kernel[0])
    return sorted(found)


# ---------------------------------------------------------------------------
# face relations

def cones_meet_along_face(c1: SimplicialCone, c2: SimplicialCone,
                          dim_cap: int | None = None) -> bool:
    """True when the intersection is a face of both cones."""
    k = c1.ambient
    _check_cap(k, dim_cap)
    e1, i1 = _simplicial_hrep(c1)
    e2, i2 = _simplicial_hrep(c2)
    rays = _extreme_rays(k, e1 + e2, i1 + i2)
    if not rays:
        return True  # they meet only at the origin, the trivial common face
    for cone in (c1, c2):
        inside = {g for g in cone.generators
                  if all(vec_dot(e, g) == 0 for e in (e1 + e2))
                  and all(vec_dot(c, g) >= 0 for c in (i1 + i2))}
        for r in rays:
            coords = _simplicial_coords(cone, r)
            if coords is None:
                return False
            support = {cone.generators[j] for j, c in enumerate(coords) if c != 0}
            if not support <= inside:
                return False
    return True


def union_contains_line(cones: Sequence[SimplicialCone],
                        dim_cap: int | None = None) -> bool:
    """True when some nonzero v has v in one member and -v in another."""
    if not cones:
        return False
    k = cones[0].ambient
    _check_cap(k, dim_cap)
    hreps = [_simplicial_hrep(c) for c in cones]
    for a in range(len(cones)):
        ea, ia = hreps[a]
        for b in range(a, len(cones)):
            eb, ib = hreps[b]
            neg_ib = tuple(vec_scale(-1, c) for c in ib)
            if _extreme_rays(k, ea + eb, ia + neg_ib):
                return True
    return False


def is_properly_positioned(cones: Sequence[SimplicialCone],
                           dim_cap: int | None = None) -> bool:
    """Pairwise intersections are common faces and the union has no line."""
    cones = list(cones)
    for a in range(len(cones)):
        for b in range(a + 1, len(cones)):
            if not cones_meet_along_face(cones[a], cones[b], dim_cap):
                return False
    return not union_contains_line(cones, dim_cap)


# ---------------------------------------------------------------------------
# slicing machinery

@dataclass
class _Piece:
    """A pointed cone tracked in both representations during slicing."""

    eqs: tuple[Vec, ...]
    ineqs: tuple[Vec, ...]
    rays: tuple[Vec, ...]
    dim: int


def _prune_ineqs(piece: _Piece) -> _Piece:
    """Keep one copy per facet: constraints tight on a rank-(dim-1) ray set."""
    seen: dict[frozenset, Vec] = {}
    for c in piece.ineqs:
        tight = [r for r in piece.rays if vec_dot(c, r) == 0]
        if mat_rank(tuple(tight)) != piece.dim - 1:
            continue
        key = frozenset(tight)
        seen.setdefault(key, c)
    return _Piece(piece.eqs, tuple(seen.values()), piece.rays, piece.dim)


def _split_piece(piece: _Piece, w: Vec) -> list[_Piece]:
    """Slice by the hyperplane w=0; keep full-dimensional closed halves."""
    vals = [vec_dot(w, r) for r in piece.rays]
    if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
        return [piece]
    plus = [r for r, v in zip(piece.rays, vals) if v > 0]
    zero = [r for r, v in zip(piece.rays, vals) if v == 0]
    minus = [r for r, v in zip(piece.rays, vals) if v < 0]
    fresh = []
    for rp in plus:
        vp = vec_dot(w, rp)
        for rm in minus:
            vm = vec_dot(w, rm)
            cand = primitive_vector(vec_sub(vec_scale(vp, rm), vec_scale(vm, rp)))
            fresh.append(cand)
    halves = []
    for side_rays, normal in ((plus, w), (minus, vec_scale(-1, w))):
        ineqs = piece.ineqs + (normal,)
        candidates = list(dict.fromkeys(side_rays + zero + fresh))
        kept = []
        for r in candidates:
            active = list(piece.eqs)
            active += [c for c in ineqs if vec_dot(c, r) == 0]
            if mat_rank(tuple(active)) == len(r) - 1:
                kept.append(r)
        if mat_rank(tuple(kept)) == piece.dim:
            half = _Piece(piece.eqs, ineqs, tuple(sorted(kept)), piece.dim)
            halves.append(_prune_ineqs(half))
    return halves


def _piece_facets(piece: _Piece) -> list[_Piece]:
    facets: dict[frozenset, _Piece] = {}
    for c in piece.ineqs:
        tight = tuple(sorted(r for r in piece.rays if vec_dot(c, r) == 0))
        if mat_rank(tight) != piece.dim - 1:
            continue
        key = frozenset(tight)
        if key not in facets:
            facets[key] = _Piece(piece.eqs + (c,),
                                 tuple(x for x in piece.ineqs if x != c),
                                 tight, piece.dim - 1)
    return [facets[k] for k in sorted(facets, key=lambda s: tuple(sorted(s)))]


def _pull_triangulate(piece: _Piece) -> list[tuple[Vec, ...]]:
    """Pulling triangulation: cone the lex-least ray over the opposite facets.

    Keyed only to the global lexicographic order on primitive rays, so the
    triangulations of two cones that share a face agree on that face.
    """
    if len(piece.rays) == piece.dim:
        return [piece.rays]
    r0 = piece.rays[0]
    simplices = []
    for facet in _piece_facets(piece):
        if r0 in facet.rays:
            continue
        for simplex in _pull_triangulate(facet):
            simplices.append(tuple(sorted(simplex + (r0,))))
    return simplices


def triangulate_cone(cone: SimplicialCone | PolyCone,
                     dim_cap: int | None = None,
                     reverse_order: bool = False) -> list[SimplicialCone]:
    """Canonical pulling triangulation of a pointed cone (no new rays).

    ``reverse_order`` keys the pulling to the reversed lexicographic order,
    which is useful for producing a second, independent triangulation of the
    same cone in tests of subdivision invariance.
    """
    if isinstance(cone, SimplicialCone):
        return [cone]
    k = cone.ambient
    _check_cap(k, dim_cap)
    eqs, ineqs = _hrep_from_rays(k, cone.rays)
    rays = tuple(sorted(cone.rays, reverse=reverse_order))
    piece = _prune_ineqs(_Piece(eqs, ineqs, rays, mat_rank(cone.rays)))
    if reverse_order:
        simplices = _pull_triangulate_ordered(piece, reverse=True)
    else:
        simplices = _pull_triangulate(piece)
    return [SimplicialCone(tuple(sorted(s))) for s in simplices]


def _pull_triangulate_ordered(piece: _Piece, reverse: bool) -> list[tuple[Vec, ...]]:
    if len(piece.rays) == piece.dim:
        return [piece.rays]
    ordered = sorted(piece.rays, reverse=reverse)
    r0 = ordered[0]
    simplices = []
    for facet in _piece_facets(piece):
        if r0 in facet.rays:
            continue
        for simplex in _pull_triangulate_ordered(facet, reverse):
            simplices.append(tuple(sorted(simplex + (r0,))))
    return simplices


# ---------------------------------------------------------------------------
# common refinement

def common_refinement(
        cones: Sequence[SimplicialCone],
        dim_cap: int | None = None) -> tuple[list[SimplicialCone], list[list[int]]]:
    """Subdivide every member so the results form one properly positioned
    family.

    Returns (pieces, index_sets): pieces is the deduplicated list of
    simplicial cones; index_sets[i] lists the pieces that tile cones[i].
    Raises NotStrictlyConvexUnion when the union of the input contains a
    nonzero linear subspace (no such refinement exists then).
    """
    cones = list(cones)
    if not cones:
        return [], []
    k = cones[0].ambient
    _check_cap(k, dim_cap)
    if union_contains_line(cones, dim_cap):
        raise NotStrictlyConvexUnion(
            "the union of the cones contains a linear subspace")
    hreps = [_simplicial_hrep(c) for c in cones]
    hyper: set[Vec] = set()
    for eqs, ineqs in hreps:
        for w in eqs + ineqs:
            hyper.add(_sign_canonical(w))
    hyperplanes = sorted(hyper)
    piece_index: dict[tuple[Vec, ...], int] = {}
    collected: list[SimplicialCone] = []
    index_sets: list[list[int]] = []
    for cone, (eqs, ineqs) in zip(cones, hreps):
        pieces = [_prune_ineqs(_Piece(eqs, ineqs, cone.generators, cone.dim))]
        for w in hyperplanes:
            pieces = [half for p in pieces for half in _split_piece(p, w)]
        mine = set()
        for p in pieces:
            for simplex in _pull_triangulate(p):
                if simplex not in piece_index:
                    piece_index[simplex] = len(collected)
                    collected.append(SimplicialCone(simplex))
                mine.add(piece_index[simplex])
        index_sets.append(sorted(mine))
    return collected, index_sets


def _sign_canonical(v: Vec) -> Vec:
    w = primitive_vector(v)
    return w if is_pseudo_positive(w) else vec_scale(-1, w)


# ---------------------------------------------------------------------------
# subdivision checking

def is_subdivision(pieces: Sequence[SimplicialCone],
                   target: SimplicialCone | PolyCone,
                   dim_cap: int | None = None) -> bool:
    """Exact check that the pieces tile the target cone.

    Same dimension, contained in the target, pairwise intersections along
    common faces, and an exact cover: the target is sliced by every facet
    hyperplane of every piece, and each resulting cell's interior point must
    lie in some piece.  No sampling, no tolerance.
    """
    pieces = list(pieces)
    if not pieces:
        return False
    if isinstance(target, SimplicialCone):
        k = target.ambient
        _check_cap(k, dim_cap)
        t_eqs, t_ineqs = _simplicial_hrep(target)
        t_rays = target.generators
        t_dim = target.dim
        member = lambda x: cone_contains(target, x)
    else:
        k = target.ambient
        _check_cap(k, dim_cap)
        t_eqs, t_ineqs = _hrep_from_rays(k, target.rays)
        t_rays = target.rays
        t_dim = mat_rank(target.rays)
        member = lambda x: (all(vec_dot(e, x) == 0 for e in t_eqs)
                            and all(vec_dot(c, x) >= 0 for c in t_ineqs))
    if any(p.dim != t_dim for p in pieces):
        return False
    for p in pieces:
        if not all(member(g) for g in p.generators):
            return False
    for a in range(len(pieces)):
        for b in range(a + 1, len(pieces)):
            if not cones_meet_along_face(pieces[a], pieces[b], dim_cap):
                return False
    hyper: set[Vec] = set()
    for p in pieces:
        _, ineqs = _simplicial_hrep(p)
        for w in ineqs:
            hyper.add(_sign_canonical(w))
    cells = [_prune_ineqs(_Piece(t_eqs, t_ineqs, tuple(sorted(t_rays)), t_dim))]
    for w in sorted(hyper):
        cells = [half for c in cells for half in _split_piece(c, w)]
    for cell in cells:
        interior = tuple(sum(r[i] for r in cell.rays) for i in range(k))
        if not any(cone_contains(p, interior) for p in pieces):
            return False
    return True


# ---------------------------------------------------------------------------
# the cone-to-germ valuation

def I_simplicial(cone: SimplicialCone) -> PolarGerm:
    """The germ (-1)^n w(C) / (L_1 ... L_n) attached to a simplicial cone.

    The weight w(C) is the sum of |det| over all n-row minors of the matrix
    whose columns are the generators; it makes the assignment additive under
    subdivision of cones.
    """
    n = cone.dim
    weight = max_minor_abs_sum(list(cone.generators), n)
    sign = -ONE if n % 2 else ONE
    num = Polynomial.constant(cone.ambient, sign * weight)
    factors = tuple((g, 1) for g in cone.generators)
    # sign normalization of the forms absorbs (-1)s into the numerator
    return canonicalize_polar(None, num, factors)


def I_cone(cone: SimplicialCone | PolyCone,
           triangulation: Sequence[SimplicialCone] | None = None,
           dim_cap: int | None = None) -> GermSum:
    """Valuation of a pointed cone, via a triangulation.

    With an explicit triangulation the subdivision property is validated
    first (NotASubdivision).  The value does not depend on the triangulation
    chosen; subdivision invariance is what the weight w buys.
    """
    if triangulation is not None:
        if not is_subdivision(triangulation, cone, dim_cap):
            raise NotASubdivision("given cones do not tile the target")
        simplices = list(triangulation)
    else:
        simplices = triangulate_cone(cone, dim_cap)
    k = cone.ambient
    return make_germ_sum([I_simplicial(s) for s in simplices],
                         Polynomial.zero(k))
