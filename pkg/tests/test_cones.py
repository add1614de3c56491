"""Cone geometry: containment, faces, refinement, subdivisions, the I map."""

import random
from fractions import Fraction

import pytest

from laurentgerms.cones import (
    ConeFamily,
    I_cone,
    I_simplicial,
    PolyCone,
    SimplicialCone,
    common_refinement,
    cone_contains,
    cones_meet_along_face,
    is_properly_positioned,
    is_subdivision,
    make_poly_cone,
    make_simplicial_cone,
    triangulate_cone,
    union_contains_line,
)
from laurentgerms.errors import (
    DimensionCapExceeded,
    NotASubdivision,
    NotSimplicial,
    NotStrictlyConvexUnion,
)
from laurentgerms.exact import vec
from laurentgerms.germs import as_mero, germ_equal, make_mero, mero_add
from laurentgerms.exact import Polynomial

F = Fraction


def cone(*gens) -> SimplicialCone:
    return make_simplicial_cone(gens)


def random_point_in(rng, c: SimplicialCone):
    coeffs = [F(rng.randint(0, 6), rng.randint(1, 3)) for _ in c.generators]
    pt = [F(0)] * len(c.generators[0])
    for a, g in zip(coeffs, c.generators):
        for i, x in enumerate(g):
            pt[i] += a * x
    return tuple(pt)


# ---------------------------------------------------------------------------
# construction and membership

def test_generators_are_primitivized_and_sorted():
    c = cone((2, 2), (1, 0))
    assert c.generators == ((F(1), F(0)), (F(1), F(1)))


def test_dependent_generators_rejected():
    with pytest.raises(NotSimplicial):
        cone((1, 0), (2, 0))
    with pytest.raises(NotSimplicial):
        cone((1, 0), (0, 1), (1, 1))
    with pytest.raises(NotSimplicial):
        cone((0, 0))


def test_containment_of_combinations_and_outside_points():
    rng = random.Random(30)
    c = cone((1, 0), (1, 2))
    for _ in range(40):
        assert cone_contains(c, random_point_in(rng, c))
    assert not cone_contains(c, (-1, 0))
    assert not cone_contains(c, (0, 1))   # above the steep ray
    assert not cone_contains(c, (1, 3))
    assert cone_contains(c, (1, 1))
    assert cone_contains(c, (0, 0))


def test_containment_in_lower_dimensional_cone():
    c = cone((1, 1, 0))
    assert cone_contains(c, (3, 3, 0))
    assert not cone_contains(c, (1, 1, 1))
    assert not cone_contains(c, (-1, -1, 0))


def test_poly_cone_extreme_rays_drop_interior_generators():
    pc = make_poly_cone([(1, 0), (1, 1), (0, 1)])
    assert pc.rays == ((F(0), F(1)), (F(1), F(0)))


def test_poly_cone_rejects_halfplane():
    with pytest.raises(NotStrictlyConvexUnion):
        make_poly_cone([(1, 0), (-1, 0), (0, 1)])


# ---------------------------------------------------------------------------
# pairwise position

def test_cones_meeting_along_shared_edge():
    a = cone((1, 0), (1, 1))
    b = cone((0, 1), (1, 1))
    assert cones_meet_along_face(a, b)


def test_overlapping_cones_do_not_meet_along_face():
    a = cone((1, 0), (0, 1))
    b = cone((1, 1), (1, -1))
    assert not cones_meet_along_face(a, b)


def test_cone_meets_its_own_face():
    a = cone((1, 0), (0, 1))
    b = cone((1, 0))
    assert cones_meet_along_face(a, b)


def test_union_contains_line_detection():
    assert union_contains_line([cone((1, 0)), cone((-1, 0))])
    assert union_contains_line([cone((1, 0), (0, 1)), cone((-1, -1))])
    assert not union_contains_line([cone((1, 0), (0, 1)),
                                    cone((0, 1), (-1, 1))])


def test_proper_positioning():
    assert is_properly_positioned([cone((1, 0), (1, 1)), cone((0, 1), (1, 1))])
    assert not is_properly_positioned([cone((1, 0), (0, 1)),
                                       cone((1, 1), (1, -1))])
    assert not is_properly_positioned([cone((1, 0)), cone((-1, 0))])


# ---------------------------------------------------------------------------
# triangulation and refinement

def test_triangulate_cone_over_square():
    pc = make_poly_cone([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    pieces = triangulate_cone(pc)
    assert len(pieces) == 2
    assert is_subdivision(pieces, pc)


def test_triangulate_simplicial_cone_is_identity():
    c = cone((1, 0), (1, 2))
    assert triangulate_cone(c) == [c]


def test_common_refinement_quadrant_and_halfquadrant():
    quadrant = cone((1, 0), (0, 1))
    lower = cone((1, 0), (1, 1))
    pieces, index_sets = common_refinement([quadrant, lower])
    assert [p.generators for p in pieces] == [
        (((F(0), F(1)), (F(1), F(1)))),
        (((F(1), F(0)), (F(1), F(1)))),
    ]
    # index_sets[i] lists the pieces whose union is input cone i
    assert [sorted(s) for s in index_sets] == [[0, 1], [1]]


def test_common_refinement_pieces_subdivide_each_input():
    rng = random.Random(31)
    for _ in range(10):
        cones = []
        while len(cones) < 2:
            try:
                c = cone(tuple(rng.randint(0, 3) for _ in range(2)),
                         tuple(rng.randint(0, 3) for _ in range(2)))
            except NotSimplicial:
                continue
            cones.append(c)
        try:
            pieces, index_sets = common_refinement(cones)
        except NotStrictlyConvexUnion:
            continue
        for i, c in enumerate(cones):
            mine = [pieces[j] for j in index_sets[i]]
            assert is_subdivision(mine, c)


def test_common_refinement_rejects_union_with_line():
    with pytest.raises(NotStrictlyConvexUnion):
        common_refinement([cone((1, 0)), cone((-1, 0))])


def test_is_subdivision_rejects_gaps_and_overlaps():
    quadrant = cone((1, 0), (0, 1))
    a = cone((1, 0), (1, 1))
    b = cone((0, 1), (1, 1))
    assert is_subdivision([a, b], quadrant)
    assert not is_subdivision([a], quadrant)              # gap
    assert not is_subdivision([a, quadrant], quadrant)    # overlap
    assert not is_subdivision([a, b, cone((1, -1), (1, 0))], quadrant)


def test_dimension_cap_guards_refinement():
    gens = [tuple(1 if i == j else 0 for i in range(7)) for j in range(7)]
    with pytest.raises(DimensionCapExceeded):
        common_refinement([make_simplicial_cone(gens)], dim_cap=6)


# ---------------------------------------------------------------------------
# the basic meromorphic valuation

def test_I_of_rays_and_quadrant():
    assert germ_equal(I_simplicial(cone((1, 0))).as_mero(),
                      make_mero(Polynomial.constant(2, -1),
                                ((vec([1, 0]), 1),)))
    assert germ_equal(I_simplicial(cone((1, 1))).as_mero(),
                      make_mero(Polynomial.constant(2, -2),
                                ((vec([1, 1]), 1),)))
    quadrant = cone((1, 0), (0, 1))
    assert germ_equal(I_simplicial(quadrant).as_mero(),
                      make_mero(Polynomial.constant(2, 1),
                                ((vec([1, 0]), 1), (vec([0, 1]), 1))))


def test_I_is_invariant_under_generator_scaling():
    a = I_simplicial(cone((1, 0), (1, 1)))
    b = I_simplicial(cone((3, 0), (2, 2)))
    assert a == b


def test_I_is_additive_over_subdivisions():
    # 1/(e1 e2) = 1/(e1(e1+e2)) + 1/(e2(e1+e2)): shared faces cost nothing
    quadrant = cone((1, 0), (0, 1))
    a = cone((1, 0), (1, 1))
    b = cone((0, 1), (1, 1))
    left = I_simplicial(quadrant).as_mero()
    right = mero_add(I_simplicial(a).as_mero(), I_simplicial(b).as_mero())
    assert germ_equal(left, right)


def test_I_cone_sums_a_triangulation():
    pc = make_poly_cone([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    tri1 = triangulate_cone(pc)
    total1 = I_cone(pc, triangulation=tri1)
    total2 = I_cone(pc)
    assert germ_equal(total1, total2)


def test_I_cone_rejects_wrong_triangulation():
    pc = make_poly_cone([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    bad = [make_simplicial_cone([(1, 0, 1), (0, 1, 1), (0, 0, 1)])]
    with pytest.raises(NotASubdivision):
        I_cone(pc, triangulation=bad)


def test_cone_family_container():
    fam = ConeFamily((cone((1, 0)), cone((0, 1))))
    assert len(fam) == 2
