"""Formal Laurent expansions supported on families of simplicial cones.

A formal expansion keeps the terms of a sum of polar germs *separated by
supporting cone* instead of adding them up as rational functions.  Each term
is a decorated cone — independent primitive pseudo-positive generators with
multiplicities — paired with a numerator polynomial satisfying the usual
orthogonality invariant.  The forgetful map ``phi`` adds everything back up;
the subdivision operator rewrites an expansion onto a finer properly
positioned family without changing its ``phi``-image, which is what makes a
canonical Laurent expansion of an arbitrary germ possible: decompose into
polar parts, then re-support everything on one common refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .errors import (
    NotAPanSubdivision,
    NotASubdivision,
    NotInLaurentSubspace,
    NotProperlyPositioned,
    OrthogonalityViolated,
)
from .exact import (
    ONE,
    AmbientSpace,
    Polynomial,
    Vec,
    mat_vec,
    max_minor_abs_sum,
    q_dual_family,
)
from .cones import (
    SimplicialCone,
    cone_contains,
    common_refinement,
    is_properly_positioned,
    is_subdivision,
)
from .germs import (
    Factors,
    GermSum,
    MeromorphicGerm,
    PolarGerm,
    canonicalize_polar,
    decompose,
    make_mero,
    mero_add,
)

__all__ = [
    "DecoratedCone",
    "FormalExpansion",
    "make_expansion",
    "expansion_add",
    "expansion_neg",
    "expansion_scale",
    "phi",
    "subdivide_simple",
    "delta_op",
    "subdivision_operator",
    "laurent_expand",
    "kernel_generators",
]


@dataclass(frozen=True)
class DecoratedCone:
    """A simplicial cone whose generators carry pole multiplicities.

    ``factors`` is the canonically sorted tuple of (primitive pseudo-positive
    generator, exponent >= 1); the underlying geometric cone forgets the
    exponents.
    """

    factors: Factors

    @property
    def cone(self) -> SimplicialCone:
        return SimplicialCone(tuple(v for v, _ in self.factors))

    @property
    def dim(self) -> int:
        return len(self.factors)

    def __repr__(self):
        bits = []
        for v, s in self.factors:
            g = ",".join(str(c) for c in v)
            bits.append(f"({g})^{s}" if s != 1 else f"({g})")
        return "<" + " ".join(bits) + ">"


@dataclass(frozen=True)
class FormalExpansion:
    """Direct sum of decorated polar terms plus a polynomial part."""

    terms: tuple[tuple[DecoratedCone, Polynomial], ...]
    polynomial_part: Polynomial

    @property
    def nvars(self) -> int:
        return self.polynomial_part.nvars

    def is_zero(self) -> bool:
        return not self.terms and self.polynomial_part.is_zero()

    def support(self) -> list[SimplicialCone]:
        """Underlying geometric cones of the nonzero terms, deduplicated."""
        seen = dict.fromkeys(dc.cone for dc, _ in self.terms)
        return list(seen)

    def __repr__(self):
        bits = [f"{dc!r}: {num.to_string()}" for dc, num in self.terms]
        if not self.polynomial_part.is_zero() or not bits:
            bits.append(self.polynomial_part.to_string())
        return "FormalExpansion(" + " (+) ".join(bits) + ")"


def make_expansion(space: AmbientSpace | None,
                   items: Iterable[tuple[Factors, Polynomial]],
                   polynomial_part: Polynomial,
                   validate: bool = True) -> FormalExpansion:
    """Merge terms by decorated cone, drop zeros, sort canonically.

    With ``validate`` (and a space) every stored numerator is checked against
    the orthogonality invariant of its cone via ``canonicalize_polar``.
    """
    merged: dict[Factors, Polynomial] = {}
    for factors, num in items:
        factors = tuple(sorted((tuple(v), int(s)) for v, s in factors))
        merged[factors] = merged.get(factors, Polynomial.zero(num.nvars)) + num
    out = []
    for factors in sorted(merged):
        num = merged[factors]
        if num.is_zero():
            continue
        if validate:
            pg = canonicalize_polar(space, num, factors)
            factors, num = pg.factors, pg.numerator
        out.append((DecoratedCone(factors), num))
    return FormalExpansion(tuple(out), polynomial_part)


def expansion_add(x: FormalExpansion, y: FormalExpansion) -> FormalExpansion:
    items = [(dc.factors, num) for dc, num in x.terms]
    items += [(dc.factors, num) for dc, num in y.terms]
    return make_expansion(None, items,
                          x.polynomial_part + y.polynomial_part,
                          validate=False)


def expansion_scale(c, x: FormalExpansion) -> FormalExpansion:
    c = Fraction(c)
    if c == 0:
        return FormalExpansion((), Polynomial.zero(x.nvars))
    return FormalExpansion(
        tuple((dc, num.scale(c)) for dc, num in x.terms),
        x.polynomial_part.scale(c))


def expansion_neg(x: FormalExpansion) -> FormalExpansion:
    return expansion_scale(-1, x)


def phi(x: FormalExpansion) -> MeromorphicGerm:
    """Forget the cone decoration: add all terms as rational functions."""
    total = make_mero(x.polynomial_part)
    for dc, num in x.terms:
        total = mero_add(total, make_mero(num, dc.factors))
    return total


# ---------------------------------------------------------------------------
# subdivision operators

def _expansion_of_polar(g: PolarGerm) -> FormalExpansion:
    return FormalExpansion(((DecoratedCone(g.factors), g.numerator),),
                           Polynomial.zero(g.nvars))


def subdivide_simple(space: AmbientSpace, g: PolarGerm,
                     pieces: Sequence[SimplicialCone],
                     validate: bool = True) -> FormalExpansion:
    """Re-support a simple polar germ (all exponents 1) on a subdivision.

    The coefficient of each piece is the ratio of minor-sum weights, which is
    exactly what makes the cone valuation additive: summing the output with
    ``phi`` returns the input germ.
    """
    if any(s != 1 for _, s in g.factors):
        raise ValueError("subdivide_simple needs all exponents equal to 1")
    forms = [v for v, _ in g.factors]
    n = len(forms)
    cone = SimplicialCone(tuple(forms))
    if validate and not is_subdivision(pieces, cone):
        raise NotASubdivision("pieces do not tile the supporting cone")
    a = max_minor_abs_sum(forms, n)
    items = []
    for piece in pieces:
        b = max_minor_abs_sum(list(piece.generators), n)
        factors = tuple((v, 1) for v in piece.generators)
        items.append((factors, g.numerator.scale(b / a)))
    return make_expansion(space, items, Polynomial.zero(g.nvars),
                          validate=False)


def delta_op(space: AmbientSpace, lstar: Vec,
             x: FormalExpansion) -> FormalExpansion:
    """Derivation raising pole orders: each denominator slot M_j of each term
    gains a copy with coefficient r_j * Q(lstar, M_j).

    Numerators ride along unchanged; that is only consistent when the
    direction associated with ``lstar`` does not vary any numerator, which is
    checked exactly (OrthogonalityViolated otherwise).  The polynomial part
    has no denominator slots, so it maps to zero.
    """
    lstar = tuple(Fraction(c) for c in lstar)
    w = mat_vec(space.gram, lstar)
    items = []
    for dc, num in x.terms:
        if not num.directional_derivative(w).is_zero():
            raise OrthogonalityViolated(
                "delta direction varies a numerator polynomial")
        for j, (v, s) in enumerate(dc.factors):
            q = space.pairing(lstar, v)
            if q == 0:
                continue
            bumped = tuple((u, r + 1 if i == j else r)
                           for i, (u, r) in enumerate(dc.factors))
            items.append((bumped, num.scale(s * q)))
    return make_expansion(space, items, Polynomial.zero(x.nvars),
                          validate=False)


def _subdivide_term(space: AmbientSpace, factors: Factors, num: Polynomial,
                    pieces: Sequence[SimplicialCone]) -> list[tuple[Factors, Polynomial]]:
    """One decorated term onto tiling pieces: simple split, then delta powers."""
    forms = [v for v, _ in factors]
    exps = [s for _, s in factors]
    n = len(forms)
    a = max_minor_abs_sum(forms, n)
    duals = q_dual_family(space, forms)
    scale = ONE
    for s in exps:
        scale /= factorial(s - 1)
    out: list[tuple[Factors, Polynomial]] = []
    for piece in pieces:
        b = max_minor_abs_sum(list(piece.generators), n)
        state: list[tuple[Fraction, dict[Vec, int]]] = [
            (b / a, {v: 1 for v in piece.generators})]
        for j, s in enumerate(exps):
            for _ in range(s - 1):
                nxt = []
                for coef, den in state:
                    for v, r in den.items():
                        q = space.pairing(duals[j], v)
                        if q == 0:
                            continue
                        bumped = dict(den)
                        bumped[v] = r + 1
                        nxt.append((coef * r * q, bumped))
                state = nxt
        for coef, den in state:
            out.append((tuple(sorted(den.items())), num.scale(coef * scale)))
    return out


def _pieces_by_cone(cones: Sequence[SimplicialCone],
                    family: Sequence[SimplicialCone],
                    validate: bool) -> dict[SimplicialCone, list[SimplicialCone]]:
    """For each cone, the members of the family that tile it."""
    assignment: dict[SimplicialCone, list[SimplicialCone]] = {}
    for cone in cones:
        mine = [d for d in family
                if d.dim == cone.dim
                and all(cone_contains(cone, g) for g in d.generators)]
        if validate and not is_subdivision(mine, cone):
            raise NotAPanSubdivision(
                f"family does not tile the supporting cone {cone!r}")
        assignment[cone] = mine
    return assignment


def subdivision_operator(space: AmbientSpace, x: FormalExpansion,
                         family: Sequence[SimplicialCone],
                         validate: bool = True) -> FormalExpansion:
    """Rewrite an expansion onto a finer properly positioned family.

    The family must tile every supporting cone of ``x`` by its members
    contained in that cone (NotAPanSubdivision otherwise); members lying in
    no supporting cone are allowed and simply unused.  ``phi`` of the result
    equals ``phi`` of the input; the polynomial part passes through
    unchanged.
    """
    family = list(family)
    support = x.support()
    if validate and not is_properly_positioned(family):
        raise NotAPanSubdivision("target family is not properly positioned")
    assignment = _pieces_by_cone(support, family, validate)
    items: list[tuple[Factors, Polynomial]] = []
    for dc, num in x.terms:
        items.extend(_subdivide_term(space, dc.factors, num,
                                     assignment[dc.cone]))
    return make_expansion(space, items, x.polynomial_part, validate=False)


# ---------------------------------------------------------------------------
# the Laurent expansion

def laurent_expand(space: AmbientSpace, f,
                   support: Sequence[SimplicialCone] | None = None) -> FormalExpansion:
    """Canonical Laurent expansion of a meromorphic germ.

    Pipeline: decompose into polar germs with independent pole forms and
    orthogonal numerators; the sign normalization of the stored forms makes
    every supporting cone strictly convex; the common refinement of the
    supporting cones is properly positioned, and the subdivision operator
    moves every term onto it.  Summing the result with ``phi`` gives back
    ``f`` exactly.

    With an explicit ``support`` the expansion is re-supported on its
    members; if they cannot tile the canonical supporting cones the germ
    admits no expansion there (NotInLaurentSubspace).
    """
    s: GermSum = decompose(space, f)
    cones = []
    seen = set()
    for t in s.terms:
        c = SimplicialCone(tuple(v for v, _ in t.factors))
        if c not in seen:
            seen.add(c)
            cones.append(c)
    if support is None:
        pieces, index_sets = common_refinement(cones)
        assignment = {c: [pieces[i] for i in idx]
                      for c, idx in zip(cones, index_sets)}
    else:
        support = list(support)
        if not is_properly_positioned(support):
            raise NotProperlyPositioned(
                "requested support is not properly positioned")
        try:
            assignment = _pieces_by_cone(cones, support, validate=True)
        except NotAPanSubdivision as exc:
            raise NotInLaurentSubspace(
                "germ admits no expansion on the requested support"
            ) from exc
    items: list[tuple[Factors, Polynomial]] = []
    for t in s.terms:
        cone = SimplicialCone(tuple(v for v, _ in t.factors))
        items.extend(_subdivide_term(space, t.factors, t.numerator,
                                     assignment[cone]))
    return make_expansion(space, items, s.poly, validate=False)


# ---------------------------------------------------------------------------
# kernel elements of phi

def kernel_generators(space: AmbientSpace, sample: PolarGerm,
                      subdivision: Sequence[SimplicialCone] | None = None
                      ) -> list[FormalExpansion]:
    """Formal expansions that ``phi`` sends to zero, built from a sample.

    Two shapes generate the whole kernel:

    * sign flip: the sample plus (-1)^(s1+1) times the sample with its first
      generator negated.  Stored generators are sign-normalized, so the
      negated copy re-normalizes onto the same decorated cone and the pair
      collapses structurally to the zero expansion — the normalization bakes
      this part of the kernel into the representation itself.
    * re-supporting: the sample minus the subdivision operator applied to it
      over any subdivision of its cone (the trivial one when none is given);
      a nontrivial subdivision gives a structurally nonzero expansion with
      vanishing ``phi``-image.
    """
    x = _expansion_of_polar(sample)
    (v1, s1) = sample.factors[0]
    flipped_num = Polynomial.constant(sample.nvars, (-ONE) ** s1)
    flipped_num = flipped_num * sample.numerator
    flipped = make_expansion(
        space, [(sample.factors, flipped_num)],
        Polynomial.zero(sample.nvars), validate=False)
    sign = (-ONE) ** (s1 + 1)
    type_one = expansion_add(x, expansion_scale(sign, flipped))
    if subdivision is None:
        subdivision = [SimplicialCone(tuple(v for v, _ in sample.factors))]
    resupported = subdivision_operator(space, x, list(subdivision))
    type_two = expansion_add(x, expansion_neg(resupported))
    return [type_one, type_two]
