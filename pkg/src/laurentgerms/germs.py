"""Meromorphic germs at zero with linear poles, over exact rationals.

A germ is a quotient p / prod <v_i, eps>^{s_i} with a polynomial numerator
and finitely many linear pole forms.  Denominator forms are always stored as
primitive pseudo-positive integer vectors (scalars are absorbed into the
numerator, using 1/(-L)^s = (-1)^s/L^s), sorted canonically, and reduced so
that no pole form divides the numerator.  This makes structural equality
meaningful and germ equality a single cross-multiplication.

A *polar* germ additionally keeps its numerator orthogonal to the pole forms:
the numerator is a polynomial in linear functions <w, eps> with Q(w, v_i) = 0
for every pole form v_i.  ``decompose`` splits any germ into a sum of polar
germs plus a polynomial, the exact analogue of the Laurent split of a
one-variable meromorphic function into principal part plus holomorphic part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NotPolar, PoleHit
from .exact import (
    ONE,
    ZERO,
    AmbientSpace,
    Mat,
    Polynomial,
    Vec,
    mat_from_columns,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_rank,
    mat_transpose,
    mat_vec,
    primitive_pseudo_positive,
    q_orthogonal_complement,
    solve,
    vec_dot,
)

Factors = tuple[tuple[Vec, int], ...]


def _canonical_factors(raw: Sequence[tuple[Vec, int]]) -> tuple[Fraction, Factors]:
    """Normalize pole factors to primitive pseudo-positive vectors.

    Returns (c, factors) with prod raw^s = c * prod canonical^s; the scalar
    c is what the *numerator* must be divided by to keep the germ equal.
    """
    merged: dict[Vec, int] = {}
    scale = ONE
    for v, e in raw:
        if e == 0:
            continue
        if e < 0:
            raise ValueError("negative pole multiplicity")
        c, w = primitive_pseudo_positive(tuple(v))
        scale *= c ** e
        merged[w] = merged.get(w, 0) + e
    factors = tuple(sorted(merged.items()))
    return scale, factors


@dataclass(frozen=True)
class MeromorphicGerm:
    """Reduced quotient numerator / prod <form, eps>^power."""

    numerator: Polynomial
    den: Factors

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_polynomial(self) -> bool:
        return not self.den

    def __repr__(self):
        num = self.numerator.to_string()
        if not self.den:
            return f"MeromorphicGerm({num})"
        den = " * ".join(
            f"({Polynomial.linear_form(v).to_string()})" + (f"^{e}" if e > 1 else "")
            for v, e in self.den)
        return f"MeromorphicGerm(({num}) / {den})"


def make_mero(numerator: Polynomial, factors: Sequence[tuple[Vec, int]] = ()) -> MeromorphicGerm:
    """Build a reduced germ; scalars from form normalization are absorbed."""
    scale, den = _canonical_factors(factors)
    num = numerator.scale(ONE / scale)
    if num.is_zero():
        return MeromorphicGerm(num, ())
    # cancel pole forms that divide the numerator
    den_d = dict(den)
    for v in list(den_d):
        while den_d.get(v, 0) > 0:
            q = num.divided_by_form(v)
            if q is None:
                break
            num = q
            den_d[v] -= 1
        if den_d.get(v) == 0:
            del den_d[v]
    return MeromorphicGerm(num, tuple(sorted(den_d.items())))


def _den_poly(nvars: int, den: Factors) -> Polynomial:
    p = Polynomial.constant(nvars, 1)
    for v, e in den:
        p = p * Polynomial.linear_form(v) ** e
    return p


def mero_add(f: MeromorphicGerm, g: MeromorphicGerm) -> MeromorphicGerm:
    lcm: dict[Vec, int] = dict(f.den)
    for v, e in g.den:
        lcm[v] = max(lcm.get(v, 0), e)
    fd = tuple((v, lcm[v] - dict(f.den).get(v, 0)) for v in lcm)
    gd = tuple((v, lcm[v] - dict(g.den).get(v, 0)) for v in lcm)
    num = (f.numerator * _den_poly(f.nvars, tuple((v, e) for v, e in fd if e))
           + g.numerator * _den_poly(g.nvars, tuple((v, e) for v, e in gd if e)))
    return make_mero(num, tuple(lcm.items()))


def mero_neg(f: MeromorphicGerm) -> MeromorphicGerm:
    return MeromorphicGerm(-f.numerator, f.den)


def mero_sub(f: MeromorphicGerm, g: MeromorphicGerm) -> MeromorphicGerm:
    return mero_add(f, mero_neg(g))


def mero_mul(f: MeromorphicGerm, g: MeromorphicGerm) -> MeromorphicGerm:
    den = list(f.den) + list(g.den)
    return make_mero(f.numerator * g.numerator, den)


def mero_scale(c, f: MeromorphicGerm) -> MeromorphicGerm:
    return make_mero(f.numerator.scale(c), f.den)


@dataclass(frozen=True)
class PolarGerm:
    """Canonical polar germ: orthogonal numerator over independent poles.

    ``factors`` doubles as the decorated cone of the germ: the geometric
    supporting cone is spanned by the pole forms, decorated by their powers.
    """

    numerator: Polynomial
    factors: Factors

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    @property
    def p_order(self) -> int:
        """Total pole multiplicity of the germ."""
        return sum(e for _, e in self.factors)

    def as_mero(self) -> MeromorphicGerm:
        return make_mero(self.numerator, self.factors)

    def __repr__(self):
        return f"PolarGerm({self.as_mero()!r})"


@dataclass(frozen=True)
class GermSum:
    """A finite formal sum of polar germs plus a polynomial part.

    Terms with the same decorated denominator are merged at construction and
    zero numerators dropped, so structural equality of GermSums compares
    meaningfully.
    """

    terms: tuple[PolarGerm, ...]
    poly: Polynomial

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def is_zero(self) -> bool:
        return not self.terms and self.poly.is_zero()

    def __repr__(self):
        return f"GermSum({len(self.terms)} polar terms, poly={self.poly.to_string()})"


def make_germ_sum(terms: Sequence[PolarGerm], poly: Polynomial) -> GermSum:
    merged: dict[Factors, Polynomial] = {}
    for t in terms:
        if t.factors in merged:
            merged[t.factors] = merged[t.factors] + t.numerator
        else:
            merged[t.factors] = t.numerator
    out = [PolarGerm(num, fac) for fac, num in sorted(merged.items())
           if not num.is_zero()]
    return GermSum(tuple(out), poly)


def as_mero(x) -> MeromorphicGerm:
    """Coerce a Polynomial, PolarGerm, GermSum, or germ to MeromorphicGerm."""
    if isinstance(x, MeromorphicGerm):
        return x
    if isinstance(x, Polynomial):
        return make_mero(x)
    if isinstance(x, PolarGerm):
        return x.as_mero()
    if isinstance(x, GermSum):
        total = make_mero(x.poly)
        for t in x.terms:
            total = mero_add(total, t.as_mero())
        return total
    # formal expansions provide .as_germ_sum()
    if hasattr(x, "as_germ_sum"):
        return as_mero(x.as_germ_sum())
    raise TypeError(f"cannot interpret {type(x).__name__} as a germ")


def germ_equal(f, g) -> bool:
    """Exact equality of germs by cross-multiplication, no evaluation."""
    return mero_sub(as_mero(f), as_mero(g)).is_zero()


def evaluate(x, point: Sequence) -> Fraction:
    """Exact value at a rational point; raises PoleHit on a pole hyperplane."""
    f = as_mero(x)
    num = f.numerator.evaluate(point)
    den = ONE
    for v, e in f.den:
        val = vec_dot(v, tuple(Fraction(p) for p in point))
        if val == 0:
            raise PoleHit(f"point lies on the pole <{Polynomial.linear_form(v).to_string()}>")
        den *= val ** e
    return num / den


# ---------------------------------------------------------------------------
# orthogonality (the Q-structure on numerators)

def orthogonal_projection_images(space: AmbientSpace, forms: Sequence[Vec]) -> list[Polynomial]:
    """Substitution images realizing p -> p  restricted to the Q-orthogonal
    complement of span(forms): each variable eps_i is replaced by the i-th
    coordinate of the projected dual point.  A polynomial is a function of
    Q-orthogonal linear forms alone iff it is fixed by this substitution.
    """
    k = space.dimension
    if not forms:
        return [Polynomial.variable(k, i) for i in range(k)]
    b = mat_from_columns(list(forms))
    bt = mat_transpose(b)
    gram_b = mat_mul(mat_mul(bt, space.gram), b)
    inv = mat_inverse(gram_b)
    # P_U = B (B^T Q B)^{-1} B^T Q;  P = I - P_U  projects onto span(forms)^perp
    p_u = mat_mul(mat_mul(b, inv), mat_mul(bt, space.gram))
    proj = tuple(tuple((ONE if i == j else ZERO) - p_u[i][j] for j in range(k))
                 for i in range(k))
    # variable i maps to sum_j P[j][i] eps_j (the substitution eps -> P^T eps)
    return [Polynomial.linear_form(tuple(proj[j][i] for j in range(k)))
            for i in range(k)]


def numerator_is_orthogonal(space: AmbientSpace, numerator: Polynomial,
                            forms: Sequence[Vec]) -> bool:
    if numerator.is_constant():
        return True
    images = orthogonal_projection_images(space, forms)
    return numerator.substitute(images) == numerator


def canonicalize_polar(space: AmbientSpace | None, numerator: Polynomial,
                       factors: Sequence[tuple[Vec, int]]) -> PolarGerm:
    """Validate and canonicalize a polar germ.

    Raises NotPolar for a zero numerator, dependent pole forms, or a
    numerator not orthogonal to the poles.  ``space`` may be None only when
    the numerator is constant (orthogonality is then vacuous).
    """
    scale, fac = _canonical_factors(factors)
    num = numerator.scale(ONE / scale)
    if num.is_zero():
        raise NotPolar("polar germ needs a nonzero numerator")
    forms = [v for v, _ in fac]
    if mat_rank(tuple(forms)) != len(forms):
        raise NotPolar("pole forms of a polar germ must be independent")
    if not num.is_constant():
        if space is None:
            raise NotPolar("ambient space required to check orthogonality")
        if not numerator_is_orthogonal(space, num, forms):
            raise NotPolar("numerator is not orthogonal to the pole forms")
    return PolarGerm(num, fac)


# ---------------------------------------------------------------------------
# partial fractions onto independent denominators

def reduce_to_independent(
        f) -> list[tuple[Fraction, Polynomial, Factors]]:
    """Rewrite f as sum_i c_i * numerator / prod(independent forms)^s.

    The numerator polynomial is shared by all output fractions; only the
    denominators change, by repeated use of the exchange identity
    1/(L_1...L_r) = sum_i a_i/(L_1...L_i-hat...L_r L_0) for a dependent form
    L_0 = sum_i a_i L_i among the poles.
    """
    f = as_mero(f)
    if f.is_zero():
        return []
    out: dict[Factors, Fraction] = {}

    def emit(coef: Fraction, den: dict[Vec, int]):
        key = tuple(sorted((v, e) for v, e in den.items() if e))
        out[key] = out.get(key, ZERO) + coef

    def outer(coef: Fraction, den: dict[Vec, int]):
        forms = sorted(v for v, e in den.items() if e)
        if mat_rank(tuple(forms)) == len(forms):
            emit(coef, den)
            return
        # greedy maximal independent subset in canonical order
        basis: list[Vec] = []
        dep: Vec | None = None
        for v in forms:
            if mat_rank(tuple(basis + [v])) == len(basis) + 1:
                basis.append(v)
            elif dep is None:
                dep = v
        assert dep is not None
        coords = solve(mat_from_columns(basis), dep)
        assert coords is not None
        rel = [(b, c) for b, c in zip(basis, coords) if c != 0]
        inner(coef, den, dep, rel)

    def inner(coef: Fraction, den: dict[Vec, int], dep: Vec,
              rel: list[tuple[Vec, Fraction]]):
        # den has every rel-form with positive exponent; one identity step
        for b, c in rel:
            child = dict(den)
            child[b] -= 1
            child[dep] = child.get(dep, 0) + 1
            if child[b] == 0:
                del child[b]
                outer(coef * c, child)  # a distinct form vanished
            else:
                inner(coef * c, child, dep, rel)

    outer(ONE, dict(f.den))
    return [(c, f.numerator, den) for den, c in sorted(out.items()) if c != 0]


# ---------------------------------------------------------------------------
# holomorphic/polar decomposition

def decompose(space: AmbientSpace, f) -> GermSum:
    """Split a germ into polar germs plus a polynomial (exact, canonical).

    For each independent-denominator fraction the pole forms are completed by
    a Q-orthogonal basis; in those coordinates the numerator splits into a
    part free of the pole directions (a polar germ) and parts divisible by a
    pole form, which cancel one pole power each and recurse.  Terms are
    grouped by decorated denominator, so exact cancellations disappear.
    """
    f = as_mero(f)
    k = space.dimension
    polar: list[PolarGerm] = []
    poly = Polynomial.zero(k)
    caches: dict[tuple[Vec, ...], tuple[list[Polynomial], list[Polynomial]]] = {}

    def coordinate_maps(forms: tuple[Vec, ...]):
        """Substitution images for eps->u and u->eps, basis (forms | ortho)."""
        if forms not in caches:
            ortho = q_orthogonal_complement(space, list(forms))
            b = mat_from_columns(list(forms) + ortho)
            bt = mat_transpose(b)
            bt_inv = mat_inverse(bt)
            to_u = [Polynomial.linear_form(bt_inv[i]) for i in range(k)]
            to_eps = [Polynomial.linear_form(bt[i]) for i in range(k)]
            caches[forms] = (to_u, to_eps)
        return caches[forms]

    def rec(num: Polynomial, den: Factors):
        nonlocal poly
        if num.is_zero():
            return
        if not den:
            poly = poly + num
            return
        forms = tuple(v for v, _ in den)
        m = len(forms)
        to_u, to_eps = coordinate_maps(forms)
        h = num.substitute(to_u)
        h0 = h.set_variables_zero(range(m))
        if not h0.is_zero():
            polar.append(PolarGerm(h0.substitute(to_eps), den))
        rest = h - h0
        if rest.is_zero():
            return
        # route each term through its first pole-direction variable
        parts: list[dict] = [dict() for _ in range(m)]
        for e, c in rest.terms.items():
            i = next(j for j in range(m) if e[j] > 0)
            e2 = list(e)
            e2[i] -= 1
            parts[i][tuple(e2)] = parts[i].get(tuple(e2), ZERO) + c
        for i in range(m):
            if not parts[i]:
                continue
            g = Polynomial(k, parts[i]).substitute(to_eps)
            child = tuple((v, e - 1 if j == i else e)
                          for j, (v, e) in enumerate(den) if e - (j == i) > 0)
            rec(g, child)

    for coef, num, den in reduce_to_independent(f):
        rec(num.scale(coef), den)
    return make_germ_sum(polar, poly)
