"""Exact rational linear algebra and sparse multivariate polynomials.

Everything is built on :class:`fractions.Fraction` (always reduced, positive
denominator), so equality tests are decisive and nothing is ever rounded.
Vectors are tuples of Fractions, matrices are tuples of row tuples, and
polynomials map exponent tuples to nonzero rational coefficients with
graded-lexicographic canonical ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DependentInput, RankDeficient

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(coords: Iterable) -> Vec:
    return tuple(frac(c) for c in coords)


def unit_vec(k: int, i: int) -> Vec:
    return tuple(ONE if j == i else ZERO for j in range(k))


def zero_vec(k: int) -> Vec:
    return (ZERO,) * k


def vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c, v: Vec) -> Vec:
    c = frac(c)
    return tuple(c * a for a in v)


def vec_dot(u: Vec, v: Vec) -> Fraction:
    """Plain coordinate dot product (duality pairing, no inner product)."""
    return sum((a * b for a, b in zip(u, v, strict=True)), ZERO)


def vec_is_zero(v: Vec) -> bool:
    return all(a == 0 for a in v)


def primitive_vector(v: Vec) -> Vec:
    """Scale ``v`` by a *positive* rational so entries are coprime integers.

    The ray direction is preserved; the zero vector is returned unchanged.
    """
    if vec_is_zero(v):
        return v
    denom = lcm(*(a.denominator for a in v))
    ints = [a.numerator * (denom // a.denominator) for a in v]
    g = gcd(*(abs(n) for n in ints))
    return tuple(Fraction(n // g) for n in ints)


def is_pseudo_positive(v: Vec) -> bool:
    """True when the nonzero coordinate of highest index is positive.

    The zero vector counts as pseudo-positive.  The set of pseudo-positive
    vectors is a strictly convex half-space-like cone: it is closed under
    positive combinations and meets its negative only in 0.
    """
    for a in reversed(v):
        if a != 0:
            return a > 0
    return True


def primitive_pseudo_positive(v: Vec) -> tuple[Fraction, Vec]:
    """Write ``v = c * w`` with ``w`` primitive pseudo-positive, ``c != 0``.

    Raises ValueError on the zero vector (it has no direction).
    """
    if vec_is_zero(v):
        raise ValueError("zero vector has no primitive representative")
    w = primitive_vector(v)
    # v = c*w with c > 0; flip if w is not pseudo-positive.
    if not is_pseudo_positive(w):
        w = vec_scale(-1, w)
    i = next(j for j, a in enumerate(w) if a != 0)
    return v[i] / w[i], w


# ---------------------------------------------------------------------------
# matrices

def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(vec(r) for r in rows)


def mat_identity(n: int) -> Mat:
    return tuple(unit_vec(n, i) for i in range(n))


def mat_transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()


def mat_from_columns(cols: Sequence[Vec]) -> Mat:
    return mat_transpose(tuple(cols))


def mat_vec(m: Mat, v: Vec) -> Vec:
    return tuple(vec_dot(row, v) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = mat_transpose(b)
    return tuple(tuple(vec_dot(row, col) for col in bt) for row in a)


def rref(m: Mat) -> tuple[Mat, tuple[int, ...]]:
    """Reduced row echelon form and the pivot column indices."""
    rows = [list(r) for r in m]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = ONE / rows[r][c]
        rows[r] = [a * inv for a in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in rows), tuple(pivots)


def mat_rank(m: Mat) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def nullspace(m: Mat) -> list[Vec]:
    """Canonical basis of { x : m x = 0 }, primitivized echelon vectors."""
    if not m:
        return []
    ncols = len(m[0])
    red, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        x = [ZERO] * ncols
        x[free] = ONE
        for r, p in enumerate(pivots):
            x[p] = -red[r][free]
        basis.append(primitive_vector(tuple(x)))
    return basis


def solve(m: Mat, b: Vec) -> Vec | None:
    """One solution of ``m x = b``, or None when inconsistent.

    Free variables are set to zero; with independent columns the solution is
    the unique one.
    """
    if not m:
        return ()
    ncols = len(m[0])
    aug = tuple(row + (bi,) for row, bi in zip(m, b, strict=True))
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for r, p in enumerate(pivots):
        x[p] = red[r][ncols]
    return tuple(x)


def det(m: Mat) -> Fraction:
    """Determinant by exact Gaussian elimination."""
    n = len(m)
    if n == 0:
        return ONE
    rows = [list(r) for r in m]
    result = ONE
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return ZERO
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            result = -result
        result *= rows[c][c]
        inv = ONE / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return result


def mat_inverse(m: Mat) -> Mat:
    n = len(m)
    aug = tuple(row + unit_vec(n, i) for i, row in enumerate(m))
    red, pivots = rref(aug)
    if pivots != tuple(range(n)):
        raise DependentInput("matrix is singular")
    return tuple(row[n:] for row in red)


# ---------------------------------------------------------------------------
# ambient space

@dataclass(frozen=True)
class AmbientSpace:
    """Fixed ambient dimension with a symmetric positive-definite pairing.

    ``gram`` holds Q in the standard basis; ``pairing(u, v) = u^T Q v`` is the
    inner product used for orthogonality of numerator directions against pole
    forms.  Positive-definiteness is checked eagerly via leading principal
    minors so misuse fails at construction, not deep inside an expansion.
    """

    dimension: int
    gram: Mat

    def __post_init__(self):
        k = self.dimension
        g = self.gram
        if len(g) != k or any(len(row) != k for row in g):
            raise ValueError(f"gram matrix must be {k}x{k}")
        if g != mat_transpose(g):
            raise ValueError("gram matrix must be symmetric")
        for j in range(1, k + 1):
            minor = tuple(row[:j] for row in g[:j])
            if det(minor) <= 0:
                raise ValueError("gram matrix must be positive definite")

    @classmethod
    def standard(cls, k: int) -> "AmbientSpace":
        return cls(k, mat_identity(k))

    def pairing(self, u: Vec, v: Vec) -> Fraction:
        return vec_dot(u, mat_vec(self.gram, v))


def q_orthogonal_complement(space: AmbientSpace, vs: Sequence[Vec]) -> list[Vec]:
    """Basis of { w : Q(w, v) = 0 for all given v }, primitive and canonical."""
    if not vs:
        return [unit_vec(space.dimension, i) for i in range(space.dimension)]
    rows = tuple(mat_vec(space.gram, v) for v in vs)
    return nullspace(rows)


def q_dual_family(space: AmbientSpace, forms: Sequence[Vec]) -> list[Vec]:
    """Vectors L*_j in span(forms) with Q(L_i, L*_j) = delta_ij.

    Raises DependentInput when the forms are linearly dependent (no dual
    family exists inside the span then).
    """
    if mat_rank(tuple(forms)) != len(forms):
        raise DependentInput("dual family requires independent forms")
    g = tuple(tuple(space.pairing(a, b) for b in forms) for a in forms)
    ginv = mat_inverse(g)
    duals = []
    for j in range(len(forms)):
        w = zero_vec(space.dimension)
        for l, form in enumerate(forms):
            w = vec_add(w, vec_scale(ginv[l][j], form))
        duals.append(w)
    return duals


def max_minor_abs_sum(columns: Sequence[Vec], n: int) -> Fraction:
    """Sum of |det| over all n-row selections of the matrix with the given
    columns.  Raises RankDeficient when the columns do not have rank n."""
    if len(columns) != n:
        raise ValueError("expected exactly n columns")
    m = mat_from_columns(columns)
    if mat_rank(m) != n:
        raise RankDeficient("columns do not have full rank")
    k = len(m)
    total = ZERO
    for rows in combinations(range(k), n):
        total += abs(det(tuple(m[i] for i in rows)))
    return total


# ---------------------------------------------------------------------------
# polynomials

Exponent = tuple[int, ...]


def _grlex_key(e: Exponent):
    return (sum(e), e)


class Polynomial:
    """Sparse exact polynomial in k variables over the rationals.

    Immutable by convention; ``terms`` maps exponent tuples to nonzero
    Fractions.  The canonical term order is graded lexicographic.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[Exponent, Fraction] | None = None):
        object.__setattr__(self, "nvars", nvars)
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            c = frac(c)
            if c != 0:
                clean[tuple(e)] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):  # pragma: no cover - defensive
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: frac(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): ONE})

    @classmethod
    def linear_form(cls, v: Vec) -> "Polynomial":
        """The linear function eps -> <v, eps> as a polynomial."""
        k = len(v)
        terms = {}
        for i, c in enumerate(v):
            if c != 0:
                e = [0] * k
                e[i] = 1
                terms[tuple(e)] = c
        return cls(k, terms)

    # -- structure ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, ZERO)

    def total_degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def homogeneous_degree(self) -> int | None:
        """The common total degree of all terms, or None if mixed/zero."""
        degrees = {sum(e) for e in self.terms}
        return degrees.pop() if len(degrees) == 1 else None

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=0)

    def support_variables(self) -> list[int]:
        return [i for i in range(self.nvars)
                if any(e[i] > 0 for e in self.terms)]

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "Polynomial") -> "Polynomial":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, ZERO) + c
        return Polynomial(self.nvars, terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, ZERO) + c1 * c2
        return Polynomial(self.nvars, terms)

    def scale(self, c) -> "Polynomial":
        c = frac(c)
        return Polynomial(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- evaluation and substitution --------------------------------------
    def evaluate(self, point: Sequence) -> Fraction:
        pt = vec(point)
        total = ZERO
        for e, c in self.terms.items():
            v = c
            for x, p in zip(pt, e):
                if p:
                    v *= x ** p
            total += v
        return total

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Compose: replace variable i by images[i] (exact expansion)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        nvars_out = images[0].nvars if images else self.nvars
        result = Polynomial.zero(nvars_out)
        # cache powers of each image as needed
        powers: list[dict[int, Polynomial]] = [
            {0: Polynomial.constant(nvars_out, 1)} for _ in images]
        for e, c in self.terms.items():
            term = Polynomial.constant(nvars_out, c)
            for i, p in enumerate(e):
                if p:
                    cache = powers[i]
                    if p not in cache:
                        q = max(d for d in cache if d <= p)
                        acc = cache[q]
                        while q < p:
                            acc = acc * images[i]
                            q += 1
                            cache[q] = acc
                    term = term * cache[p]
            result = result + term
        return result

    def set_variables_zero(self, indices: Sequence[int]) -> "Polynomial":
        """Keep only terms with exponent zero in all the given slots."""
        idx = set(indices)
        return Polynomial(self.nvars, {
            e: c for e, c in self.terms.items()
            if all(e[i] == 0 for i in idx)})

    def derivative(self, i: int) -> "Polynomial":
        """Partial derivative in variable ``i``."""
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = tuple(x - 1 if j == i else x for j, x in enumerate(e))
            out[d] = out.get(d, ZERO) + c * e[i]
        return Polynomial(self.nvars, out)

    def directional_derivative(self, w: Vec) -> "Polynomial":
        """Derivative along the coordinate vector ``w``."""
        out = Polynomial.zero(self.nvars)
        for i, c in enumerate(w):
            if c != 0:
                out = out + self.derivative(i).scale(c)
        return out

    # -- division by a linear form ----------------------------------------
    def divmod_linear(self, form: Vec) -> tuple["Polynomial", "Polynomial"]:
        """Quotient and remainder dividing by <form, eps>; the remainder has
        no occurrence of the form's leading (highest-index) variable."""
        if vec_is_zero(form):
            raise ZeroDivisionError("division by the zero form")
        j = max(i for i, c in enumerate(form) if c != 0)
        c = form[j]
        divisor = Polynomial.linear_form(form)
        quotient = Polynomial.zero(self.nvars)
        r = self
        while True:
            d = r.degree_in(j)
            if d == 0:
                break
            top = {e: v for e, v in r.terms.items() if e[j] == d}
            shifted = {}
            for e, v in top.items():
                e2 = list(e)
                e2[j] -= 1
                shifted[tuple(e2)] = v / c
            t = Polynomial(self.nvars, shifted)
            quotient = quotient + t
            r = r - t * divisor
        return quotient, r

    def divided_by_form(self, form: Vec) -> "Polynomial | None":
        """Exact quotient by the linear form, or None when not divisible."""
        q, r = self.divmod_linear(form)
        return q if r.is_zero() else None

    # -- printing ----------------------------------------------------------
    def to_string(self, names: Sequence[str] | None = None) -> str:
        if self.is_zero():
            return "0"
        if names is None:
            names = [f"eps{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in self.sorted_terms():
            factors = [f"{names[i]}^{p}" if p > 1 else names[i]
                       for i, p in enumerate(e) if p > 0]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self):
        return f"Polynomial({self.to_string()})"


def poly_linear_substitute(p: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Substitute an affine-linear form for each variable (exact)."""
    for im in images:
        if im.total_degree() > 1:
            raise ValueError("substitution images must be affine-linear")
    return p.substitute(images)


# ---------------------------------------------------------------------------
# factoring a polynomial into linear forms (for denominators)

def _rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """All rational roots of sum(coeffs[i] x^i), found by the rational root
    theorem after clearing denominators.  Trailing zero coefficients (root 0)
    must be stripped by the caller."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) <= 1:
        return []
    denom = lcm(*(c.denominator for c in coeffs))
    ints = [int(c * denom) for c in coeffs]
    a0, an = ints[0], ints[-1]
    if a0 == 0:
        # factor out x and recurse
        return sorted(set([ZERO] + _rational_roots([frac(c) for c in ints[1:]])))

    def divisors(n: int) -> list[int]:
        n = abs(n)
        ds = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                ds.extend([d, n // d])
            d += 1
        return sorted(set(ds))

    roots = []
    for p in divisors(a0):
        for q in divisors(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if sum(c * cand ** i for i, c in enumerate(ints)) == 0:
                    roots.append(cand)
    return sorted(set(roots))


def linear_factorization(
        p: Polynomial) -> tuple[Fraction, list[tuple[Vec, int]]] | None:
    """Write ``p = const * prod <form_i, eps>^{m_i}`` with primitive
    pseudo-positive forms, or return None when no such factorization over the
    rationals exists.

    Only products of *homogeneous* linear forms qualify (poles at zero), so a
    non-homogeneous or irreducible-over-Q input yields None.
    """
    if p.is_zero():
        return None
    if p.is_constant():
        return p.constant_term(), []
    if p.homogeneous_degree() is None:
        return None
    k = p.nvars
    factors: dict[Vec, int] = {}
    work = p

    def extract(form: Vec):
        # divide by the primitive pseudo-positive representative so the
        # recorded factor is exactly what was divided out
        nonlocal work
        key = primitive_pseudo_positive(form)[1]
        while True:
            q = work.divided_by_form(key)
            if q is None:
                return
            work = q
            factors[key] = factors.get(key, 0) + 1

    # single-variable (monomial) factors first
    for i in range(k):
        extract(unit_vec(k, i))

    def slice_roots(i: int, m: int) -> list[Fraction]:
        """Roots r of the bivariate restriction (all other vars 0, x_i = 1)
        viewed as a polynomial in x_m."""
        coeffs: dict[int, Fraction] = {}
        for e, c in work.terms.items():
            if all(p_ == 0 for j, p_ in enumerate(e) if j not in (i, m)):
                coeffs[e[m]] = coeffs.get(e[m], ZERO) + c
        top = max(coeffs, default=-1)
        as_list = [coeffs.get(d, ZERO) for d in range(top + 1)]
        return _rational_roots(as_list)

    while work.total_degree() > 0:
        before = work
        support = work.support_variables()
        m = max(support)
        # factors free of x_m divide the x_m-degree-zero layer
        layer0 = Polynomial(k, {e: c for e, c in work.terms.items()
                                if e[m] == 0})
        if not layer0.is_zero() and not layer0.is_constant():
            sub = linear_factorization(layer0)
            if sub is None:
                return None
            for form, _ in sub[1]:
                extract(form)
        # remaining factors all involve x_m: coefficients from 2-variable
        # slices, leading coefficient normalized to 1
        lower = [i for i in work.support_variables() if i != m]
        candidate_sets = [sorted(set([ZERO] + [-r for r in slice_roots(i, m)]))
                          for i in lower]

        def assemble(idx: int, coords: dict[int, Fraction]):
            if idx == len(lower):
                v = [ZERO] * k
                v[m] = ONE
                for i, a in coords.items():
                    v[i] = a
                extract(tuple(v))
                return
            for a in candidate_sets[idx]:
                coords[lower[idx]] = a
                assemble(idx + 1, coords)
            del coords[lower[idx]]

        assemble(0, {})
        if work == before:
            return None  # no progress: not a product of rational linear forms
    const = work.constant_term()
    ordered = sorted(factors.items(), key=lambda t: t[0])
    return const, ordered
