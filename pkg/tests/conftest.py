"""Shared random generators for the property tests.

Everything is driven by explicitly seeded random.Random instances so
failures reproduce bit-for-bit.
"""

import random
from fractions import Fraction

from laurentgerms import (
    AmbientSpace,
    MeromorphicGerm,
    Polynomial,
    make_mero,
    mero_mul,
)


def random_fraction(rng: random.Random, lo: int = -3, hi: int = 3,
                    den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_vector(rng: random.Random, k: int, lo: int = -3, hi: int = 3):
    """A nonzero integer vector."""
    while True:
        v = tuple(Fraction(rng.randint(lo, hi)) for _ in range(k))
        if any(c != 0 for c in v):
            return v


def random_polynomial(rng: random.Random, k: int, degree: int = 3,
                      terms: int = 4) -> Polynomial:
    out = Polynomial.zero(k)
    for _ in range(rng.randint(1, terms)):
        e = [0] * k
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(k)] += 1
        mono = Polynomial(k, {tuple(e): random_fraction(rng)})
        out = out + mono
    return out


def random_germ(rng: random.Random, k: int, max_forms: int = 4,
                degree: int = 3) -> MeromorphicGerm:
    """A random germ with at most max_forms linear pole factors.

    The numerator is a random polynomial of total degree <= degree; both
    repeated and dependent pole forms are allowed so reduction paths get
    exercised.
    """
    num = random_polynomial(rng, k, degree=degree)
    g = make_mero(num)
    for _ in range(rng.randint(0, max_forms)):
        form = random_vector(rng, k, -2, 2)
        g = mero_mul(g, make_mero(Polynomial.constant(k, 1),
                                  ((form, 1),)))
    return g


def random_space(rng: random.Random, k: int) -> AmbientSpace:
    """A random symmetric positive-definite pairing (diagonally dominant)."""
    rows = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            rows[i][j] = rows[j][i] = Fraction(rng.randint(-1, 1))
    for i in range(k):
        rows[i][i] = Fraction(k + rng.randint(1, 3))
    return AmbientSpace(k, tuple(tuple(r) for r in rows))
