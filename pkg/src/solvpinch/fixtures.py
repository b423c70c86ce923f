"""Named brackets used throughout the tests, the CLI and the Table 1 harness."""

from __future__ import annotations

from fractions import Fraction as Fr
from math import sqrt

import numpy as np

from .lie_core import MetricLieAlgebra


def from_differentials(dim, rows, tol=1e-9) -> MetricLieAlgebra:
    """Bracket from the usual (0, 0, 12, ...) notation.

    ``rows[k]`` lists ``(coef, i, j)`` (1-based) meaning mu(e_i, e_j) has
    ``coef`` as its e_{k+1} component.
    """
    entries = []
    for k, terms in enumerate(rows):
        for coef, i, j in terms:
            entries.append((i - 1, j - 1, k, coef))
    return MetricLieAlgebra.from_entries(dim, entries, tol)


def heis(tol=1e-9) -> MetricLieAlgebra:
    """3-dimensional Heisenberg algebra, mu(e_1, e_2) = e_3."""
    return from_differentials(3, [[], [], [(1.0, 1, 2)]], tol)


def hyp(n: int, tol=1e-9) -> MetricLieAlgebra:
    """Real hyperbolic space: ad e_n = I on span(e_1, ..., e_{n-1})."""
    if n < 2:
        raise ValueError("hyp needs n >= 2")
    c = np.zeros((n, n, n))
    for i in range(n - 1):
        c[n - 1, i, i] = 1.0
        c[i, n - 1, i] = -1.0
    return MetricLieAlgebra(c, tol)


def abelian(n: int) -> MetricLieAlgebra:
    return MetricLieAlgebra(np.zeros((n, n, n)))


S2, S3 = sqrt(2.0), sqrt(3.0)

# (name, differentials, printed type, printed q); coefficients exactly as printed
TABLE1 = {
    "mu1": (
        [[], [], [(3.0, 1, 2)], [(4.0, 1, 3)], [(3.0, 1, 4)]],
        (Fr(-1), Fr(-1, 3), Fr(-1, 10), Fr(1, 10), Fr(1, 3)),
        Fr(5, 6),
    ),
    "mu2": (
        [[], [], [(S3, 1, 2)], [(S3, 1, 3)], [(S2, 1, 4), (S2, 2, 3)]],
        (Fr(-4, 5), Fr(-1, 2), Fr(-1, 5), Fr(1, 10), Fr(2, 5)),
        Fr(10, 11),
    ),
    "mu3": (
        [[], [], [], [(1.0, 1, 2)], [(S2, 1, 4), (S2, 2, 3)]],
        (Fr(-4, 5), Fr(-3, 5), Fr(-1, 5), Fr(0), Fr(3, 5)),
        Fr(5, 7),
    ),
    "mu4": (
        [[], [], [], [], [(1.0, 1, 2), (1.0, 3, 4)]],
        (Fr(-1, 2), Fr(-1, 2), Fr(-1, 2), Fr(-1, 2), Fr(1)),
        Fr(1, 2),
    ),
    "mu5": (
        [[], [], [(2.0, 1, 2)], [(S3, 1, 3)], [(S3, 2, 3)]],
        (Fr(-7, 10), Fr(-7, 10), Fr(-1, 5), Fr(3, 10), Fr(3, 10)),
        Fr(5, 6),
    ),
    # printed with the same structure constants as mu2
    "mu6": (
        [[], [], [(S3, 1, 2)], [(S3, 1, 3)], [(S2, 1, 4), (S2, 2, 3)]],
        (Fr(-1), Fr(-1, 2), Fr(-1, 2), Fr(1, 2), Fr(1, 2)),
        Fr(1, 2),
    ),
    "mu7": (
        [[], [], [(1.0, 1, 2)], [], []],
        (Fr(-1), Fr(-1), Fr(0), Fr(0), Fr(1)),
        Fr(1, 3),
    ),
    "mu8": (
        [[], [], [(1.0, 1, 2)], [(1.0, 1, 3)], []],
        (Fr(-1), Fr(-1, 2), Fr(0), Fr(0), Fr(1, 2)),
        Fr(2, 3),
    ),
}


def table1_bracket(name: str, tol=1e-9) -> MetricLieAlgebra:
    rows, _, _ = TABLE1[name]
    return from_differentials(5, rows, tol)
