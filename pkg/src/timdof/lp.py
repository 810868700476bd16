"""Exact rational linear programming for small certificate-bearing problems.

Dense simplex over fractions.Fraction with Bland's pivoting rule, which
guarantees termination.  Problems here are tiny (tens of variables and
constraints), so clarity beats speed.  Solves

    maximize c.x  subject to  A x <= b, x >= 0,  with b >= 0

and returns the optimum together with an optimal vertex and the dual
vector read off the final tableau, so callers can emit certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError


@dataclass(frozen=True)
class LpResult:
    value: Fraction
    x: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]  # one multiplier per constraint row


def _as_fraction_rows(A) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in A]


def maximize(c, A, b) -> LpResult:
    """Exact simplex for max c.x s.t. Ax <= b, x >= 0, requiring b >= 0.

    b >= 0 makes the all-slack basis feasible, which covers every program
    in this package (right-hand sides are time budgets or unit caps).
    Raises InvalidInputError on shape mismatch, negative b, or an
    unbounded objective.
    """
    c = [Fraction(v) for v in c]
    A = _as_fraction_rows(A)
    b = [Fraction(v) for v in b]
    m, n = len(A), len(c)
    if len(b) != m or any(len(row) != n for row in A):
        raise InvalidInputError("inconsistent LP dimensions")
    if any(v < 0 for v in b):
        raise InvalidInputError("maximize requires b >= 0 (all-slack basis must be feasible)")

    # Tableau rows 1..m: [A | I | b]; row 0 holds reduced costs [-c | 0 | 0].
    width = n + m + 1
    tab = [[Fraction(0)] * width for _ in range(m + 1)]
    for j in range(n):
        tab[0][j] = -c[j]
    for r in range(m):
        row = tab[r + 1]
        for j in range(n):
            row[j] = A[r][j]
        row[n + r] = Fraction(1)
        row[-1] = b[r]
    basis = [n + r for r in range(m)]

    while True:
        # Bland: entering column = lowest index with negative reduced cost
        enter = next((j for j in range(n + m) if tab[0][j] < 0), None)
        if enter is None:
            break
        leave, best_ratio = None, None
        for r in range(1, m + 1):
            coef = tab[r][enter]
            if coef > 0:
                ratio = tab[r][-1] / coef
                if best_ratio is None or ratio < best_ratio or (
                        ratio == best_ratio and basis[r - 1] < basis[leave - 1]):
                    leave, best_ratio = r, ratio
        if leave is None:
            raise InvalidInputError("LP is unbounded")
        pivot = tab[leave][enter]
        tab[leave] = [v / pivot for v in tab[leave]]
        for r in range(m + 1):
            if r != leave and tab[r][enter] != 0:
                factor = tab[r][enter]
                lead = tab[leave]
                tab[r] = [v - factor * w for v, w in zip(tab[r], lead)]
        basis[leave - 1] = enter

    x = [Fraction(0)] * n
    for r, var in enumerate(basis):
        if var < n:
            x[var] = tab[r + 1][-1]
    dual = tuple(tab[0][n + r] for r in range(m))
    return LpResult(value=tab[0][-1], x=tuple(x), dual=dual)
