"""Exact feasibility of conic combinations via a phase-one simplex.

Decides, in rational arithmetic, whether a target vector is a nonnegative
combination of a finite set of generators.  Returns either the
coefficients or a separating (Farkas) witness; both certificates are
exact and can be re-verified by direct substitution.

Bland's pivoting rule is used throughout, so the method terminates on
degenerate instances.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .ratlinalg import solve_square

Vector = Sequence[Fraction]


def _column(columns: list[list[Fraction]], j: int) -> list[Fraction]:
    return [row[j] for row in columns]


def cone_decompose(
    generators: Sequence[Vector], target: Vector
) -> tuple[list[Fraction] | None, list[Fraction] | None]:
    """Decide exactly whether ``target`` lies in the cone of ``generators``.

    Returns ``(coefficients, None)`` with all coefficients >= 0 and
    ``sum c_j g_j == target``, or ``(None, witness)`` where the witness y
    satisfies ``<y, g_j> <= 0`` for every generator and ``<y, target> > 0``.
    """
    n = len(target)
    m = len(generators)
    for g in generators:
        if len(g) != n:
            raise ValueError("generator dimension mismatch")

    b = [Fraction(x) for x in target]
    if m == 0:
        if all(x == 0 for x in b):
            return [], None
        return None, b

    # Row-sign flips so the artificial basis is feasible (b >= 0).
    signs = [Fraction(1)] * n
    cols = [[Fraction(generators[j][i]) for j in range(m)] for i in range(n)]
    for i in range(n):
        if b[i] < 0:
            b[i] = -b[i]
            cols[i] = [-x for x in cols[i]]
            signs[i] = Fraction(-1)

    # Full column list: generators then artificial unit columns.
    for i in range(n):
        for r in range(n):
            cols[r].append(Fraction(1 if r == i else 0))
    ncols = m + n
    cost = [Fraction(0)] * m + [Fraction(1)] * n
    basis = list(range(m, m + n))

    while True:
        bmat = [[cols[r][basis[k]] for k in range(n)] for r in range(n)]
        x_basic = solve_square(bmat, b)
        bt = [[bmat[r][k] for r in range(n)] for k in range(n)]
        y = solve_square(bt, [cost[v] for v in basis])

        entering = None
        for j in range(ncols):
            if j in basis:
                continue
            reduced = cost[j] - sum(y[r] * cols[r][j] for r in range(n))
            if reduced < 0:
                entering = j  # Bland: smallest improving index
                break
        if entering is None:
            break

        direction = solve_square(bmat, _column(cols, entering))
        ratio = None
        leaving_pos = None
        for k in range(n):
            if direction[k] > 0:
                r = x_basic[k] / direction[k]
                better = ratio is None or r < ratio
                tie = ratio is not None and r == ratio and basis[k] < basis[leaving_pos]
                if better or tie:
                    ratio = r
                    leaving_pos = k
        if leaving_pos is None:
            raise RuntimeError("phase-one objective unbounded; should not happen")
        basis[leaving_pos] = entering

    objective = sum(cost[v] * x for v, x in zip(basis, x_basic))
    if objective == 0:
        coeffs = [Fraction(0)] * m
        for v, x in zip(basis, x_basic):
            if v < m:
                coeffs[v] = x
        return coeffs, None
    witness = [signs[i] * y[i] for i in range(n)]
    return None, witness
