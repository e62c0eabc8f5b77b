"""Dense two-phase simplex over Fractions.

Solves ``max c.x  s.t.  A x = b, x >= 0`` exactly.  Bland's rule is used in
both phases, so degenerate problems cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None


def _pivot(rows: list[list[Fraction]], r: int, col: int) -> None:
    pivot_row = rows[r]
    inv = 1 / pivot_row[col]
    if inv != 1:
        rows[r] = pivot_row = [v * inv for v in pivot_row]
    nonzero = [k for k, v in enumerate(pivot_row) if v]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[col]
        if f:
            for k in nonzero:
                row[k] -= f * pivot_row[k]


def _run(
    rows: list[list[Fraction]], basis: list[int], cost: Sequence[Fraction], columns: range
) -> str:
    while True:
        entering = None
        for j in columns:
            if j in basis:
                continue
            reduced = cost[j] - sum(cost[basis[i]] * rows[i][j] for i in range(len(rows)) if rows[i][j])
            if reduced > 0:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(rows):
            if row[entering] > 0:
                key = (row[-1] / row[entering], basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return UNBOUNDED
        leave = best[1]
        _pivot(rows, leave, entering)
        basis[leave] = entering


def maximize(
    c: Sequence[Fraction], a_eq: Sequence[Sequence[Fraction]], b_eq: Sequence[Fraction]
) -> LPResult:
    nvars = len(c)
    rows: list[list[Fraction]] = []
    for coeffs, rhs in zip(a_eq, b_eq):
        coeffs = [Fraction(v) for v in coeffs]
        rhs = Fraction(rhs)
        if len(coeffs) != nvars:
            raise ValueError("constraint width does not match objective")
        if rhs < 0:
            coeffs, rhs = [-v for v in coeffs], -rhs
        rows.append(coeffs + [rhs])
    nrows = len(rows)

    # phase 1: one artificial per row, maximize -(sum of artificials)
    for i, row in enumerate(rows):
        row[nvars:nvars] = [Fraction(int(i == k)) for k in range(nrows)]
    total = nvars + nrows
    basis = list(range(nvars, total))
    phase1 = [Fraction(0)] * nvars + [Fraction(-1)] * nrows
    _run(rows, basis, phase1, range(total))
    if any(rows[i][-1] for i in range(nrows) if basis[i] >= nvars):
        return LPResult(INFEASIBLE)

    # drive zero-valued artificials out of the basis; drop redundant rows
    i = 0
    while i < len(rows):
        if basis[i] >= nvars:
            col = next((j for j in range(nvars) if rows[i][j]), None)
            if col is None:
                del rows[i]
                del basis[i]
                continue
            _pivot(rows, i, col)
            basis[i] = col
        i += 1
    for row in rows:
        del row[nvars:total]

    cost = [Fraction(v) for v in c]
    status = _run(rows, basis, cost, range(nvars))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    point = [Fraction(0)] * nvars
    for i, var in enumerate(basis):
        point[var] = rows[i][-1]
    value = sum((cost[j] * point[j] for j in range(nvars)), Fraction(0))
    return LPResult(OPTIMAL, value, tuple(point))
