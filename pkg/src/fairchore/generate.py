"""Seeded random instances with a prescribed number of agent or chore types."""

from __future__ import annotations

import random

from .core import Instance
from .errors import ValidationError

MAX_ATTEMPTS = 10_000


def _distinct_rows(rng: random.Random, count: int, length: int, lo: int, hi: int) -> list[list[int]]:
    rows: list[list[int]] = []
    seen: set[tuple[int, ...]] = set()
    for _ in range(MAX_ATTEMPTS):
        if len(rows) == count:
            return rows
        row = [rng.randint(lo, hi) for _ in range(length)]
        if tuple(row) not in seen:
            seen.add(tuple(row))
            rows.append(row)
    if len(rows) == count:
        return rows
    raise ValidationError(f"could not sample {count} distinct rows of length {length}")


def _type_matrix(
    rng: random.Random, rows: int, cols: int, lo: int, hi: int, distinct_cols: bool
) -> list[list[int]]:
    """``rows`` distinct rows; columns also distinct when ``distinct_cols``."""
    for _ in range(MAX_ATTEMPTS):
        matrix = _distinct_rows(rng, rows, cols, lo, hi)
        if not distinct_cols or len(set(zip(*matrix))) == cols:
            return matrix
    raise ValidationError(f"could not sample a {rows}x{cols} matrix with distinct rows and columns")


def _check_range(name: str, bounds: tuple[int, int], floor: int) -> tuple[int, int]:
    lo, hi = bounds
    if lo > hi:
        raise ValidationError(f"{name} is empty: {lo} > {hi}")
    if lo < floor:
        raise ValidationError(f"{name} must start at {floor} or above, got {lo}")
    return lo, hi


def generate_instance(
    seed: int,
    n: int,
    m: int,
    *,
    agent_types: int | None = None,
    chore_types: int | None = None,
    weight_range: tuple[int, int] = (1, 5),
    cost_range: tuple[int, int] = (1, 20),
) -> Instance:
    """Deterministic instance for ``seed``.

    With ``agent_types`` set, agent ``i`` gets type row ``i % agent_types``
    and the rows are pairwise distinct, so the instance has exactly that many
    agent types.  ``chore_types`` works the same way on columns.  Weights are
    drawn after the cost matrix.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if m < 0:
        raise ValidationError("m must be non-negative")
    w_lo, w_hi = _check_range("weight range", weight_range, 1)
    c_lo, c_hi = _check_range("cost range", cost_range, 0)
    for label, k, limit in (("agent", agent_types, n), ("chore", chore_types, m)):
        if k is not None and not 1 <= k <= max(limit, 1):
            raise ValidationError(f"{label} types must lie in [1, {max(limit, 1)}], got {k}")
    if m == 0 and chore_types not in (None, 1):
        raise ValidationError("an instance without chores has no chore types")

    spread = c_hi - c_lo + 1
    rows = agent_types or n
    cols = (chore_types or m) if m else 0
    if agent_types is not None and rows > spread**cols:
        raise ValidationError(f"{rows} distinct agent types need more than {cols} columns over the cost range")
    if chore_types is not None and cols > spread**rows:
        raise ValidationError(f"{cols} distinct chore types need more than {rows} rows over the cost range")

    rng = random.Random(seed)
    if agent_types is not None:
        matrix = _type_matrix(rng, rows, cols, c_lo, c_hi, chore_types is not None)
    elif chore_types is not None:
        matrix = [list(col) for col in zip(*_distinct_rows(rng, cols, rows, c_lo, c_hi))]
        if cols == 0:
            matrix = [[] for _ in range(rows)]
    else:
        matrix = [[rng.randint(c_lo, c_hi) for _ in range(cols)] for _ in range(rows)]
    weights = [rng.randint(w_lo, w_hi) for _ in range(n)]
    disutilities = [[matrix[i % rows][j % cols] for j in range(m)] for i in range(n)]
    return Instance(weights, disutilities)
