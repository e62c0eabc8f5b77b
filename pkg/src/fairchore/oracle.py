"""Brute-force ground truth for small instances.

Enumerates all ``n**m`` integral allocations (vectorized with numpy over
chunks of assignments) and decides fractional Pareto domination with an
exact rational linear program.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from .core import Allocation, Instance
from .errors import BudgetExceededError
from .lp import OPTIMAL, maximize

DEFAULT_BUDGET = 10**7
DEFAULT_LP_LIMIT = 400
BUDGET_ENV = "FAIRCHORE_ORACLE_BUDGET"
CHUNK = 1 << 15
BLOCK = 512


def oracle_budget() -> int:
    value = os.environ.get(BUDGET_ENV)
    return int(value) if value else DEFAULT_BUDGET


def _check_budget(instance: Instance, budget: int | None) -> int:
    budget = oracle_budget() if budget is None else budget
    total = instance.n**instance.m
    if total > budget:
        raise BudgetExceededError(
            f"{instance.n}^{instance.m} = {total} allocations exceed the budget of {budget}"
        )
    return total


@dataclass(frozen=True)
class DominationQuery:
    instance: Instance
    candidate: Allocation

    def __post_init__(self) -> None:
        self.candidate.validate(self.instance)


def enumerate_allocations(instance: Instance, budget: int | None = None) -> Iterator[Allocation]:
    """Yield every integral allocation, chore 0's owner varying slowest."""
    _check_budget(instance, budget)
    for assignment in product(range(instance.n), repeat=instance.m):
        yield Allocation.from_assignment(assignment, instance.n)


class _IntegerCosts:
    """Disutilities and weights scaled to integers, per agent row.

    Row ``i`` is multiplied by the lcm of its denominators, which preserves
    every comparison made on agent ``i``'s own costs.
    """

    def __init__(self, instance: Instance):
        rows = []
        for row in instance.disutilities:
            scale = math.lcm(*(d.denominator for d in row)) if row else 1
            rows.append([int(d * scale) for d in row])
        wscale = math.lcm(*(w.denominator for w in instance.weights))
        weights = [int(w * wscale) for w in instance.weights]
        bound = max((sum(r) for r in rows), default=0) * max(weights) * max(instance.m, 1)
        if bound < 2**31:
            self.dtype = np.int32
        elif bound < 2**62:
            self.dtype = np.int64
        else:
            self.dtype = object
        self.rows = np.array(rows, dtype=self.dtype).reshape(instance.n, instance.m)
        self.weights = np.array(weights, dtype=self.dtype)


def _assignment_chunks(n: int, m: int, chunk: int = CHUNK) -> Iterator[tuple[int, np.ndarray]]:
    total = n**m
    powers = np.array([n ** (m - 1 - j) for j in range(m)], dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield start, (idx[:, None] // powers[None, :]) % n


def _cross_costs(costs: _IntegerCosts, assign: np.ndarray, n: int) -> np.ndarray:
    """``out[k, i, h]`` = scaled cost to agent ``i`` of agent ``h``'s bundle."""
    out = np.empty((assign.shape[0], n, n), dtype=costs.dtype)
    for h in range(n):
        mask = (assign == h).astype(costs.dtype)
        out[:, :, h] = mask @ costs.rows.T
    return out


def _own_costs(costs: _IntegerCosts, assign: np.ndarray, n: int) -> np.ndarray:
    out = np.empty((assign.shape[0], n), dtype=costs.dtype)
    for i in range(n):
        out[:, i] = (assign == i).astype(costs.dtype) @ costs.rows[i]
    return out


def _wef1_mask(costs: _IntegerCosts, assign: np.ndarray, n: int) -> np.ndarray:
    cross = _cross_costs(costs, assign, n)
    ok = np.ones(assign.shape[0], dtype=bool)
    for i in range(n):
        held = assign == i
        top = (held * costs.rows[i][None, :]).max(axis=1) if assign.shape[1] else 0
        reduced = cross[:, i, i] - top
        for h in range(n):
            if h != i:
                ok &= reduced * costs.weights[h] <= cross[:, i, h] * costs.weights[i]
    return ok


def _undominated(candidates: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Mask of candidate rows that no row of ``points`` dominates.

    ``points`` should be sorted by row sum: a dominator always has a strictly
    smaller sum, so dominated candidates are eliminated early.
    """
    alive = np.ones(candidates.shape[0], dtype=bool)
    for start in range(0, points.shape[0], BLOCK):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        sub = points[start:start + BLOCK]
        live = candidates[idx]
        le = (sub[None, :, :] <= live[:, None, :]).all(axis=2)
        lt = (sub[None, :, :] < live[:, None, :]).any(axis=2)
        alive[idx[(le & lt).any(axis=1)]] = False
    return alive


def _target_vector(costs: _IntegerCosts, candidate: Allocation, m: int) -> np.ndarray:
    assign = np.array([candidate.assignment(m)], dtype=np.int64).reshape(1, m)
    return _own_costs(costs, assign, candidate.n)[0]


def is_integrally_dominated(
    query: DominationQuery, budget: int | None = None
) -> Allocation | None:
    """First (lexicographic) integral allocation dominating the candidate, or None."""
    instance = query.instance
    _check_budget(instance, budget)
    costs = _IntegerCosts(instance)
    target = _target_vector(costs, query.candidate, instance.m)
    for _, assign in _assignment_chunks(instance.n, instance.m):
        own = _own_costs(costs, assign, instance.n)
        hit = (own <= target).all(axis=1) & (own < target).any(axis=1)
        if hit.any():
            first = int(np.argmax(hit))
            return Allocation.from_assignment(assign[first].tolist(), instance.n)
    return None


def fractional_domination_lp(instance: Instance, candidate: Allocation):
    """Maximize total slack over fractional allocations no worse for anyone.

    Variables are ``y[i, j]`` (index ``i * m + j``) followed by one slack per
    agent.  Returns the :class:`~fairchore.lp.LPResult`.
    """
    n, m = instance.n, instance.m
    nvars = n * m + n
    a_eq, b_eq = [], []
    for j in range(m):
        row = [Fraction(0)] * nvars
        for i in range(n):
            row[i * m + j] = Fraction(1)
        a_eq.append(row)
        b_eq.append(Fraction(1))
    for i in range(n):
        row = [Fraction(0)] * nvars
        for j in range(m):
            row[i * m + j] = instance.disutilities[i][j]
        row[n * m + i] = Fraction(1)
        a_eq.append(row)
        b_eq.append(instance.cost(i, candidate.bundles[i]))
    c = [Fraction(0)] * (n * m) + [Fraction(1)] * n
    return maximize(c, a_eq, b_eq)


def is_fractionally_dominated(query: DominationQuery, limit: int = DEFAULT_LP_LIMIT) -> bool:
    """Exact test for a dominating fractional allocation (i.e. candidate is not fPO)."""
    instance = query.instance
    if instance.n * instance.m > limit:
        raise BudgetExceededError(
            f"n*m = {instance.n * instance.m} exceeds the LP size limit {limit}"
        )
    result = fractional_domination_lp(instance, query.candidate)
    if result.status != OPTIMAL:
        raise RuntimeError(f"domination LP unexpectedly {result.status}")
    return result.value > 0


def _sorted_cost_vectors(costs: _IntegerCosts, n: int, m: int) -> np.ndarray:
    parts = [_own_costs(costs, assign, n) for _, assign in _assignment_chunks(n, m)]
    points = np.concatenate(parts)
    return points[np.argsort(points.sum(axis=1), kind="stable")]


def exhaustive_wef1_po_set(
    instance: Instance, *, fractional: bool = False, budget: int | None = None
) -> list[Allocation]:
    """All wEF1 allocations that no integral allocation dominates.

    With ``fractional=True`` the set is further restricted to allocations
    that no fractional allocation dominates either.  Order is lexicographic.
    """
    _check_budget(instance, budget)
    n, m = instance.n, instance.m
    costs = _IntegerCosts(instance)
    fair = [assign[_wef1_mask(costs, assign, n)] for _, assign in _assignment_chunks(n, m)]
    fair = np.concatenate(fair)
    if fair.shape[0] == 0:
        return []
    po = _undominated(_own_costs(costs, fair, n), _sorted_cost_vectors(costs, n, m))
    members = [Allocation.from_assignment(row.tolist(), n) for row in fair[po]]
    if fractional:
        members = [
            a for a in members if not is_fractionally_dominated(DominationQuery(instance, a))
        ]
    return members
