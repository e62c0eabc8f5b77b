"""Weighted picking sequences for groups of identical agents.

A *group* is a sequence of ``(agent_id, weight)`` pairs; its order is the
tie-breaking priority (earlier wins).  Bundles are returned as a dict from
agent id to the chores that agent picked, in picking order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Allocation, CompetitiveState, Instance, check_wpef1, to_rational
from .errors import SolverInvariantError, ValidationError

Group = Sequence[tuple[int, Fraction]]
Bundles = dict[int, tuple[int, ...]]


@dataclass
class PickState:
    counts: dict[int, int]
    sequence: list[tuple[int, int, int]] = field(default_factory=list)  # (round, agent, chore)


def sort_chores(chore_costs: Iterable[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    """Non-increasing cost, equal costs by ascending chore id."""
    return sorted(((j, to_rational(c)) for j, c in chore_costs), key=lambda jc: (-jc[1], jc[0]))


def _next_picker(group: Group, counts: dict[int, int]) -> int:
    best, best_key = None, None
    for agent, weight in group:
        key = Fraction(counts[agent]) / weight
        if best_key is None or key < best_key:
            best, best_key = agent, key
    return best


def wps(group: Group, chore_costs: Iterable[tuple[int, Fraction]]) -> tuple[Bundles, PickState]:
    """Allocate chores to a group of identical agents by weighted picking.

    Round ``r`` gives the ``r``-th costliest chore to the agent with the
    smallest ``picked / weight``.
    """
    ordered = sort_chores(chore_costs)
    if not group:
        if ordered:
            raise ValidationError("cannot allocate chores to an empty group")
        return {}, PickState({})
    counts = {agent: 0 for agent, _ in group}
    picks: dict[int, list[int]] = {agent: [] for agent, _ in group}
    state = PickState(counts)
    for rnd, (chore, _) in enumerate(ordered):
        agent = _next_picker(group, counts)
        picks[agent].append(chore)
        counts[agent] += 1
        state.sequence.append((rnd, agent, chore))
    return {a: tuple(b) for a, b in picks.items()}, state


def alg_a(group: Group, chores: Iterable[int]) -> Bundles:
    """Allocate identical chores by transfers away from the group's first agent.

    Everything starts on the first agent; while the unit-payment allocation
    is not wpEF1, one chore (lowest id) moves to the weighted least earner
    among the other agents.
    """
    if not group:
        raise ValidationError("alg_a needs a nonempty group")
    chores = sorted(chores)
    k, m = len(group), len(chores)
    weights = [w for _, w in group]
    unit = Instance(weights, [[1] * m for _ in range(k)])
    local = [list(range(m))] + [[] for _ in range(k - 1)]
    for _ in range(m + 1):
        state = CompetitiveState.build(unit, Allocation(tuple(frozenset(b) for b in local)), [1] * m)
        if check_wpef1(state, weights).verdict:
            break
        if not local[0]:
            raise SolverInvariantError("alg_a: first agent is empty but allocation is not wpEF1")
        target = min(range(1, k), key=lambda t: (Fraction(len(local[t])) / weights[t], t))
        local[0].sort()
        local[target].append(local[0].pop(0))
    else:
        raise SolverInvariantError("alg_a did not terminate within m transfers")
    return {group[t][0]: tuple(chores[c] for c in local[t]) for t in range(k)}


def wps_remove_compare(
    group: Group, chore_costs: Sequence[tuple[int, Fraction]], removed: int
) -> tuple[Bundles, Bundles]:
    """Picking allocations with and without ``removed``, as ``(full, reduced)``."""
    if removed not in {j for j, _ in chore_costs}:
        raise ValidationError(f"chore {removed} is not in the chore set")
    full, _ = wps(group, chore_costs)
    reduced, _ = wps(group, [(j, c) for j, c in chore_costs if j != removed])
    return full, reduced


def canonical_bundles(bundles: Bundles, chores: Iterable[int]) -> Bundles:
    """Relabel an allocation of identical chores into contiguous id blocks.

    Identical chores are interchangeable, so only bundle sizes matter; agents
    (in ascending id order) receive consecutive runs of the sorted chore ids.
    """
    chores = sorted(chores)
    held = sorted(c for b in bundles.values() for c in b)
    if held != chores:
        raise ValidationError("bundles do not partition the chore set")
    out: Bundles = {}
    pos = 0
    for agent in sorted(bundles):
        size = len(bundles[agent])
        out[agent] = tuple(chores[pos:pos + size])
        pos += size
    return out
