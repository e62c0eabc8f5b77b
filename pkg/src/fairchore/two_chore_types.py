"""wEF1 + fPO allocations for instances with at most two chore types.

Agents are ordered by the ratio of their A-chore cost to their B-chore cost.
Each phase gives every chore to one agent in that order (the pivot), pays chores at the pivot's
disutilities and moves A-chores leftwards / B-chores rightwards to weighted
least earners until the state is wpEF1 or the pivot gets stuck.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .core import (
    Allocation,
    CompetitiveState,
    Instance,
    check_mpb_certificate,
    check_wpef1,
    classify,
    earning_minus_one,
)
from .errors import SolverInvariantError, UnsupportedInstanceError, ValidationError

SUCCESS = "wpEF1-success"
A_FAIL = "A-fail"
B_FAIL = "B-fail"

Observer = Optional[Callable[[CompetitiveState], None]]


@dataclass(frozen=True)
class ChoreSplit:
    """The two chore classes and the resulting agent order."""

    a_chores: tuple[int, ...]
    b_chores: tuple[int, ...]
    order: tuple[int, ...]  # order[position] = agent id


@dataclass(frozen=True)
class PhaseOutcome:
    """Result of one pivot phase.

    ``big_earners`` has one ``(agent, unique)`` entry per non-wpEF1 state
    visited: the weighted big earner (smallest-id tie-break) and whether it
    was the sole maximizer.
    """

    pivot: int  # position in the agent order, 0-based
    agent: int
    result: str
    allocation: Allocation
    payments: tuple[Fraction, ...]
    transfers: int
    big_earners: tuple[tuple[int, bool], ...] = ()

    @property
    def succeeded(self) -> bool:
        return self.result == SUCCESS


def split_chores(instance: Instance) -> ChoreSplit:
    _, chore_types = classify(instance)
    if chore_types.k > 2:
        raise UnsupportedInstanceError(
            f"instance has {chore_types.k} chore types; at most 2 are supported"
        )
    if any(d == 0 for row in instance.disutilities for d in row):
        raise ValidationError("solvers require strictly positive disutilities")
    classes = list(chore_types.classes) + [()] * (2 - chore_types.k)
    a_chores, b_chores = classes
    if a_chores and b_chores:
        a, b = a_chores[0], b_chores[0]
        ratio = [row[a] / row[b] for row in instance.disutilities]
        order = tuple(sorted(range(instance.n), key=lambda i: (ratio[i], i)))
    else:
        order = tuple(range(instance.n))
    return ChoreSplit(tuple(a_chores), tuple(b_chores), order)


def _unique_big_earner(cs: CompetitiveState, weights) -> tuple[int, bool]:
    values = [earning_minus_one(cs, i) / weights[i] for i in range(cs.n)]
    top = max(values)
    winners = [i for i, v in enumerate(values) if v == top]
    return winners[0], len(winners) == 1


def run_phase(
    instance: Instance,
    pivot: int,
    *,
    split: ChoreSplit | None = None,
    observer: Observer = None,
) -> PhaseOutcome:
    """Run the phase whose pivot sits at 0-based ``pivot`` in the agent order."""
    split = split_chores(instance) if split is None else split
    n, weights = instance.n, instance.weights
    if not 0 <= pivot < n:
        raise ValidationError(f"pivot position {pivot} out of range for {n} agents")
    order = split.order
    agent = order[pivot]
    row = instance.disutilities[agent]
    payments = [Fraction(0)] * instance.m
    for j in split.a_chores + split.b_chores:
        payments[j] = row[j]
    a_set = frozenset(split.a_chores)
    b_set = frozenset(split.b_chores)

    bundles: list[set[int]] = [set() for _ in range(n)]
    bundles[agent] = set(range(instance.m))
    transfers = 0
    big_earners: list[tuple[int, bool]] = []
    while True:
        cs = CompetitiveState.build(
            instance, Allocation(tuple(frozenset(b) for b in bundles)), payments
        )
        if not check_mpb_certificate(cs):
            raise SolverInvariantError(f"phase {pivot}: allocation left MPB")
        if observer is not None:
            observer(cs)
        if check_wpef1(cs, weights).verdict:
            result = SUCCESS
            break
        big_earners.append(_unique_big_earner(cs, weights))
        ratios = [cs.earnings[order[pos]] / weights[order[pos]] for pos in range(n)]
        low = min(ratios)
        least = [pos for pos in range(n) if ratios[pos] == low]
        left = [pos for pos in least if pos < pivot]
        right = [pos for pos in least if pos > pivot]
        held_a = bundles[agent] & a_set
        held_b = bundles[agent] & b_set
        if left and held_a:
            chore, dest = min(held_a), order[max(left)]
        elif right and held_b:
            chore, dest = min(held_b), order[min(right)]
        else:
            result = A_FAIL if left else B_FAIL
            break
        bundles[agent].discard(chore)
        bundles[dest].add(chore)
        transfers += 1
        if transfers > instance.m:
            raise SolverInvariantError(f"phase {pivot} exceeded {instance.m} transfers")
    return PhaseOutcome(
        pivot=pivot,
        agent=agent,
        result=result,
        allocation=cs.allocation,
        payments=cs.payments,
        transfers=transfers,
        big_earners=tuple(big_earners),
    )


def solve_two_chore_types(
    instance: Instance, *, observer: Observer = None
) -> tuple[CompetitiveState, list[PhaseOutcome]]:
    """Compute a wEF1 and fPO allocation for an instance with at most two chore types.

    Phases run from the first pivot upwards and stop at the first success.
    """
    split = split_chores(instance)
    phases: list[PhaseOutcome] = []
    for pivot in range(instance.n):
        outcome = run_phase(instance, pivot, split=split, observer=observer)
        phases.append(outcome)
        if outcome.succeeded:
            state = CompetitiveState.build(instance, outcome.allocation, outcome.payments)
            return state, phases
    raise SolverInvariantError("every phase failed")


def run_all_phases(instance: Instance, *, observer: Observer = None) -> list[PhaseOutcome]:
    """Every phase's outcome, without stopping at the first success."""
    split = split_chores(instance)
    return [run_phase(instance, p, split=split, observer=observer) for p in range(instance.n)]
