"""wEF1 + fPO allocations for instances with at most three agent types.

Agents are grouped by type.  Each group's chores are split among its
members by :func:`~fairchore.wps.wps`; chores move between groups and group
payments are scaled down until the competitive state is wpEF1 (or, once the
first group has lost the big-earner role, until the allocation is wEF1).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .core import (
    Allocation,
    CompetitiveState,
    Instance,
    check_mpb_certificate,
    check_wef1,
    check_wpef1,
    classify,
    weighted_big_earner,
    weighted_least_earner,
)
from .errors import SolverInvariantError, UnsupportedInstanceError, ValidationError
from .wps import wps

TRANSFER_BETA_TO_LAMBDA = "transfer_beta_to_lambda"
TRANSFER_MU_TO_LAMBDA = "transfer_mu_to_lambda"
TRANSFER_BETA_TO_MU = "transfer_beta_to_mu"
DROP_MU_LAMBDA = "drop_mu_lambda"
DROP_LAMBDA = "drop_lambda"
TRANSFER_KINDS = (TRANSFER_BETA_TO_LAMBDA, TRANSFER_MU_TO_LAMBDA, TRANSFER_BETA_TO_MU)
DROP_KINDS = (DROP_MU_LAMBDA, DROP_LAMBDA)

Observer = Optional[Callable[[CompetitiveState], None]]


@dataclass(frozen=True)
class StepEvent:
    """One iteration of the main loop.

    ``roles`` holds the (big earner, least earner, middle) group indices in
    force when the step was taken.  ``least_before``/``least_after`` are the
    minimum weighted earnings around the step.
    """

    kind: str
    roles: tuple[int, int, int]
    chore: int | None = None
    gamma: Fraction | None = None
    least_before: Fraction | None = None
    least_after: Fraction | None = None

    @property
    def is_transfer(self) -> bool:
        return self.kind in TRANSFER_KINDS


@dataclass(frozen=True)
class GroupState:
    groups: tuple[tuple[int, ...], ...]
    group_chores: tuple[frozenset[int], ...]
    group_payscale: tuple[Fraction, ...]
    payments: tuple[Fraction, ...]
    allocation: Allocation

    def group_of(self) -> dict[int, int]:
        return {a: g for g, members in enumerate(self.groups) for a in members}


def step_cap(m: int) -> int:
    return 64 * m**3 + 64 * m + 64


def _group_rows(instance: Instance, groups: Sequence[tuple[int, ...]]) -> list:
    return [instance.disutilities[g[0]] if g else None for g in groups]


def _allocate(instance: Instance, groups, group_chores) -> Allocation:
    bundles: list[frozenset[int]] = [frozenset()] * instance.n
    for members, chores in zip(groups, group_chores):
        if not members:
            continue
        row = instance.disutilities[members[0]]
        picked, _ = wps(
            [(a, instance.weights[a]) for a in members], [(j, row[j]) for j in chores]
        )
        for agent, bundle in picked.items():
            bundles[agent] = frozenset(bundle)
    return Allocation(tuple(bundles))


def initial_state(instance: Instance) -> GroupState:
    """All chores on the group of agent 0, paid at that group's disutility."""
    agent_types, _ = classify(instance)
    if agent_types.k > 3:
        raise UnsupportedInstanceError(
            f"instance has {agent_types.k} agent types; at most 3 are supported"
        )
    if any(d == 0 for row in instance.disutilities for d in row):
        raise ValidationError("solvers require strictly positive disutilities")
    groups = tuple(agent_types.groups) + ((),) * (3 - agent_types.k)
    chores = (frozenset(range(instance.m)), frozenset(), frozenset())
    payments = instance.disutilities[groups[0][0]]
    return GroupState(
        groups=groups,
        group_chores=chores,
        group_payscale=(Fraction(1),) * 3,
        payments=tuple(payments),
        allocation=_allocate(instance, groups, chores),
    )


def competitive_state(instance: Instance, gs: GroupState) -> CompetitiveState:
    return CompetitiveState.build(instance, gs.allocation, gs.payments)


def _least_weighted_earning(cs: CompetitiveState, weights) -> Fraction:
    return min(cs.earnings[i] / weights[i] for i in range(cs.n))


def roles(instance: Instance, cs: CompetitiveState, gs: GroupState) -> tuple[int, int, int]:
    """Group indices of the weighted big earner, least earner and the remaining group."""
    owner = gs.group_of()
    beta = owner[weighted_big_earner(cs, instance.weights)]
    lam = owner[weighted_least_earner(cs, instance.weights)]
    if beta == lam:
        raise SolverInvariantError("big and least earner share a group in a non-wpEF1 state")
    return beta, lam, 3 - beta - lam


def mu_to_lambda_guard(
    instance: Instance, gs: GroupState, cs: CompetitiveState, chore: int, mu: int, ell: int
) -> bool:
    """Whether moving ``chore`` out of group ``mu`` keeps all of ``mu`` above the least earner.

    Group ``mu`` is re-allocated without ``chore``; the move is allowed iff
    every member's weighted earning then strictly exceeds that of agent ``ell``.
    """
    members = gs.groups[mu]
    row = instance.disutilities[members[0]]
    weights = instance.weights
    remaining = [(j, row[j]) for j in gs.group_chores[mu] if j != chore]
    after, _ = wps([(a, weights[a]) for a in members], remaining)
    floor = min(sum((gs.payments[j] for j in after[a]), Fraction(0)) / weights[a] for a in members)
    return floor > cs.earnings[ell] / weights[ell]


def _move(instance: Instance, gs: GroupState, chore: int, src: int, dst: int) -> GroupState:
    chores = list(gs.group_chores)
    chores[src] = chores[src] - {chore}
    chores[dst] = chores[dst] | {chore}
    return replace(
        gs,
        group_chores=tuple(chores),
        allocation=_allocate(instance, gs.groups, chores),
    )


def _drop(gs: GroupState, targets: Sequence[int], gamma: Fraction) -> GroupState:
    payments = list(gs.payments)
    scale = list(gs.group_payscale)
    for g in targets:
        for j in gs.group_chores[g]:
            payments[j] *= gamma
        scale[g] *= gamma
    return replace(gs, payments=tuple(payments), group_payscale=tuple(scale))


def _drop_factor(
    instance: Instance, gs: GroupState, cs: CompetitiveState, raisers: Sequence[int], sources
) -> Fraction:
    """Largest MPB ratio times payment over disutility, across raisers and sources."""
    gamma = None
    for g in raisers:
        rep = gs.groups[g][0]
        alpha = cs.mpb_ratios[rep]
        row = instance.disutilities[rep]
        for j in sources:
            ratio = alpha * gs.payments[j] / row[j]
            if ratio >= 1:
                raise SolverInvariantError(
                    f"drop candidate chore {j} is already MPB for group {g}"
                )
            if gamma is None or ratio > gamma:
                gamma = ratio
    if gamma is None:
        raise SolverInvariantError("payment drop with no source chore")
    return gamma


def step(instance: Instance, gs: GroupState) -> tuple[GroupState, StepEvent]:
    """Perform one transfer or payment drop on a non-wpEF1 state."""
    weights = instance.weights
    cs = competitive_state(instance, gs)
    beta, lam, mu = roles(instance, cs, gs)
    ell = weighted_least_earner(cs, weights)
    before = _least_weighted_earning(cs, weights)
    mpb_lam = cs.mpb_sets[gs.groups[lam][0]]
    chores = gs.group_chores

    def transfer(kind: str, chore: int, src: int, dst: int) -> tuple[GroupState, StepEvent]:
        new = _move(instance, gs, chore, src, dst)
        after = _least_weighted_earning(competitive_state(instance, new), weights)
        return new, StepEvent(kind, (beta, lam, mu), chore=chore, least_before=before, least_after=after)

    def drop(kind: str, targets, raisers, sources) -> tuple[GroupState, StepEvent]:
        if 0 in targets and gs.group_chores[0]:
            raise SolverInvariantError("payment drop would touch the first group's chores")
        gamma = _drop_factor(instance, gs, cs, raisers, sources)
        new = _drop(gs, targets, gamma)
        new_cs = competitive_state(instance, new)
        if not any(new_cs.mpb_sets[gs.groups[g][0]] & set(sources) for g in raisers):
            raise SolverInvariantError("payment drop did not bring a source chore onto MPB")
        return new, StepEvent(kind, (beta, lam, mu), gamma=gamma, least_before=before,
                              least_after=before)

    direct = chores[beta] & mpb_lam
    if direct:
        return transfer(TRANSFER_BETA_TO_LAMBDA, min(direct), beta, lam)

    via_mu = chores[mu] & mpb_lam if gs.groups[mu] else frozenset()
    if via_mu:
        for j in sorted(via_mu):
            if mu_to_lambda_guard(instance, gs, cs, j, mu, ell):
                return transfer(TRANSFER_MU_TO_LAMBDA, j, mu, lam)
        to_mu = chores[beta] & cs.mpb_sets[gs.groups[mu][0]]
        if to_mu:
            return transfer(TRANSFER_BETA_TO_MU, min(to_mu), beta, mu)
        return drop(DROP_MU_LAMBDA, (mu, lam), (lam, mu), sorted(chores[beta]))

    return drop(DROP_LAMBDA, (lam,), (lam,), sorted(chores[beta] | chores[mu]))


def solve_three_types(
    instance: Instance, *, max_steps: int | None = None, observer: Observer = None
) -> tuple[CompetitiveState, list[StepEvent]]:
    """Compute a wEF1 and fPO allocation for an instance with at most three agent types.

    Returns the final competitive state and the list of steps taken.
    ``observer`` is called with every intermediate competitive state.
    """
    gs = initial_state(instance)
    cap = step_cap(instance.m) if max_steps is None else max_steps
    trace: list[StepEvent] = []
    while True:
        cs = competitive_state(instance, gs)
        if not check_mpb_certificate(cs):
            raise SolverInvariantError(f"MPB certificate lost after step {len(trace)}")
        if observer is not None:
            observer(cs)
        if check_wpef1(cs, instance.weights).verdict:
            break
        beta, _, _ = roles(instance, cs, gs)
        left_first_group = beta != 0 or (trace and trace[-1].roles[0] != 0)
        if left_first_group and check_wef1(instance, cs.allocation).verdict:
            break
        if len(trace) >= cap:
            raise SolverInvariantError(f"no wEF1 allocation after {cap} steps")
        gs, event = step(instance, gs)
        trace.append(event)
    return cs, trace


def replay(instance: Instance, trace: Sequence[StepEvent]) -> CompetitiveState:
    """Rebuild the final state from a trace without re-deciding any step."""
    gs = initial_state(instance)
    sources = {
        TRANSFER_BETA_TO_LAMBDA: (0, 1),
        TRANSFER_MU_TO_LAMBDA: (2, 1),
        TRANSFER_BETA_TO_MU: (0, 2),
    }
    for event in trace:
        if event.kind in sources:
            src, dst = sources[event.kind]
            gs = _move(instance, gs, event.chore, event.roles[src], event.roles[dst])
        elif event.kind == DROP_MU_LAMBDA:
            gs = _drop(gs, (event.roles[2], event.roles[1]), event.gamma)
        elif event.kind == DROP_LAMBDA:
            gs = _drop(gs, (event.roles[1],), event.gamma)
        else:
            raise ValidationError(f"unknown step kind {event.kind!r}")
    return competitive_state(instance, gs)
