"""Instance model, competitive states and the fairness/efficiency verifiers.

Every quantity is a :class:`fractions.Fraction`; nothing in this module
rounds.  Agents and chores are identified by their 0-based positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ValidationError

RationalLike = Union[int, Fraction, str]

# Per-chore payments, indexed by chore id.
PaymentVector = tuple[Fraction, ...]

# MPB ratio of an agent facing only zero payments on positive-cost chores.
INFINITY = math.inf


def to_rational(value: RationalLike) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: they cannot be represented exactly.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"inexact or non-numeric value {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValidationError(f"not an exact rational: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not an exact rational: {value!r}") from exc
    raise ValidationError(f"unsupported rational value {value!r}")


@dataclass(frozen=True)
class Instance:
    """Agents with positive weights and additive disutilities over chores."""

    weights: tuple[Fraction, ...]
    disutilities: tuple[tuple[Fraction, ...], ...]
    agent_labels: tuple[str, ...] | None = None
    chore_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        weights = tuple(to_rational(w) for w in self.weights)
        rows = tuple(tuple(to_rational(d) for d in row) for row in self.disutilities)
        if not weights:
            raise ValidationError("an instance needs at least one agent")
        if len(rows) != len(weights):
            raise ValidationError(
                f"{len(weights)} weights but {len(rows)} disutility rows"
            )
        if len({len(row) for row in rows}) != 1:
            raise ValidationError("disutility rows have unequal lengths")
        for i, w in enumerate(weights):
            if w <= 0:
                raise ValidationError(f"agent {i} has non-positive weight {w}")
        for i, row in enumerate(rows):
            for j, d in enumerate(row):
                if d < 0:
                    raise ValidationError(f"agent {i} has negative disutility {d} for chore {j}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "disutilities", rows)
        if self.agent_labels is not None:
            labels = tuple(str(a) for a in self.agent_labels)
            if len(labels) != len(weights):
                raise ValidationError("agent label count does not match n")
            object.__setattr__(self, "agent_labels", labels)
        if self.chore_labels is not None:
            labels = tuple(str(c) for c in self.chore_labels)
            if len(labels) != len(rows[0]):
                raise ValidationError("chore label count does not match m")
            object.__setattr__(self, "chore_labels", labels)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def m(self) -> int:
        return len(self.disutilities[0])

    def cost(self, agent: int, chores: Iterable[int]) -> Fraction:
        row = self.disutilities[agent]
        return sum((row[j] for j in chores), Fraction(0))

    def agent_name(self, agent: int) -> str:
        return self.agent_labels[agent] if self.agent_labels else str(agent)

    def chore_name(self, chore: int) -> str:
        return self.chore_labels[chore] if self.chore_labels else str(chore)


@dataclass(frozen=True)
class Allocation:
    """Integral allocation: ``bundles[i]`` is the set of chores of agent ``i``."""

    bundles: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], n: int) -> Allocation:
        """Build from ``assignment[j]`` = agent receiving chore ``j``."""
        bundles: list[set[int]] = [set() for _ in range(n)]
        for chore, agent in enumerate(assignment):
            bundles[agent].add(chore)
        return cls(tuple(frozenset(b) for b in bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def assignment(self, m: int) -> tuple[int, ...]:
        owner = [-1] * m
        for agent, bundle in enumerate(self.bundles):
            for chore in bundle:
                owner[chore] = agent
        return tuple(owner)

    def is_complete(self, m: int) -> bool:
        seen: set[int] = set()
        for bundle in self.bundles:
            if seen & bundle:
                return False
            seen |= bundle
        return seen == set(range(m))

    def validate(self, instance: Instance) -> None:
        """Raise :class:`ValidationError` unless this partitions the instance's chores."""
        if self.n != instance.n:
            raise ValidationError(
                f"allocation has {self.n} bundles, instance has {instance.n} agents"
            )
        seen: set[int] = set()
        for agent, bundle in enumerate(self.bundles):
            for chore in bundle:
                if not 0 <= chore < instance.m:
                    raise ValidationError(f"agent {agent} holds unknown chore {chore}")
                if chore in seen:
                    raise ValidationError(f"chore {chore} is allocated twice")
            seen |= bundle
        missing = sorted(set(range(instance.m)) - seen)
        if missing:
            raise ValidationError(f"chores {missing} are not allocated")

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]


@dataclass(frozen=True)
class AgentTypePartition:
    """Maximal classes of agents with identical disutility rows."""

    groups: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class ChoreTypePartition:
    """Maximal classes of chores with identical disutility columns."""

    classes: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.classes)


def _partition(keys: Sequence[tuple]) -> tuple[tuple[int, ...], ...]:
    groups: dict[tuple, list[int]] = {}
    for idx, key in enumerate(keys):
        groups.setdefault(key, []).append(idx)
    # dict preserves first-seen order, i.e. ordering by smallest member id
    return tuple(tuple(g) for g in groups.values())


def classify(instance: Instance) -> tuple[AgentTypePartition, ChoreTypePartition]:
    rows = instance.disutilities
    columns = [tuple(row[j] for row in rows) for j in range(instance.m)]
    return AgentTypePartition(_partition(rows)), ChoreTypePartition(_partition(columns))


@dataclass(frozen=True)
class CompetitiveState:
    """An allocation with chore payments and its derived MPB data.

    Use :meth:`build` rather than the constructor; the derived fields are
    computed there.  ``mpb_ratios[i]`` is ``INFINITY`` when agent ``i`` faces no
    positively paid chore.
    """

    allocation: Allocation
    payments: PaymentVector
    mpb_ratios: tuple[Fraction | float, ...]
    mpb_sets: tuple[frozenset[int], ...]
    earnings: tuple[Fraction, ...]

    @classmethod
    def build(
        cls,
        instance: Instance,
        allocation: Allocation,
        payments: Sequence[RationalLike],
    ) -> CompetitiveState:
        pay = tuple(to_rational(p) for p in payments)
        if len(pay) != instance.m:
            raise ValidationError(f"{len(pay)} payments for {instance.m} chores")
        if any(p < 0 for p in pay):
            raise ValidationError("payments must be non-negative")
        if allocation.n != instance.n:
            raise ValidationError("allocation and instance disagree on n")
        ratios: list[Fraction | float] = []
        sets: list[frozenset[int]] = []
        for row in instance.disutilities:
            alpha = min(
                (row[j] / pay[j] for j in range(instance.m) if pay[j] > 0),
                default=INFINITY,
            )
            ratios.append(alpha)
            if alpha == INFINITY:
                sets.append(frozenset())
                continue
            # unpaid chores are MPB only when costless
            sets.append(
                frozenset(
                    j
                    for j in range(instance.m)
                    if (pay[j] > 0 and row[j] / pay[j] == alpha)
                    or (pay[j] == 0 and row[j] == 0)
                )
            )
        earnings = tuple(
            sum((pay[j] for j in bundle), Fraction(0)) for bundle in allocation.bundles
        )
        return cls(allocation, pay, tuple(ratios), tuple(sets), earnings)

    @property
    def n(self) -> int:
        return self.allocation.n

    @property
    def m(self) -> int:
        return len(self.payments)


def earning(state: CompetitiveState, agent: int) -> Fraction:
    return state.earnings[agent]


def earning_minus_one(state: CompetitiveState, agent: int) -> Fraction:
    """Earning of ``agent`` without her highest-paying chore (0 for an empty bundle)."""
    bundle = state.allocation.bundles[agent]
    if not bundle:
        return Fraction(0)
    return state.earnings[agent] - max(state.payments[j] for j in bundle)


def _agents(state: CompetitiveState, within: Iterable[int] | None) -> list[int]:
    agents = sorted(range(state.n) if within is None else set(within))
    if not agents:
        raise ValueError("agent set is empty")
    return agents


def weighted_big_earner(
    state: CompetitiveState,
    weights: Sequence[Fraction],
    within: Iterable[int] | None = None,
) -> int:
    """Agent maximizing earning-minus-one over weight; ties to the smallest id."""
    best = None
    best_value = None
    for i in _agents(state, within):
        value = earning_minus_one(state, i) / weights[i]
        if best_value is None or value > best_value:
            best, best_value = i, value
    return best


def weighted_least_earner(
    state: CompetitiveState,
    weights: Sequence[Fraction],
    within: Iterable[int] | None = None,
) -> int:
    """Agent minimizing earning over weight; ties to the smallest id."""
    best = None
    best_value = None
    for i in _agents(state, within):
        value = state.earnings[i] / weights[i]
        if best_value is None or value < best_value:
            best, best_value = i, value
    return best


@dataclass(frozen=True)
class Witness:
    envier: int
    envied: int
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class FairnessReport:
    criterion: str
    witnesses: tuple[Witness, ...] = field(default_factory=tuple)

    @property
    def verdict(self) -> bool:
        return not self.witnesses

    def __bool__(self) -> bool:
        return self.verdict


def check_wpef1(state: CompetitiveState, weights: Sequence[Fraction]) -> FairnessReport:
    lhs = [earning_minus_one(state, i) / weights[i] for i in range(state.n)]
    rhs = [state.earnings[h] / weights[h] for h in range(state.n)]
    witnesses = tuple(
        Witness(i, h, lhs[i], rhs[h])
        for i in range(state.n)
        for h in range(state.n)
        if i != h and lhs[i] > rhs[h]
    )
    return FairnessReport("wpEF1", witnesses)


def _envy_up_to_one(
    instance: Instance,
    allocation: Allocation,
    weights: Sequence[Fraction],
    criterion: str,
) -> FairnessReport:
    if allocation.n != instance.n:
        raise ValidationError(
            f"allocation has {allocation.n} bundles, instance has {instance.n} agents"
        )
    allocation.validate(instance)
    witnesses = []
    for i, own in enumerate(allocation.bundles):
        row = instance.disutilities[i]
        if not own:
            continue
        reduced = (instance.cost(i, own) - max(row[j] for j in own)) / weights[i]
        for h, other in enumerate(allocation.bundles):
            if h == i:
                continue
            target = instance.cost(i, other) / weights[h]
            if reduced > target:
                witnesses.append(Witness(i, h, reduced, target))
    return FairnessReport(criterion, tuple(witnesses))


def check_wef1(instance: Instance, allocation: Allocation) -> FairnessReport:
    return _envy_up_to_one(instance, allocation, instance.weights, "wEF1")


def check_ef1(instance: Instance, allocation: Allocation) -> FairnessReport:
    """Unweighted EF1, i.e. wEF1 with all weights set to one."""
    return _envy_up_to_one(instance, allocation, [Fraction(1)] * instance.n, "EF1")


def check_mpb_certificate(state: CompetitiveState) -> bool:
    """True iff ``state`` is a competitive equilibrium, which certifies fPO.

    Besides completeness and every bundle lying in its owner's MPB set, each MPB
    ratio must be finite and positive; a zero or infinite ratio voids the
    efficiency argument.
    """
    if not state.allocation.is_complete(state.m):
        return False
    if state.m == 0:
        return True
    for alpha, bundle, mpb in zip(state.mpb_ratios, state.allocation.bundles, state.mpb_sets):
        if alpha == INFINITY or alpha <= 0:
            return False
        if not bundle <= mpb:
            return False
    return True


def check_wef1_implication(
    instance: Instance, state: CompetitiveState, weights: Sequence[Fraction] | None = None
) -> bool:
    """Check that wpEF1 implies wEF1 on a competitive state.

    Returns False only when the state is wpEF1 but its allocation is not wEF1,
    which is impossible for a genuine competitive equilibrium.
    """
    if not check_mpb_certificate(state):
        raise ValidationError("state does not carry a valid MPB certificate")
    weights = instance.weights if weights is None else weights
    if not check_wpef1(state, weights).verdict:
        return True
    return check_wef1(instance, state.allocation).verdict


def big_earner_envies_least_earner(
    state: CompetitiveState, weights: Sequence[Fraction]
) -> bool:
    """Single-pair wpEF1 test between the weighted big and least earners."""
    b = weighted_big_earner(state, weights)
    ell = weighted_least_earner(state, weights)
    return earning_minus_one(state, b) / weights[b] > state.earnings[ell] / weights[ell]
