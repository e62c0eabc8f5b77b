"""Shared test utilities."""

from __future__ import annotations

from pathlib import Path

from fairchore.core import Allocation, CompetitiveState, Instance
from fairchore.io import read_instance
from fairchore.wps import wps

FIXTURES = Path(__file__).parent / "fixtures"

__all__ = ["Allocation", "FIXTURES", "fixture_instance", "group_instance"]


def fixture_instance(name: str) -> Instance:
    return read_instance(FIXTURES / name).instance


def group_instance(group, costs: dict) -> tuple[Instance, CompetitiveState]:
    """Single-type instance for a picking run, with payments equal to costs."""
    ids = [a for a, _ in group]
    row = [costs[j] for j in range(len(costs))]
    instance = Instance([w for _, w in group], [row] * len(group))
    bundles, _ = wps([(k, w) for k, (_, w) in enumerate(group)], list(costs.items()))
    allocation = Allocation(tuple(frozenset(bundles[k]) for k in range(len(ids))))
    return instance, CompetitiveState.build(instance, allocation, row)
