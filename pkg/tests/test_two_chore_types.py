import random
from fractions import Fraction

import pytest

from fairchore.core import (
    Allocation,
    Instance,
    check_mpb_certificate,
    check_wef1,
    weighted_big_earner,
)
from fairchore.errors import UnsupportedInstanceError, ValidationError
from fairchore.generate import generate_instance
from fairchore.oracle import DominationQuery, is_fractionally_dominated, is_integrally_dominated
from fairchore.two_chore_types import (
    A_FAIL,
    B_FAIL,
    SUCCESS,
    run_all_phases,
    run_phase,
    solve_two_chore_types,
    split_chores,
)
from fairchore.wps import alg_a, wps


def random_instance(seed, n=None, m=None, types=None):
    rng = random.Random(seed)
    n = n or rng.randint(1, 6)
    m = m or rng.randint(1, 8)
    return generate_instance(seed, n, m, chore_types=types or rng.randint(1, min(2, m)))


def test_single_agent():
    inst = Instance([2], [[3, 1, 1]])
    state, phases = solve_two_chore_types(inst)
    assert [p.result for p in phases] == [SUCCESS]
    assert state.allocation.bundles == (frozenset({0, 1, 2}),)


def test_one_chore_type_matches_picking_sizes():
    for seed in range(200):
        inst = random_instance(seed, types=1)
        state, phases = solve_two_chore_types(inst)
        order = split_chores(inst).order
        picked, _ = wps(
            [(a, inst.weights[a]) for a in reversed(order[: phases[-1].pivot + 1])],
            [(j, 1) for j in range(inst.m)],
        )
        assert [len(b) for b in state.allocation.bundles] == [
            len(picked.get(a, ())) for a in range(inst.n)
        ]


def test_first_pivot_without_b_chores_b_fails():
    inst = Instance([1, 1, 1], [[2, 2, 2], [3, 3, 3], [1, 1, 1]])
    outcome = run_phase(inst, 0)
    assert outcome.result == B_FAIL
    assert outcome.transfers == 0


def test_last_pivot_mirrors_transfer_procedure():
    for seed in range(100):
        inst = random_instance(500 + seed, types=1)
        order = split_chores(inst).order
        outcome = run_phase(inst, inst.n - 1)
        mirrored = alg_a([(a, inst.weights[a]) for a in reversed(order)], range(inst.m))
        assert outcome.succeeded
        assert [len(b) for b in outcome.allocation.bundles] == [
            len(mirrored[a]) for a in range(inst.n)
        ]


def test_two_agents_two_chores():
    # agent 0 is relatively better at A (chore 0), agent 1 at B (chore 1)
    inst = Instance([2, 3], [[1, 4], [3, 2]])
    state, _ = solve_two_chore_types(inst)
    assert state.allocation.bundles == (frozenset({0}), frozenset({1}))


def test_random_instance_undominated():
    inst = Instance(
        [1, 2, 3, 2],
        [[3, 3, 3, 5, 5, 5, 5], [2, 2, 2, 7, 7, 7, 7], [6, 6, 6, 1, 1, 1, 1], [4, 4, 4, 4, 4, 4, 4]],
    )
    state, _ = solve_two_chore_types(inst)
    query = DominationQuery(inst, state.allocation)
    assert check_wef1(inst, state.allocation)
    assert is_integrally_dominated(query) is None
    assert not is_fractionally_dominated(query)


def test_order_by_ratio_with_id_ties():
    inst = Instance([1, 1, 1], [[2, 1], [1, 2], [4, 2]])
    assert split_chores(inst).order == (1, 0, 2)


def test_rejects_three_chore_types():
    with pytest.raises(UnsupportedInstanceError):
        solve_two_chore_types(Instance([1, 1], [[1, 2, 3], [3, 2, 1]]))


def test_rejects_zero_disutility():
    with pytest.raises(ValidationError):
        solve_two_chore_types(Instance([1, 1], [[0, 1], [1, 1]]))


def test_bad_pivot():
    with pytest.raises(ValidationError):
        run_phase(Instance([1], [[1]]), 1)


def test_phase_invariants():
    for seed in range(200):
        inst = random_instance(1000 + seed)
        split = split_chores(inst)
        a_set, b_set = set(split.a_chores), set(split.b_chores)
        for pivot in range(inst.n):
            agent = split.order[pivot]
            seen = []
            outcome = run_phase(inst, pivot, split=split, observer=seen.append)
            assert outcome.transfers <= inst.m
            for cs in seen:
                assert check_mpb_certificate(cs)
                for pos, who in enumerate(split.order):
                    if pos < pivot:
                        assert cs.allocation.bundles[who] <= a_set
                    elif pos > pivot:
                        assert cs.allocation.bundles[who] <= b_set
            for before, after in zip(seen, seen[1:]):
                for who in range(inst.n):
                    if who == agent:
                        assert after.earnings[who] <= before.earnings[who]
                    else:
                        assert after.earnings[who] >= before.earnings[who]
            # non-wpEF1 states: the pivot is the big earner, and the only one
            non_final = seen if not outcome.succeeded else seen[:-1]
            assert len(outcome.big_earners) == len(non_final)
            for cs, (who, unique) in zip(non_final, outcome.big_earners):
                assert weighted_big_earner(cs, inst.weights) == agent == who
                assert unique


def test_phase_order_and_boundaries():
    for seed in range(300):
        inst = random_instance(2000 + seed)
        results = [p.result for p in run_all_phases(inst)]
        assert results[0] != A_FAIL
        assert results[-1] != B_FAIL
        assert (B_FAIL, A_FAIL) not in set(zip(results, results[1:]))
        _, phases = solve_two_chore_types(inst)
        assert all(p.result == B_FAIL for p in phases[:-1])
        assert phases[-1].succeeded


def test_failure_classification():
    for seed in range(200):
        inst = random_instance(3000 + seed)
        split = split_chores(inst)
        for outcome in run_all_phases(inst):
            if outcome.succeeded:
                continue
            held = outcome.allocation.bundles[outcome.agent]
            if outcome.result == A_FAIL:
                assert not held & set(split.a_chores)
            else:
                assert not held & set(split.b_chores)


def test_allocation_is_complete():
    inst = random_instance(9, n=4, m=7, types=2)
    state, _ = solve_two_chore_types(inst)
    state.allocation.validate(inst)
    assert isinstance(state.allocation, Allocation)
    assert all(isinstance(p, Fraction) for p in state.payments)
