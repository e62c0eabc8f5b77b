import json
import subprocess
import sys
from fractions import Fraction

import pytest

from fairchore.cli import main
from fairchore.core import Allocation, Instance, classify
from fairchore.errors import ValidationError
from fairchore.generate import generate_instance
from fairchore.io import (
    InstanceFile,
    SolutionFile,
    instance_hash,
    rational_to_json,
    step_event_from_dict,
    step_event_to_dict,
)
from fairchore.three_types import solve_three_types

from helpers import FIXTURES

EX1 = str(FIXTURES / "ex1.json")
EX2 = str(FIXTURES / "ex2.json")


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


# ---- file formats


def test_rationals_are_exact():
    assert rational_to_json(Fraction(6, 3)) == 2
    assert rational_to_json(Fraction(-1, 4)) == "-1/4"


def test_instance_round_trip_is_identity():
    inst = Instance(
        ["3/2", 1], [[Fraction(1, 3), 2], [5, "7/4"]], agent_labels=["x", "y"], chore_labels=["c", "d"]
    )
    text = InstanceFile(inst, {"note": "t"}).dumps()
    again = InstanceFile.loads(text)
    assert again.instance == inst
    assert again.meta == {"note": "t"}
    assert again.dumps() == text
    assert text.endswith("\n")


@pytest.mark.parametrize(
    "doc",
    [
        {"agents": [{"id": "a", "weight": 0.5, "disutilities": [1]}]},
        {"agents": [{"id": "a", "weight": 1, "disutilities": ["1.5"]}]},
        {"agents": [{"id": "a", "weight": "0", "disutilities": [1]}]},
        {"agents": [{"id": "a", "weight": 1}]},
        {"agents": [{"id": "a", "weight": 1, "disutilities": [1]}, {"id": "a", "weight": 1, "disutilities": [1]}]},
        {"agents": "none"},
    ],
)
def test_bad_instance_documents(doc):
    with pytest.raises(ValidationError):
        InstanceFile.from_dict(doc)


def test_not_json():
    with pytest.raises(ValidationError):
        InstanceFile.loads("{oops")


def test_solution_round_trip():
    inst = InstanceFile.loads((FIXTURES / "ex1.json").read_text()).instance
    state, trace = solve_three_types(inst)
    sol = SolutionFile(
        algorithm="three-agent-types",
        instance_hash=instance_hash(inst),
        allocation=state.allocation,
        payments=state.payments,
        certificate={"mpb_ok": True, "wef1_ok": True, "wpef1_ok": True},
        trace=[step_event_to_dict(e) for e in trace],
    )
    text = sol.dumps()
    again = SolutionFile.loads(text)
    assert again == sol
    assert again.dumps() == text
    assert [step_event_from_dict(d) for d in again.trace] == trace


def test_hash_ignores_meta_but_not_content():
    inst = Instance([1, 2], [[1, 2], [3, 4]])
    assert instance_hash(inst) == instance_hash(InstanceFile.loads(InstanceFile(inst, {"k": 1}).dumps()).instance)
    assert instance_hash(inst) != instance_hash(Instance([1, 2], [[1, 2], [3, 5]]))


# ---- generator


def test_generator_structure():
    inst = generate_instance(7, 5, 6, agent_types=3)
    assert classify(inst)[0].k == 3
    assert all(1 <= w <= 5 for w in inst.weights)
    assert all(1 <= d <= 20 for row in inst.disutilities for d in row)
    two = generate_instance(3, 4, 7, chore_types=2)
    assert classify(two)[1].k == 2
    both = generate_instance(11, 6, 8, agent_types=2, chore_types=2)
    assert (classify(both)[0].k, classify(both)[1].k) == (2, 2)


def test_generator_is_deterministic():
    assert generate_instance(99, 4, 5, agent_types=2) == generate_instance(99, 4, 5, agent_types=2)
    assert generate_instance(99, 4, 5) != generate_instance(100, 4, 5)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"agent_types": 4},
        {"chore_types": 9},
        {"agent_types": 3, "cost_range": (1, 1)},
        {"weight_range": (0, 3)},
        {"cost_range": (5, 2)},
    ],
)
def test_generator_guards(kwargs):
    with pytest.raises(ValidationError):
        generate_instance(1, 3, 4, **kwargs)


# ---- command line


def test_solve_example_one(tmp_path, capsys):
    out = tmp_path / "sol.json"
    assert main(["solve", "--input", EX1, "--output", str(out), "--verify"]) == 0
    doc = json.loads(out.read_text())
    assert doc["certificate"] == {"mpb_ok": True, "wef1_ok": True, "wpef1_ok": True}
    assert doc["algorithm"] == "three-agent-types"
    assert main(["verify", "--input", EX1, "--solution", str(out)]) == 0


def test_solve_two_chore_route(tmp_path):
    inst = Instance([1] * 4, [[1, 2], [2, 1], [1, 1], [2, 3]])
    path = write(tmp_path, "i.json", InstanceFile(inst).to_dict())
    out = tmp_path / "s.json"
    assert main(["solve", "--input", path, "--output", str(out), "--verify"]) == 0
    assert json.loads(out.read_text())["algorithm"] == "two-chore-types"


def test_solve_unsupported(tmp_path):
    inst = Instance([1] * 4, [[1, 2, 3], [2, 1, 3], [1, 1, 2], [2, 3, 1]])
    assert classify(inst)[0].k == 4 and classify(inst)[1].k == 3
    path = write(tmp_path, "i.json", InstanceFile(inst).to_dict())
    assert main(["solve", "--input", path]) == 2
    assert main(["solve", "--input", path, "--algorithm", "three-agent-types"]) == 2


def test_solve_zero_weight(tmp_path):
    path = write(tmp_path, "i.json", {"agents": [{"id": "a", "weight": "0", "disutilities": [1]}]})
    assert main(["solve", "--input", path]) == 1


def test_solve_missing_file(tmp_path):
    assert main(["solve", "--input", str(tmp_path / "absent.json")]) == 1


def test_verify_example_one_witness(capsys):
    assert main(["verify", "--input", EX1, "--solution", str(FIXTURES / "ex1_y.json")]) == 1
    assert "b envies a: 5 > 2" in capsys.readouterr().out


def test_verify_example_two():
    assert main(["verify", "--input", EX2, "--solution", str(FIXTURES / "ex2_x.json")]) == 0


def test_verify_incomplete(tmp_path):
    path = write(tmp_path, "s.json", {"allocation": [[0], [1]]})
    assert main(["verify", "--input", EX1, "--solution", path]) == 1


def test_verify_hash_mismatch(tmp_path):
    path = write(tmp_path, "s.json", {"allocation": [[0, 2], [1]], "instance_hash": "sha256:00"})
    assert main(["verify", "--input", EX1, "--solution", path]) == 1


def test_verify_rejects_off_mpb_payments(tmp_path):
    sol = {"allocation": [[0, 2], [1]], "payments": [1, 1, 10]}
    path = write(tmp_path, "s.json", sol)
    assert main(["verify", "--input", EX1, "--solution", path]) == 1


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    flags = ["gen", "--seed", "7", "--n", "5", "--m", "6", "--agent-types", "3"]
    assert main(flags + ["--output", str(a)]) == 0
    assert main(flags + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert classify(InstanceFile.loads(a.read_text()).instance)[0].k == 3


@pytest.mark.parametrize(
    "flags",
    [
        ["--agent-types", "4"],
        ["--chore-types", "7"],
        ["--seed", "-1"],
        ["--weight-range", "3"],
    ],
)
def test_gen_guards(flags):
    base = {"--seed": "1", "--n": "5", "--m": "6"}
    for k, v in zip(flags[::2], flags[1::2]):
        base[k] = v
    argv = ["gen"] + [t for kv in base.items() for t in kv]
    assert main(argv) == 1


def test_oracle_search(capsys):
    assert main(["oracle", "--input", EX1, "--mode", "search"]) == 0
    out = capsys.readouterr().out
    assert "wEF1+PO allocations:" in out and "wEF1+PO allocations: 0" not in out


def test_oracle_check_example_two(capsys):
    flags = ["oracle", "--input", EX2, "--candidate", str(FIXTURES / "ex2_x.json"), "--mode", "check"]
    assert main(flags) == 0
    out = capsys.readouterr().out
    assert "integral: undominated" in out and "fractional: undominated" in out


def test_oracle_check_needs_candidate():
    assert main(["oracle", "--input", EX2, "--mode", "check"]) == 1


def test_oracle_budget(tmp_path):
    path = tmp_path / "big.json"
    assert main(["gen", "--seed", "1", "--n", "4", "--m", "20", "--output", str(path)]) == 0
    assert main(["oracle", "--input", str(path), "--mode", "search"]) == 3


def test_oracle_budget_from_environment(monkeypatch):
    monkeypatch.setenv("FAIRCHORE_ORACLE_BUDGET", "4")
    assert main(["oracle", "--input", EX1]) == 3


def test_unknown_command():
    assert main(["bogus"]) == 1


def test_console_entry_point_exit_code():
    result = subprocess.run(
        [sys.executable, "-m", "fairchore.cli", "verify", "--input", EX1, "--solution", str(FIXTURES / "ex1_y.json")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 1
    assert "b envies a: 5 > 2" in result.stdout


def test_solution_allocation_type():
    sol = SolutionFile.loads('{"allocation": [[1], [0]]}')
    assert sol.allocation == Allocation((frozenset({1}), frozenset({0})))
    with pytest.raises(ValidationError):
        SolutionFile.loads('{"allocation": [[true]]}')
