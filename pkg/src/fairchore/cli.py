"""Command-line entry point.

Exit codes: 0 success, 1 validation or I/O error, 2 unsupported instance,
3 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import (
    CompetitiveState,
    FairnessReport,
    Instance,
    check_mpb_certificate,
    check_wef1,
    check_wpef1,
    classify,
)
from .errors import (
    BudgetExceededError,
    SolverInvariantError,
    UnsupportedInstanceError,
    ValidationError,
)
from .generate import generate_instance
from .io import (
    InstanceFile,
    SolutionFile,
    instance_hash,
    phase_to_dict,
    read_instance,
    read_solution,
    step_event_to_dict,
)
from .oracle import (
    DominationQuery,
    exhaustive_wef1_po_set,
    is_fractionally_dominated,
    is_integrally_dominated,
)
from .three_types import solve_three_types
from .two_chore_types import solve_two_chore_types

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNSUPPORTED = 2
EXIT_BUDGET = 3

THREE_AGENT_TYPES = "three-agent-types"
TWO_CHORE_TYPES = "two-chore-types"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which would collide with "unsupported"
    def error(self, message):
        raise UsageError(message)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _pick_algorithm(instance: Instance, requested: str) -> str:
    if requested != "auto":
        return requested
    agent_types, chore_types = classify(instance)
    if agent_types.k <= 3:
        return THREE_AGENT_TYPES
    if chore_types.k <= 2:
        return TWO_CHORE_TYPES
    raise UnsupportedInstanceError(
        f"instance has {agent_types.k} agent types and {chore_types.k} chore types; "
        "supported classes are at most 3 agent types or at most 2 chore types"
    )


def certificate(instance: Instance, state: CompetitiveState) -> dict:
    return {
        "mpb_ok": check_mpb_certificate(state),
        "wef1_ok": check_wef1(instance, state.allocation).verdict,
        "wpef1_ok": check_wpef1(state, instance.weights).verdict,
    }


def cmd_solve(args) -> int:
    instance = read_instance(args.input).instance
    algorithm = _pick_algorithm(instance, args.algorithm)
    if algorithm == THREE_AGENT_TYPES:
        state, events = solve_three_types(instance)
        trace = [step_event_to_dict(e) for e in events]
    else:
        state, phases = solve_two_chore_types(instance)
        trace = [phase_to_dict(p) for p in phases]
    verdicts = certificate(instance, state) if args.verify else None
    if verdicts is not None and not (verdicts["wef1_ok"] and verdicts["mpb_ok"]):
        raise SolverInvariantError(f"solver output failed verification: {verdicts}")
    solution = SolutionFile(
        algorithm=algorithm,
        instance_hash=instance_hash(instance),
        allocation=state.allocation,
        payments=state.payments,
        certificate=verdicts,
        trace=trace,
    )
    _emit(solution.dumps(), args.output)
    return EXIT_OK


def _print_report(instance: Instance, report: FairnessReport) -> None:
    print(f"{report.criterion}: {'holds' if report.verdict else 'fails'}")
    for w in report.witnesses:
        print(f"  {instance.agent_name(w.envier)} envies {instance.agent_name(w.envied)}: {w.lhs} > {w.rhs}")


def cmd_verify(args) -> int:
    instance = read_instance(args.input).instance
    solution = read_solution(args.solution)
    expected = instance_hash(instance)
    if solution.instance_hash is not None and solution.instance_hash != expected:
        raise ValidationError(
            f"solution is bound to {solution.instance_hash}, input hashes to {expected}"
        )
    solution.allocation.validate(instance)
    wef1 = check_wef1(instance, solution.allocation)
    _print_report(instance, wef1)
    ok = wef1.verdict
    if solution.payments is not None:
        if len(solution.payments) != instance.m:
            raise ValidationError(f"expected {instance.m} payments, got {len(solution.payments)}")
        state = CompetitiveState.build(instance, solution.allocation, solution.payments)
        mpb = check_mpb_certificate(state)
        print(f"MPB certificate: {'holds' if mpb else 'fails'}")
        _print_report(instance, check_wpef1(state, instance.weights))
        ok = ok and mpb
    return EXIT_OK if ok else EXIT_INVALID


def cmd_gen(args) -> int:
    if args.agent_types is not None and not 1 <= args.agent_types <= 3:
        raise ValidationError(f"--agent-types must be 1, 2 or 3, got {args.agent_types}")
    if args.seed < 0 or args.seed >= 2**64:
        raise ValidationError("--seed must be an unsigned 64-bit integer")
    instance = generate_instance(
        args.seed,
        args.n,
        args.m,
        agent_types=args.agent_types,
        chore_types=args.chore_types,
        weight_range=tuple(args.weight_range),
        cost_range=tuple(args.cost_range),
    )
    meta = {
        "seed": args.seed,
        "agent_types": args.agent_types,
        "chore_types": args.chore_types,
        "weight_range": list(args.weight_range),
        "cost_range": list(args.cost_range),
    }
    _emit(InstanceFile(instance, meta).dumps(), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = read_instance(args.input).instance
    if args.mode == "search":
        members = exhaustive_wef1_po_set(instance)
        print(f"wEF1+PO allocations: {len(members)}")
        if members:
            print(f"example: {members[0].as_lists()}")
        return EXIT_OK
    if args.candidate is None:
        raise ValidationError("--mode check needs --candidate")
    query = DominationQuery(instance, read_solution(args.candidate).allocation)
    dominator = is_integrally_dominated(query)
    if dominator is None:
        print("integral: undominated")
    else:
        print(f"integral: dominated by {dominator.as_lists()}")
    fractional = is_fractionally_dominated(query)
    print(f"fractional: {'dominated' if fractional else 'undominated'}")
    return EXIT_OK if dominator is None and not fractional else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairchore", description="Weighted EF1 + fPO chore allocation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="compute an allocation")
    p.add_argument("--input", required=True)
    p.add_argument("--algorithm", choices=["auto", THREE_AGENT_TYPES, TWO_CHORE_TYPES], default="auto")
    p.add_argument("--output")
    p.add_argument("--verify", action="store_true", help="embed certificate verdicts")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution against an instance")
    p.add_argument("--input", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--agent-types", type=int)
    p.add_argument("--chore-types", type=int)
    p.add_argument("--weight-range", type=int, nargs=2, default=[1, 5], metavar=("LO", "HI"))
    p.add_argument("--cost-range", type=int, nargs=2, default=[1, 20], metavar=("LO", "HI"))
    p.add_argument("--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="brute-force search or domination check")
    p.add_argument("--input", required=True)
    p.add_argument("--candidate")
    p.add_argument("--mode", choices=["search", "check"], default="search")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except UnsupportedInstanceError as exc:
        print(f"unsupported instance: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
