"""JSON instance and solution files.

Rationals are written as integers or ``"p/q"`` strings, never as floats.
Chore ids are 0-based positions in the disutility rows; labels are cosmetic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import Allocation, Instance, to_rational
from .errors import ValidationError


def rational_to_json(value: Fraction) -> int | str:
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def rational_from_json(value: Any) -> Fraction:
    return to_rational(value)


def _render(obj: Any, depth: int) -> str:
    # lists of scalars stay on one line; everything else is indented by 2
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, dict) and obj:
        items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_render(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        items = [inner + _render(v, depth + 1) for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def _dumps(doc: Any) -> str:
    return _render(doc, 0) + "\n"


def _load_json(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} is not valid JSON: {exc}") from exc


@dataclass(frozen=True)
class InstanceFile:
    instance: Instance
    meta: dict | None = None

    def to_dict(self) -> dict:
        inst = self.instance
        doc: dict[str, Any] = {
            "agents": [
                {
                    "id": inst.agent_name(i),
                    "weight": rational_to_json(inst.weights[i]),
                    "disutilities": [rational_to_json(d) for d in inst.disutilities[i]],
                }
                for i in range(inst.n)
            ]
        }
        if inst.chore_labels is not None:
            doc["chores"] = list(inst.chore_labels)
        if self.meta is not None:
            doc["meta"] = self.meta
        return doc

    def dumps(self) -> str:
        return _dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: Any) -> InstanceFile:
        if not isinstance(doc, dict) or not isinstance(doc.get("agents"), list):
            raise ValidationError('instance file needs an "agents" list')
        ids, weights, rows = [], [], []
        for pos, agent in enumerate(doc["agents"]):
            if not isinstance(agent, dict):
                raise ValidationError(f"agent entry {pos} is not an object")
            try:
                ids.append(str(agent.get("id", pos)))
                weights.append(rational_from_json(agent["weight"]))
                rows.append([rational_from_json(d) for d in agent["disutilities"]])
            except KeyError as exc:
                raise ValidationError(f"agent entry {pos} is missing {exc}") from exc
            except TypeError as exc:
                raise ValidationError(f"agent entry {pos} is malformed") from exc
        if len(set(ids)) != len(ids):
            raise ValidationError("agent ids are not unique")
        chores = doc.get("chores")
        if chores is not None and not isinstance(chores, list):
            raise ValidationError('"chores" must be a list of labels')
        meta = doc.get("meta")
        instance = Instance(weights, rows, agent_labels=ids, chore_labels=chores)
        return cls(instance, meta)

    @classmethod
    def loads(cls, text: str) -> InstanceFile:
        return cls.from_dict(_load_json(text, "instance file"))


def instance_hash(instance: Instance) -> str:
    """Content hash over agent ids, weights and disutilities."""
    doc = InstanceFile(instance).to_dict()
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class SolutionFile:
    algorithm: str
    instance_hash: str | None
    allocation: Allocation
    payments: tuple[Fraction, ...] | None = None
    certificate: dict | None = None
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "instance_hash": self.instance_hash,
            "allocation": self.allocation.as_lists(),
            "payments": None if self.payments is None else [rational_to_json(p) for p in self.payments],
            "certificate": self.certificate,
            "trace": self.trace,
        }

    def dumps(self) -> str:
        return _dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: Any) -> SolutionFile:
        if not isinstance(doc, dict) or not isinstance(doc.get("allocation"), list):
            raise ValidationError('solution file needs an "allocation" list')
        bundles = []
        for pos, bundle in enumerate(doc["allocation"]):
            if not isinstance(bundle, list) or not all(
                isinstance(j, int) and not isinstance(j, bool) for j in bundle
            ):
                raise ValidationError(f"bundle {pos} must be a list of integer chore ids")
            if len(set(bundle)) != len(bundle):
                raise ValidationError(f"bundle {pos} repeats a chore")
            bundles.append(frozenset(bundle))
        payments = doc.get("payments")
        if payments is not None:
            if not isinstance(payments, list):
                raise ValidationError('"payments" must be a list')
            payments = tuple(rational_from_json(p) for p in payments)
        return cls(
            algorithm=str(doc.get("algorithm", "")),
            instance_hash=doc.get("instance_hash"),
            allocation=Allocation(tuple(bundles)),
            payments=payments,
            certificate=doc.get("certificate"),
            trace=list(doc.get("trace") or []),
        )

    @classmethod
    def loads(cls, text: str) -> SolutionFile:
        return cls.from_dict(_load_json(text, "solution file"))


def read_instance(path: str | Path) -> InstanceFile:
    return InstanceFile.loads(Path(path).read_text(encoding="utf-8"))


def read_solution(path: str | Path) -> SolutionFile:
    return SolutionFile.loads(Path(path).read_text(encoding="utf-8"))


def step_event_to_dict(event) -> dict:
    doc: dict[str, Any] = {"kind": event.kind, "roles": list(event.roles)}
    if event.chore is not None:
        doc["chore"] = event.chore
    if event.gamma is not None:
        doc["gamma"] = rational_to_json(event.gamma)
    doc["least_before"] = rational_to_json(event.least_before)
    doc["least_after"] = rational_to_json(event.least_after)
    return doc


def step_event_from_dict(doc: dict):
    from .three_types import StepEvent

    gamma = doc.get("gamma")
    return StepEvent(
        kind=doc["kind"],
        roles=tuple(doc["roles"]),
        chore=doc.get("chore"),
        gamma=None if gamma is None else rational_from_json(gamma),
        least_before=rational_from_json(doc["least_before"]),
        least_after=rational_from_json(doc["least_after"]),
    )


def phase_to_dict(outcome) -> dict:
    return {
        "kind": "phase",
        "pivot": outcome.pivot,
        "agent": outcome.agent,
        "result": outcome.result,
        "transfers": outcome.transfers,
    }
