"""Outcomes of checks that quantify over infinitely many inputs.

Sampled passes are evidence, not proof, and say so: they carry the trial count
and seed that reproduce them.  Failures carry a witness dictionary from which
the violation can be replayed without any randomness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA = 1


@dataclass(frozen=True)
class Verdict:
    trials: int = 0
    seed: int | None = None
    witness: dict | None = None

    status = "verdict"
    passed = False
    exact = False

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "status": self.status,
            "trials": self.trials,
            "seed": self.seed,
            "witness": self.witness,
        }

    def dumps(self) -> str:
        return dumps(self.to_json())


@dataclass(frozen=True)
class PassSampled(Verdict):
    status = "pass_sampled"
    passed = True


@dataclass(frozen=True)
class Counterexample(Verdict):
    status = "counterexample"


@dataclass(frozen=True)
class ExactPass(Verdict):
    status = "exact_pass"
    passed = True
    exact = True


@dataclass(frozen=True)
class ExactFail(Verdict):
    status = "exact_fail"
    exact = True


@dataclass(frozen=True)
class SymmetryResult:
    """Verdicts of a check run in both directions with the same seed."""
    forward: Verdict
    backward: Verdict

    @property
    def agree(self) -> bool:
        return self.forward.passed == self.backward.passed

    @property
    def passed(self) -> bool:
        return self.agree

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "status": "agree" if self.agree else "disagree",
            "forward": self.forward.to_json(),
            "backward": self.backward.to_json(),
        }


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, no NaN literals."""
    return json.dumps(_clean(obj), sort_keys=True, allow_nan=False, separators=(",", ":"))


def _clean(obj: Any) -> Any:
    if isinstance(obj, float):
        if obj != obj:
            return "nan"
        if obj in (float("inf"), float("-inf")):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj
