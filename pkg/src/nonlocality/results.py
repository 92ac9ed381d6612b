"""Result types shared by all criteria."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Verdict(enum.Enum):
    NONE = "None"
    ENTANGLEMENT = "Entanglement"
    EPR_STEERING = "EPRSteering"
    BELL_NONLOCALITY = "BellNonlocality"
    GENUINE_ENTANGLEMENT = "GenuineEntanglement"
    GENUINE_BELL = "GenuineBell"


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one inequality test.

    ``sense="upper"`` means the classical model requires lhs <= rhs (moment
    inequalities); ``sense="lower"`` means it requires lhs >= rhs (variance
    criteria). The verdict is set only when the required relation fails.
    """

    lhs: float
    rhs: float
    ratio: float
    verdict: Verdict
    inequality_id: str
    sense: str = "upper"

    @property
    def violated(self) -> bool:
        return self.verdict is not Verdict.NONE

    @classmethod
    def build(cls, lhs, rhs, inequality_id, verdict, sense="upper", tol=0.0) -> "CriterionResult":
        lhs, rhs = float(lhs), float(rhs)
        if rhs > 0:
            ratio = lhs / rhs
        elif lhs == 0:
            ratio = math.nan
        else:
            ratio = math.copysign(math.inf, lhs)
        if sense == "upper":
            hit = lhs > rhs + tol
        elif sense == "lower":
            hit = lhs < rhs - tol
        else:
            raise ValueError(f"unknown sense {sense!r}")
        return cls(lhs, rhs, ratio, verdict if hit else Verdict.NONE, inequality_id, sense)
