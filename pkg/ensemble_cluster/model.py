# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union


class ModelTier(str, Enum):
    ANALYTIC_JC = "analytic"
    EFFECTIVE_SPIN = "spin"
    FULL_DISPERSIVE = "full"

    @classmethod
    def parse(cls, value: "str | ModelTier") -> "ModelTier":
        if isinstance(value, ModelTier):
            return value
        lowered = str(value).strip().lower()
        aliases = {
            "analytic": cls.ANALYTIC_JC,
            "analyticjc": cls.ANALYTIC_JC,
            "jc": cls.ANALYTIC_JC,
            "spin": cls.EFFECTIVE_SPIN,
            "effectivespin": cls.EFFECTIVE_SPIN,
            "full": cls.FULL_DISPERSIVE,
            "fulldispersive": cls.FULL_DISPERSIVE,
        }
        try:
            return aliases[lowered.replace("_", "").replace("-", "")]
        except KeyError:
            raise ValueError(f"Unknown model tier: {value!r}") from None


@dataclass(frozen=True)
class Sample:
    """Draw the outcome from the exact Born distribution."""

    seed: int


@dataclass(frozen=True)
class Postselect:
    """Keep the named outcome branch."""

    outcome: str


MeasurementMode = Union[Sample, Postselect]


class InvariantViolation(RuntimeError):
    """A physics invariant (leakage, vacuum residual, convergence) did not hold."""
