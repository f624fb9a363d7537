# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from ensemble_cluster.hilbert.space import SubsystemSpec
from ensemble_cluster.hilbert.state import StateVector


def to_snapshot(state: StateVector) -> dict[str, Any]:
    return {
        "subsystems": [s.to_dict() for s in state.subsystems],
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }


def from_snapshot(data: dict[str, Any]) -> StateVector:
    try:
        subsystems = tuple(SubsystemSpec.from_dict(s) for s in data["subsystems"])
        pairs = data["amplitudes"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"Malformed state snapshot: {exc}") from exc
    amps = np.array([complex(float(re), float(im)) for re, im in pairs], dtype=np.complex128)
    return StateVector(subsystems, amps)


def dumps_snapshot(state: StateVector) -> str:
    # json writes floats with repr, which round-trips doubles exactly
    return json.dumps(to_snapshot(state), indent=2) + "\n"


def write_snapshot(path: str | Path, state: StateVector) -> None:
    Path(path).write_text(dumps_snapshot(state), encoding="utf-8")


def load_snapshot(path: str | Path) -> StateVector:
    return from_snapshot(json.loads(Path(path).read_text(encoding="utf-8")))
