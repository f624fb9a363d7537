# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ensemble_cluster.hilbert.operators import apply_local, is_unitary
from ensemble_cluster.hilbert.space import E, F, G
from ensemble_cluster.hilbert.state import StateVector

logger = logging.getLogger(__name__)

SUPPORT_TOLERANCE = 1e-6


class PulseName(str, Enum):
    PULSE_A = "PulseA"
    PULSE_B = "PulseB"
    PULSE_E = "PulseE"


@dataclass(frozen=True, eq=False)
class RamseyPulse:
    name: PulseName
    unitary: np.ndarray
    # levels whose image the protocol never relies on
    completed_levels: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        u = np.array(self.unitary, dtype=np.complex128)
        if u.shape != (3, 3):
            raise ValueError(f"Ramsey pulse must be 3x3, got {u.shape}")
        if not is_unitary(u):
            raise ValueError(f"Ramsey pulse {self.name.value} is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)


def _columns(images: dict[int, dict[int, complex]]) -> np.ndarray:
    u = np.zeros((3, 3), dtype=np.complex128)
    for source, image in images.items():
        for level, amp in image.items():
            u[level, source] = amp
    return u


_S = 1 / np.sqrt(2)

# |g> -> i|e>; completed on |e> -> i|g>
PULSE_A = RamseyPulse(
    PulseName.PULSE_A,
    _columns({F: {F: 1}, G: {E: 1j}, E: {G: 1j}}),
    completed_levels=(E,),
)

# |e> -> (|f> - |e>)/sqrt2, |f> -> (|f> + |e>)/sqrt2; completed on |g> -> |g>
PULSE_B = RamseyPulse(
    PulseName.PULSE_B,
    _columns({F: {F: _S, E: _S}, G: {G: 1}, E: {F: _S, E: -_S}}),
    completed_levels=(G,),
)

# |f> <-> -i|g>, |e> -> |e>; every image is specified
PULSE_E = RamseyPulse(
    PulseName.PULSE_E,
    _columns({F: {G: -1j}, G: {F: -1j}, E: {E: 1}}),
)

PULSES = {p.name: p for p in (PULSE_A, PULSE_B, PULSE_E)}


def completed_support(pulse: RamseyPulse, state: StateVector, atom_index: int = 0) -> float:
    """Population on the levels where the pulse's action was completed by choice."""
    pops = state.level_populations(atom_index)
    return float(sum(pops[level] for level in pulse.completed_levels))


def apply_pulse(pulse: RamseyPulse, state: StateVector, atom_index: int = 0) -> tuple[StateVector, float]:
    support = completed_support(pulse, state, atom_index)
    if support > SUPPORT_TOLERANCE:
        logger.warning("%s applied with %.3e population on completed levels", pulse.name.value, support)
    return apply_local(pulse.unitary, state, [atom_index]), support
