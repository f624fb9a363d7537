# SPDX-License-Identifier: Apache-2.0

"""Physical parameters of one cavity station, in angular units (rad/s).

Lab values are quoted in Hz; multiply by 2*pi once, at the configuration
boundary (`hz`). Everything below works in rad/s and seconds.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

DEFAULT_OMEGA_0_HZ = 51.1e9
DEFAULT_OMEGA_1_HZ = 54.3e9
DEFAULT_COUPLING_HZ = 25e3
DEFAULT_LIFETIME_S = 30e-3
DEFAULT_DISPERSIVE_RATIO = 20.0
DEFAULT_DRIVE_DETUNING_FACTOR = 2.0

RESONANCE_RTOL = 1e-12
DISPERSIVE_WARN_RATIO = 10.0


class ParameterError(ValueError):
    pass


class DispersiveRegimeWarning(UserWarning):
    pass


def hz(value: float) -> float:
    return TWO_PI * float(value)


@dataclass(frozen=True)
class PhysicalParams:
    """Detunings are stored as given; omega_c and omega_L are derived from them."""

    omega_0: float
    omega_1: float
    delta_c: float
    delta_L: float
    rabi: float
    coupling: float
    atoms: int
    resonant: bool = True
    mean_photons: float = 0.0

    def __post_init__(self) -> None:
        if int(self.atoms) != self.atoms or self.atoms < 1:
            raise ParameterError(f"Sample size must be a positive integer, got {self.atoms}")
        if self.coupling <= 0:
            raise ParameterError(f"Coupling must be positive, got {self.coupling}")
        if self.rabi < 0:
            raise ParameterError(f"Rabi frequency must be non-negative, got {self.rabi}")
        if not self.delta_c > 0:
            raise ParameterError(f"Cavity detuning delta_c = omega_0 - omega_c must be > 0, got {self.delta_c}")
        if not self.delta_L > 0:
            raise ParameterError(f"Drive detuning delta_L = omega_0 - omega_L must be > 0, got {self.delta_L}")
        if self.resonant and not self.resonance_holds():
            raise ParameterError(
                f"Resonance 2*lambda_L = (N-1)*lambda_c violated: "
                f"{2 * self.lambda_L:.12e} vs {(self.atoms - 1) * self.lambda_c:.12e}"
            )
        ratio = self.dispersive_ratio
        if ratio < DISPERSIVE_WARN_RATIO:
            msg = f"dispersive ratio delta_c/(g*sqrt(N(n+1))) = {ratio:.3g} is below {DISPERSIVE_WARN_RATIO:g}"
            logger.warning(msg)
            warnings.warn(msg, DispersiveRegimeWarning, stacklevel=3)

    @property
    def omega_c(self) -> float:
        return self.omega_0 - self.delta_c

    @property
    def omega_L(self) -> float:
        return self.omega_0 - self.delta_L

    @property
    def lambda_L(self) -> float:
        return self.rabi**2 / self.delta_L

    @property
    def lambda_c(self) -> float:
        return self.coupling**2 / self.delta_c

    @property
    def dispersive_ratio(self) -> float:
        return self.delta_c / (self.coupling * math.sqrt(self.atoms * (self.mean_photons + 1.0)))

    @property
    def collective_rate(self) -> float:
        """sqrt(N) * lambda_c, the single-excitation exchange rate."""
        return math.sqrt(self.atoms) * self.lambda_c

    @property
    def chain_pass_time(self) -> float:
        return math.pi / (2.0 * self.collective_rate)

    @property
    def fusion_pass_time(self) -> float:
        return math.pi / self.collective_rate

    def resonance_holds(self, rtol: float = RESONANCE_RTOL) -> bool:
        lhs = 2.0 * self.lambda_L
        rhs = (self.atoms - 1) * self.lambda_c
        return math.isclose(lhs, rhs, rel_tol=rtol, abs_tol=rtol * self.lambda_c)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(
            omega_c=self.omega_c,
            omega_L=self.omega_L,
            lambda_L=self.lambda_L,
            lambda_c=self.lambda_c,
            dispersive_ratio=self.dispersive_ratio,
        )
        return out


def resonant_rabi(delta_L: float, atoms: int, lambda_c: float) -> float:
    """Rabi frequency meeting 2*lambda_L = (N-1)*lambda_c for the given drive detuning."""
    return math.sqrt(delta_L * (atoms - 1) * lambda_c / 2.0)


def params_from_detunings(
    *,
    delta_c: float,
    delta_L: float,
    coupling: float = hz(DEFAULT_COUPLING_HZ),
    atoms: int,
    omega_0: float = hz(DEFAULT_OMEGA_0_HZ),
    omega_1: float = hz(DEFAULT_OMEGA_1_HZ),
    rabi: float | None = None,
) -> PhysicalParams:
    """Build parameters from detunings; `rabi=None` solves the resonance condition."""
    resonant = rabi is None
    if rabi is None:
        if delta_c <= 0:
            raise ParameterError(f"Cavity detuning must be > 0, got {delta_c}")
        rabi = resonant_rabi(delta_L, atoms, coupling**2 / delta_c) if delta_L > 0 else 0.0
    return PhysicalParams(
        omega_0=omega_0,
        omega_1=omega_1,
        delta_c=delta_c,
        delta_L=delta_L,
        rabi=rabi,
        coupling=coupling,
        atoms=atoms,
        resonant=resonant,
    )


def params_for_ratio(
    atoms: int,
    ratio: float,
    *,
    coupling: float = hz(DEFAULT_COUPLING_HZ),
    drive_detuning_factor: float = DEFAULT_DRIVE_DETUNING_FACTOR,
    omega_0: float = hz(DEFAULT_OMEGA_0_HZ),
    omega_1: float = hz(DEFAULT_OMEGA_1_HZ),
) -> PhysicalParams:
    """Resonant parameters with delta_c = ratio * g * sqrt(N) and delta_L = factor * delta_c."""
    delta_c = ratio * coupling * math.sqrt(atoms)
    return params_from_detunings(
        delta_c=delta_c,
        delta_L=drive_detuning_factor * delta_c,
        coupling=coupling,
        atoms=atoms,
        omega_0=omega_0,
        omega_1=omega_1,
    )
