# SPDX-License-Identifier: Apache-2.0

"""How well the bosonic and dispersive approximations hold."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import curve_fit

from ensemble_cluster.dynamics import ladders
from ensemble_cluster.dynamics.evolve import evolve_times
from ensemble_cluster.dynamics.hamiltonians import build_jc_hamiltonian
from ensemble_cluster.dynamics.params import DEFAULT_COUPLING_HZ, PhysicalParams, hz, params_for_ratio
from ensemble_cluster.engine.runner import run_ordered
from ensemble_cluster.hilbert.operators import apply_local
from ensemble_cluster.hilbert.space import (
    DEFAULT_CAVITY_TRUNCATION,
    DEFAULT_MODE_TRUNCATION,
    E,
    DimensionError,
    Role,
    collective_mode,
    control_atom,
    dicke_ladder,
)
from ensemble_cluster.hilbert.state import StateVector, basis_state, resize_subsystem
from ensemble_cluster.model import ModelTier
from ensemble_cluster.protocol.chain import run_chain
from ensemble_cluster.protocol.passes import PassSettings
from ensemble_cluster.util.limits import limits
from ensemble_cluster.verify.alignment import phase_aligned_fidelity

logger = logging.getLogger(__name__)


class CommutatorCheck(NamedTuple):
    # <[b, b^dagger]> - (1 - 2<n>/N); zero on the Dicke ladder
    defect: float
    # |<[b, b^dagger]> - 1| = 2<n>/N, the distance from an ideal boson
    gap: float


def _ladder_index(state: StateVector, atoms: int) -> int:
    for i, spec in enumerate(state.subsystems):
        if spec.role is Role.DICKE_LADDER:
            if spec.dim != atoms + 1:
                raise DimensionError(f"Dicke ladder has {spec.dim - 1} atoms, expected {atoms}")
            return i
    raise DimensionError("State has no Dicke-ladder subsystem")


def bosonic_commutator_defect(atoms: int, state: StateVector) -> CommutatorCheck:
    """Compare <[b, b^dagger]> with 1 - 2<n_b>/N for b = S^-/sqrt(N) on the sample's ladder."""
    index = _ladder_index(state, atoms)
    b = ladders.dicke_lowering(atoms) / math.sqrt(atoms)
    commutator = b @ b.conj().T - b.conj().T @ b
    image = apply_local(commutator, state, [index])
    value = float(np.real(np.vdot(state.amplitudes, image.amplitudes))) / state.norm() ** 2
    mean_n = state.mean_excitation(index) / state.norm() ** 2
    return CommutatorCheck(value - (1.0 - 2.0 * mean_n / atoms), abs(value - 1.0))


class CollectiveLadder(NamedTuple):
    raising: np.ndarray
    sz: np.ndarray


def _single_site(op: np.ndarray, site: int, atoms: int) -> np.ndarray:
    # site 0 fastest, as in the composite order used everywhere else
    factors = [op if j == site else np.eye(2) for j in range(atoms)]
    return reduce(lambda acc, f: np.kron(f, acc), factors[1:], factors[0])


def symmetric_basis(atoms: int) -> np.ndarray:
    """Columns are the Dicke states |n> in the 2^N product space."""
    basis = np.zeros((2**atoms, atoms + 1))
    for n in range(atoms + 1):
        for excited in itertools.combinations(range(atoms), n):
            basis[sum(1 << j for j in excited), n] = 1.0
        basis[:, n] /= math.sqrt(math.comb(atoms, n))
    return basis


def brute_force_collective_ladder(atoms: int) -> CollectiveLadder:
    """Sum_j sigma_j^+ and Sum_j sigma_z,j/2 over N two-level atoms, projected on the Dicke states."""
    if atoms < 1:
        raise ValueError(f"Need at least one atom, got {atoms}")
    if atoms > limits().max_brute_force_atoms:
        raise ValueError(f"Brute-force ladder limited to {limits().max_brute_force_atoms} atoms, got {atoms}")
    up = np.array([[0.0, 0.0], [1.0, 0.0]])
    half_z = np.diag([-0.5, 0.5])
    raising = sum(_single_site(up, j, atoms) for j in range(atoms))
    sz = sum(_single_site(half_z, j, atoms) for j in range(atoms))
    p = symmetric_basis(atoms)
    return CollectiveLadder(p.T @ raising @ p, p.T @ sz @ p)


def jc_excited_population(
    params: PhysicalParams, excitations: int, times: Sequence[float], mode_truncation: int | None = None
) -> np.ndarray:
    """Population of |e> along JC-tier evolution from |e>|n>."""
    d = mode_truncation or excitations + 3
    h = build_jc_hamiltonian(params, d)
    start = basis_state((control_atom(), collective_mode(d)), [E, excitations])
    amps = evolve_times(start, h, times)
    rows = [E + 3 * n for n in range(d)]
    return np.sum(np.abs(amps[:, rows]) ** 2, axis=1)


def _oscillation(t: np.ndarray, offset: float, amplitude: float, omega: float, phase: float) -> np.ndarray:
    return offset + amplitude * np.cos(omega * t + phase)


def fit_rabi_frequency(times: Sequence[float], populations: Sequence[float]) -> float:
    """Angular frequency of a sinusoidal population trace, seeded from its spectrum peak."""
    t = np.asarray(times, dtype=float)
    p = np.asarray(populations, dtype=float)
    if t.shape != p.shape or t.size < 8:
        raise ValueError("Need matching time and population arrays with at least 8 samples")
    step = float(np.mean(np.diff(t)))
    spectrum = np.abs(np.fft.rfft(p - p.mean()))
    freqs = np.fft.rfftfreq(t.size, step)
    guess = 2.0 * math.pi * freqs[int(np.argmax(spectrum[1:])) + 1]
    p0 = [p.mean(), (p.max() - p.min()) / 2.0, guess, 0.0]
    popt, _ = curve_fit(_oscillation, t, p, p0=p0, maxfev=20000)
    return abs(float(popt[2]))


@dataclass(frozen=True)
class ApproximationReport:
    atoms: int
    ratio: float
    ensembles: int
    chain_fidelity: float
    cavity_residual: float
    commutator_gap: float
    commutator_defect: float
    phases: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "N": self.atoms,
            "ratio": self.ratio,
            "K": self.ensembles,
            "fidelity": self.chain_fidelity,
            "cavity_residual": self.cavity_residual,
            "commutator_gap": self.commutator_gap,
            "commutator_defect": self.commutator_defect,
            "phases": list(self.phases),
        }


@dataclass(frozen=True)
class _SweepPoint:
    atoms: int
    ratio: float
    ensembles: int
    coupling: float
    mode_truncation: int
    cavity_truncation: int


def _run_point(point: _SweepPoint) -> ApproximationReport:
    params = params_for_ratio(point.atoms, point.ratio, coupling=point.coupling)
    # the sweep measures how far the approximations break down, so it reports instead of raising
    settings = PassSettings(
        mode_truncation=point.mode_truncation,
        cavity_truncation=point.cavity_truncation,
        leakage_bound=1.0,
        vacuum_residual_bound=1.0,
        atom_release_bound=1.0,
    )
    full = run_chain(point.ensembles, params, ModelTier.FULL_DISPERSIVE, settings=settings)
    ideal = run_chain(point.ensembles, params, ModelTier.ANALYTIC_JC, settings=settings)
    if full.final_state is None or ideal.final_state is None:
        raise RuntimeError("Chain run finished without a final state")
    aligned = phase_aligned_fidelity(full.final_state, ideal.final_state)

    worst = CommutatorCheck(0.0, 0.0)
    for k in range(1, point.ensembles + 1):
        lifted, _ = resize_subsystem(full.final_state, k, dicke_ladder(point.atoms))
        check = bosonic_commutator_defect(point.atoms, lifted)
        worst = CommutatorCheck(max(worst.defect, abs(check.defect)), max(worst.gap, check.gap))

    report = ApproximationReport(
        atoms=point.atoms,
        ratio=point.ratio,
        ensembles=point.ensembles,
        chain_fidelity=aligned.fidelity,
        cavity_residual=full.max_vacuum_residual,
        commutator_gap=worst.gap,
        commutator_defect=worst.defect,
        phases=aligned.phases,
    )
    logger.info(
        "sweep N=%d ratio=%g: fidelity %.9f, cavity residual %.3e",
        point.atoms,
        point.ratio,
        report.chain_fidelity,
        report.cavity_residual,
    )
    return report


def approximation_sweep(
    atoms_values: Iterable[int],
    ratio_values: Iterable[float],
    ensembles: int,
    *,
    coupling: float = hz(DEFAULT_COUPLING_HZ),
    mode_truncation: int = DEFAULT_MODE_TRUNCATION,
    cavity_truncation: int = DEFAULT_CAVITY_TRUNCATION,
    workers: int | None = 1,
) -> list[ApproximationReport]:
    """Full-model chain against the ideal JC chain over a grid of (N, delta_c/(g sqrt N))."""
    atoms_grid = sorted(set(int(n) for n in atoms_values))
    ratio_grid = sorted(set(float(r) for r in ratio_values))
    if not atoms_grid or not ratio_grid:
        raise ValueError("Sweep grids must be non-empty")
    if any(r <= 0 for r in ratio_grid):
        raise ValueError("Dispersive ratios must be positive")
    points = [
        _SweepPoint(n, r, ensembles, coupling, mode_truncation, cavity_truncation)
        for n in atoms_grid
        for r in ratio_grid
    ]
    return run_ordered(_run_point, points, workers)
