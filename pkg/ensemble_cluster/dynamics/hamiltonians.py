# SPDX-License-Identifier: Apache-2.0

"""The three Hamiltonian tiers, all with hbar = 1 and angular frequencies.

Composite order is (control atom, sample, cavity) with the control atom
fastest-varying, matching `hilbert.state`.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ensemble_cluster.dynamics import ladders
from ensemble_cluster.dynamics.params import ParameterError, PhysicalParams
from ensemble_cluster.hilbert.operators import HermitianOperator
from ensemble_cluster.hilbert.space import (
    E,
    G,
    SubsystemSpec,
    cavity_mode,
    collective_mode,
    control_atom,
    dicke_ladder,
)
from ensemble_cluster.model import ModelTier

logger = logging.getLogger(__name__)


def sample_subsystem(atoms: int, ladder_dim: int | None = None) -> SubsystemSpec:
    """Dicke ladder of N+1 rungs, or its lowest `ladder_dim` rungs as a collective mode."""
    if ladder_dim is None or ladder_dim == atoms + 1:
        return dicke_ladder(atoms)
    if ladder_dim > atoms + 1:
        raise ParameterError(f"Ladder truncation {ladder_dim} exceeds N+1 = {atoms + 1}")
    return collective_mode(ladder_dim)


def _kron(*factors: np.ndarray) -> np.ndarray:
    # factors listed fastest-first
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(f, out)
    return out


def build_full_hamiltonian(
    params: PhysicalParams, cavity_truncation: int, ladder_dim: int | None = None
) -> HermitianOperator:
    """Control atom + Dicke sample + cavity, static in the frame rotating at omega_L."""
    if cavity_truncation < 2:
        raise ParameterError(f"Cavity truncation must be >= 2, got {cavity_truncation}")
    atoms = params.atoms
    sample = sample_subsystem(atoms, ladder_dim)
    ds, dc = sample.dim, cavity_truncation
    ia, is_, ic = np.eye(3), np.eye(ds), np.eye(dc)

    a = ladders.annihilation(dc)
    ad = ladders.creation(dc)
    sp_c, sm_c = ladders.atom_raising(), ladders.atom_lowering()
    sp_s, sm_s = ladders.dicke_raising(atoms, ds), ladders.dicke_lowering(atoms, ds)

    h = (params.delta_L - params.delta_c) * _kron(ia, is_, ladders.number(dc))
    h = h + params.delta_L * (_kron(ladders.atom_sz(), is_, ic) + _kron(ia, ladders.dicke_sz(atoms, ds), ic))
    h = h + params.rabi * _kron(sp_c + sm_c, is_, ic)
    h = h + params.coupling * (_kron(sm_c, is_, ad) + _kron(sp_c, is_, a))
    h = h + params.coupling * (_kron(ia, sm_s, ad) + _kron(ia, sp_s, a))

    logger.debug(
        "full hamiltonian: N=%d d_c=%d dim=%d ratio=%.3g", atoms, dc, h.shape[0], params.dispersive_ratio
    )
    return HermitianOperator((control_atom(), sample, cavity_mode(dc)), h, "H_full")


def build_effective_spin_hamiltonian(params: PhysicalParams, ladder_dim: int | None = None) -> HermitianOperator:
    """Cavity eliminated; exact Dicke matrix elements on the sample."""
    atoms = params.atoms
    sample = sample_subsystem(atoms, ladder_dim)
    ds = sample.dim
    ia, is_ = np.eye(3), np.eye(ds)
    pe, pg = ladders.atom_projector(E), ladders.atom_projector(G)
    sp_c, sm_c = ladders.atom_raising(), ladders.atom_lowering()
    sp_s, sm_s = ladders.dicke_raising(atoms, ds), ladders.dicke_lowering(atoms, ds)
    n_b = ladders.number(ds)
    pair = sp_s @ sm_s

    h = params.lambda_L * _kron(pe - pg, is_)
    h = h + params.lambda_c * (_kron(pe, is_) + _kron(ia, n_b))
    h = h + params.lambda_c * (_kron(sp_c, sm_s) + _kron(sm_c, sp_s))
    h = h + params.lambda_c * _kron(ia, pair - n_b)
    return HermitianOperator((control_atom(), sample), h, "H_spin")


def build_jc_hamiltonian(params: PhysicalParams, mode_truncation: int) -> HermitianOperator:
    """Collective mode treated as an ideal boson (truncated at `mode_truncation`)."""
    if mode_truncation < 2:
        raise ParameterError(f"Mode truncation must be >= 2, got {mode_truncation}")
    d = mode_truncation
    n = params.atoms
    b, bd = ladders.annihilation(d), ladders.creation(d)
    ia, im = np.eye(3), np.eye(d)
    h = (2 * params.lambda_L + params.lambda_c) * _kron(ladders.atom_sz(), im)
    h = h + n * params.lambda_c * _kron(ia, ladders.number(d))
    h = h + math.sqrt(n) * params.lambda_c * (
        _kron(ladders.atom_raising(), b) + _kron(ladders.atom_lowering(), bd)
    )
    return HermitianOperator((control_atom(), collective_mode(d)), h, "H_jc")


def excitation_operator(mode_truncation: int) -> HermitianOperator:
    """C = |e><e| + b^dagger b on (control atom, collective mode)."""
    d = mode_truncation
    c = _kron(ladders.atom_projector(E), np.eye(d)) + _kron(np.eye(3), ladders.number(d))
    return HermitianOperator((control_atom(), collective_mode(d)), c, "C")


def frame_energies(
    tier: ModelTier,
    params: PhysicalParams,
    *,
    mode_truncation: int | None = None,
    cavity_truncation: int | None = None,
    ladder_dim: int | None = None,
) -> np.ndarray:
    """Diagonal free energies whose rotation maps a tier onto the JC interaction frame."""
    if tier is ModelTier.ANALYTIC_JC:
        if mode_truncation is None:
            raise ParameterError("JC frame needs a mode truncation")
        return np.real(np.diag(build_jc_hamiltonian(params, mode_truncation).matrix)).copy()
    spin = np.real(np.diag(build_effective_spin_hamiltonian(params, ladder_dim).matrix))
    if tier is ModelTier.EFFECTIVE_SPIN:
        return spin.copy()
    if cavity_truncation is None:
        raise ParameterError("Full-model frame needs a cavity truncation")
    bare = np.real(np.diag(build_full_hamiltonian(params, cavity_truncation, ladder_dim).matrix))
    return bare + np.kron(np.ones(cavity_truncation), spin)
