# SPDX-License-Identifier: Apache-2.0

"""Graph-state references on qubit-encoded collective modes.

A mode encodes a qubit in its vacuum |0> and one-excitation |1> levels;
higher levels carry no amplitude in any reference built here.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable

import networkx as nx
import numpy as np

from ensemble_cluster.dynamics.ladders import sigma_x_qubit, sigma_z_qubit
from ensemble_cluster.hilbert.operators import apply_local
from ensemble_cluster.hilbert.space import (
    DEFAULT_MODE_TRUNCATION,
    E,
    F,
    G,
    Role,
    collective_mode,
    control_atom,
    mode_indices,
)
from ensemble_cluster.hilbert.state import StateVector, project_subsystem, tensor_product
from ensemble_cluster.protocol.trace import EXACT_RELEASE_BOUND, AtomReleaseError, LeakageError

logger = logging.getLogger(__name__)

QUBIT_LEAKAGE_BOUND = 1e-9


@dataclass(frozen=True)
class GraphSpec:
    nodes: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.nodes < 1:
            raise ValueError(f"Graph needs at least one node, got {self.nodes}")
        seen: set[tuple[int, int]] = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"Self-loop on node {a}")
            if not (0 <= a < self.nodes and 0 <= b < self.nodes):
                raise ValueError(f"Edge ({a}, {b}) references a node outside 0..{self.nodes - 1}")
            seen.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    def neighbors(self, node: int) -> list[int]:
        return sorted(b if a == node else a for a, b in self.edges if node in (a, b))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.nodes))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "GraphSpec":
        """Relabel nodes 0..n-1 in sorted order."""
        order = {node: i for i, node in enumerate(sorted(graph.nodes))}
        return cls(len(order), tuple((order[a], order[b]) for a, b in graph.edges))

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "edges": [list(e) for e in self.edges]}


def path_graph(nodes: int) -> GraphSpec:
    return GraphSpec.from_networkx(nx.path_graph(nodes))


def _bit_table(nodes: int) -> np.ndarray:
    # row x, column k: bit k of x; node 0 is the least significant bit
    return (np.arange(2**nodes)[:, None] >> np.arange(nodes)) & 1


def build_reference_cluster(graph: GraphSpec, mode_truncation: int = DEFAULT_MODE_TRUNCATION) -> StateVector:
    """|+>^n with CZ on every edge, on modes truncated to `mode_truncation`."""
    n = graph.nodes
    bits = _bit_table(n)
    parity = np.zeros(bits.shape[0], dtype=int)
    for a, b in graph.edges:
        parity ^= bits[:, a] & bits[:, b]
    amps = np.zeros(mode_truncation**n, dtype=np.complex128)
    index = bits @ (mode_truncation ** np.arange(n))
    amps[index] = (1.0 - 2.0 * parity) / np.sqrt(2.0**n)
    return StateVector(tuple(collective_mode(mode_truncation) for _ in range(n)), amps)


def qubit_subspace_population(state: StateVector, index: int) -> float:
    pops = state.level_populations(index)
    return float(pops[0] + pops[1])


def check_qubit_subspace(state: StateVector, indices: Iterable[int], bound: float = QUBIT_LEAKAGE_BOUND) -> None:
    for i in indices:
        outside = 1.0 - qubit_subspace_population(state, i)
        if outside > bound:
            raise LeakageError(f"Mode at subsystem {i} has {outside:.3e} population outside {{|0>, |1>}}")


def stabilizer_expectations(state: StateVector, graph: GraphSpec) -> list[float]:
    """<X_a prod_{b ~ a} Z_b> for each node a; nodes map to the state's modes in order."""
    modes = mode_indices(state.subsystems)
    if len(modes) != graph.nodes:
        raise ValueError(f"Graph has {graph.nodes} nodes but the state has {len(modes)} modes")
    check_qubit_subspace(state, modes)
    out = []
    for node in range(graph.nodes):
        index = modes[node]
        image = apply_local(sigma_x_qubit(state.subsystems[index].dim), state, [index])
        for nb in graph.neighbors(node):
            nb_index = modes[nb]
            image = apply_local(sigma_z_qubit(state.subsystems[nb_index].dim), image, [nb_index])
        out.append(float(np.real(np.vdot(state.amplitudes, image.amplitudes))))
    return out


_STAGE = re.compile(r"^(start|RE|C(\d+)|R(\d+))$")


def _chain_pair(ensembles: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Path-graph vector a_k on k modes and its partner b_k = Z_k a_k.

    a_k = (a_{k-1}|0>_k + b_{k-1}|1>_k)/sqrt2, starting from the scalar a_0 = b_0 = 1.
    """
    a = np.ones(1, dtype=np.complex128)
    b = np.ones(1, dtype=np.complex128)
    for _ in range(ensembles):
        zero = np.zeros(d)
        zero[0] = 1.0
        one = np.zeros(d)
        one[1] = 1.0
        a_next = (np.kron(zero, a) + np.kron(one, b)) / np.sqrt(2)
        b = (np.kron(zero, a) - np.kron(one, b)) / np.sqrt(2)
        a = a_next
    return a, b


def _pad_vacuum(vec: np.ndarray, missing: int, d: int) -> np.ndarray:
    zero = np.zeros(d)
    zero[0] = 1.0
    for _ in range(missing):
        vec = np.kron(zero, vec)
    return vec


def literal_chain_state(
    ensembles: int, after: str, mode_truncation: int = DEFAULT_MODE_TRUNCATION
) -> StateVector:
    """Closed-form (atom + K modes) state of the chain protocol after the step `after`.

    `after` is "start", "C<k>" (cavity pass k), "R<k>" (Ramsey zone k, both
    pulses) or "RE" (the final zone). "C<K>" is the finished chain,
    -i|g> (x) the path-graph state.
    """
    match = _STAGE.match(after)
    if match is None:
        raise ValueError(f"Unknown chain stage {after!r}")
    k_total, d = ensembles, mode_truncation
    if k_total < 2:
        raise ValueError(f"Chain needs at least two samples, got {k_total}")
    subsystems = (control_atom(),) + tuple(collective_mode(d) for _ in range(k_total))

    def atom(level: int) -> np.ndarray:
        v = np.zeros(3, dtype=np.complex128)
        v[level] = 1.0
        return v

    def on(vec: np.ndarray, filled: int) -> np.ndarray:
        return _pad_vacuum(vec, k_total - filled, d)

    s = 1 / np.sqrt(2)
    if after == "start":
        amps = np.kron(on(np.ones(1), 0), s * (atom(F) + atom(E)))
    elif after == "RE":
        a, b = _chain_pair(k_total - 1, d)
        amps = s * (-1j * np.kron(on(a, k_total - 1), atom(G)) + np.kron(on(b, k_total - 1), atom(E)))
    elif match.group(3) is not None:
        k = int(match.group(3))
        if not 1 <= k <= k_total - 1:
            raise ValueError(f"Ramsey zone R{k} does not exist for K={k_total}")
        a, b = _chain_pair(k, d)
        amps = s * (np.kron(on(a, k), atom(F)) + np.kron(on(b, k), atom(E)))
    else:
        k = int(match.group(2))
        if not 1 <= k <= k_total:
            raise ValueError(f"Cavity C{k} does not exist for K={k_total}")
        if k == k_total:
            a, _ = _chain_pair(k_total, d)
            amps = -1j * np.kron(a, atom(G))
        else:
            a, b = _chain_pair(k - 1, d)
            zero = np.zeros(d)
            zero[0] = 1.0
            one = np.zeros(d)
            one[1] = 1.0
            f_part = on(np.kron(zero, a), k)
            g_part = on(np.kron(one, b), k)
            amps = s * (np.kron(f_part, atom(F)) - 1j * np.kron(g_part, atom(G)))
    return StateVector(subsystems, amps)


def release_control_atom(state: StateVector, bound: float = EXACT_RELEASE_BOUND) -> tuple[StateVector, float]:
    """Project the control atom at subsystem 0 onto |g> and drop it.

    Returns the renormalized remainder and the |g> weight. The spin and full
    tiers leave a small population in |f> and |e>; more than `bound` of it
    raises AtomReleaseError. States without a control atom pass through with
    weight 1.
    """
    if state.subsystems[0].role is not Role.CONTROL_ATOM:
        return state, 1.0
    ket = np.zeros(3)
    ket[G] = 1.0
    rest, weight = project_subsystem(state, 0, ket)
    if 1.0 - weight > bound:
        raise AtomReleaseError(
            f"Control atom holds {1.0 - weight:.3e} population outside |g> (bound {bound:.1e}); "
            "the chain is not finished"
        )
    return rest, weight


def strip_control_atom(state: StateVector, bound: float = EXACT_RELEASE_BOUND) -> StateVector:
    return release_control_atom(state, bound)[0]


def _node_components(chain: StateVector, node: int) -> tuple[StateVector | None, StateVector | None]:
    """Unnormalized components of `chain` with the node mode in |0> and |1>."""
    index = mode_indices(chain.subsystems)[node]
    spec = chain.subsystems[index]
    out = []
    for level in (0, 1):
        ket = np.zeros(spec.dim)
        ket[level] = 1.0
        rest, weight = project_subsystem(chain, index, ket)
        out.append(rest.with_amplitudes(rest.amplitudes * np.sqrt(weight)) if weight > 0 else None)
    return out[0], out[1]


def fusion_reference(
    chain_a: StateVector,
    chain_b: StateVector,
    node_a: int,
    node_b: int,
    release_bound: float = EXACT_RELEASE_BOUND,
) -> StateVector:
    """Psi_a0 (x) Psi_b0 (x) |0>_b + Psi_a1 (x) Psi_b1 (x) |1>_b, normalized.

    Modes are ordered as chain A without node_a, then chain B with node_b in place.
    """
    chain_a = strip_control_atom(chain_a, release_bound)
    chain_b = strip_control_atom(chain_b, release_bound)
    a0, a1 = _node_components(chain_a, node_a)
    b_index = mode_indices(chain_b.subsystems)[node_b]
    spec_b = chain_b.subsystems[b_index]
    rest_a = tuple(s for i, s in enumerate(chain_a.subsystems) if i != mode_indices(chain_a.subsystems)[node_a])
    subsystems = rest_a + chain_b.subsystems
    total = np.zeros(int(np.prod([s.dim for s in subsystems])), dtype=np.complex128)
    for level, comp_a in ((0, a0), (1, a1)):
        if comp_a is None:
            continue
        ket = np.zeros(spec_b.dim)
        ket[level] = 1.0
        proj = apply_local(np.outer(ket, ket), chain_b, [b_index])
        total = total + tensor_product([comp_a, proj]).amplitudes
    return StateVector(subsystems, total).normalized()


def fused_graph(graph_a: GraphSpec, graph_b: GraphSpec, node_a: int, node_b: int) -> GraphSpec:
    """Union of both graphs with node_a removed and node_b inheriting node_a's links."""
    g = nx.disjoint_union(graph_a.to_networkx(), graph_b.to_networkx())
    a, b = node_a, graph_a.nodes + node_b
    g.add_edges_from((b, nb) for nb in list(g.neighbors(a)) if nb != b)
    g.remove_node(a)
    return GraphSpec.from_networkx(g)


__all__ = [
    "GraphSpec",
    "build_reference_cluster",
    "check_qubit_subspace",
    "fused_graph",
    "fusion_reference",
    "literal_chain_state",
    "path_graph",
    "qubit_subspace_population",
    "release_control_atom",
    "stabilizer_expectations",
    "strip_control_atom",
]
