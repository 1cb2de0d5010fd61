"""Pump placement, mode-pair enumeration and graph Hamiltonians.

A pump at even half-position P squeezes every mode pair
(P - (2n+1), P + (2n+1)).  The couplings collect into a complex
symmetric adjacency matrix A whose quadrature-basis counterpart feeds
the covariance dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModeSet

__all__ = [
    "PumpTone",
    "AdjacencyMatrix",
    "HamiltonianMatrix",
    "enumerate_tms_pairs",
    "standard_mode_set",
    "symmetric_pump_positions",
    "build_symmetric_adjacency",
    "build_asymmetric_adjacency",
    "adjacency_to_hamiltonian",
    "export_graph_dot",
]

GRID_MAX = 14  # outermost half-position on the symmetric grid


@dataclass(frozen=True)
class PumpTone:
    """One parametric pump: half-position, |alpha| in kappa units, phase."""

    half_position: float
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.amplitude) or self.amplitude < 0:
            raise ValueError("pump amplitude must be finite and >= 0")
        object.__setattr__(self, "phase", float(self.phase) % (2 * np.pi))

    @property
    def coupling(self) -> complex:
        """Complex coupling alpha = |alpha| e^{i phi}."""
        return self.amplitude * np.exp(1j * self.phase)


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Complex symmetric coupling matrix over an ordered mode list."""

    matrix: np.ndarray
    mode_set: ModeSet

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        n = len(self.mode_set)
        if a.shape != (n, n):
            raise ValueError("adjacency shape does not match mode set")
        if not np.allclose(a, a.T):
            raise ValueError("adjacency must be complex symmetric")
        a.flags.writeable = False
        object.__setattr__(self, "matrix", a)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric quadrature-basis Hamiltonian matrix."""

    h_quad: np.ndarray
    mode_set: ModeSet

    def __post_init__(self):
        h = np.asarray(self.h_quad, dtype=float)
        h = 0.5 * (h + h.T)
        h.flags.writeable = False
        object.__setattr__(self, "h_quad", h)


def enumerate_tms_pairs(pump_half_position: int, mode_labels: ModeSet):
    """All pairs (P-(2n+1), P+(2n+1)) with both members in the mode set."""
    p = pump_half_position
    if p % 2:
        raise ValueError("pump half-position must be even on the grid")
    pairs = []
    n = 0
    max_dist = max(abs(l) for l in mode_labels.labels) + abs(p)
    while True:
        d = 2 * n + 1
        if d > max_dist:
            break
        lo, hi = p - d, p + d
        if lo in mode_labels and hi in mode_labels:
            pairs.append((lo, hi))
        n += 1
    return pairs


def symmetric_pump_positions(n_pumps: int):
    """Half-positions 0, 2, -2, 4, -4, ... alternating outward."""
    if not 1 <= n_pumps <= 15:
        raise ValueError("n_pumps must be between 1 and 15")
    positions = [0]
    step = 2
    while len(positions) < n_pumps:
        positions.append(step)
        if len(positions) < n_pumps:
            positions.append(-step)
        step += 2
    return positions


def standard_mode_set(n_pumps: int):
    """The fixed 44-mode universe plus correlation counts.

    Returns ``(mode_set, n_direct, n_total)`` where ``n_direct`` counts
    modes TMS-paired with -1 or 1 by any pump and ``n_total`` adds the
    modes reachable through one more pairing (beam-splitter order).
    """
    modes = ModeSet.standard(43)
    positions = symmetric_pump_positions(n_pumps)
    neighbors = {label: set() for label in modes.labels}
    for p in positions:
        for a, b in enumerate_tms_pairs(p, modes):
            neighbors[a].add(b)
            neighbors[b].add(a)
    direct = neighbors[-1] | neighbors[1]
    second = set(direct)
    for label in direct:
        second |= neighbors[label]
    return modes, len(direct), len(second)


def build_symmetric_adjacency(pumps, modes: ModeSet | None = None) -> AdjacencyMatrix:
    """Sum every pump's TMS couplings into one adjacency matrix.

    Duplicate pump positions are allowed and their complex amplitudes
    add.  The result is independent of the pump list order.
    """
    if modes is None:
        modes = ModeSet.standard(43)
    n = len(modes)
    a = np.zeros((n, n), dtype=complex)
    for pump in pumps:
        p = pump.half_position
        if p != int(p) or int(p) % 2 or abs(p) > GRID_MAX:
            raise ValueError(
                f"pump half-position {p} is off the symmetric grid"
            )
        for lo, hi in enumerate_tms_pairs(int(p), modes):
            i, j = modes.index(lo), modes.index(hi)
            a[i, j] += pump.coupling
            a[j, i] += pump.coupling
    return AdjacencyMatrix(a, modes)


def build_asymmetric_adjacency(pumps) -> AdjacencyMatrix:
    """Block adjacency for asymmetric pumping.

    The first two pumps define the 44-mode symmetric block; each pump
    beyond that contributes a decoupled 44-mode idler layer attached to
    the system modes through an alpha * identity block.
    """
    pumps = list(pumps)
    if len(pumps) < 2:
        return build_symmetric_adjacency(pumps)
    system = build_symmetric_adjacency(pumps[:2])
    base = system.mode_set
    nb = len(base)
    extra = pumps[2:]
    n_layers = len(extra)
    dim = nb * (1 + n_layers)
    a = np.zeros((dim, dim), dtype=complex)
    a[:nb, :nb] = system.matrix
    for k, pump in enumerate(extra):
        lo = nb * (k + 1)
        block = pump.coupling * np.eye(nb)
        a[:nb, lo:lo + nb] = block
        a[lo:lo + nb, :nb] = block
    labels = list(base.labels)
    for k in range(n_layers):
        labels.extend((k + 1, l) for l in base.labels)
    return AdjacencyMatrix(a, ModeSet(tuple(labels)))


def adjacency_to_hamiltonian(adj: AdjacencyMatrix) -> HamiltonianMatrix:
    """Quadrature-basis Hamiltonian of the squeezing graph.

    Each edge alpha = |a| e^{i phi} between modes j, k contributes
    |a| [cos phi (x_j p_k + p_j x_k) - sin phi (x_j x_k - p_j p_k)],
    i.e. 2x2 quadrature blocks Re(alpha) [[0,1],[1,0]] +
    Im(alpha) [[-1,0],[0,1]].
    """
    a = adj.matrix
    if np.any(np.abs(np.diag(a)) > 0):
        raise ValueError("degenerate (diagonal) squeezing is out of scope")
    re, im = a.real, a.imag
    h = np.kron(re, np.array([[0.0, 1.0], [1.0, 0.0]])) + np.kron(
        im, np.array([[-1.0, 0.0], [0.0, 1.0]])
    )
    return HamiltonianMatrix(h, adj.mode_set)


def _node_name(label) -> str:
    if isinstance(label, tuple):
        layer, base = label
        return f"m{base}_l{layer}"
    return f"m{label}"


def export_graph_dot(adj: AdjacencyMatrix) -> str:
    """Render the coupling graph in DOT format."""
    lines = ["graph pump_graph {"]
    for label in adj.mode_set.labels:
        lines.append(f'  {_node_name(label)} [label="{label}"];')
    a = adj.matrix
    labels = adj.mode_set.labels
    n = len(labels)
    for i in range(n):
        for j in range(i + 1, n):
            if a[i, j] != 0:
                amp = abs(a[i, j])
                phi = float(np.angle(a[i, j])) % (2 * np.pi)
                lines.append(
                    f"  {_node_name(labels[i])} -- {_node_name(labels[j])} "
                    f'[label="{amp:.6g}", phase="{phi:.6g}"];'
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
