"""XX chain Hamiltonian, spin operators and Gibbs initial states.

Basis convention, fixed repo-wide: the single-qubit basis is ordered
(|e>, |g>) so that sigma_z|e> = +|e> and sigma_minus|e> = |g>; the
transverse-field term +h*sum(sigma_z) therefore penalizes excitations.
Multi-qubit basis states are Kronecker products with site 1 leftmost,
i.e. index 0 is |ee...e> and index 2^N - 1 is |gg...g>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import dagger, hermitian_eig, kron

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
}

# Density-matrix admissibility bounds.
DENSITY_HERM_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
DENSITY_PSD_TOL = 1e-9


@dataclass(frozen=True)
class ModelSpec:
    """Chain size, coupling and transverse field of the XX battery."""

    n_qubits: int
    field_h: float = 0.1
    j_coupling: float = 1.0

    def __post_init__(self):
        if not 1 <= self.n_qubits <= 6:
            raise ValueError(f"n_qubits must be in 1..6, got {self.n_qubits}")
        if self.field_h < 0:
            raise ValueError(f"field_h must be >= 0, got {self.field_h}")
        if self.j_coupling <= 0:
            raise ValueError(f"j_coupling must be > 0, got {self.j_coupling}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits


def site_operator(spec: ModelSpec, site: int, kind: str) -> np.ndarray:
    """Single-site operator I x ... x sigma^kind x ... x I at 1-based `site`."""
    if kind not in PAULI:
        raise ValueError(f"unknown operator kind {kind!r}")
    if not 1 <= site <= spec.n_qubits:
        raise ValueError(f"site {site} out of range 1..{spec.n_qubits}")
    op = np.eye(1, dtype=complex)
    for k in range(1, spec.n_qubits + 1):
        op = kron(op, PAULI[kind] if k == site else np.eye(2))
    return op


def collective_operator(spec: ModelSpec, kind: str) -> np.ndarray:
    """Sum of the same single-site operator over all sites (S^- or S_z)."""
    if kind not in ("minus", "z"):
        raise ValueError(f"collective operator kind must be 'minus' or 'z', got {kind!r}")
    total = np.zeros((spec.dim, spec.dim), dtype=complex)
    for site in range(1, spec.n_qubits + 1):
        total += site_operator(spec, site, kind)
    return total


def build_hamiltonian(spec: ModelSpec) -> np.ndarray:
    """Open-boundary XX Hamiltonian J*sum(xx + yy) + h*sum(z)."""
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for site in range(1, spec.n_qubits):
        for kind in ("x", "y"):
            h += spec.j_coupling * (site_operator(spec, site, kind)
                                    @ site_operator(spec, site + 1, kind))
    for site in range(1, spec.n_qubits + 1):
        h += spec.field_h * site_operator(spec, site, "z")
    return h


def gibbs_state(h_matrix, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H) / Z, built in the eigenbasis of H.

    The Boltzmann weights are exponentials of spectrum shifted by the
    ground energy, so arbitrarily large beta (beta -> infinity) reduces to
    the uniform mixture over the (possibly degenerate) ground space
    without ever overflowing.
    """
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    vals, vecs = hermitian_eig(h_matrix)
    weights = np.exp(-beta * (vals - vals[0]))
    weights /= weights.sum()
    return (vecs * weights) @ dagger(vecs)


def check_density_matrix(rho, context: str = "state") -> None:
    """Raise ValueError unless rho is Hermitian, unit-trace and PSD within tolerance."""
    rho = np.asarray(rho)
    herm = float(np.abs(rho - dagger(rho)).max())
    if herm > DENSITY_HERM_TOL:
        raise ValueError(f"{context}: Hermiticity defect {herm:.3e} > {DENSITY_HERM_TOL:.0e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > DENSITY_TRACE_TOL:
        raise ValueError(f"{context}: trace deviates from 1 by {abs(tr - 1.0):.3e}")
    vals, _ = hermitian_eig(0.5 * (rho + dagger(rho)), check=False)
    if vals[0] < -DENSITY_PSD_TOL:
        raise ValueError(f"{context}: negative eigenvalue {vals[0]:.3e}")
