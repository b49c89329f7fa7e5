"""Dissipative and dephasing channels and their vectorized Liouvillians.

Vectorization uses column stacking throughout the repo: vec(rho)[i + j*D]
= rho[i, j], so vec(A rho B) = (B^T (x) A) vec(rho).  Both channels are
assembled from the full N x N rate-matrix double sum

    D[rho] = sum_ij Gamma_ij (A_i rho A_j^dag - {A_j^dag A_i, rho} / 2)

with A = sigma^- (dissipation) or sigma^z (dephasing); the fully
collective single-jump form is recovered at interpolation parameter 1 and
is checked in the tests rather than special-cased here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import dagger, kron
from .model import ModelSpec, site_operator

# Largest chain with a dense Liouvillian; 256x256 at four qubits.
MAX_LIOUVILLIAN_QUBITS = 4


@dataclass(frozen=True)
class ChannelSpec:
    """Rate and interpolation parameters of the quench dissipator.

    gamma        overall rate, units of the chain coupling
    alpha        dissipation <-> dephasing mix (0 = pure dissipation)
    alpha_minus  local <-> collective interpolation of the dissipative channel
    alpha_z      local <-> collective interpolation of the dephasing channel
    """

    gamma: float
    alpha: float = 0.0
    alpha_minus: float = 0.0
    alpha_z: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        for name in ("alpha", "alpha_minus", "alpha_z"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of [0,1]: {value}")


@dataclass(frozen=True)
class Liouvillian:
    """Dense D^2 x D^2 generator acting on column-stacked states."""

    matrix: np.ndarray
    dim_state: int


def vec(rho) -> np.ndarray:
    """Column-stack a matrix."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v, dim: int | None = None) -> np.ndarray:
    """Inverse of vec()."""
    v = np.asarray(v)
    d = dim or int(round(np.sqrt(v.size)))
    return v.reshape((d, d), order="F")


def unvec_batch(vs, dim: int) -> np.ndarray:
    """Unvec a (T, D*D) stack of column-stacked states into (T, D, D)."""
    return np.asarray(vs).reshape(-1, dim, dim).transpose(0, 2, 1)


def rate_matrix(gamma: float, alpha_interp: float, n: int) -> np.ndarray:
    """Interpolated rate matrix gamma * [(1 - alpha) I + alpha * ones].

    Positive semidefinite for alpha in [0, 1]: eigenvalues gamma*(1-alpha)
    (n-1 fold) and gamma*(1 - alpha + n*alpha).
    """
    if not 0.0 <= alpha_interp <= 1.0:
        raise ValueError(f"interpolation parameter out of [0,1]: {alpha_interp}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    return gamma * ((1.0 - alpha_interp) * np.eye(n) + alpha_interp * np.ones((n, n)))


def dissipator_apply(rates, jumps, rho) -> np.ndarray:
    """Apply sum_ij Gamma_ij (A_i rho A_j^dag - {A_j^dag A_i, rho} / 2) to rho."""
    rates = np.asarray(rates, dtype=float)
    rho = np.asarray(rho, dtype=complex)
    n = len(jumps)
    if rates.shape != (n, n):
        raise ValueError(f"rate matrix shape {rates.shape} does not match {n} jumps")
    if any(a.shape != rho.shape for a in jumps):
        raise ValueError("jump operator dimension does not match the state")
    out = np.zeros_like(rho)
    for i in range(n):
        for j in range(n):
            g = rates[i, j]
            if g == 0.0:
                continue
            ajd_ai = dagger(jumps[j]) @ jumps[i]
            out += g * (jumps[i] @ rho @ dagger(jumps[j])
                        - 0.5 * (ajd_ai @ rho + rho @ ajd_ai))
    return out


def dissipator_superoperator(rates, jumps) -> np.ndarray:
    """Vectorized form of dissipator_apply for a fixed rate matrix and jump set."""
    rates = np.asarray(rates, dtype=float)
    n = len(jumps)
    d = jumps[0].shape[0]
    eye = np.eye(d, dtype=complex)
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            g = rates[i, j]
            if g == 0.0:
                continue
            ajd_ai = dagger(jumps[j]) @ jumps[i]
            out += g * (kron(np.conj(jumps[j]), jumps[i])
                        - 0.5 * kron(eye, ajd_ai)
                        - 0.5 * kron(ajd_ai.T, eye))
    return out


def hamiltonian_superoperator(h_matrix) -> np.ndarray:
    """Vectorized commutator -i[H, .]."""
    h = np.asarray(h_matrix, dtype=complex)
    eye = np.eye(h.shape[0], dtype=complex)
    return -1j * (kron(eye, h) - kron(h.T, eye))


def lindblad_matrix(h_matrix, jumps, rates) -> np.ndarray:
    """Generic GKSL generator -i[H, .] + sum_k rate_k D[A_k] as a superoperator."""
    out = hamiltonian_superoperator(h_matrix)
    diag = np.diag(np.asarray(rates, dtype=float))
    if len(jumps):
        out += dissipator_superoperator(diag, list(jumps))
    return out


def build_liouvillian(h_matrix, spec: ChannelSpec, model: ModelSpec) -> Liouvillian:
    """Full quench generator: commutator plus the alpha-mixed channels."""
    if model.n_qubits > MAX_LIOUVILLIAN_QUBITS:
        raise ValueError(
            f"dense Liouvillians are limited to {MAX_LIOUVILLIAN_QUBITS} qubits")
    h = np.asarray(h_matrix, dtype=complex)
    if h.shape != (model.dim, model.dim):
        raise ValueError(f"Hamiltonian shape {h.shape} does not match dim {model.dim}")
    total = hamiltonian_superoperator(h)
    weight_minus = 1.0 - spec.alpha
    weight_z = spec.alpha
    if weight_minus > 0.0 and spec.gamma > 0.0:
        jumps = [site_operator(model, s, "minus") for s in range(1, model.n_qubits + 1)]
        g = rate_matrix(spec.gamma, spec.alpha_minus, model.n_qubits)
        total += weight_minus * dissipator_superoperator(g, jumps)
    if weight_z > 0.0 and spec.gamma > 0.0:
        jumps = [site_operator(model, s, "z") for s in range(1, model.n_qubits + 1)]
        g = rate_matrix(spec.gamma, spec.alpha_z, model.n_qubits)
        total += weight_z * dissipator_superoperator(g, jumps)
    return Liouvillian(matrix=total, dim_state=model.dim)
