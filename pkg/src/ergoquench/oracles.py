"""Closed-form solutions used to cross-validate the numerical engine.

Every routine here is an independent code path: the two-qubit sector
equations are hand-assembled 6x6 real systems integrated with a local
scaled-Taylor exponential (deliberately not the Pade kernel the engine
uses), the collective-channel results are explicit formulas, and the dark
subspace comes from the kernel of S^+ S^-.  The numerical coefficients of
the sector equations assume unit chain coupling, so every oracle refuses
j_coupling != 1.

Two-qubit product basis indices, repo convention: |ee>=0, |eg>=1, |ge>=2,
|gg>=3; the tracked coherence c is the (|eg>, |ge>) matrix element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import dagger, hermitian_eig, null_space_hermitian, one_norm, NULL_TOL
from .model import ModelSpec, build_hamiltonian, collective_operator, gibbs_state

_BLOCK_SUM_TOL = 1e-8


def _require_unit_coupling(model: ModelSpec) -> None:
    if model.j_coupling != 1.0:
        raise ValueError("closed-form oracles are derived for unit chain coupling")


def _expm_taylor(m) -> np.ndarray:
    """Scaled Taylor-series exponential; independent of the engine's kernel."""
    a = np.asarray(m, dtype=float)
    nrm = one_norm(a)
    squarings = max(0, int(np.ceil(np.log2(nrm / 0.5)))) if nrm > 0.5 else 0
    a = a / (2.0 ** squarings)
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, 40):
        term = term @ a / k
        out = out + term
        if np.abs(term).max() < 1e-20:
            break
    for _ in range(squarings):
        out = out @ out
    return out


@dataclass(frozen=True)
class TwoQubitBlockState:
    """Excitation-sector variables of a two-qubit state: populations and c."""

    p_gg: float
    p_eg: float
    p_ge: float
    p_ee: float
    c: complex

    def __post_init__(self):
        pops = (self.p_gg, self.p_eg, self.p_ge, self.p_ee)
        if min(pops) < -1e-10 or max(pops) > 1.0 + 1e-10:
            raise ValueError(f"populations out of [0,1]: {pops}")
        if abs(sum(pops) - 1.0) > _BLOCK_SUM_TOL:
            raise ValueError(f"populations sum to {sum(pops)}, expected 1")
        bound = np.sqrt(max(self.p_eg, 0.0) * max(self.p_ge, 0.0)) + 1e-10
        if abs(self.c) > bound:
            raise ValueError(f"|c| = {abs(self.c)} exceeds sqrt(p_eg p_ge) = {bound}")

    @classmethod
    def from_density(cls, rho) -> "TwoQubitBlockState":
        rho = np.asarray(rho)
        if rho.shape != (4, 4):
            raise ValueError(f"expected a 4x4 state, got {rho.shape}")
        return cls(p_gg=rho[3, 3].real, p_eg=rho[1, 1].real, p_ge=rho[2, 2].real,
                   p_ee=rho[0, 0].real, c=complex(rho[1, 2]))

    def to_density(self) -> np.ndarray:
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3] = self.p_ee, self.p_eg, self.p_ge, self.p_gg
        rho[1, 2] = self.c
        rho[2, 1] = np.conj(self.c)
        return rho

    def _vector(self) -> np.ndarray:
        return np.array([self.p_gg, self.p_eg, self.p_ge, self.p_ee,
                         self.c.real, self.c.imag])

    @classmethod
    def _from_vector(cls, y) -> "TwoQubitBlockState":
        return cls(p_gg=float(y[0]), p_eg=float(y[1]), p_ge=float(y[2]),
                   p_ee=float(y[3]), c=complex(y[4], y[5]))


# Generators on y = (p_gg, p_eg, p_ge, p_ee, Re c, Im c); unit coupling.

def _parallel_generator(gamma: float) -> np.ndarray:
    m = np.zeros((6, 6))
    m[0, 1] = m[0, 2] = gamma
    m[1, 1] = -gamma
    m[1, 3] = gamma
    m[1, 5] = -4.0
    m[2, 2] = -gamma
    m[2, 3] = gamma
    m[2, 5] = 4.0
    m[3, 3] = -2.0 * gamma
    m[4, 4] = -gamma
    m[5, 1] = 2.0
    m[5, 2] = -2.0
    m[5, 5] = -gamma
    return m


def _collective_generator(gamma: float) -> np.ndarray:
    m = _parallel_generator(gamma)
    m[0, 4] += 2.0 * gamma
    m[1, 4] += -gamma
    m[2, 4] += -gamma
    m[4, 1] += -0.5 * gamma
    m[4, 2] += -0.5 * gamma
    m[4, 3] += gamma
    return m


def _dephasing_generator(gamma: float) -> np.ndarray:
    m = np.zeros((6, 6))
    m[1, 5] = -4.0
    m[2, 5] = 4.0
    m[4, 4] = -4.0 * gamma
    m[5, 1] = 2.0
    m[5, 2] = -2.0
    m[5, 5] = -4.0 * gamma
    return m


def _evolve_block(generator, init: TwoQubitBlockState, t: float) -> TwoQubitBlockState:
    return TwoQubitBlockState._from_vector(_expm_taylor(generator * t) @ init._vector())


def two_qubit_parallel_block(init: TwoQubitBlockState, gamma: float, t: float) -> TwoQubitBlockState:
    """Exact sector solution for two parallel dissipative channels."""
    return _evolve_block(_parallel_generator(gamma), init, t)


def two_qubit_collective_block(init: TwoQubitBlockState, gamma: float, t: float) -> TwoQubitBlockState:
    """Exact sector solution for the collective dissipative channel."""
    return _evolve_block(_collective_generator(gamma), init, t)


def dephasing_two_qubit_block(init: TwoQubitBlockState, gamma: float, t: float) -> TwoQubitBlockState:
    """Exact sector solution for two parallel dephasing channels.

    Populations are frozen; the two-site coherence mixes with the
    one-excitation populations while decaying at rate 4*gamma.
    """
    return _evolve_block(_dephasing_generator(gamma), init, t)


def two_qubit_collective_sc(init: TwoQubitBlockState, gamma: float, t: float) -> tuple[float, float]:
    """Closed form for s(t) = p_eg + p_ge and c(t) under collective dissipation.

        s(t) = 2 g p_ee(0) t e^{-2gt} + s(0)/2 (1 + e^{-2gt}) + c(0)(e^{-2gt} - 1)
        c(t) =   g p_ee(0) t e^{-2gt} + s(0)/4 (e^{-2gt} - 1) + c(0)/2 (e^{-2gt} + 1)

    Valid for real initial coherence (always true for thermal input).
    """
    if abs(init.c.imag) > 1e-12:
        raise ValueError("closed form requires a real initial coherence")
    c0 = init.c.real
    s0 = init.p_eg + init.p_ge
    decay = np.exp(-2.0 * gamma * t)
    s_t = 2.0 * gamma * init.p_ee * t * decay + 0.5 * s0 * (1.0 + decay) + c0 * (decay - 1.0)
    c_t = gamma * init.p_ee * t * decay + 0.25 * s0 * (decay - 1.0) + 0.5 * c0 * (decay + 1.0)
    return float(s_t), float(c_t)


def steady_s_infinity(beta: float, h: float) -> float:
    """Surviving one-excitation weight e^{2 beta} / Z of the collective steady state."""
    z = 2.0 * (np.cosh(2.0 * beta) + np.cosh(2.0 * beta * h))
    return float(np.exp(2.0 * beta) / z)


def collective_steady_spectrum(beta: float, h: float) -> np.ndarray:
    """Ascending eigenvalues {0, 0, 1 - s_inf, s_inf} of the collective steady state."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    s = steady_s_infinity(beta, h)
    return np.sort(np.array([0.0, 0.0, 1.0 - s, s]))


def steady_state_is_passive(beta: float, h: float) -> bool:
    """Passivity of the two-qubit collective steady state: sinh(2b) >= cosh(2bh)."""
    return bool(np.sinh(2.0 * beta) >= np.cosh(2.0 * beta * h))


def activation_time_analytic(beta: float, h: float, gamma: float) -> float:
    """Ergotropy activation time ln(1 + tanh(beta - beta h)) / gamma.

    Only meaningful below the critical field (h < 1 in coupling units).
    """
    if h >= 1.0:
        raise ValueError("activation formula requires h < 1")
    if beta <= 0 or gamma <= 0:
        raise ValueError("beta and gamma must be > 0")
    return float(np.log(1.0 + np.tanh(beta - beta * h)) / gamma)


def beta_critical(h: float, tol: float = 1e-10) -> float:
    """Positive root of sinh(2b) = cosh(2bh), by bracketing bisection on (0, 20]."""
    if not 0.0 <= h < 1.0:
        raise ValueError(f"h must be in [0, 1), got {h}")

    def f(b):
        return np.sinh(2.0 * b) - np.cosh(2.0 * b * h)

    lo, hi = 1e-12, 20.0
    if not (f(lo) < 0.0 < f(hi)):
        raise ValueError("no sign change in the bisection bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class DarkSubspace:
    """Orthonormal kernel of S^+ S^- (columns of `basis`) and its projector."""

    basis: np.ndarray
    projector: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


def dark_subspace(model: ModelSpec) -> DarkSubspace:
    """States annihilated by the collective lowering operator."""
    lowering = collective_operator(model, "minus")
    basis = null_space_hermitian(dagger(lowering) @ lowering, tol=NULL_TOL)
    return DarkSubspace(basis=basis, projector=basis @ dagger(basis))


def p_dark(beta: float, model: ModelSpec, dark: DarkSubspace | None = None,
           h_matrix=None) -> float:
    """Thermal population inside the dark subspace, Tr[P_dark rho_beta]."""
    _require_unit_coupling(model)
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    dark = dark or dark_subspace(model)
    h = build_hamiltonian(model) if h_matrix is None else h_matrix
    return float(np.real(np.trace(dark.projector @ gibbs_state(h, beta))))


def p_dark_derivative(beta: float, model: ModelSpec, dark: DarkSubspace | None = None) -> float:
    """d p_dark / d beta = -(<H>_dark - <H>) p_dark, evaluated in the H eigenbasis."""
    _require_unit_coupling(model)
    dark = dark or dark_subspace(model)
    h = build_hamiltonian(model)
    levels, vecs = hermitian_eig(h)
    weights = np.exp(-beta * (levels - levels[0]))
    proj_diag = np.real(np.einsum("ik,ij,jk->k", np.conj(vecs), dark.projector, vecs))
    pop = float((proj_diag * weights).sum() / weights.sum())
    mean_h = float((levels * weights).sum() / weights.sum())
    mean_h_dark = float((proj_diag * levels * weights).sum() / (proj_diag * weights).sum())
    return -(mean_h_dark - mean_h) * pop


def dark_population_series(states, dark: DarkSubspace) -> np.ndarray:
    """Tr[P_dark rho(t)] along a stack of states."""
    return np.einsum("tij,ji->t", np.asarray(states), dark.projector).real
