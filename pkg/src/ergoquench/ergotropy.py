"""Ergotropy, passive states and spectral analysis of trajectories.

The unitary minimization in the ergotropy definition has the closed form
E_passive = sum_k r_k eps_k with the state populations r sorted descending
and the Hamiltonian levels eps sorted ascending, so a single Hermitian
eigendecomposition per state is all that is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import Trajectory
from .linalg import dagger, hermitian_eig, hermitian_eig_batch

ERGOTROPY_CLIP = 1e-10        # admissible negative rounding before clipping to 0
ACTIVATION_THRESHOLD = 1e-6   # default "ergotropy has switched on" level
CROSSING_SIGNIFICANCE = 1e-10  # eigenvalue-gap noise floor for crossing reports
DIFFERENCE_NOISE_FLOOR = 1e-9  # |dE| below this never counts as a signed value


@dataclass(frozen=True)
class ErgotropyRecord:
    """Energy bookkeeping of one state: E, passive E, their difference, spectrum."""

    time: float
    energy: float
    passive_energy: float
    ergotropy: float
    rho_spectrum: np.ndarray  # descending


def _clip(values):
    values = np.asarray(values, dtype=float)
    low = values.min() if values.size else 0.0
    if low < -ERGOTROPY_CLIP:
        raise ValueError(
            f"ergotropy {low:.3e} below -{ERGOTROPY_CLIP:.0e}; eigensolver failure?")
    return np.maximum(values, 0.0)


def _batch_records(states, times, h_matrix):
    states = np.asarray(states)
    h_levels, _ = hermitian_eig(h_matrix)
    if states.shape[1] != h_levels.size:
        raise ValueError(
            f"state dim {states.shape[1]} does not match Hamiltonian dim {h_levels.size}")
    spectra, _ = hermitian_eig_batch(states, check=False)
    energies = np.einsum("tij,ji->t", states, np.asarray(h_matrix, dtype=complex)).real
    passive = spectra[:, ::-1] @ h_levels
    erg = _clip(energies - passive)
    return times, energies, passive, erg, spectra[:, ::-1]


def ergotropy(rho, h_matrix, time: float = 0.0) -> ErgotropyRecord:
    """Maximum unitarily extractable work of a single state."""
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + dagger(rho))
    t, e, p, w, spec = _batch_records(rho[None], np.array([time]), h_matrix)
    return ErgotropyRecord(time=float(t[0]), energy=float(e[0]), passive_energy=float(p[0]),
                           ergotropy=float(w[0]), rho_spectrum=spec[0])


def passive_state(rho, h_matrix) -> np.ndarray:
    """State with the same spectrum, reordered to be passive with respect to H.

    Descending populations are paired with the ascending-energy eigenvectors
    of H; the result commutes with H.  Under level degeneracy only the
    pairing of eigenvalue multisets is determined, so compare spectra and
    energies rather than matrices.
    """
    vals, _ = hermitian_eig(rho)
    h_levels, h_vecs = hermitian_eig(h_matrix)
    if vals.size != h_levels.size:
        raise ValueError("dimension mismatch between state and Hamiltonian")
    populations = vals[::-1]
    return (h_vecs * populations) @ dagger(h_vecs)


def trajectory_records(traj: Trajectory, h_matrix) -> list[ErgotropyRecord]:
    """ErgotropyRecord for every stored state, via one batched decomposition."""
    t, e, p, w, spec = _batch_records(traj.states, traj.times, h_matrix)
    return [ErgotropyRecord(time=float(t[k]), energy=float(e[k]), passive_energy=float(p[k]),
                            ergotropy=float(w[k]), rho_spectrum=spec[k])
            for k in range(len(t))]


def ergotropy_series(traj: Trajectory, h_matrix) -> np.ndarray:
    """Ergotropy at every grid time."""
    return _batch_records(traj.states, traj.times, h_matrix)[3]


def activation_time(traj: Trajectory, h_matrix,
                    threshold: float = ACTIVATION_THRESHOLD) -> float | None:
    """First time the ergotropy exceeds `threshold` (linearly interpolated).

    Returns None when the trajectory never activates.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    erg = ergotropy_series(traj, h_matrix)
    above = np.nonzero(erg > threshold)[0]
    if above.size == 0:
        return None
    k = int(above[0])
    if k == 0:
        return float(traj.times[0])
    t0, t1 = traj.times[k - 1], traj.times[k]
    e0, e1 = erg[k - 1], erg[k]
    return float(t0 + (t1 - t0) * (threshold - e0) / (e1 - e0))


class ErgotropyDifference(NamedTuple):
    times: np.ndarray
    delta: np.ndarray
    crossings: list[float]


def ergotropy_difference(traj_a: Trajectory, traj_b: Trajectory, h_matrix,
                         noise_floor: float = DIFFERENCE_NOISE_FLOOR) -> ErgotropyDifference:
    """Pointwise ergotropy difference and its sign-change times.

    A crossing is recorded when the difference flips sign between two values
    both exceeding `noise_floor` in magnitude (intervening sub-floor samples
    are ignored); the time is linearly interpolated.
    """
    if len(traj_a) != len(traj_b) or np.abs(traj_a.times - traj_b.times).max() > 1e-12:
        raise ValueError("trajectories must share the same time grid")
    delta = ergotropy_series(traj_a, h_matrix) - ergotropy_series(traj_b, h_matrix)
    crossings: list[float] = []
    last_idx = None
    for k in np.nonzero(np.abs(delta) > noise_floor)[0]:
        if last_idx is not None and delta[k] * delta[last_idx] < 0:
            t0, t1 = traj_a.times[last_idx], traj_a.times[k]
            d0, d1 = delta[last_idx], delta[k]
            crossings.append(float(t0 + (t1 - t0) * (-d0) / (d1 - d0)))
        last_idx = int(k)
    return ErgotropyDifference(times=traj_a.times.copy(), delta=delta, crossings=crossings)


def _greedy_match(overlap) -> np.ndarray:
    """Map row branches to column branches by repeatedly taking the best overlap."""
    overlap = np.array(overlap, dtype=float)
    d = overlap.shape[0]
    perm = np.full(d, -1, dtype=int)
    for _ in range(d):
        i, j = np.unravel_index(int(np.argmax(overlap)), overlap.shape)
        perm[i] = j
        overlap[i, :] = -1.0
        overlap[:, j] = -1.0
    return perm


def eigenvalue_crossings(traj: Trajectory,
                         significance: float = CROSSING_SIGNIFICANCE) -> list[tuple[float, tuple[int, int]]]:
    """Times at which tracked eigenvalue branches of rho(t) swap order.

    Sorted spectra never visibly cross, so branches are tracked by maximal
    eigenvector overlap between consecutive grid points; an order swap of
    two branches adjacent in the sorted spectrum, with a gap exceeding
    `significance` on both sides of the swap, is reported with the linearly
    interpolated crossing time and the (sorted) position pair.  Raising
    `significance` selects only crossings among non-negligible populations.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    vals, vecs = hermitian_eig_batch(traj.states, check=False)
    found: list[tuple[float, tuple[int, int]]] = []
    d = vals.shape[1]
    for k in range(1, len(traj)):
        overlap = np.abs(dagger(vecs[k - 1]) @ vecs[k]) ** 2
        perm = _greedy_match(overlap)
        for i in range(d - 1):
            if perm[i] <= perm[i + 1]:
                continue
            gap_before = vals[k - 1, i + 1] - vals[k - 1, i]
            gap_after = vals[k, perm[i]] - vals[k, perm[i + 1]]
            if gap_before <= significance or gap_after <= significance:
                continue
            t0, t1 = traj.times[k - 1], traj.times[k]
            t_cross = t0 + (t1 - t0) * gap_before / (gap_before + gap_after)
            found.append((float(t_cross), (i, i + 1)))
    found.sort(key=lambda item: item[0])
    return found


def energy_basis_populations(traj: Trajectory, h_matrix) -> np.ndarray:
    """Populations <eps_k| rho(t) |eps_k> in the ascending energy eigenbasis."""
    _, h_vecs = hermitian_eig(h_matrix)
    return np.einsum("ik,tij,jk->tk", np.conj(h_vecs), traj.states, h_vecs).real
