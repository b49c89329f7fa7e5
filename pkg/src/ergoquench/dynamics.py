"""Time evolution rho(t) = exp(L t) rho(0) on uniform grids.

The primary propagator exponentiates the Liouvillian once per grid and
applies the resulting step matrix repeatedly; a classical fourth-order
integrator is kept alongside purely as a cross-check.  Every stored state
is re-symmetrized and screened against the CPTP invariants (trace,
Hermiticity, positivity); a violation beyond the guard tolerance aborts
with the offending step index, because it can only mean a bug in the
generator or the integrator.  Positivity is monitored, never projected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channels import ChannelSpec, Liouvillian, unvec_batch, vec
from .linalg import dagger, expm, hermitian_eig_batch
from .model import ModelSpec, check_density_matrix

GUARD_TOL = 1e-6  # runtime CPTP guard; test-level bounds are far tighter


class InvariantViolation(RuntimeError):
    """A propagated state left the CPTP manifold beyond the guard tolerance."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform output grid: states are stored at k*dt for k = 0..t_max/dt."""

    t_max: float
    dt: float = 0.5

    def __post_init__(self):
        if self.dt <= 0 or self.dt > 1.0:
            raise ValueError(f"dt must be in (0, 1], got {self.dt}")
        if self.t_max < self.dt:
            raise ValueError(f"t_max must be >= dt, got {self.t_max}")
        n = round(self.t_max / self.dt)
        if abs(n * self.dt - self.t_max) > 1e-9 * max(1.0, self.t_max):
            raise ValueError(f"t_max {self.t_max} is not a multiple of dt {self.dt}")

    @property
    def n_steps(self) -> int:
        return round(self.t_max / self.dt)

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass
class Trajectory:
    """Stored states on a grid, plus the defining model/channel metadata."""

    times: np.ndarray
    states: np.ndarray
    model: ModelSpec | None = None
    channel: ChannelSpec | None = None

    def __len__(self) -> int:
        return len(self.times)


class SteadyState(NamedTuple):
    state: np.ndarray
    converged: bool
    t_settle: float


def _screen_states(raw_states, times) -> np.ndarray:
    """Symmetrize the stored states and enforce the CPTP guard."""
    states = np.asarray(raw_states)
    herm = np.abs(states - dagger(states)).max(axis=(1, 2))
    states = 0.5 * (states + dagger(states))
    trace_dev = np.abs(np.trace(states, axis1=1, axis2=2) - 1.0)
    vals, _ = hermitian_eig_batch(states, check=False)
    neg = -vals[:, 0]
    for name, dev in (("Hermiticity", herm), ("trace", trace_dev), ("positivity", neg)):
        bad = np.nonzero(dev > GUARD_TOL)[0]
        if bad.size:
            k = int(bad[0])
            raise InvariantViolation(
                f"dynamics: {name} defect {dev[k]:.3e} at step {k} (t={times[k]:g})")
    return states


def propagate(liou: Liouvillian, rho0, grid: TimeGrid) -> Trajectory:
    """Evolve rho0 with the one-step matrix exp(L dt) applied repeatedly."""
    check_density_matrix(rho0, context="initial state")
    d = liou.dim_state
    if np.asarray(rho0).shape != (d, d):
        raise ValueError(f"state shape {np.asarray(rho0).shape} does not match dim {d}")
    step = expm(liou.matrix * grid.dt)
    n = grid.n_steps
    stacked = np.empty((n + 1, d * d), dtype=complex)
    v = vec(rho0)
    stacked[0] = v
    for k in range(1, n + 1):
        v = step @ v
        stacked[k] = v
    times = grid.times()
    states = _screen_states(unvec_batch(stacked, d), times)
    return Trajectory(times=times, states=states)


def propagate_rk4(liou: Liouvillian, rho0, grid: TimeGrid, substeps: int = 20) -> Trajectory:
    """Classical RK4 on the vectorized master equation; integrator cross-check."""
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    check_density_matrix(rho0, context="initial state")
    d = liou.dim_state
    mat = liou.matrix
    h = grid.dt / substeps
    n = grid.n_steps
    stacked = np.empty((n + 1, d * d), dtype=complex)
    v = vec(rho0)
    stacked[0] = v
    for k in range(1, n + 1):
        for _ in range(substeps):
            k1 = mat @ v
            k2 = mat @ (v + 0.5 * h * k1)
            k3 = mat @ (v + 0.5 * h * k2)
            k4 = mat @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        stacked[k] = v
    times = grid.times()
    states = _screen_states(unvec_batch(stacked, d), times)
    return Trajectory(times=times, states=states)


def evolve_to(liou: Liouvillian, rho0, t: float) -> np.ndarray:
    """Single-jump evolution exp(L t) rho0; exact, no intermediate storage."""
    check_density_matrix(rho0, context="initial state")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    v = expm(liou.matrix * t) @ vec(rho0)
    states = _screen_states(unvec_batch(v[None], liou.dim_state), np.array([t]))
    return states[0]


def detect_steady(traj: Trajectory, tol: float) -> SteadyState:
    """Flag convergence when per-step motion stays below tol*dt through the tail.

    t_settle is the earliest grid time from which ||rho(t_k) - rho(t_{k-1})||_F
    stays below tol*dt for the rest of the grid; ``converged`` requires the
    condition to hold over at least the final 10% of the grid.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if len(traj) == 1:
        return SteadyState(state=traj.states[-1], converged=True, t_settle=float(traj.times[0]))
    dt = float(traj.times[1] - traj.times[0])
    diffs = np.sqrt((np.abs(np.diff(traj.states, axis=0)) ** 2).sum(axis=(1, 2)))
    moving = diffs >= tol * dt
    if not moving.any():
        t_settle = float(traj.times[0])
    else:
        t_settle = float(traj.times[int(np.nonzero(moving)[0][-1]) + 1])
    tail_start = min(len(diffs) - 1, int(np.ceil(0.9 * len(diffs))))
    converged = not bool(moving[tail_start:].any())
    return SteadyState(state=traj.states[-1], converged=converged, t_settle=t_settle)
