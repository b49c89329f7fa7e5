"""Experiment registry: every figure/sweep as a reproducible CSV (+ optional SVG).

Each experiment writes exactly one CSV with a fixed per-experiment schema
and full double precision (17 significant digits), so identical configs
produce byte-identical files.  Parameter points inside a sweep may run on
a thread pool (capped by ERGOQUENCH_THREADS, default serial); rows are
always written in deterministic parameter order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channels import ChannelSpec, build_liouvillian
from .config import ConfigError, ExperimentConfig
from .dynamics import TimeGrid, evolve_to, propagate
from .ergotropy import (eigenvalue_crossings, energy_basis_populations, ergotropy,
                        trajectory_records)
from .jc import compare_jc, default_jc_spec
from .linalg import hermitian_eig
from .model import ModelSpec, build_hamiltonian, gibbs_state
from .oracles import (TwoQubitBlockState, beta_critical, collective_steady_spectrum,
                      dark_population_series, dark_subspace, dephasing_two_qubit_block,
                      p_dark, p_dark_derivative, steady_state_is_passive,
                      two_qubit_collective_sc, two_qubit_parallel_block)
from .svgplot import line_plot_svg

STEADY_ERGOTROPY_EPS = 1e-4  # classification threshold for "non-passive steady state"
JC_RATIOS = (1.0, 5.0, 10.0, 20.0, 50.0, 100.0)
FIG3_BETA_GRID = (0.2, 0.3, 0.4, 0.5, 1.0, 2.0, 5.0)
MIXING_ALPHA_GRID = (0.0, 0.3, 0.5, 0.7, 0.9, 1.0)
INTERP_ALPHA_GRID = tuple(round(0.1 * k, 1) for k in range(11))


def _thread_count() -> int:
    raw = os.environ.get("ERGOQUENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pmap(fn: Callable, items):
    """Map preserving input order; threaded when ERGOQUENCH_THREADS > 1."""
    workers = _thread_count()
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: str, header, rows) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _grid_from(config: ExperimentConfig, default_t_max: float | None = None,
               default_dt: float | None = None) -> TimeGrid:
    t_max = config.t_max if config.is_explicit("t_max") or default_t_max is None else default_t_max
    dt = config.dt if config.is_explicit("dt") or default_dt is None else default_dt
    return TimeGrid(t_max=t_max, dt=dt)


def _betas_from(config: ExperimentConfig, default: tuple | None = None) -> tuple:
    if default is None or config.is_explicit("beta_list"):
        return config.beta_list
    return default


def _require_n(config: ExperimentConfig, n: int, name: str) -> None:
    if config.n_qubits is not None and config.n_qubits != n:
        raise ConfigError(f"experiment {name!r} fixes n_qubits={n}")


def _run_trajectory(n: int, h: float, gamma: float, alpha: float, alpha_minus: float,
                    alpha_z: float, beta: float, grid: TimeGrid):
    model = ModelSpec(n_qubits=n, field_h=h)
    h_matrix = build_hamiltonian(model)
    channel = ChannelSpec(gamma=gamma, alpha=alpha, alpha_minus=alpha_minus, alpha_z=alpha_z)
    liou = build_liouvillian(h_matrix, channel, model)
    traj = propagate(liou, gibbs_state(h_matrix, beta), grid)
    traj.model, traj.channel = model, channel
    return traj, h_matrix


def _steady_ergotropy_sweep(n: int, h: float, gamma: float, alpha: float,
                            alpha_minus: float, alpha_z: float, betas, t_max: float):
    """Steady ergotropy at t_max for a fixed channel, one exact jump per beta."""
    model = ModelSpec(n_qubits=n, field_h=h)
    h_matrix = build_hamiltonian(model)
    channel = ChannelSpec(gamma=gamma, alpha=alpha, alpha_minus=alpha_minus, alpha_z=alpha_z)
    liou = build_liouvillian(h_matrix, channel, model)
    out = []
    for beta in betas:
        steady = evolve_to(liou, gibbs_state(h_matrix, beta), t_max)
        out.append(ergotropy(steady, h_matrix, time=t_max).ergotropy)
    return out


def _trajectory_rows(tag, traj, h_matrix, with_spectrum: bool = True, extra=None):
    records = trajectory_records(traj, h_matrix)
    rows = []
    for k, rec in enumerate(records):
        row = list(tag) + [rec.time, rec.energy, rec.passive_energy, rec.ergotropy]
        if extra is not None:
            row.append(extra[k])
        if with_spectrum:
            row.extend(rec.rho_spectrum)
        rows.append(row)
    return rows, records


def _spectrum_header(dim: int):
    return [f"lambda_{k}" for k in range(dim)]


def _maybe_svg(config, out_dir, name, series, title, ylabel="ergotropy", xlabel="time"):
    if not config.emit_svg:
        return []
    path = os.path.join(out_dir, f"{name}.svg")
    line_plot_svg(path, series, title=title, xlabel=xlabel, ylabel=ylabel)
    return [path]


# --- trajectory experiments -------------------------------------------------

def _beta_sweep_figure(config, out_dir, name, n, channel, betas, title,
                       with_dark: bool = False):
    """Shared body of the single-size trajectory figures (fig2/3/5/6)."""
    _require_n(config, n, name)
    grid = _grid_from(config)
    dark = dark_subspace(ModelSpec(n_qubits=n, field_h=config.h)) if with_dark else None
    results = _pmap(lambda b: _run_trajectory(n, config.h, config.gamma,
                                              channel[0], channel[1], channel[2],
                                              b, grid),
                    betas)
    rows, series = [], []
    for beta, (traj, h_matrix) in zip(betas, results):
        extra = dark_population_series(traj.states, dark) if with_dark else None
        new_rows, records = _trajectory_rows((beta,), traj, h_matrix, extra=extra)
        rows.extend(new_rows)
        series.append((f"beta={beta:g}", traj.times, [r.ergotropy for r in records]))
    header = ["beta", "time", "energy", "passive_energy", "ergotropy"]
    if with_dark:
        header.append("p_dark")
    header += _spectrum_header(2 ** n)
    paths = [_write_csv(os.path.join(out_dir, f"{name}.csv"), header, rows)]
    paths += _maybe_svg(config, out_dir, name, series, title)
    return paths


def _run_fig2(config: ExperimentConfig, out_dir: str):
    return _beta_sweep_figure(config, out_dir, "fig2", 2,
                              (config.alpha, config.alpha_minus, config.alpha_z),
                              _betas_from(config), "two-qubit parallel dissipation")


def _run_fig3(config: ExperimentConfig, out_dir: str):
    return _beta_sweep_figure(config, out_dir, "fig3", 2, (0.0, 1.0, config.alpha_z),
                              _betas_from(config, FIG3_BETA_GRID),
                              "two-qubit collective dissipation")


def _run_fig5(config: ExperimentConfig, out_dir: str):
    return _beta_sweep_figure(config, out_dir, "fig5", 4,
                              (config.alpha, config.alpha_minus, config.alpha_z),
                              _betas_from(config), "four-qubit parallel dissipation")


def _run_fig6(config: ExperimentConfig, out_dir: str):
    return _beta_sweep_figure(config, out_dir, "fig6", 4, (0.0, 1.0, config.alpha_z),
                              _betas_from(config), "four-qubit collective dissipation",
                              with_dark=True)


def _run_fig8(config: ExperimentConfig, out_dir: str):
    grid = _grid_from(config)
    betas = _betas_from(config)
    sizes = (config.n_qubits,) if config.n_qubits is not None else (2, 4)
    rows, series = [], []
    for n in sizes:
        results = _pmap(lambda b, n=n: _run_trajectory(n, config.h, config.gamma, 1.0,
                                                       config.alpha_minus, 0.0, b, grid),
                        betas)
        for beta, (traj, h_matrix) in zip(betas, results):
            new_rows, records = _trajectory_rows((n, beta), traj, h_matrix,
                                                 with_spectrum=False)
            rows.extend(new_rows)
            series.append((f"N={n} beta={beta:g}", traj.times,
                           [r.ergotropy for r in records]))
    header = ["n_qubits", "beta", "time", "energy", "passive_energy", "ergotropy"]
    paths = [_write_csv(os.path.join(out_dir, "fig8.csv"), header, rows)]
    paths += _maybe_svg(config, out_dir, "fig8", series, "parallel dephasing")
    return paths


# --- steady-state experiments ------------------------------------------------

def _run_fig4(config: ExperimentConfig, out_dir: str):
    _require_n(config, 2, "fig4")
    betas = np.linspace(0.1, 3.0, 50)
    fields = np.linspace(0.0, 0.9, 50)
    t_max = config.t_max

    def column(h_value):
        ergs = _steady_ergotropy_sweep(2, h_value, config.gamma, 0.0, 1.0, 0.0,
                                       betas, t_max)
        return [(beta, h_value, erg, steady_state_is_passive(beta, h_value),
                 erg <= STEADY_ERGOTROPY_EPS)
                for beta, erg in zip(betas, ergs)]

    rows = [row for col in _pmap(column, fields) for row in col]
    rows.sort(key=lambda r: (r[1], r[0]))
    header = ["beta", "h", "steady_ergotropy", "passive_predicted", "passive_observed"]
    paths = [_write_csv(os.path.join(out_dir, "fig4.csv"), header, rows)]
    if config.emit_svg:
        boundary = [beta_critical(h_value) for h_value in fields]
        paths += _maybe_svg(config, out_dir, "fig4",
                            [("beta_c(h)", boundary, fields)],
                            "steady-state passivity boundary",
                            ylabel="h", xlabel="beta")
    return paths


def _run_fig7(config: ExperimentConfig, out_dir: str):
    _require_n(config, 4, "fig7")
    model = ModelSpec(n_qubits=4, field_h=config.h)
    dark = dark_subspace(model)
    h_matrix = build_hamiltonian(model)
    betas = np.linspace(0.0, 5.0, 51)
    rows = [(beta, p_dark(beta, model, dark=dark, h_matrix=h_matrix),
             p_dark_derivative(beta, model, dark=dark)) for beta in betas]
    header = ["beta", "p_dark", "dp_dark_dbeta"]
    paths = [_write_csv(os.path.join(out_dir, "fig7.csv"), header, rows)]
    paths += _maybe_svg(config, out_dir, "fig7",
                        [("p_dark", betas, [r[1] for r in rows])],
                        "dark-subspace occupation of the thermal state",
                        ylabel="p_dark", xlabel="beta")
    return paths


def _run_appb_diss(config: ExperimentConfig, out_dir: str):
    sizes = (config.n_qubits,) if config.n_qubits is not None else (2, 4)
    betas = _betas_from(config)
    rows = []
    for n in sizes:
        sweeps = _pmap(lambda am, n=n: _steady_ergotropy_sweep(n, config.h, config.gamma,
                                                               0.0, am, 0.0, betas,
                                                               config.t_max),
                       INTERP_ALPHA_GRID)
        for am, ergs in zip(INTERP_ALPHA_GRID, sweeps):
            rows.extend((n, am, beta, erg) for beta, erg in zip(betas, ergs))
    header = ["n_qubits", "alpha_minus", "beta", "steady_ergotropy"]
    return [_write_csv(os.path.join(out_dir, "appB-diss.csv"), header, rows)]


def _run_appb_deph(config: ExperimentConfig, out_dir: str):
    sizes = (config.n_qubits,) if config.n_qubits is not None else (2, 4)
    betas = _betas_from(config)
    rows = []
    for n in sizes:
        sweeps = _pmap(lambda az, n=n: _steady_ergotropy_sweep(n, config.h, config.gamma,
                                                               1.0, 0.0, az, betas,
                                                               config.t_max),
                       INTERP_ALPHA_GRID)
        for az, ergs in zip(INTERP_ALPHA_GRID, sweeps):
            rows.extend((n, az, beta, erg) for beta, erg in zip(betas, ergs))
    header = ["n_qubits", "alpha_z", "beta", "steady_ergotropy"]
    return [_write_csv(os.path.join(out_dir, "appB-deph.csv"), header, rows)]


def _run_appb_channels(config: ExperimentConfig, out_dir: str):
    _require_n(config, 2, "appB-channels")
    # mixing slows relaxation by (1 - alpha); the long default grid lets
    # every mix settle
    grid = _grid_from(config, default_t_max=4000.0, default_dt=1.0)
    panels = (("parallel-hot", 0.0, 0.0, 0.2), ("parallel-cold", 0.0, 0.0, 5.0),
              ("collective-hot", 1.0, 1.0, 0.2))
    rows, series = [], []
    for panel, am, az, beta in panels:
        results = _pmap(lambda al, am=am, az=az, beta=beta: _run_trajectory(
            2, config.h, config.gamma, al, am, az, beta, grid),
            MIXING_ALPHA_GRID)
        for alpha, (traj, h_matrix) in zip(MIXING_ALPHA_GRID, results):
            new_rows, records = _trajectory_rows((panel, alpha, beta), traj, h_matrix,
                                                 with_spectrum=False)
            rows.extend(new_rows)
            if panel == "parallel-hot":
                series.append((f"alpha={alpha:g}", traj.times,
                               [r.ergotropy for r in records]))
    header = ["panel", "alpha", "beta", "time", "energy", "passive_energy", "ergotropy"]
    paths = [_write_csv(os.path.join(out_dir, "appB-channels.csv"), header, rows)]
    paths += _maybe_svg(config, out_dir, "appB-channels", series,
                        "channel mixing (parallel, beta=0.2)")
    return paths


# --- validation experiments ---------------------------------------------------

def _run_appc(config: ExperimentConfig, out_dir: str):
    _require_n(config, 2, "appC-check")
    grid = _grid_from(config)
    betas = _betas_from(config)
    rows = []
    for beta in betas:
        traj_par, h_matrix = _run_trajectory(2, config.h, config.gamma, 0.0, 0.0, 0.0,
                                             beta, grid)
        traj_col, _ = _run_trajectory(2, config.h, config.gamma, 0.0, 1.0, 0.0,
                                      beta, grid)
        traj_dep, _ = _run_trajectory(2, config.h, config.gamma, 1.0, 0.0, 0.0,
                                      beta, grid)
        init = TwoQubitBlockState.from_density(traj_par.states[0])
        dev_par = max(np.abs(two_qubit_parallel_block(init, config.gamma, t).to_density()
                             - traj_par.states[k]).max()
                      for k, t in enumerate(traj_par.times))
        dev_dep = max(np.abs(dephasing_two_qubit_block(init, config.gamma, t).to_density()
                             - traj_dep.states[k]).max()
                      for k, t in enumerate(traj_dep.times))
        dev_sc = 0.0
        for k, t in enumerate(traj_col.times):
            s_ref = traj_col.states[k][1, 1].real + traj_col.states[k][2, 2].real
            c_ref = traj_col.states[k][1, 2].real
            s_val, c_val = two_qubit_collective_sc(init, config.gamma, t)
            dev_sc = max(dev_sc, abs(s_val - s_ref), abs(c_val - c_ref))
        steady_vals, _ = hermitian_eig(traj_col.states[-1])
        dev_spec = float(np.abs(steady_vals - collective_steady_spectrum(beta, config.h)).max())
        rows.append(("parallel_block", beta, dev_par))
        rows.append(("collective_sc", beta, dev_sc))
        rows.append(("dephasing_block", beta, dev_dep))
        rows.append(("collective_steady_spectrum", beta, dev_spec))
    header = ["quantity", "beta", "max_abs_deviation"]
    return [_write_csv(os.path.join(out_dir, "appC-check.csv"), header, rows)]


def _run_appd(config: ExperimentConfig, out_dir: str):
    _require_n(config, 4, "appD")
    grid = _grid_from(config, default_t_max=250.0, default_dt=0.1)
    betas = _betas_from(config, (0.2, 5.0))
    rows, series = [], []
    for beta in betas:
        traj, h_matrix = _run_trajectory(4, config.h, config.gamma, 0.0, 0.0, 0.0,
                                         beta, grid)
        records = trajectory_records(traj, h_matrix)
        populations = energy_basis_populations(traj, h_matrix)
        crossings = eigenvalue_crossings(traj)
        marks = {}
        for t_cross, pair in crossings:
            k = int(round((t_cross - traj.times[0]) / grid.dt))
            marks.setdefault(k, []).append(f"{pair[0]}-{pair[1]}")
        for k, rec in enumerate(records):
            rows.append([beta, rec.time, rec.energy, rec.passive_energy, rec.ergotropy,
                         1 if k in marks else 0, ";".join(marks.get(k, []))]
                        + list(populations[k]) + list(rec.rho_spectrum))
        series.append((f"beta={beta:g}", traj.times, [r.ergotropy for r in records]))
    header = (["beta", "time", "energy", "passive_energy", "ergotropy", "crossing",
               "crossing_pair"] + [f"pop_{k}" for k in range(16)] + _spectrum_header(16))
    paths = [_write_csv(os.path.join(out_dir, "appD.csv"), header, rows)]
    paths += _maybe_svg(config, out_dir, "appD", series,
                        "four-qubit crossing analysis")
    return paths


def _run_fig9(config: ExperimentConfig, out_dir: str):
    table = compare_jc(default_jc_spec(kappa_over_g=JC_RATIOS[0]), JC_RATIOS)
    header = ["kappa_over_g", "max_pee_deviation"]
    paths = [_write_csv(os.path.join(out_dir, "fig9-jc.csv"), header, table)]
    paths += _maybe_svg(config, out_dir, "fig9-jc",
                        [("max deviation", [r for r, _ in table], [d for _, d in table])],
                        "lossy-cavity model vs adiabatic elimination",
                        ylabel="max |p_ee deviation|", xlabel="kappa/g")
    return paths


@dataclass(frozen=True)
class ExperimentInfo:
    name: str
    runner: Callable
    description: str


EXPERIMENTS = {
    info.name: info for info in (
        ExperimentInfo("fig2", _run_fig2,
                       "N=2 parallel dissipation: ergotropy activation and the 2(1-h) plateau"),
        ExperimentInfo("fig3", _run_fig3,
                       "N=2 collective dissipation: temperature-dependent steady ergotropy"),
        ExperimentInfo("fig4", _run_fig4,
                       "steady-state passivity phase diagram on a 50x50 (beta, h) grid"),
        ExperimentInfo("fig5", _run_fig5,
                       "N=4 parallel dissipation: transient ergotropy crossings"),
        ExperimentInfo("fig6", _run_fig6,
                       "N=4 collective dissipation: dark-subspace protected ergotropy"),
        ExperimentInfo("fig7", _run_fig7,
                       "dark-subspace thermal occupation p_dark versus beta (N=4)"),
        ExperimentInfo("fig8", _run_fig8,
                       "parallel dephasing for N=2 and N=4: no transient crossings"),
        ExperimentInfo("fig9-jc", _run_fig9,
                       "lossy-cavity two-level model versus its effective decay equation"),
        ExperimentInfo("appB-diss", _run_appb_diss,
                       "steady ergotropy versus dissipative collectivity alpha_minus"),
        ExperimentInfo("appB-deph", _run_appb_deph,
                       "steady ergotropy versus dephasing collectivity alpha_z"),
        ExperimentInfo("appB-channels", _run_appb_channels,
                       "dissipation/dephasing mixing: same plateau, slower settling"),
        ExperimentInfo("appC-check", _run_appc,
                       "engine versus closed-form sector solutions (max deviations)"),
        ExperimentInfo("appD", _run_appd,
                       "N=4 eigenvalue-crossing analysis with energy-basis populations"),
    )
}


def run_experiment(config: ExperimentConfig) -> list[str]:
    """Run one registered experiment; returns the written file paths."""
    if not config.experiment:
        raise ConfigError("no experiment selected")
    if config.experiment not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ConfigError(f"unknown experiment {config.experiment!r} (known: {known})")
    os.makedirs(config.output_dir, exist_ok=True)
    return EXPERIMENTS[config.experiment].runner(config, config.output_dir)
