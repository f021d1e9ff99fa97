"""Offline/online pipeline shared by the command line and the test suite."""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import io
from .exceptions import RegromError
from .fem1d import (FemTrajectory, NewtonConfig, assemble_fem_system,
                    build_uniform_mesh, burgers_initial_condition,
                    interpolate_to_mesh, solve_burgers_fom)
from .metrics import (kinetic_energy_series, l2_error_series,
                      relative_reduction, time_average_errors)
from .operators import from_reduced, project_operators
from .pod import SnapshotSet, energy_fractions, pod_from_snapshots, project
from .solvers import RomModel, TimeScheme, run_rom

log = logging.getLogger(__name__)


@dataclass
class FomData:
    """Snapshots plus the matrices the online stage needs."""

    times: np.ndarray
    snapshots: np.ndarray
    mass: object
    stiffness: object
    system: object = None
    reference: np.ndarray = None  # on the snapshot grid


@dataclass
class ExperimentResult:
    basis: object
    ops: object
    trajectories: dict
    errors: dict
    summary: dict = field(default_factory=dict)
    fom: FomData = None


def newton_config(cfg):
    return NewtonConfig(cfg.newton_tol, cfg.newton_max_iter)


def time_scheme(cfg):
    return TimeScheme(cfg.scheme, cfg.bootstrap)


def make_model(cfg, kind, delta=None, mu=None):
    delta = cfg.delta if delta is None else delta
    mu = cfg.mu if mu is None else mu
    if kind == "grom":
        return RomModel.grom()
    if kind == "lrom":
        return RomModel.lrom(delta, lagged=cfg.lagged)
    return RomModel.adlrom(delta, cfg.ad_method, mu=mu, order=cfg.order_n,
                           lagged=cfg.lagged)


def run_fom(cfg):
    """Full-order Burgers run (and the finer reference run, if requested)."""
    mesh = build_uniform_mesh(cfg.n_elements)
    system = assemble_fem_system(mesh)
    if cfg.initial_condition == "zero":
        ic = np.zeros(system.n_dofs)
    else:
        ic = burgers_initial_condition(mesh)
    dt = cfg.time_step
    traj = solve_burgers_fom(system, ic, cfg.nu, dt, cfg.n_steps,
                             newton_config(cfg))
    reference = None
    if cfg.reference_n_elements:
        fine_mesh = build_uniform_mesh(cfg.reference_n_elements)
        fine = assemble_fem_system(fine_mesh)
        fine_ic = (np.zeros(fine.n_dofs) if cfg.initial_condition == "zero"
                   else burgers_initial_condition(fine_mesh))
        ref = solve_burgers_fom(fine, fine_ic, cfg.nu, dt, cfg.n_steps,
                                newton_config(cfg))
        reference = interpolate_to_mesh(fine_mesh, ref.states, mesh)
    return FomData(traj.times, traj.states, system.mass, system.stiffness,
                   system, reference)


def load_external(cfg):
    """Snapshots and full-order matrices supplied by an external tool."""
    if cfg.snapshot_file is None or cfg.mass_file is None:
        raise RegromError("external_import needs snapshot_file and mass_file "
                          "for the initial condition and the lifting")
    snaps = io.read_matrix(cfg.snapshot_file)
    mass = io.read_coo(cfg.mass_file)
    stiff = io.read_coo(cfg.stiffness_file) if cfg.stiffness_file else None
    if cfg.times_file:
        times = io.read_vector(cfg.times_file)
    else:
        times = cfg.dt * np.arange(snaps.shape[1])
    reference = io.read_matrix(cfg.reference_file) \
        if cfg.reference_file else None
    return FomData(times, snaps, mass, stiff, None, reference)


def compute_basis(cfg, fom):
    return pod_from_snapshots(SnapshotSet(fom.snapshots, fom.times),
                              fom.mass, cfg.r, center=cfg.center)


def build_operators(cfg, basis, fom):
    """Reduced operators, projected for Burgers or built from files for
    external data."""
    if cfg.problem == "burgers_builtin":
        return project_operators(basis, fom.system, cfg.nu, delta=cfg.delta)
    if cfg.operators_dir:
        return io.load_operators(cfg.operators_dir)
    if cfg.tensor_file is None or fom.stiffness is None:
        raise ValueError("external_import needs operators_dir, or "
                         "stiffness_file plus tensor_file")
    Phi, U = basis.modes, basis.centering
    M, S = fom.mass, fom.stiffness

    def opt(path):
        return None if path is None else io.read_matrix(path).squeeze()

    left, right = opt(cfg.center_left_file), opt(cfg.center_right_file)
    cc = opt(cfg.center_convection_file)
    B = io.read_matrix(cfg.tensor_file)
    if B.shape != (basis.r,) * 3:
        raise ValueError(f"tensor shape {B.shape} does not match r="
                         f"{basis.r}")
    return from_reduced(Phi.T @ (M @ Phi), Phi.T @ (S @ Phi), B, cfg.nu,
                        conv_center_left=left, conv_center_right=right,
                        center_convection=np.atleast_1d(cc)
                        if cc is not None else None,
                        stiff_center=Phi.T @ (S @ U),
                        mass_center=Phi.T @ (M @ U), delta=cfg.delta)


def initial_coefficients(basis, fom):
    return project(basis, fom.snapshots[:, 0], fom.mass)


def run_model(cfg, kind, ops, c0, t0=0.0, delta=None, mu=None):
    model = make_model(cfg, kind, delta, mu)
    scheme = time_scheme(cfg)
    c_minus1 = c0 if (scheme.name == "bdf2"
                      and scheme.bootstrap == "given_history") else None
    return run_rom(model, scheme, ops, c0, cfg.time_step, cfg.n_steps,
                   newton_config(cfg), c_minus1=c_minus1, t0=t0)


def reference_states(fom):
    return fom.snapshots if fom.reference is None else fom.reference


def evaluate(fom, basis, trajectories):
    ref = FemTrajectory(fom.times, reference_states(fom))
    errors = {k: l2_error_series(ref, tr, basis, fom.mass)
              for k, tr in trajectories.items()}
    summary = {k: time_average_errors(e) for k, e in errors.items()}
    return errors, summary


def run_experiment(cfg, fom=None):
    """Run every configured model end to end and summarize the errors."""
    if fom is None:
        fom = run_fom(cfg) if cfg.problem == "burgers_builtin" \
            else load_external(cfg)
    basis = compute_basis(cfg, fom)
    ops = build_operators(cfg, basis, fom)
    c0 = initial_coefficients(basis, fom)
    trajs = {k: run_model(cfg, k, ops, c0, t0=fom.times[0])
             for k in cfg.models}
    errors, summary = evaluate(fom, basis, trajs)
    return ExperimentResult(basis, ops, trajs, errors, summary, fom)


def _threads():
    try:
        return max(1, int(os.environ.get("REGROM_THREADS", "1")))
    except ValueError:
        return 1


def sweep(cfg, fom=None):
    """Mean errors of the L-ROM and ADL-ROM over a (delta, mu) grid.

    Returns rows ``(delta, mu, model, mean_abs, mean_rel)``; the G-ROM,
    which depends on neither parameter, is reported once with nan
    parameters.  ``REGROM_THREADS`` caps the number of concurrent points.
    """
    deltas = cfg.sweep_delta or (cfg.delta,)
    mus = cfg.sweep_mu or (cfg.mu,)
    if fom is None:
        fom = run_fom(cfg) if cfg.problem == "burgers_builtin" \
            else load_external(cfg)
    basis = compute_basis(cfg, fom)
    ops = build_operators(cfg, basis, fom)
    c0 = initial_coefficients(basis, fom)
    t0 = fom.times[0]

    tasks = []
    if "grom" in cfg.models:
        tasks.append(("grom", np.nan, np.nan))
    for d in deltas:
        if "lrom" in cfg.models:
            tasks.append(("lrom", d, np.nan))
        if "adlrom" in cfg.models:
            tasks.extend(("adlrom", d, m) for m in mus)

    def point(task):
        kind, d, m = task
        tr = run_model(cfg, kind, ops, c0, t0=t0,
                       delta=None if np.isnan(d) else d,
                       mu=None if np.isnan(m) else m)
        _, summary = evaluate(fom, basis, {kind: tr})
        return (d, m, kind) + summary[kind]

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(point, tasks))


def pod_report(basis, mass):
    gram = basis.modes.T @ (mass @ basis.modes)
    ortho = float(np.max(np.abs(gram - np.eye(basis.r))))
    return ortho, energy_fractions(basis)
