"""Command line entry point: ``regrom {fom,pod,rom,compare,sweep}``."""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiment as ex
from . import io
from .config import parse_config, with_overrides
from .exceptions import RegromError
from .fem1d import assemble_fem_system, build_uniform_mesh
from .metrics import kinetic_energy_series, relative_reduction
from .pod import lift
from .solvers import RomTrajectory

log = logging.getLogger("regrom")


def _out(cfg):
    d = Path(cfg.output_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load_fom(cfg, out):
    """Snapshot data for the offline/online verbs."""
    if cfg.problem == "external_import":
        return ex.load_external(cfg)
    snaps = out / "snapshots.txt"
    if not snaps.exists():
        raise RegromError(f"{snaps} not found; run 'regrom fom' first")
    fom = ex.FomData(io.read_vector(out / "times.txt"), io.read_matrix(snaps),
                     io.read_coo(out / "mass.txt"),
                     io.read_coo(out / "stiffness.txt"))
    fom.system = assemble_fem_system(build_uniform_mesh(cfg.n_elements))
    if fom.system.n_dofs != fom.snapshots.shape[0]:
        raise RegromError("snapshot size does not match n_elements")
    if (out / "reference.txt").exists():
        fom.reference = io.read_matrix(out / "reference.txt")
    return fom


def cmd_fom(cfg):
    if cfg.problem != "burgers_builtin":
        raise RegromError("fom is only available for burgers_builtin")
    out = _out(cfg)
    fom = ex.run_fom(cfg)
    io.write_matrix(out / "snapshots.txt", fom.snapshots)
    io.write_matrix(out / "times.txt", fom.times)
    io.write_coo(out / "mass.txt", fom.mass)
    io.write_coo(out / "stiffness.txt", fom.stiffness)
    io.write_matrix(out / "mesh.txt", fom.system.mesh.node_coords)
    if fom.reference is not None:
        io.write_matrix(out / "reference.txt", fom.reference)
    print(f"fom: {fom.snapshots.shape[1]} snapshots of size "
          f"{fom.snapshots.shape[0]} -> {out}")
    return fom


def cmd_pod(cfg):
    out = _out(cfg)
    fom = _load_fom(cfg, out)
    basis = ex.compute_basis(cfg, fom)
    io.save_basis(out / "basis", basis)
    ortho, fractions = ex.pod_report(basis, fom.mass)
    lines = [f"r = {basis.r}",
             f"max |Phi^T M Phi - I| = {ortho:.3e}",
             f"energy fraction captured = {fractions[basis.r - 1]:.6f}"]
    (out / "pod_report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return basis


def _trajectory_paths(out, kind):
    return (out / f"{kind}_coeffs.txt", out / f"{kind}_times.txt",
            out / f"{kind}_newton.csv")


def cmd_rom(cfg):
    out = _out(cfg)
    fom = _load_fom(cfg, out)
    basis_dir = out / "basis"
    basis = io.load_basis(basis_dir) if basis_dir.exists() \
        else ex.compute_basis(cfg, fom)
    if basis.r != cfg.r:
        basis = basis.truncate(cfg.r)
    ops = ex.build_operators(cfg, basis, fom)
    io.save_operators(out / "operators", ops)
    c0 = ex.initial_coefficients(basis, fom)
    result = {}
    for kind in cfg.models:
        tr = ex.run_model(cfg, kind, ops, c0, t0=fom.times[0])
        coeffs, times, diag = _trajectory_paths(out, kind)
        io.write_matrix(coeffs, tr.coeffs)
        io.write_matrix(times, tr.times)
        io.write_series(diag, {"step": np.arange(len(tr.times)),
                               "time": tr.times,
                               "newton_iterations": tr.newton_iters})
        result[kind] = tr
        print(f"rom: {kind} {len(tr.times) - 1} steps, "
              f"max Newton iterations {int(tr.newton_iters.max())}")
    return result


def cmd_compare(cfg):
    out = _out(cfg)
    fom = _load_fom(cfg, out)
    basis = io.load_basis(out / "basis")
    trajs = {}
    for kind in cfg.models:
        coeffs, times, _ = _trajectory_paths(out, kind)
        if not coeffs.exists():
            raise RegromError(f"{coeffs} not found; run 'regrom rom' first")
        trajs[kind] = RomTrajectory(io.read_vector(times),
                                    io.read_matrix(coeffs))
    errors, summary = ex.evaluate(fom, basis, trajs)
    ref_energy = kinetic_energy_series(ex.reference_states(fom), fom.mass)
    for kind, err in errors.items():
        io.write_series(out / f"errors_{kind}.csv",
                        {"time": err.times, "abs_l2": err.abs_l2,
                         "rel_l2": err.rel_l2})
        energy = kinetic_energy_series(lift(basis, trajs[kind].coeffs),
                                       fom.mass)
        io.write_series(out / f"energy_{kind}.csv",
                        {"time": err.times, "rom": energy,
                         "reference": ref_energy})
    if "grom" in errors and "adlrom" in errors:
        io.write_series(out / "relative_reduction.csv",
                        {"time": errors["grom"].times,
                         "re_percent": relative_reduction(errors["grom"],
                                                          errors["adlrom"])})
    kinds = list(summary)
    io.atomic_write(out / "summary.csv", lambda p: io.write_series(p, {
        "model": kinds,
        "mean_abs_l2": [summary[k][0] for k in kinds],
        "mean_rel_l2": [summary[k][1] for k in kinds]}))
    for k in kinds:
        print(f"{k:7s} mean abs L2 = {summary[k][0]:.4e}  "
              f"mean rel L2 = {summary[k][1]:.4e}")
    return summary


def cmd_sweep(cfg):
    out = _out(cfg)
    if cfg.problem == "burgers_builtin" and (out / "snapshots.txt").exists():
        fom = _load_fom(cfg, out)
    else:
        fom = None
    rows = ex.sweep(cfg, fom)
    cols = list(zip(*rows))
    io.atomic_write(out / "sweep.csv", lambda p: io.write_series(p, {
        "delta": cols[0], "mu": cols[1], "model": cols[2],
        "mean_abs_l2": cols[3], "mean_rel_l2": cols[4]}))
    for d, m, kind, ea, _ in rows:
        print(f"{kind:7s} delta={d:<8g} mu={m:<8g} mean abs L2 = {ea:.4e}")
    return rows


COMMANDS = {"fom": cmd_fom, "pod": cmd_pod, "rom": cmd_rom,
            "compare": cmd_compare, "sweep": cmd_sweep}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="regrom",
        description="Leray-regularized reduced order models with "
                    "approximate deconvolution.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--model", help="comma separated: grom,lrom,adlrom")
        p.add_argument("--delta", type=float)
        p.add_argument("--mu", type=float)
        p.add_argument("--order-n", type=int, dest="order_n")
        p.add_argument("--r", type=int)
        p.add_argument("--method", dest="ad_method",
                       choices=("van_cittert", "tikhonov", "lavrentiev"))
        p.add_argument("--output-dir", dest="output_dir")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose
                        else logging.WARNING)
    try:
        cfg = parse_config(args.config)
        models = None if args.model is None else tuple(
            m.strip().lower() for m in args.model.split(",") if m.strip())
        cfg = with_overrides(cfg, models=models, delta=args.delta,
                             mu=args.mu, order_n=args.order_n, r=args.r,
                             ad_method=args.ad_method,
                             output_dir=args.output_dir)
        COMMANDS[args.command](cfg)
    except (RegromError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"regrom {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
