"""Error and energy diagnostics against full-order references."""
from dataclasses import dataclass

import numpy as np

from .pod import lift

UNDEFINED_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class ErrorSeries:
    times: np.ndarray
    abs_l2: np.ndarray
    rel_l2: np.ndarray  # nan where the reference norm vanishes


def mass_norms(states, mass):
    """Column-wise ``sqrt(v^T M v)``."""
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        return float(np.sqrt(max(states @ (mass @ states), 0.0)))
    sq = np.einsum("ij,ij->j", states, mass @ states)
    return np.sqrt(np.clip(sq, 0.0, None))


def _states(traj):
    return getattr(traj, "states", traj)


def l2_error_series(ref, rom, basis, mass, ref_times=None):
    """Absolute and relative mass-norm errors of a lifted ROM trajectory.

    Parameters
    ----------
    ref : FemTrajectory or ndarray
        Reference states, one column per instant.
    rom : RomTrajectory
    basis : PodBasis
    mass : sparse or dense matrix
    ref_times : ndarray, optional
        Needed when ``ref`` is a bare array.
    """
    times = getattr(ref, "times", ref_times)
    ref_states = _states(ref)
    if times is None or len(times) != len(rom.times) or not np.allclose(
            times, rom.times, rtol=0, atol=1e-12):
        raise ValueError("reference and ROM time grids differ")
    diff = ref_states - lift(basis, rom.coeffs)
    abs_l2 = mass_norms(diff, mass)
    ref_norm = mass_norms(ref_states, mass)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(ref_norm > 0, abs_l2 / ref_norm, np.nan)
    return ErrorSeries(np.asarray(rom.times, dtype=float), abs_l2, rel)


def relative_reduction(g_err, adl_err):
    """Percentage change ``-100 (E_G - E_ADL) / E_G``; negative favors ADL.

    Entries with ``E_G < 1e-14`` are nan.
    """
    eg = np.asarray(getattr(g_err, "abs_l2", g_err), dtype=float)
    ea = np.asarray(getattr(adl_err, "abs_l2", adl_err), dtype=float)
    if eg.shape != ea.shape:
        raise ValueError("error series lengths differ")
    out = np.full(eg.shape, np.nan)
    ok = eg >= UNDEFINED_TOL
    out[ok] = -100.0 * (eg[ok] - ea[ok]) / eg[ok]
    return out


def kinetic_energy_series(states, mass):
    """``0.5 * ||u(t)||^2`` in the mass norm, per column."""
    return 0.5 * mass_norms(_states(states), mass) ** 2


def time_average_errors(series):
    """Means of the absolute and relative errors over instants 1..M.

    The initial instant is excluded.
    """
    if len(series.abs_l2) < 2:
        raise ValueError("need at least one instant after the initial one")
    rel = series.rel_l2[1:]
    mean_rel = float(np.nanmean(rel)) if np.any(np.isfinite(rel)) \
        else float("nan")
    return float(np.mean(series.abs_l2[1:])), mean_rel
