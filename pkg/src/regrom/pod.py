"""Snapshot centering and mass-weighted POD by the method of snapshots."""
from dataclasses import dataclass

import numpy as np

from .exceptions import RankDeficiencyError, UndefinedEnergyError

RANK_RTOL = 1e-13


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    matrix: np.ndarray  # (n_dofs, n_snapshots)
    times: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        t = np.asarray(self.times, dtype=float)
        if m.ndim != 2 or m.shape[1] != t.size or t.size < 2:
            raise ValueError("need a 2D matrix with one column per time, "
                             "at least two columns")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "times", t)

    @property
    def n_snapshots(self):
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class PodBasis:
    """Centering vector, mass-orthonormal modes and the POD spectrum."""

    centering: np.ndarray
    modes: np.ndarray  # (n_dofs, r)
    eigenvalues: np.ndarray

    @property
    def r(self):
        return self.modes.shape[1]

    def truncate(self, r):
        if not 1 <= r <= self.r:
            raise ValueError(f"cannot truncate {self.r} modes to {r}")
        return PodBasis(self.centering, self.modes[:, :r], self.eigenvalues)


def center_snapshots(snaps):
    """Subtract the arithmetic mean of all columns.

    Returns
    -------
    centering : ndarray
    centered : SnapshotSet
    """
    centering = snaps.matrix.mean(axis=1)
    return centering, SnapshotSet(snaps.matrix - centering[:, None],
                                  snaps.times)


def _fix_signs(modes):
    idx = np.argmax(np.abs(modes), axis=0)
    signs = np.sign(modes[idx, np.arange(modes.shape[1])])
    signs[signs == 0] = 1.0
    return modes * signs


def compute_pod(centered, mass, r):
    """POD modes orthonormal in the ``mass`` inner product.

    Builds the Gram matrix ``K = X^T M X / n`` of the ``n`` snapshot
    columns, diagonalizes it and maps the leading ``r`` eigenvectors back
    to the full-order space.

    Raises
    ------
    RankDeficiencyError
        If ``r`` exceeds the number of eigenvalues above
        ``1e-13 * max eigenvalue``.
    """
    X = centered.matrix if isinstance(centered, SnapshotSet) else \
        np.asarray(centered, dtype=float)
    if r < 1:
        raise ValueError("r must be at least 1")
    n = X.shape[1]
    K = X.T @ (mass @ X) / n
    K = 0.5 * (K + K.T)
    lam, V = np.linalg.eigh(K)
    order = np.argsort(lam)[::-1]
    lam, V = lam[order], V[:, order]
    lam_max = lam[0] if lam.size else 0.0
    rank = int(np.sum(lam > RANK_RTOL * lam_max)) if lam_max > 0 else 0
    if r > rank:
        raise RankDeficiencyError(r, rank)
    modes = X @ V[:, :r] / np.sqrt(n * lam[:r])
    modes = _fix_signs(modes)
    return PodBasis(np.zeros(X.shape[0]), modes, np.clip(lam, 0.0, None))


def energy_fractions(basis_or_eigenvalues):
    """Cumulative energy fractions of the POD spectrum."""
    lam = getattr(basis_or_eigenvalues, "eigenvalues", basis_or_eigenvalues)
    lam = np.asarray(lam, dtype=float)
    total = lam.sum()
    if lam.size == 0 or not total > 0:
        raise UndefinedEnergyError("spectrum has no energy")
    out = np.minimum(np.cumsum(lam) / total, 1.0)
    out[-1] = 1.0
    return out


def pod_from_snapshots(snaps, mass, r, center=True):
    """Center (optionally) and compute the POD basis in one call."""
    if center:
        centering, centered = center_snapshots(snaps)
    else:
        centering, centered = np.zeros(snaps.matrix.shape[0]), snaps
    basis = compute_pod(centered, mass, r)
    return PodBasis(centering, basis.modes, basis.eigenvalues)


def project(basis, u, mass):
    """Reduced coefficients ``Phi^T M (u - U)``; ``u`` may hold columns."""
    u = np.asarray(u, dtype=float)
    if u.shape[0] != basis.modes.shape[0]:
        raise ValueError(f"expected leading dimension {basis.modes.shape[0]},"
                         f" got {u.shape[0]}")
    diff = u - (basis.centering if u.ndim == 1 else basis.centering[:, None])
    return basis.modes.T @ (mass @ diff)


def lift(basis, c):
    """Full-order field ``U + Phi c``; ``c`` may hold columns."""
    c = np.asarray(c, dtype=float)
    if c.shape[0] != basis.r:
        raise ValueError(f"expected {basis.r} coefficients, got {c.shape[0]}")
    out = basis.modes @ c
    return out + (basis.centering if c.ndim == 1 else basis.centering[:, None])
