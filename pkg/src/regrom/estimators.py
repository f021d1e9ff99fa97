"""scikit-learn style wrappers.

``POD`` is a transformer between full-order states and reduced
coefficients.  ``ReducedOrderModel`` fits a POD basis and the projected
operators from snapshots and predicts trajectories.  Following the
scikit-learn convention, samples are rows: a snapshot matrix has shape
``(n_snapshots, n_dofs)``.
"""
import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .fem1d import NewtonConfig
from .metrics import mass_norms
from .operators import project_operators
from .pod import SnapshotSet, lift, pod_from_snapshots, project
from .solvers import RomModel, TimeScheme, run_rom


def _mass_or_identity(mass, n):
    return sp.identity(n, format="csr") if mass is None else mass


class POD(TransformerMixin, BaseEstimator):
    """Mass-weighted proper orthogonal decomposition.

    Parameters
    ----------
    n_components : int
        Number of retained modes.
    center : bool
        Subtract the snapshot mean before the decomposition.
    mass : array or sparse matrix, optional
        Inner-product weight; Euclidean when omitted.

    Attributes
    ----------
    components_ : ndarray of shape (n_components, n_dofs)
    mean_ : ndarray of shape (n_dofs,)
    eigenvalues_ : ndarray
    basis_ : PodBasis
    """

    def __init__(self, n_components=10, center=True, mass=None):
        self.n_components = n_components
        self.center = center
        self.mass = mass

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=2)
        M = _mass_or_identity(self.mass, X.shape[1])
        snaps = SnapshotSet(X.T, np.arange(X.shape[0], dtype=float))
        self.basis_ = pod_from_snapshots(snaps, M, self.n_components,
                                         center=self.center)
        self.components_ = self.basis_.modes.T
        self.mean_ = self.basis_.centering
        self.eigenvalues_ = self.basis_.eigenvalues
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_array(X)
        M = _mass_or_identity(self.mass, X.shape[1])
        return project(self.basis_, X.T, M).T

    def inverse_transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_array(X)
        return lift(self.basis_, X.T).T


class ReducedOrderModel(BaseEstimator):
    """Reduced order model of the 1D Burgers equation.

    Parameters
    ----------
    model : {'grom', 'lrom', 'adlrom'}
    n_components : int
    nu, dt : float
        Viscosity and time step of the online integration.
    delta : float
        Filter radius (L-ROM and ADL-ROM).
    ad_method : {'lavrentiev', 'tikhonov', 'van_cittert'}
    mu : float
        Tikhonov/Lavrentiev parameter.
    order : int
        van Cittert iteration count.
    scheme : {'euler', 'bdf2'}
    center : bool
    newton_tol, newton_max_iter
        Newton stopping rule.

    ``fit`` takes the snapshot matrix and the :class:`FemSystem1D` it was
    computed on.
    """

    def __init__(self, model="adlrom", n_components=10, nu=1e-3, dt=None,
                 delta=0.5, ad_method="lavrentiev", mu=0.003, order=0,
                 scheme="euler", center=False, newton_tol=1e-10,
                 newton_max_iter=25):
        self.model = model
        self.n_components = n_components
        self.nu = nu
        self.dt = dt
        self.delta = delta
        self.ad_method = ad_method
        self.mu = mu
        self.order = order
        self.scheme = scheme
        self.center = center
        self.newton_tol = newton_tol
        self.newton_max_iter = newton_max_iter

    def _rom_model(self):
        if self.model == "grom":
            return RomModel.grom()
        if self.model == "lrom":
            return RomModel.lrom(self.delta)
        if self.model != "adlrom":
            raise ValueError(f"unknown model {self.model!r}")
        return RomModel.adlrom(self.delta, self.ad_method, mu=self.mu,
                               order=self.order)

    def fit(self, X, y=None, system=None):
        if system is None:
            raise ValueError("fit needs the FemSystem1D of the snapshots")
        X = check_array(X, ensure_min_samples=2)
        if X.shape[1] != system.n_dofs:
            raise ValueError(f"snapshots have {X.shape[1]} columns, system "
                             f"has {system.n_dofs} dofs")
        self._rom_model()  # validates parameters early
        snaps = SnapshotSet(X.T, np.arange(X.shape[0], dtype=float))
        self.basis_ = pod_from_snapshots(snaps, system.mass,
                                         self.n_components,
                                         center=self.center)
        self.operators_ = project_operators(self.basis_, system, self.nu,
                                            delta=self.delta)
        self.mass_ = system.mass
        self.n_features_in_ = X.shape[1]
        return self

    def predict_coefficients(self, u0, n_steps):
        check_is_fitted(self, "operators_")
        if self.dt is None:
            raise ValueError("set dt before predicting")
        c0 = project(self.basis_, np.asarray(u0, dtype=float), self.mass_)
        traj = run_rom(self._rom_model(), TimeScheme(self.scheme),
                       self.operators_, c0, self.dt, n_steps,
                       NewtonConfig(self.newton_tol, self.newton_max_iter))
        return traj

    def predict(self, u0, n_steps):
        """Lifted trajectory of shape ``(n_steps + 1, n_dofs)``."""
        traj = self.predict_coefficients(u0, n_steps)
        return lift(self.basis_, traj.coeffs).T

    def score(self, X, y=None):
        """Negative mean L2 error against a reference trajectory ``X``.

        ``X[0]`` is the initial state; the mean skips it.
        """
        X = check_array(X, ensure_min_samples=2)
        pred = self.predict(X[0], X.shape[0] - 1)
        err = mass_norms((X - pred).T, self.mass_)
        return -float(np.mean(err[1:]))
