"""Galerkin projection of the Burgers/NSE operators onto a POD basis."""
from dataclasses import dataclass, fields

import numpy as np

from .fem1d import trilinear_form


@dataclass(frozen=True, eq=False)
class RomOperators:
    """Reduced operators for ``c' = b + A c + c^T B c``.

    ``conv_center_left[i, m] = (phi_i, U d/dx phi_m)`` and
    ``conv_center_right[i, m] = (phi_i, phi_m d/dx U)`` are stored as plain
    pairings, so ``A_lin = -left - right - nu * stiff_r``.  ``B[i, m, n] =
    -(phi_i, phi_m d/dx phi_n)``.  ``g`` is the filter offset and
    ``stiff_center[i] = (d phi_i, d U)``; both vanish for zero centering.
    """

    mass_r: np.ndarray
    stiff_r: np.ndarray
    b: np.ndarray
    A_lin: np.ndarray
    conv_center_left: np.ndarray
    conv_center_right: np.ndarray
    B: np.ndarray
    g: np.ndarray
    nu: float
    stiff_center: np.ndarray = None
    mass_center: np.ndarray = None

    def __post_init__(self):
        r = self.mass_r.shape[0]
        if self.stiff_center is None:
            object.__setattr__(self, "stiff_center", np.zeros(r))
        if self.mass_center is None:
            object.__setattr__(self, "mass_center", np.zeros(r))
        for name, shape in [("stiff_r", (r, r)), ("b", (r,)),
                            ("A_lin", (r, r)), ("conv_center_left", (r, r)),
                            ("conv_center_right", (r, r)), ("B", (r, r, r)),
                            ("g", (r,)), ("stiff_center", (r,)),
                            ("mass_center", (r,))]:
            if np.shape(getattr(self, name)) != shape:
                raise ValueError(f"{name} must have shape {shape}, "
                                 f"got {np.shape(getattr(self, name))}")

    @property
    def r(self):
        return self.mass_r.shape[0]

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def filter_offset(mass_center, stiff_center, delta):
    return -mass_center - delta ** 2 * stiff_center


def compute_filter_offset(basis, mass, stiffness, delta):
    """``g_i = -(phi_i, U) - delta^2 (d phi_i, d U)``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    U = basis.centering
    return filter_offset(basis.modes.T @ (mass @ U),
                         basis.modes.T @ (stiffness @ U), delta)


def from_reduced(mass_r, stiff_r, B, nu, forcing_r=None,
                 conv_center_left=None, conv_center_right=None,
                 center_convection=None, stiff_center=None,
                 mass_center=None, delta=0.0):
    """Build :class:`RomOperators` from already-reduced pieces.

    Used by the external-import path, where the full-order model is not
    available and the convection tensor comes precomputed.  Missing
    centering terms default to zero.
    """
    mass_r = np.asarray(mass_r, dtype=float)
    r = mass_r.shape[0]
    z, zz = np.zeros(r), np.zeros((r, r))

    def _or(v, d):
        return d if v is None else np.asarray(v, dtype=float)

    stiff_r = np.asarray(stiff_r, dtype=float)
    left = _or(conv_center_left, zz)
    right = _or(conv_center_right, zz)
    s_c = _or(stiff_center, z)
    m_c = _or(mass_center, z)
    b = _or(forcing_r, z) - _or(center_convection, z) - nu * s_c
    return RomOperators(
        mass_r=mass_r, stiff_r=stiff_r, b=b,
        A_lin=-left - right - nu * stiff_r,
        conv_center_left=left, conv_center_right=right,
        B=np.asarray(B, dtype=float), g=filter_offset(m_c, s_c, delta),
        nu=float(nu), stiff_center=s_c, mass_center=m_c)


def project_operators(basis, sys, nu, forcing=None, delta=0.0):
    """Project the 1D Burgers operators of ``sys`` onto ``basis``.

    Parameters
    ----------
    basis : PodBasis
    sys : FemSystem1D
    nu : float
        Diffusion coefficient.
    forcing : ndarray, optional
        Nodal forcing, interpolated as a P1 field; zero by default.
    delta : float
        Filter radius used for the offset ``g``.
    """
    Phi = basis.modes
    U = basis.centering
    if Phi.shape[0] != sys.n_dofs:
        raise ValueError(f"basis has {Phi.shape[0]} rows but the system has "
                         f"{sys.n_dofs} dofs")
    M, S = sys.mass, sys.stiffness
    mass_r = Phi.T @ (M @ Phi)
    stiff_r = Phi.T @ (S @ Phi)
    stiff_r = 0.5 * (stiff_r + stiff_r.T)
    T = trilinear_form(sys.mesh, Phi, Phi, Phi)
    forcing_r = None if forcing is None else Phi.T @ (M @ forcing)
    if np.any(U != 0.0):
        left = trilinear_form(sys.mesh, Phi, U, Phi)[:, 0, :]
        right = trilinear_form(sys.mesh, Phi, Phi, U)[:, :, 0]
        cc = trilinear_form(sys.mesh, Phi, U, U)[:, 0, 0]
        s_c, m_c = Phi.T @ (S @ U), Phi.T @ (M @ U)
    else:
        left = right = cc = s_c = m_c = None
    return from_reduced(mass_r, stiff_r, -T, nu, forcing_r=forcing_r,
                        conv_center_left=left, conv_center_right=right,
                        center_convection=cc, stiff_center=s_c,
                        mass_center=m_c, delta=delta)


def with_filter_radius(ops, delta):
    """Copy of ``ops`` with ``g`` recomputed for filter radius ``delta``."""
    d = ops.as_dict()
    d["g"] = filter_offset(ops.mass_center, ops.stiff_center, delta)
    return RomOperators(**d)


def quadratic_term(B, d, c):
    """``out_i = sum_{m,n} B[i,m,n] d_m c_n``."""
    return np.einsum("imn,m,n->i", B, d, c)


def grom_rhs(ops, c):
    """G-ROM right-hand side ``b + A c + c^T B c``."""
    c = np.asarray(c, dtype=float)
    return ops.b + ops.A_lin @ c + quadratic_term(ops.B, c, c)
