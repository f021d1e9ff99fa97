"""Piecewise-linear finite elements for the 1D viscous Burgers equation.

Full-order side of the pipeline: mesh, mass/stiffness assembly, the
nonlinear convection vector with its Jacobian, and an implicit Euler
time stepper with Newton iterations.  Homogeneous Dirichlet conditions
are imposed at both ends of [0, 1].
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import SolverFailure

# 3-point Gauss-Legendre on the reference interval [0, 1]
_GAUSS_PTS = 0.5 + 0.5 * np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_GAUSS_WTS = 0.5 * np.array([5.0, 8.0, 5.0]) / 9.0


@dataclass(frozen=True)
class NewtonConfig:
    """Stopping rule for Newton iterations.

    Iteration stops once the Euclidean norm of the residual is at most
    ``abs_tol``; more than ``max_iter`` updates raise ``SolverFailure``.
    """

    abs_tol: float = 1e-10
    max_iter: int = 25

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True, eq=False)
class Mesh1D:
    node_coords: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.node_coords, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if np.any(np.diff(x) <= 0):
            raise ValueError("node coordinates must be strictly increasing")
        if x[0] != 0.0 or x[-1] != 1.0:
            raise ValueError("mesh must span [0, 1]")
        x.setflags(write=False)
        object.__setattr__(self, "node_coords", x)

    @property
    def n_elements(self):
        return self.node_coords.size - 1

    @property
    def n_nodes(self):
        return self.node_coords.size

    @property
    def element_sizes(self):
        return np.diff(self.node_coords)


@dataclass(frozen=True, eq=False)
class FemSystem1D:
    """Assembled P1 system on a 1D mesh.

    ``mass`` and ``stiffness`` are CSR matrices over all nodes, boundary
    included; ``dirichlet_dofs`` lists the constrained node indices.
    """

    mesh: Mesh1D
    mass: sp.csr_matrix
    stiffness: sp.csr_matrix
    dirichlet_dofs: np.ndarray = field(
        default_factory=lambda: np.array([], dtype=int))

    @property
    def n_dofs(self):
        return self.mesh.n_nodes

    @property
    def interior_dofs(self):
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.dirichlet_dofs] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True, eq=False)
class FemTrajectory:
    times: np.ndarray
    states: np.ndarray  # (n_dofs, n_times)
    newton_iters: np.ndarray = None

    def __post_init__(self):
        if self.states.shape[1] != len(self.times):
            raise ValueError("one state per time instant required")


def build_uniform_mesh(n_elements):
    """Uniform partition of [0, 1] into ``n_elements`` intervals."""
    if int(n_elements) != n_elements or n_elements < 2:
        raise ValueError(f"n_elements must be an integer >= 2, "
                         f"got {n_elements!r}")
    n = int(n_elements)
    x = np.arange(n + 1, dtype=float) / n
    x[-1] = 1.0
    return Mesh1D(x)


def assemble_fem_system(mesh):
    """Assemble exact P1 mass and stiffness matrices.

    Element matrices are ``h/6 [[2, 1], [1, 2]]`` and
    ``1/h [[1, -1], [-1, 1]]``.
    """
    h = mesh.element_sizes
    n = mesh.n_nodes
    i = np.arange(mesh.n_elements)
    rows = np.concatenate([i, i, i + 1, i + 1])
    cols = np.concatenate([i, i + 1, i, i + 1])
    m_vals = np.concatenate([h / 3, h / 6, h / 6, h / 3])
    k_vals = np.concatenate([1 / h, -1 / h, -1 / h, 1 / h])
    mass = sp.coo_matrix((m_vals, (rows, cols)), shape=(n, n)).tocsr()
    stiff = sp.coo_matrix((k_vals, (rows, cols)), shape=(n, n)).tocsr()
    return FemSystem1D(mesh, mass, stiff, np.array([0, n - 1]))


def burgers_initial_condition(mesh):
    """Nodal interpolant of the step profile: 1 on (0, 0.5), 0 elsewhere."""
    x = mesh.node_coords
    return np.where((x > 0.0) & (x < 0.5), 1.0, 0.0)


def quadrature_data(mesh):
    """Physical Gauss points with their weights and P1 shape values.

    Returns ``(weights, shape)`` with ``weights`` of shape ``(E, 3)`` and
    ``shape`` of shape ``(3, 2)`` giving the left/right hat values at the
    reference points.
    """
    h = mesh.element_sizes
    weights = h[:, None] * _GAUSS_WTS[None, :]
    shape = np.column_stack([1.0 - _GAUSS_PTS, _GAUSS_PTS])
    return weights, shape


def element_values(mesh, nodal):
    """Values at Gauss points and element slopes of nodal fields.

    ``nodal`` has shape ``(n_nodes,)`` or ``(n_nodes, k)``.  Returns
    ``(vals, slopes)`` shaped ``(E, 3[, k])`` and ``(E[, k])``.
    """
    nodal = np.asarray(nodal, dtype=float)
    _, shape = quadrature_data(mesh)
    left, right = nodal[:-1], nodal[1:]
    h = mesh.element_sizes
    if nodal.ndim == 1:
        vals = left[:, None] * shape[:, 0] + right[:, None] * shape[:, 1]
        slopes = (right - left) / h
    else:
        vals = (left[:, None, :] * shape[None, :, 0, None]
                + right[:, None, :] * shape[None, :, 1, None])
        slopes = (right - left) / h[:, None]
    return vals, slopes


def trilinear_form(mesh, test, convecting, convected):
    """Tensor ``T[i, m, n] = (test_i, convecting_m * d/dx convected_n)``.

    All three arguments are nodal matrices ``(n_nodes, k)``; integration is
    exact for P1 fields (3-point Gauss).
    """
    w, _ = quadrature_data(mesh)
    a, _ = element_values(mesh, np.atleast_2d(np.asarray(test).T).T)
    b, _ = element_values(mesh, np.atleast_2d(np.asarray(convecting).T).T)
    _, dc = element_values(mesh, np.atleast_2d(np.asarray(convected).T).T)
    return np.einsum("eq,eqi,eqm,en->imn", w, a, b, dc, optimize=True)


def _check_dim(sys, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (sys.n_dofs,):
        raise ValueError(f"expected vector of length {sys.n_dofs}, "
                         f"got shape {u.shape}")
    return u


def assemble_burgers_nonlinearity(sys, u):
    """Load vector ``N_i(u) = (u du/dx, phi_i)``."""
    u = _check_dim(sys, u)
    w, shape = quadrature_data(sys.mesh)
    vals, slopes = element_values(sys.mesh, u)
    # local contributions (E, 2)
    loc = np.einsum("eq,eq,qa->ea", w, vals * slopes[:, None], shape)
    out = np.zeros(sys.n_dofs)
    np.add.at(out, np.arange(sys.mesh.n_elements), loc[:, 0])
    np.add.at(out, np.arange(1, sys.n_dofs), loc[:, 1])
    return out


def burgers_nonlinearity_jacobian(sys, u):
    """Sparse Jacobian of :func:`assemble_burgers_nonlinearity`.

    ``J_ij = (phi_j du/dx + u dphi_j/dx, phi_i)``.
    """
    u = _check_dim(sys, u)
    w, shape = quadrature_data(sys.mesh)
    h = sys.mesh.element_sizes
    vals, slopes = element_values(sys.mesh, u)
    dshape = np.column_stack([-1.0 / h, 1.0 / h])  # (E, 2)
    # loc[e, a, b] = sum_q w (shape_b slope + u dshape_b) shape_a
    loc = (np.einsum("eq,qa,qb,e->eab", w, shape, shape, slopes)
           + np.einsum("eq,qa,eq,eb->eab", w, shape, vals, dshape))
    e = np.arange(sys.mesh.n_elements)
    nodes = np.column_stack([e, e + 1])
    rows = np.repeat(nodes, 2, axis=1).ravel()
    cols = np.tile(nodes, (1, 2)).ravel()
    return sp.coo_matrix((loc.ravel(), (rows, cols)),
                         shape=(sys.n_dofs, sys.n_dofs)).tocsr()


def burgers_step_residual(sys, u_new, u_old, nu, dt):
    """Implicit Euler residual ``M (u_new - u_old)/dt + nu S u_new + N(u_new)``
    over all nodes (boundary rows included)."""
    return (sys.mass @ (u_new - u_old) / dt + nu * (sys.stiffness @ u_new)
            + assemble_burgers_nonlinearity(sys, u_new))


def burgers_step_jacobian(sys, u_new, nu, dt):
    return (sys.mass / dt + nu * sys.stiffness
            + burgers_nonlinearity_jacobian(sys, u_new)).tocsr()


def solve_burgers_fom(sys, ic, nu, dt, n_steps, newton=None):
    """Integrate Burgers with implicit Euler and Newton's method.

    Parameters
    ----------
    sys : FemSystem1D
    ic : ndarray
        Initial nodal values; boundary entries must be zero.
    nu, dt : float
        Viscosity and time step, both positive.
    n_steps : int
        Number of steps; the trajectory holds ``n_steps + 1`` states.
    newton : NewtonConfig, optional

    Returns
    -------
    FemTrajectory

    Raises
    ------
    SolverFailure
        If Newton does not reach ``newton.abs_tol`` on some step.
    """
    if not nu > 0 or not dt > 0:
        raise ValueError("nu and dt must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    newton = newton or NewtonConfig()
    u = _check_dim(sys, ic).copy()
    bd = sys.dirichlet_dofs
    if np.any(u[bd] != 0.0):
        raise ValueError("initial condition must vanish at Dirichlet nodes")
    inner = sys.interior_dofs
    states = np.empty((sys.n_dofs, n_steps + 1))
    states[:, 0] = u
    iters = np.zeros(n_steps + 1, dtype=int)
    for step in range(1, n_steps + 1):
        u_old = u
        u = u_old.copy()
        for k in range(newton.max_iter + 1):
            res = burgers_step_residual(sys, u, u_old, nu, dt)[inner]
            rnorm = np.linalg.norm(res)
            if rnorm <= newton.abs_tol:
                break
            if k == newton.max_iter:
                raise SolverFailure(step, rnorm, u)
            jac = burgers_step_jacobian(sys, u, nu, dt)[inner][:, inner]
            u[inner] -= spla.spsolve(jac.tocsc(), res)
        states[:, step] = u
        iters[step] = k
    times = dt * np.arange(n_steps + 1)
    return FemTrajectory(times, states, iters)


def interpolate_to_mesh(fine_mesh, values, coarse_mesh):
    """Evaluate P1 nodal fields of ``fine_mesh`` at ``coarse_mesh`` nodes."""
    values = np.asarray(values, dtype=float)
    x = coarse_mesh.node_coords
    xf = fine_mesh.node_coords
    if values.ndim == 1:
        return np.interp(x, xf, values)
    return np.column_stack([np.interp(x, xf, values[:, j])
                            for j in range(values.shape[1])])
