"""Online time integration of the reduced models."""
from dataclasses import dataclass, field

import numpy as np

from .exceptions import SolverFailure
from .fem1d import NewtonConfig
from .filters import AdConfig, Deconvolution, FilterConfig, ReducedFilter

MODEL_KINDS = ("grom", "lrom", "adlrom")
SCHEMES = ("euler", "bdf2")


@dataclass(frozen=True)
class RomModel:
    """Which velocity convects in the nonlinear term.

    ``grom`` uses ``c`` itself, ``lrom`` the filtered coefficients and
    ``adlrom`` the deconvolved filtered coefficients.
    """

    kind: str = "grom"
    filter: FilterConfig = FilterConfig()
    ad: AdConfig = None
    # lagged=True evaluates the convecting field at the previous step
    lagged: bool = False
    filter_offset: bool = True

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model {self.kind!r}; "
                             f"expected one of {MODEL_KINDS}")
        if self.kind == "adlrom":
            if self.ad is None:
                raise ValueError("adlrom requires an AdConfig")
            if self.ad.filter != self.filter:
                object.__setattr__(self, "filter", self.ad.filter)

    @classmethod
    def grom(cls):
        return cls("grom")

    @classmethod
    def lrom(cls, delta, **kw):
        return cls("lrom", FilterConfig(delta), **kw)

    @classmethod
    def adlrom(cls, delta, method="lavrentiev", mu=0.0, order=0, **kw):
        f = FilterConfig(delta)
        return cls("adlrom", f, AdConfig(method, mu=mu, order=order,
                                          filter=f), **kw)


@dataclass(frozen=True)
class TimeScheme:
    name: str = "euler"
    bootstrap: str = "first_step_euler"

    def __post_init__(self):
        if self.name not in SCHEMES:
            raise ValueError(f"unknown scheme {self.name!r}")
        if self.bootstrap not in ("first_step_euler", "given_history"):
            raise ValueError(f"unknown BDF2 bootstrap {self.bootstrap!r}")


@dataclass(frozen=True, eq=False)
class RomTrajectory:
    times: np.ndarray
    coeffs: np.ndarray  # (r, n_times)
    newton_iters: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.coeffs.shape[1] != len(self.times):
            raise ValueError("one coefficient vector per time required")


class ConvectingField:
    """Affine map from ``c`` to the convecting coefficients.

    Evaluation performs the filter solve (and the deconvolution solve for
    the ADL-ROM) afresh; ``jacobian`` is the constant linear part.
    """

    def __init__(self, ops, model):
        self.kind = model.kind
        r = ops.r
        if self.kind == "grom":
            self.jacobian = np.eye(r)
            return
        self.filter = ReducedFilter(ops, model.filter,
                                    use_offset=model.filter_offset)
        P = self.filter.linear_part()
        if self.kind == "adlrom":
            self.deconv = Deconvolution(ops, model.ad)
            P = self.deconv.linear_part() @ P
        self.jacobian = P

    def __call__(self, c):
        if self.kind == "grom":
            return c
        c_bar = self.filter(c)
        if self.kind == "lrom":
            return c_bar
        return self.deconv(c_bar)


def assemble_convection_matrix(ops, d):
    """Matrix ``C(d)`` with ``C(d) @ c = sum_{m,n} B[:, m, n] d_m c_n``."""
    d = np.asarray(d, dtype=float)
    if d.shape != (ops.r,):
        raise ValueError(f"expected {ops.r} coefficients, got {d.shape}")
    return np.einsum("imn,m->in", ops.B, d)


def _rhs(ops, c, d):
    """Right-hand side ``F(c)`` with convecting coefficients ``d``."""
    return (ops.b - ops.nu * (ops.stiff_r @ c) - ops.conv_center_left @ c
            - ops.conv_center_right @ d + assemble_convection_matrix(ops, d) @ c)


def _rhs_jacobian(ops, c, d, P):
    Q = np.einsum("imn,n->im", ops.B, c)
    return (-ops.nu * ops.stiff_r - ops.conv_center_left
            - ops.conv_center_right @ P + assemble_convection_matrix(ops, d)
            + Q @ P)


def _scheme_weights(scheme_name, c_n, c_nm1):
    """Return ``(history, theta)`` for the residual
    ``M (c - history) / dt - theta F(c)``."""
    if scheme_name == "euler":
        return c_n, 1.0
    return (4.0 * c_n - c_nm1) / 3.0, 2.0 / 3.0


class StepProblem:
    """Residual and Jacobian of one implicit step."""

    def __init__(self, ops, model, scheme_name, c_n, c_nm1, dt,
                 conv=None):
        self.ops = ops
        self.conv = conv or ConvectingField(ops, model)
        self.history, self.theta = _scheme_weights(scheme_name, c_n, c_nm1)
        self.dt = dt
        self.lagged = model.lagged
        self._d_lag = self.conv(c_n) if model.lagged else None

    def convecting(self, c):
        return self._d_lag if self.lagged else self.conv(c)

    def residual(self, c):
        d = self.convecting(c)
        return (self.ops.mass_r @ (c - self.history) / self.dt
                - self.theta * _rhs(self.ops, c, d))

    def jacobian(self, c):
        d = self.convecting(c)
        P = np.zeros_like(self.conv.jacobian) if self.lagged \
            else self.conv.jacobian
        return (self.ops.mass_r / self.dt
                - self.theta * _rhs_jacobian(self.ops, c, d, P))


def _newton(problem, guess, newton, step):
    c = np.array(guess, dtype=float)
    for k in range(newton.max_iter + 1):
        res = problem.residual(c)
        rnorm = np.linalg.norm(res)
        if rnorm <= newton.abs_tol:
            return c, k
        if k == newton.max_iter or not np.isfinite(rnorm):
            raise SolverFailure(step, rnorm, c)
        c = c - np.linalg.solve(problem.jacobian(c), res)
    raise AssertionError("unreachable")


def step_rom(model, scheme, ops, c_n, c_nm1, dt, newton=None, step=1,
             conv=None):
    """Advance one step; returns ``(c_np1, newton_iterations)``.

    ``c_nm1`` is required for BDF2 and ignored for implicit Euler.
    """
    newton = newton or NewtonConfig()
    name = scheme.name if isinstance(scheme, TimeScheme) else scheme
    if name == "bdf2" and c_nm1 is None:
        raise ValueError("BDF2 needs the state before c_n")
    problem = StepProblem(ops, model, name, np.asarray(c_n, dtype=float),
                          None if c_nm1 is None else
                          np.asarray(c_nm1, dtype=float), dt, conv=conv)
    return _newton(problem, c_n, newton, step)


def run_rom(model, scheme, ops, c0, dt, n_steps, newton=None, c_minus1=None,
            t0=0.0):
    """Integrate the reduced model for ``n_steps`` steps.

    For BDF2 with ``bootstrap='given_history'`` the state ``c_minus1`` at
    ``t0 - dt`` must be supplied; otherwise the first step is implicit
    Euler.
    """
    newton = newton or NewtonConfig()
    c0 = np.asarray(c0, dtype=float)
    if c0.shape != (ops.r,):
        raise ValueError(f"expected {ops.r} initial coefficients, "
                         f"got {c0.shape}")
    if (scheme.name == "bdf2" and scheme.bootstrap == "given_history"
            and c_minus1 is None):
        raise ValueError("given_history bootstrap requires c_minus1")
    conv = ConvectingField(ops, model)
    coeffs = np.empty((ops.r, n_steps + 1))
    coeffs[:, 0] = c0
    iters = np.zeros(n_steps + 1, dtype=int)
    prev = None if c_minus1 is None else np.asarray(c_minus1, dtype=float)
    for n in range(n_steps):
        name = scheme.name
        if name == "bdf2" and prev is None:
            name = "euler"
        c_new, k = step_rom(model, name, ops, coeffs[:, n], prev, dt, newton,
                            step=n + 1, conv=conv)
        prev = coeffs[:, n]
        coeffs[:, n + 1] = c_new
        iters[n + 1] = k
    return RomTrajectory(t0 + dt * np.arange(n_steps + 1), coeffs, iters)
