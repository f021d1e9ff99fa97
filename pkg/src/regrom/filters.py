"""Reduced differential filter and approximate deconvolution operators.

All operators act on reduced coefficient vectors.  The filter solves
``(M + delta^2 S) c_bar = M c + g``; the deconvolution operators
approximately invert it.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .operators import filter_offset

AD_METHODS = ("van_cittert", "tikhonov", "lavrentiev")


@dataclass(frozen=True)
class FilterConfig:
    delta: float = 0.0

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError(f"filter radius must be >= 0, got {self.delta}")


@dataclass(frozen=True)
class AdConfig:
    """Deconvolution method with its parameter.

    ``order`` is the van Cittert iteration count N; ``mu`` the Tikhonov or
    Lavrentiev regularization parameter.
    """

    method: str = "lavrentiev"
    mu: float = 0.0
    order: int = 0
    filter: FilterConfig = FilterConfig()

    def __post_init__(self):
        if self.method not in AD_METHODS:
            raise ValueError(f"unknown AD method {self.method!r}; "
                             f"expected one of {AD_METHODS}")
        if self.method == "van_cittert" and (
                int(self.order) != self.order or self.order < 0):
            raise ValueError("van Cittert order must be a nonnegative integer")
        if self.method == "tikhonov" and not self.mu > 0:
            raise ValueError("Tikhonov mu must be positive")
        if self.method == "lavrentiev" and not self.mu >= 0:
            raise ValueError("Lavrentiev mu must be nonnegative")

    @property
    def delta(self):
        return self.filter.delta


def _factor(A):
    try:
        return sla.cho_factor(A)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"reduced system is not positive definite: {exc}") from exc


class ReducedFilter:
    """Cached factorization of ``M + delta^2 S`` for one radius."""

    def __init__(self, ops, cfg, use_offset=True):
        self.delta = cfg.delta
        self.mass = ops.mass_r
        self.system = ops.mass_r + cfg.delta ** 2 * ops.stiff_r
        self._cho = _factor(self.system)
        if use_offset:
            self.offset = filter_offset(ops.mass_center, ops.stiff_center,
                                        cfg.delta)
        else:
            self.offset = np.zeros(ops.r)

    def solve(self, rhs):
        return sla.cho_solve(self._cho, rhs)

    def __call__(self, c):
        return self.solve(self.mass @ c + self.offset)

    def linear_part(self):
        """Matrix of the linear map ``c -> c_bar`` (offset excluded)."""
        return self.solve(self.mass)


class Deconvolution:
    """Cached approximate inverse of a :class:`ReducedFilter`."""

    def __init__(self, ops, cfg, filt=None):
        self.cfg = cfg
        self.filter = filt or ReducedFilter(ops, cfg.filter, use_offset=False)
        M, S, d2 = ops.mass_r, ops.stiff_r, cfg.delta ** 2
        self.rhs_matrix = M + d2 * S
        if cfg.method == "tikhonov":
            lhs = (1 + cfg.mu) * M + 2 * cfg.mu * d2 * S
        elif cfg.method == "lavrentiev":
            lhs = (1 + cfg.mu) * M + cfg.mu * d2 * S
        else:
            lhs = None
        self._cho = None if lhs is None else _factor(lhs)

    def __call__(self, c_bar):
        c_bar = np.asarray(c_bar, dtype=float)
        if self.cfg.method == "van_cittert":
            # Richardson: c <- c + (c_bar - G c), with G c from the filter solve
            c_ad = c_bar.copy()
            M = self.filter.mass
            for _ in range(int(self.cfg.order)):
                c_tilde = self.filter.solve(M @ c_ad)
                c_ad = c_ad + (c_bar - c_tilde)
            return c_ad
        return sla.cho_solve(self._cho, self.rhs_matrix @ c_bar)

    def linear_part(self):
        r = self.rhs_matrix.shape[0]
        return np.column_stack([self(e) for e in np.eye(r)])


def apply_filter(ops, cfg, c):
    """Filtered coefficients ``c_bar`` with ``(M + delta^2 S) c_bar = M c + g``.

    The offset ``g`` is recomputed for ``cfg.delta`` from the centering
    pairings stored in ``ops``.
    """
    return ReducedFilter(ops, cfg)(np.asarray(c, dtype=float))


def deconvolve_van_cittert(ops, cfg, c_bar):
    if cfg.method != "van_cittert":
        cfg = AdConfig("van_cittert", order=cfg.order, filter=cfg.filter)
    return Deconvolution(ops, cfg)(c_bar)


def deconvolve_tikhonov(ops, cfg, c_bar):
    """Solve ``[(1+mu) M + 2 mu delta^2 S] c_ad = (M + delta^2 S) c_bar``."""
    if cfg.method != "tikhonov":
        cfg = AdConfig("tikhonov", mu=cfg.mu, filter=cfg.filter)
    return Deconvolution(ops, cfg)(c_bar)


def deconvolve_lavrentiev(ops, cfg, c_bar):
    """Solve ``[(1+mu) M + mu delta^2 S] c_ad = (M + delta^2 S) c_bar``."""
    if cfg.method != "lavrentiev":
        cfg = AdConfig("lavrentiev", mu=cfg.mu, filter=cfg.filter)
    return Deconvolution(ops, cfg)(c_bar)


def deconvolve(ops, cfg, c_bar):
    return Deconvolution(ops, cfg)(c_bar)
