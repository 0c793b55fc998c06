"""Primal-dual threshold-dynamics solvers for compactness-regularized segmentation.

The model is

    min_u  lam <f, u> + <u, G*(1-u)>^2 / <u, 1>

rewritten with a scalar dual variable ``p`` as the saddle problem

    min_u max_p  L(u, p) = <lam f - p^2/4, u> + p <u, G*(1-u)>.

PD-TD alternates a hard threshold of the linearized ``u`` problem with the
exact ``p`` maximizer. PD-STD adds an entropy term, so the ``u`` step becomes a
sigmoid, and takes a proximal step in ``p``.
"""
from dataclasses import dataclass, field
import math
import time

import numpy as np

from .fields import EmptyRegion, as_field, as_label_field, as_mask, check_same_shape, threshold
from .kernels import (
    CALIBRATION_GRID,
    DEFAULT_HALF_WIDTH,
    DEFAULT_SIGMA,
    boundary_from_conv,
    calibrate_perimeter_constant,
    convolve_zero_pad,
    make_gaussian_kernel,
)
from .synth import disk_mask


@dataclass
class SolverConfig:
    """Parameters shared by PD-TD and PD-STD.

    ``lam`` is the fidelity weight, ``epsilon`` the entropy weight (PD-STD),
    ``tau`` the proximal step on ``p`` (PD-STD; ``math.inf`` gives the exact
    maximizer). ``p0`` overrides the data-driven initial dual value.
    """

    lam: float = 0.2
    epsilon: float = 0.01
    tau: float = 1.0
    sigma: float = DEFAULT_SIGMA
    kernel_n: int = DEFAULT_HALF_WIDTH
    max_iters: int = 300
    stop_tol: float = 1e-4
    final_threshold: float = 0.5
    p0: float | None = None
    empty_fallback: bool = True

    def __post_init__(self):
        for name in ("lam", "epsilon", "tau", "sigma"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be an integer >= 1, got {self.max_iters}")
        if self.stop_tol < 0:
            raise ValueError(f"stop_tol must be >= 0, got {self.stop_tol}")
        if not 0.0 < self.final_threshold < 1.0:
            raise ValueError(f"final_threshold must be in (0, 1), got {self.final_threshold}")
        self.max_iters = int(self.max_iters)

    def kernel(self):
        return make_gaussian_kernel(self.sigma, self.kernel_n)


@dataclass
class SolveReport:
    """Result of a solver run.

    ``energy_trace`` holds ``(k, energy, lagrangian, p)`` for the initial state
    and after each iteration, so its length is ``iters_used + 1``. ADMM has no
    scalar dual; it stores NaN in the ``p`` slot.
    """

    algo: str
    mask: np.ndarray
    soft_u: np.ndarray
    p_final: float
    iters_used: int
    energy_trace: list = field(default_factory=list)
    wall_time: float = 0.0
    converged: bool = False
    emptied: bool = False

    @property
    def energy(self):
        return self.energy_trace[-1][1]


def _floor_energy(k):
    # u == 0 has compactness 4*pi in perimeter units; convert to estimator units
    grid = max(CALIBRATION_GRID, 8 * (k.half_width + 1))
    c = calibrate_perimeter_constant(k.sigma, k.half_width, grid)
    return 4.0 * math.pi * c * c


def _energy(lam_fu, q, area, k):
    if area <= 0:
        return lam_fu + _floor_energy(k)
    return lam_fu + q * q / area


def phi_field(f, u, p, lam, k, ku=None):
    """Linearized ``u``-step coefficient ``lam f - p^2/4 + p (1 - 2 G*u)``.

    With ``u`` extended by zero outside the grid this is the gradient of
    ``L(., p)`` at ``u``; inside the grid it equals ``p G*(1-2u)``.
    """
    f = as_field(f, "f")
    check_same_shape(f, u)
    if ku is None:
        ku = convolve_zero_pad(u, k)
    return lam * f - 0.25 * p * p + p * (1.0 - 2.0 * ku)


def pdtd_u_update(phi):
    """Hard threshold: 1 where ``phi < 0``."""
    return (np.asarray(phi) < 0).astype(np.uint8)


def pdtd_p_update(u, k):
    """Exact maximizer of ``L(u, .)``: ``p = 2 q / area``."""
    u = as_field(u, "u")
    area = float(np.sum(u))
    if area <= 0:
        raise EmptyRegion("p is undefined for an empty region")
    return 2.0 * boundary_from_conv(u, convolve_zero_pad(u, k)) / area


def pdstd_u_update(phi, epsilon):
    """Soft threshold ``1 / (1 + exp(phi / epsilon))``, evaluated without overflow."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    z = np.asarray(phi, dtype=np.float64) / epsilon
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, e / (1.0 + e), 1.0 / (1.0 + e))


def _prox_p(p_prev, q, area, tau):
    if math.isinf(tau):
        if area <= 0:
            raise EmptyRegion("p is undefined for an empty region")
        return 2.0 * q / area
    return (p_prev + tau * q) / (1.0 + 0.5 * tau * area)


def pdstd_p_update(u, p_prev, tau, k):
    """Proximal step ``argmax_p L(u, p) - (p - p_prev)^2 / (2 tau)``."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    u = as_field(u, "u")
    q = boundary_from_conv(u, convolve_zero_pad(u, k))
    return _prox_p(p_prev, q, float(np.sum(u)), tau)


def lagrangian_value(u, p, f, lam, k):
    """``L(u, p) = <lam f - p^2/4, u> + p <u, G*(1-u)>``."""
    u = as_field(u, "u")
    f = as_field(f, "f")
    check_same_shape(u, f)
    q = boundary_from_conv(u, convolve_zero_pad(u, k))
    return float(np.sum((lam * f - 0.25 * p * p) * u)) + p * q


def energy_value(u, f, lam, k):
    """``lam <f, u> + q^2 / area``; the empty region gets the compactness floor ``4 pi c^2``."""
    u = as_label_field(u, "u")
    f = as_field(f, "f")
    check_same_shape(u, f)
    q = boundary_from_conv(u, convolve_zero_pad(u, k))
    return _energy(lam * float(np.sum(f * u)), q, float(np.sum(u)), k)


def initial_mask(f):
    """``1[f < 0]``, or a centered disk of radius min(H, W)/4 if that is empty."""
    u = (f < 0).astype(np.uint8)
    if u.any():
        return u
    h, w = f.shape
    return disk_mask(w, h, (w - 1) / 2.0, (h - 1) / 2.0, min(w, h) / 4.0)


def _state(u, f, lam, k):
    ku = convolve_zero_pad(u, k)
    q = boundary_from_conv(u, ku)
    area = float(np.sum(u))
    return ku, q, area, lam * float(np.sum(f * u))


def run_pdtd(f, cfg=None, u0=None, callback=None):
    """Primal-dual threshold dynamics (hard thresholding).

    Stops at an exact fixed point ``u^{k+1} == u^k`` or after ``cfg.max_iters``
    iterations. If an iterate empties the region, the previous iterate is
    returned with ``emptied=True`` (or :class:`EmptyRegion` is raised when
    ``cfg.empty_fallback`` is off).

    ``callback(k, u_prev, p_prev, u_new, p_new)`` is called after every
    iteration.
    """
    cfg = cfg or SolverConfig()
    f = as_field(f, "f")
    k = cfg.kernel()
    t0 = time.perf_counter()

    if u0 is None:
        u = initial_mask(f)
    else:
        u = as_mask(u0, "u0")
        check_same_shape(u, f)
    ku, q, area, lam_fu = _state(u, f, cfg.lam, k)
    if cfg.p0 is not None:
        p = float(cfg.p0)
    elif area > 0:
        p = 2.0 * q / area
    else:
        raise EmptyRegion("initial region is empty")

    trace = [(0, _energy(lam_fu, q, area, k), lam_fu - 0.25 * p * p * area + p * q, p)]
    converged = emptied = False
    it = 0
    while it < cfg.max_iters:
        phi = cfg.lam * f - 0.25 * p * p + p * (1.0 - 2.0 * ku)
        un = pdtd_u_update(phi)
        if not un.any():
            if not cfg.empty_fallback:
                raise EmptyRegion(f"PD-TD iterate {it + 1} is empty")
            emptied = True
            break
        kun, qn, arean, lam_fun = _state(un, f, cfg.lam, k)
        pn = 2.0 * qn / arean
        it += 1
        trace.append((it, _energy(lam_fun, qn, arean, k), lam_fun - 0.25 * pn * pn * arean + pn * qn, pn))
        if callback is not None:
            callback(it, u, p, un, pn)
        converged = np.array_equal(un, u)
        u, ku, p = un, kun, pn
        if converged:
            break

    return SolveReport(
        algo="pd-td",
        mask=u,
        soft_u=u.astype(np.float64),
        p_final=p,
        iters_used=it,
        energy_trace=trace,
        wall_time=time.perf_counter() - t0,
        converged=converged,
        emptied=emptied,
    )


def run_pdstd(f, cfg=None, u0=None, callback=None):
    """Primal-dual soft threshold dynamics.

    Stops when ``max |u^{k+1} - u^k| < cfg.stop_tol`` or after
    ``cfg.max_iters`` iterations; the mask is ``soft_u > cfg.final_threshold``.
    """
    cfg = cfg or SolverConfig()
    f = as_field(f, "f")
    k = cfg.kernel()
    t0 = time.perf_counter()

    if u0 is None:
        u = initial_mask(f).astype(np.float64)
    else:
        u = as_label_field(u0, "u0")
        check_same_shape(u, f)
    ku, q, area, lam_fu = _state(u, f, cfg.lam, k)
    if cfg.p0 is not None:
        p = float(cfg.p0)
    else:
        p = 2.0 * q / area if area > 0 else 0.0

    trace = [(0, _energy(lam_fu, q, area, k), lam_fu - 0.25 * p * p * area + p * q, p)]
    converged = False
    it = 0
    while it < cfg.max_iters:
        phi = cfg.lam * f - 0.25 * p * p + p * (1.0 - 2.0 * ku)
        un = pdstd_u_update(phi, cfg.epsilon)
        kun, qn, arean, lam_fun = _state(un, f, cfg.lam, k)
        pn = _prox_p(p, qn, arean, cfg.tau)
        it += 1
        trace.append((it, _energy(lam_fun, qn, arean, k), lam_fun - 0.25 * pn * pn * arean + pn * qn, pn))
        if callback is not None:
            callback(it, u, p, un, pn)
        delta = float(np.max(np.abs(un - u)))
        u, ku, p = un, kun, pn
        if delta < cfg.stop_tol:
            converged = True
            break

    return SolveReport(
        algo="pd-std",
        mask=threshold(u, cfg.final_threshold),
        soft_u=u,
        p_final=p,
        iters_used=it,
        energy_trace=trace,
        wall_time=time.perf_counter() - t0,
        converged=converged,
    )


def std_layer_forward(o, cfg=None, u0=None):
    """Forward pass of the unrolled PD-STD layer: soft labels for logits ``o``.

    Uses region force ``-o``; returns ``soft_u`` with values in (0, 1).
    """
    return run_pdstd(-as_field(o, "logits"), cfg, u0).soft_u
