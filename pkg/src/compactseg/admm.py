"""ADMM baseline for compactness-regularized segmentation.

Splits the model with ``z = u`` and ``s = <z, 1>``:

    min  lam <f, u> + |u|_TV |z|_TV / s
    s.t. u = z,  s = <z, 1>

and cycles a graph-cut ``u`` step, a conjugate-gradient ``z`` step and a cubic
``s`` step, followed by scaled multiplier updates. TV is anisotropic throughout.
"""
from dataclasses import dataclass
import logging
import math
import time

import numpy as np

from .fields import as_field, as_mask
from .kernels import DEFAULT_HALF_WIDTH, DEFAULT_SIGMA, make_gaussian_kernel
from .maxflow import grid_min_cut
from .metrics import discrete_tv
from .pd import SolveReport, energy_value, initial_mask

log = logging.getLogger(__name__)


@dataclass
class AdmmConfig:
    """ADMM parameters.

    ``mu1`` and ``mu2`` penalize ``u = z`` and ``s = <z, 1>``. With ``z_tv``
    the ``z`` step keeps a quadratic majorizer of ``|z|_TV`` whose edge weights
    are lagged from the previous ``z``; ``tv_eps`` floors the lagged gradient.
    ``sigma`` and ``kernel_n`` only select the kernel used for the reported
    energy.
    """

    lam: float = 0.2
    mu1: float = 0.2
    mu2: float = 1e-3
    max_iters: int = 50
    tol: float = 1e-3
    inner_cg_tol: float = 1e-5
    inner_cg_max: int = 300
    tv_eps: float = 0.05
    z_tv: bool = True
    s_min: float = 1.0
    sigma: float = DEFAULT_SIGMA
    kernel_n: int = DEFAULT_HALF_WIDTH

    def __post_init__(self):
        if not (self.mu1 > 0 and self.mu2 > 0):
            raise ValueError("mu1 and mu2 must be positive")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be an integer >= 1, got {self.max_iters}")
        if not self.tv_eps > 0:
            raise ValueError("tv_eps must be positive")
        self.max_iters = int(self.max_iters)


@dataclass
class AdmmState:
    u: np.ndarray
    z: np.ndarray
    s: float
    nu1: np.ndarray
    nu2: float

    @classmethod
    def start(cls, u, s_min=1.0):
        u = as_mask(u, "u")
        z = u.astype(np.float64)
        return cls(u, z, max(float(z.sum()), s_min), np.zeros_like(z), 0.0)


def _edge_diffs(z):
    return np.diff(z, axis=1), np.diff(z, axis=0)


def _weighted_laplacian(z, wh, wv):
    # gradient of 0.5 * sum_e w_e (dz_e)^2 over Neumann forward differences
    dx, dy = _edge_diffs(z)
    out = np.zeros_like(z)
    gx = wh * dx
    gy = wv * dy
    out[:, :-1] -= gx
    out[:, 1:] += gx
    out[:-1, :] -= gy
    out[1:, :] += gy
    return out


def conjugate_gradient(apply_a, b, x0=None, tol=1e-6, maxiter=200, callback=None):
    """Conjugate gradient for a symmetric positive-definite operator.

    Stops when ``||r|| <= tol * ||b||``. Returns ``(x, info)`` where ``info``
    has ``iters``, ``residual`` (relative) and ``converged``; on
    non-convergence ``x`` is the iterate with the smallest residual seen.
    """
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - apply_a(x)
    bnorm = float(np.linalg.norm(b)) or 1.0
    rr = float(np.vdot(r, r))
    best_x, best_res = x.copy(), math.sqrt(rr) / bnorm
    if best_res <= tol:
        return x, {"iters": 0, "residual": best_res, "converged": True}
    d = r.copy()
    for it in range(1, maxiter + 1):
        ad = apply_a(d)
        alpha = rr / float(np.vdot(d, ad))
        x += alpha * d
        r -= alpha * ad
        rr_new = float(np.vdot(r, r))
        res = math.sqrt(rr_new) / bnorm
        if callback is not None:
            callback(x)
        if res < best_res:
            best_x, best_res = x.copy(), res
        if res <= tol:
            return x, {"iters": it, "residual": res, "converged": True}
        d = r + (rr_new / rr) * d
        rr = rr_new
    return best_x, {"iters": maxiter, "residual": best_res, "converged": False}


def admm_u_update(state, f, cfg):
    """Exact binary ``u`` step by min-cut.

    Minimizes ``lam <f,u> + (|z|_TV / s) |u|_TV + mu1/2 ||u - z + nu1||^2``.
    """
    f = as_field(f, "f")
    if not state.s > 0:
        raise ValueError("ADMM state needs s > 0")
    weight = discrete_tv(state.z, "anisotropic") / state.s
    target = state.z - state.nu1
    # (1 - target)^2 - target^2 = 1 - 2 target
    unary = cfg.lam * f + 0.5 * cfg.mu1 * (1.0 - 2.0 * target)
    return grid_min_cut(unary, weight, weight)


def z_system(state, cfg):
    """Operator and right-hand side of the ``z`` step's linear system.

    ``(mu1 I + mu2 11^T + (|u|_TV / s) D^T W D) z = mu1 (u + nu1) + mu2 (s + nu2) 1``
    where ``W`` holds lagged inverse edge gradients of ``state.z``.
    """
    mu1, mu2 = cfg.mu1, cfg.mu2
    coupling = 0.0
    if cfg.z_tv:
        coupling = discrete_tv(state.u, "anisotropic") / state.s
    dx, dy = _edge_diffs(state.z)
    wh = coupling / np.maximum(np.abs(dx), cfg.tv_eps)
    wv = coupling / np.maximum(np.abs(dy), cfg.tv_eps)

    def apply_a(z):
        out = mu1 * z + mu2 * float(np.sum(z))
        if coupling:
            out += _weighted_laplacian(z, wh, wv)
        return out

    rhs = mu1 * (state.u + state.nu1) + mu2 * (state.s + state.nu2)
    return apply_a, rhs


def admm_z_update(state, cfg, info=None):
    """Solve the ``z`` step by conjugate gradient, warm-started at ``state.z``.

    If ``info`` is a dict it receives the CG statistics.
    """
    if not state.s > 0:
        raise ValueError("ADMM state needs s > 0")
    apply_a, rhs = z_system(state, cfg)
    z, stats = conjugate_gradient(apply_a, rhs, state.z, cfg.inner_cg_tol, cfg.inner_cg_max)
    if not stats["converged"]:
        log.warning("z-step CG stopped at relative residual %.3g after %d iterations",
                    stats["residual"], stats["iters"])
    if info is not None:
        info.update(stats)
    return z


def solve_positive_cubic(mu2, m, a):
    """Unique positive root of ``mu2 s^3 - mu2 m s^2 - a = 0`` for ``a > 0``.

    Safeguarded Newton on the bracket ``[max(m, 0), max(m, 0) + (a/mu2)^(1/3)]``.
    """
    c = a / mu2
    lo = max(m, 0.0)
    hi = lo + c ** (1.0 / 3.0)
    s = hi
    for _ in range(200):
        g = s * s * (s - m) - c
        if g > 0:
            hi = s
        else:
            lo = s
        dg = s * (3.0 * s - 2.0 * m)
        step = s - g / dg if dg > 0 else None
        s_new = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if abs(s_new - s) <= 1e-15 * max(1.0, abs(s)):
            s = s_new
            break
        s = s_new
    return s


def admm_s_update(state, cfg=None):
    """Minimize ``a / s + mu2/2 (s - <z,1> + nu2)^2`` over ``s >= s_min``.

    ``a = |u|_TV |z|_TV``; stationarity is the cubic
    ``mu2 s^3 - mu2 (b - nu2) s^2 - a = 0`` with ``b = <z, 1>``.
    """
    cfg = cfg or AdmmConfig()
    a = discrete_tv(state.u, "anisotropic") * discrete_tv(state.z, "anisotropic")
    m = float(np.sum(state.z)) - state.nu2
    if a <= 0:
        return max(m, cfg.s_min)
    return max(solve_positive_cubic(cfg.mu2, m, a), cfg.s_min)


def augmented_lagrangian(state, f, cfg):
    tv_u = discrete_tv(state.u, "anisotropic")
    tv_z = discrete_tv(state.z, "anisotropic")
    r1 = state.u - state.z + state.nu1
    r2 = state.s - float(np.sum(state.z)) + state.nu2
    return (cfg.lam * float(np.sum(f * state.u)) + tv_u * tv_z / state.s
            + 0.5 * cfg.mu1 * float(np.sum(r1 * r1)) + 0.5 * cfg.mu2 * r2 * r2)


def run_admm(f, cfg=None, u0=None, callback=None):
    """ADMM baseline. Stops after ``cfg.max_iters`` or when both primal residuals
    ``max |u - z|`` and ``|s - <z,1>|`` fall below ``cfg.tol``.

    ``callback(k, state)`` is called after every iteration.
    """
    cfg = cfg or AdmmConfig()
    f = as_field(f, "f")
    k = make_gaussian_kernel(cfg.sigma, cfg.kernel_n)
    t0 = time.perf_counter()

    state = AdmmState.start(initial_mask(f) if u0 is None else u0, cfg.s_min)
    trace = [(0, energy_value(state.u, f, cfg.lam, k), augmented_lagrangian(state, f, cfg), math.nan)]
    converged = False
    it = 0
    while it < cfg.max_iters:
        state.u = admm_u_update(state, f, cfg)
        state.z = admm_z_update(state, cfg)
        state.s = admm_s_update(state, cfg)
        area_z = float(np.sum(state.z))
        state.nu1 = state.nu1 + (state.u - state.z)
        state.nu2 = state.nu2 + (state.s - area_z)
        it += 1
        trace.append((it, energy_value(state.u, f, cfg.lam, k), augmented_lagrangian(state, f, cfg), math.nan))
        if callback is not None:
            callback(it, state)
        r1 = float(np.max(np.abs(state.u - state.z)))
        r2 = abs(state.s - area_z)
        if r1 < cfg.tol and r2 < cfg.tol:
            converged = True
            break

    return SolveReport(
        algo="admm",
        mask=state.u.copy(),
        soft_u=np.clip(state.z, 0.0, 1.0),
        p_final=math.nan,
        iters_used=it,
        energy_trace=trace,
        wall_time=time.perf_counter() - t0,
        converged=converged,
    )
