"""Gaussian kernel, zero-padded convolution and the threshold-dynamics boundary measure."""
from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

from . import _backend
from .fields import as_field

DEFAULT_SIGMA = 2.0
DEFAULT_HALF_WIDTH = 6
CALIBRATION_GRID = 128


def default_half_width(sigma):
    return max(1, math.ceil(3.0 * sigma))


@dataclass(frozen=True)
class GaussianKernel:
    """Sampled, truncated and renormalized 2-D Gaussian of size (2n+1) x (2n+1).

    The kernel is stored through its normalized 1-D factor ``w``; the 2-D
    weights are ``outer(w, w)``, which sum to 1.
    """

    sigma: float
    half_width: int
    w: np.ndarray = field(repr=False, compare=False)

    @property
    def size(self):
        return 2 * self.half_width + 1

    @property
    def weights(self):
        return np.outer(self.w, self.w)


def make_gaussian_kernel(sigma=DEFAULT_SIGMA, n=None):
    """Build the discrete Gaussian kernel ``G_sigma`` with half width ``n``.

    Parameters
    ----------
    sigma : float
        Standard deviation in pixels, > 0.
    n : int, optional
        Half width, >= 1. Defaults to ``ceil(3 * sigma)``.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if n is None:
        n = default_half_width(sigma)
    if int(n) != n or n < 1:
        raise ValueError(f"half width n must be an integer >= 1, got {n}")
    n = int(n)
    i = np.arange(-n, n + 1, dtype=np.float64)
    w = np.exp(-(i * i) / (2.0 * sigma * sigma))
    w /= w.sum()
    w.setflags(write=False)
    return GaussianKernel(float(sigma), n, w)


def convolve_zero_pad(u, k, backend=None):
    """``G * u`` with ``u`` taken as zero outside the domain."""
    u = as_field(u)
    return _backend.get(backend).convolve_sep(u, k.w)


def boundary_from_conv(u, ku):
    """Boundary measure given ``ku = G * u`` already computed.

    ``u`` is extended by zero outside the grid, so ``1 - u`` is 1 there and
    ``<u, G*(1-u)> = sum(u) - <u, G*u>``.
    """
    return float(np.sum(u) - np.sum(u * ku))


def td_boundary_measure(u, k, backend=None):
    """Threshold-dynamics boundary length estimate ``q = <u, G*(1-u)>``.

    Pixels outside the image count as background, so foreground touching the
    image border pays for that border.
    """
    u = as_field(u, "u")
    return boundary_from_conv(u, convolve_zero_pad(u, k, backend))


@lru_cache(maxsize=64)
def calibrate_perimeter_constant(sigma=DEFAULT_SIGMA, n=DEFAULT_HALF_WIDTH, grid=CALIBRATION_GRID):
    """Ratio ``q / (2 pi r)`` for a centered disk of radius ``grid / 4``.

    Divides :func:`td_boundary_measure` into perimeter units.
    """
    from .synth import disk_mask

    r = grid / 4.0
    if r <= n:
        raise ValueError(f"grid {grid} too small for kernel half width {n}")
    c = (grid - 1) / 2.0
    disk = disk_mask(grid, grid, c, c, r)
    q = td_boundary_measure(disk, make_gaussian_kernel(sigma, n))
    return q / (2.0 * math.pi * r)
