"""Overlap and shape metrics for binary segmentations."""
import math

import numpy as np

from .fields import EmptyRegion, as_field, as_mask, check_same_shape
from .kernels import (
    DEFAULT_HALF_WIDTH,
    DEFAULT_SIGMA,
    calibrate_perimeter_constant,
    make_gaussian_kernel,
    td_boundary_measure,
)

SCHEMES = ("anisotropic", "isotropic", "calibrated-gaussian")


def _overlap(a, b):
    check_same_shape(a, b)
    a = as_mask(a, "a").astype(bool)
    b = as_mask(b, "b").astype(bool)
    inter = int(np.count_nonzero(a & b))
    return inter, int(np.count_nonzero(a)), int(np.count_nonzero(b))


def dice(a, b):
    """Dice coefficient ``2|A & B| / (|A| + |B|)``; two empty masks score 1."""
    inter, na, nb = _overlap(a, b)
    if na + nb == 0:
        return 1.0
    return 2.0 * inter / (na + nb)


def iou(a, b):
    """Intersection over union; two empty masks score 1."""
    inter, na, nb = _overlap(a, b)
    union = na + nb - inter
    if union == 0:
        return 1.0
    return inter / union


def _forward_diffs(u):
    # Neumann: the difference past the last row/column is zero
    dx = np.zeros_like(u)
    dy = np.zeros_like(u)
    dx[:, :-1] = u[:, 1:] - u[:, :-1]
    dy[:-1, :] = u[1:, :] - u[:-1, :]
    return dx, dy


def discrete_tv(u, scheme="anisotropic"):
    """Total variation from forward differences.

    ``anisotropic`` sums ``|dx| + |dy|``; ``isotropic`` sums ``sqrt(dx^2 + dy^2)``.
    """
    u = as_field(u, "u")
    dx, dy = _forward_diffs(u)
    if scheme == "anisotropic":
        return float(np.sum(np.abs(dx)) + np.sum(np.abs(dy)))
    if scheme == "isotropic":
        return float(np.sum(np.sqrt(dx * dx + dy * dy)))
    raise ValueError(f"unknown TV scheme {scheme!r}")


def perimeter(mask, scheme="calibrated-gaussian", sigma=DEFAULT_SIGMA, n=DEFAULT_HALF_WIDTH):
    """Perimeter estimate of a mask under one of :data:`SCHEMES`."""
    mask = as_mask(mask)
    if scheme == "calibrated-gaussian":
        q = td_boundary_measure(mask, make_gaussian_kernel(sigma, n))
        return q / calibrate_perimeter_constant(sigma, n)
    return discrete_tv(mask, scheme)


def compactness(mask, scheme="calibrated-gaussian", sigma=DEFAULT_SIGMA, n=DEFAULT_HALF_WIDTH):
    """Squared perimeter over area. A disk scores about 4*pi, anything else more."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown compactness scheme {scheme!r}; choose from {SCHEMES}")
    mask = as_mask(mask)
    area = int(np.count_nonzero(mask))
    if area == 0:
        raise EmptyRegion("compactness of an empty mask is undefined")
    return perimeter(mask, scheme, sigma, n) ** 2 / area


def circularity(mask, scheme="calibrated-gaussian", sigma=DEFAULT_SIGMA, n=DEFAULT_HALF_WIDTH):
    """``4 pi area / perimeter^2``, 1 for a perfect disk."""
    return 4.0 * math.pi / compactness(mask, scheme, sigma, n)
