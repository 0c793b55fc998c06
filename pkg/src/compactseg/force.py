"""Region force construction: the per-pixel fidelity field ``f``.

Negative ``f`` favours foreground.
"""
import warnings

import numpy as np

from .fields import as_field, as_mask, check_same_shape


def two_phase_force(image, c1=1.0, c2=0.0):
    """``f = (I - c1)^2 - (I - c2)^2`` for foreground mean ``c1`` and background mean ``c2``."""
    image = as_field(image, "image")
    if c1 == c2:
        warnings.warn("c1 == c2: region force is identically zero", RuntimeWarning, stacklevel=2)
    return (image - c1) ** 2 - (image - c2) ** 2


def update_means(image, mask):
    """Mean intensity inside and outside ``mask``; 0.5 stands in for an empty side."""
    image = as_field(image, "image")
    mask = as_mask(mask).astype(bool)
    check_same_shape(image, mask)
    inside = image[mask]
    outside = image[~mask]
    c1 = float(inside.mean()) if inside.size else 0.5
    c2 = float(outside.mean()) if outside.size else 0.5
    return c1, c2


def force_from_logits(o, lam=1.0):
    """Region force ``-o`` for a logit map.

    ``lam`` is accepted for call-site symmetry with the solvers, which apply
    the fidelity weight themselves.
    """
    return -as_field(o, "logits")


def alternate_means(image, solve, c1=1.0, c2=0.0, rounds=5):
    """Alternate mean refresh and a segmentation solve, at most ``rounds`` times.

    ``solve`` maps a region force to an object with a ``mask`` attribute.
    Stops early once the means stop changing. Returns ``(result, c1, c2)``.
    """
    result = None
    for _ in range(max(1, min(rounds, 5))):
        result = solve(two_phase_force(image, c1, c2))
        n1, n2 = update_means(image, result.mask)
        if np.isclose(n1, c1) and np.isclose(n2, c2):
            break
        c1, c2 = n1, n2
    return result, c1, c2
