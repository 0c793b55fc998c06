"""Grid containers shared by every solver.

Fields are plain 2-D numpy arrays: float64 for real-valued fields (image,
region force, soft labels, logits) and uint8 for binary masks. Pixel area is 1,
so integrals are sums.
"""
import numpy as np


class EmptyRegion(ValueError):
    """Raised when a quantity needs a nonempty foreground and gets none."""


def as_field(a, name="field"):
    """Return ``a`` as a C-contiguous float64 2-D array, checking it is finite."""
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def as_mask(a, name="mask"):
    """Return ``a`` as a uint8 {0,1} mask.

    Boolean arrays are accepted; numeric arrays must already hold only 0 and 1.
    """
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if arr.dtype != np.bool_ and not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{name} must contain only 0 and 1")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def as_label_field(a, name="u"):
    """Return ``a`` as a float64 field with every value in [0, 1]."""
    arr = as_field(a, name)
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def check_same_shape(a, b):
    if np.shape(a) != np.shape(b):
        raise ValueError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def inner_product(a, b):
    """Discrete L2 inner product: sum over pixels of ``a * b``."""
    check_same_shape(a, b)
    return float(np.sum(np.asarray(a, dtype=np.float64) * np.asarray(b, dtype=np.float64)))


def threshold(u, t=0.5):
    """Binary mask of pixels where ``u > t`` (strict)."""
    return (np.asarray(u) > t).astype(np.uint8)
