"""Synthetic ground-truth shapes and seeded noise models.

Random numbers come from Philox, a counter-based generator: the value for pixel
``i`` of stream ``s`` depends only on ``(seed, s, i)``, so any chunk of an image
can be regenerated independently of how the work is split.
"""
import numpy as np

from .fields import as_field

# stream ids, one per independent use of randomness
_GAUSS_A, _GAUSS_B, _SP_HIT, _SP_VALUE, _GEOMETRY = 0, 1, 2, 3, 4


def counter_uniform(seed, stream, count, offset=0):
    """Uniform doubles in [0, 1) for counters ``offset .. offset + count - 1``."""
    bitgen = np.random.Philox(key=[int(seed) & 0xFFFFFFFFFFFFFFFF, int(stream)])
    # Philox emits four 64-bit words per counter value
    block, skip = divmod(offset, 4)
    if block:
        bitgen.advance(block)
    raw = bitgen.random_raw(count + skip)[skip:]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def counter_normal(seed, count, offset=0):
    """Standard normals by Box-Muller over two uniform streams."""
    u1 = counter_uniform(seed, _GAUSS_A, count, offset)
    u2 = counter_uniform(seed, _GAUSS_B, count, offset)
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def disk_mask(w, h, cx, cy, r):
    """Mask of pixels ``(x, y)`` with ``(x-cx)^2 + (y-cy)^2 <= r^2``; x is the column."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    y, x = np.mgrid[0:h, 0:w]
    return (((x - cx) ** 2 + (y - cy) ** 2) <= r * r).astype(np.uint8)


def rect_mask(w, h, x0, y0, rw, rh):
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[y0:y0 + rh, x0:x0 + rw] = 1
    return mask


def blob_with_protrusions(size=128):
    """A centered disk with two thin rectangular arms (right and up)."""
    c = (size - 1) / 2.0
    m = disk_mask(size, size, c, c, size * 0.22)
    arm = max(2, size // 16)
    reach = int(size * 0.42)
    m |= rect_mask(size, size, int(c), int(c) - arm // 2, reach, arm)
    m |= rect_mask(size, size, int(c) - arm // 2, int(c) - reach, arm, reach)
    return m


def low_contrast(mask, contrast=0.05):
    """Gray image ``0.5 +/- contrast/2`` from a mask; with means (1, 0) its
    two-phase force is ``-/+ contrast``."""
    return 0.5 + contrast * (np.asarray(mask, dtype=np.float64) - 0.5)


def noisy_disk_corpus(count=10, size=128, seed=0, rho=0.1, contrast=0.3):
    """Seeded list of ``(image, ground_truth)`` noisy-disk pairs.

    Each disk has a random radius in [size/8, size/4] and a random center at
    least one radius plus 4 pixels from the border; the image is
    ``0.5 +/- contrast/2`` plus clamped Gaussian noise of SD ``rho``.
    """
    pairs = []
    for i in range(count):
        a, b, c = counter_uniform(seed, _GEOMETRY, 3, offset=4 * i)
        r = size / 8.0 + a * size / 8.0
        lo, hi = r + 4, size - 1 - r - 4
        cx, cy = lo + b * (hi - lo), lo + c * (hi - lo)
        gt = disk_mask(size, size, cx, cy, r)
        image = add_gaussian_noise(low_contrast(gt, contrast), rho, seed * 1000003 + i)
        pairs.append((image, gt))
    return pairs


def add_gaussian_noise(image, rho, seed, clamp=True):
    """Add i.i.d. N(0, rho^2) noise per pixel, then clamp to [0, 1]."""
    if rho < 0:
        raise ValueError(f"noise SD must be >= 0, got {rho}")
    image = as_field(image, "image")
    if rho == 0:
        return image.copy()
    noise = counter_normal(seed, image.size).reshape(image.shape)
    out = image + rho * noise
    return np.clip(out, 0.0, 1.0) if clamp else out


def add_salt_pepper(image, prob, seed):
    """Replace each pixel with probability ``prob`` by 0 or 1 (equal odds)."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {prob}")
    image = as_field(image, "image")
    hit = counter_uniform(seed, _SP_HIT, image.size).reshape(image.shape) < prob
    salt = counter_uniform(seed, _SP_VALUE, image.size).reshape(image.shape) < 0.5
    out = image.copy()
    out[hit] = salt[hit].astype(np.float64)
    return out
