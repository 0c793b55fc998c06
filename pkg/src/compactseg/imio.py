"""Image, mask, config and CSV I/O for the command-line tools.

Grayscale images are 8-bit PNG or binary PGM (P5), read as floats in [0, 1].
Masks are written as 0/255 PNG and read back with a 50% threshold.
"""
import csv
import math
from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_SUFFIXES = (".png", ".pgm")


def read_image(path):
    with Image.open(path) as im:
        im.load()
        if im.mode in ("I;16", "I;16B", "I"):
            arr = np.asarray(im, dtype=np.float64)
            return arr / (65535.0 if arr.max() > 255 else 255.0)
        if im.mode != "L":
            im = im.convert("L")
        return np.asarray(im, dtype=np.float64) / 255.0


def read_mask(path):
    return (read_image(path) > 0.5).astype(np.uint8)


def _save(arr, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = "PPM" if path.suffix.lower() == ".pgm" else "PNG"
    Image.fromarray(np.ascontiguousarray(arr, dtype=np.uint8)).save(path, format=fmt)


def write_image(field, path):
    """Write a [0, 1] field as 8-bit grayscale."""
    arr = np.clip(np.round(np.asarray(field) * 255.0), 0, 255).astype(np.uint8)
    _save(arr, path)


def write_mask(mask, path):
    _save((np.asarray(mask) > 0).astype(np.uint8) * 255, path)


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment. Values stay strings."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def format_value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return f"{v:.6g}"


def write_csv(rows, columns, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in columns])


def find_pairs(directory):
    """``(image_path, gt_path)`` pairs from a directory.

    Ground truths are named ``<stem>_gt.png`` (or ``.pgm``) next to ``<stem>.png``.
    Raises ``ValueError`` if the directory is empty or the counts do not match.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    gts = {p.stem[:-3]: p for p in files if p.stem.endswith("_gt")}
    images = {p.stem: p for p in files if not p.stem.endswith("_gt")}
    if not images and not gts:
        raise ValueError(f"no images found in {directory}")
    if len(images) != len(gts) or set(images) != set(gts):
        raise ValueError(
            f"mismatched pairs in {directory}: {len(images)} images, {len(gts)} ground truths"
        )
    return [(images[k], gts[k]) for k in sorted(images)]
