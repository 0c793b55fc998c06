"""Regenerate the bundled images under src/compactseg/data/.

    python scripts/make_data.py
"""
from pathlib import Path

from compactseg.imio import write_image, write_mask
from compactseg.synth import blob_with_protrusions, low_contrast, noisy_disk_corpus

DATA = Path(__file__).resolve().parents[1] / "src" / "compactseg" / "data"


def main():
    blob = blob_with_protrusions(128)
    write_image(low_contrast(blob, 0.05), DATA / "blob.png")
    write_mask(blob, DATA / "blob_gt.png")
    for i, (image, gt) in enumerate(noisy_disk_corpus(count=10, size=128, seed=0, rho=0.1, contrast=0.3)):
        write_image(image, DATA / "corpus" / f"disk_{i:02d}.png")
        write_mask(gt, DATA / "corpus" / f"disk_{i:02d}_gt.png")


if __name__ == "__main__":
    main()
