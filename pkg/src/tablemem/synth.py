"""Synthetic glyph corpora for desk-scale experiments.

Ten digit-shaped classes rendered from a 5x7 bitmap font onto a small
raster, with seeded per-instance variation: sub-cell translation, stroke
intensity jitter, bounded pixel noise and occasional local blots.  The
variation is tuned so registers saturate their core level support after
a few dozen instances while rare blots keep adding marks slowly.
"""

from __future__ import annotations

import numpy as np

__all__ = ["DIGIT_LABELS", "glyph_template", "generate_corpus"]

DIGIT_LABELS = tuple(str(d) for d in range(10))

_FONT = {
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11111", "00010", "00100", "00010", "00001", "10001", "01110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
}


def glyph_template(label: str, width: int = 16, height: int = 16) -> np.ndarray:
    """Binary stroke mask for a digit, upscaled 2x and centered."""
    if label not in _FONT:
        raise ValueError(f"no glyph template for label {label!r}")
    bitmap = np.array([[c == "1" for c in row] for row in _FONT[label]])
    mask = np.kron(bitmap, np.ones((2, 2), dtype=bool))
    mh, mw = mask.shape
    if mh > height or mw > width:
        raise ValueError(f"{height}x{width} raster too small for the {mh}x{mw} glyph")
    canvas = np.zeros((height, width), dtype=bool)
    top = (height - mh) // 2
    left = (width - mw) // 2
    canvas[top:top + mh, left:left + mw] = mask
    return canvas


def generate_corpus(
    instances_per_class: int,
    rng_seed: int = 0,
    labels=DIGIT_LABELS,
    width: int = 16,
    height: int = 16,
    ink: float = 220.0,
    background: float = 25.0,
    ink_jitter: float = 0.10,
    pixel_noise: float = 12.0,
    max_shift: int = 1,
    shift_prob: float = 0.2,
    blot_prob: float = 0.1,
    blot_size: int = 3,
    blot_strength: float = 50.0,
) -> list[tuple[str, np.ndarray]]:
    """Seeded corpus of noisy glyphs, class-major order, uint8 images."""
    if instances_per_class < 1:
        raise ValueError(f"need at least one instance per class, got {instances_per_class}")
    rng = np.random.default_rng(rng_seed)
    records: list[tuple[str, np.ndarray]] = []
    for label in labels:
        base = glyph_template(label, width=width, height=height)
        for _ in range(instances_per_class):
            dy = dx = 0
            if rng.random() < shift_prob:
                dy = int(rng.integers(-max_shift, max_shift + 1))
                dx = int(rng.integers(-max_shift, max_shift + 1))
            mask = np.roll(np.roll(base, dy, axis=0), dx, axis=1)
            scale = 1.0 - ink_jitter * rng.random()
            canvas = np.full((height, width), background, dtype=np.float64)
            canvas += mask * (ink - background) * scale
            canvas += rng.uniform(-pixel_noise, pixel_noise, size=(height, width))
            if rng.random() < blot_prob:
                top = int(rng.integers(0, height - blot_size + 1))
                left = int(rng.integers(0, width - blot_size + 1))
                sign = 1.0 if rng.random() < 0.5 else -1.0
                bump = sign * blot_strength * rng.uniform(0.5, 1.0)
                canvas[top:top + blot_size, left:left + blot_size] += bump
            records.append((label, np.clip(canvas, 0, 255).astype(np.uint8)))
    return records
