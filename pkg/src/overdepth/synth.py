"""Synthetic scene-map generator used by the demo and the test corpus.

Fields are sums of random Gaussian bumps over a flat base level: 5 to 15
bumps, amplitudes 0.05 to 0.3 (inverse-depth units) over a 0.25 base,
widths 5 to 20 px, centers uniform over the grid.  The draw order below
is fixed so seeded corpora are reproducible byte for byte.
"""

from __future__ import annotations

import numpy as np

BASE_LEVEL = 0.25
MIN_BUMPS, MAX_BUMPS = 5, 15
MIN_AMPLITUDE, MAX_AMPLITUDE = 0.05, 0.3
MIN_WIDTH, MAX_WIDTH = 5.0, 20.0


def bump_field(shape: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    """One smooth inverse-depth field of the given (H, W) shape."""
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    field = np.full((h, w), BASE_LEVEL, dtype=np.float64)
    for _ in range(int(rng.integers(MIN_BUMPS, MAX_BUMPS + 1))):
        amp = rng.uniform(MIN_AMPLITUDE, MAX_AMPLITUDE)
        width = rng.uniform(MIN_WIDTH, MAX_WIDTH)
        cx = rng.uniform(0.0, w - 1.0)
        cy = rng.uniform(0.0, h - 1.0)
        field += amp * np.exp(
            -((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * width * width)
        )
    return field


def make_corpus(
    count: int, shape: tuple[int, int] = (64, 64), seed: int = 0
) -> list[np.ndarray]:
    """A reproducible list of scene maps drawn from one seeded stream."""
    rng = np.random.default_rng(seed)
    return [bump_field(shape, rng) for _ in range(count)]
