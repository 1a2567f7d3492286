"""Weight-map sources for the solver.

Two ways to obtain per-pixel mixture weights: a synthetic oracle that
derives them from a known scene map (optionally corrupted, to emulate an
imperfect predictor), and a binary file boundary so any external predictor
can plug in.

File format ``OWM1`` (little-endian): magic "OWM1"; u32 width, height,
filter count F, component count M; F u32 filter indices; then
width*height*F*M float32 weights ordered pixel-major (row-major pixels),
then filter, then component.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bank import FilterBank, analyze
from .mixture import MixtureModel, WeightMap, soft_target_map

_OWM_MAGIC = b"OWM1"
SIMPLEX_FILE_TOL = 1e-4


@dataclass(frozen=True)
class CorruptionConfig:
    """Controls how far oracle weights deviate from the exact soft targets.

    ``ambiguity_fraction`` of (pixel, filter) slots are replaced by the
    uniform distribution; ``blur_temperature`` T >= 1 flattens the rest by
    raising weights to 1/T and renormalizing.
    """

    ambiguity_fraction: float = 0.0
    blur_temperature: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.ambiguity_fraction <= 1.0:
            raise ValueError("ambiguity_fraction must be in [0, 1]")
        if self.blur_temperature < 1.0:
            raise ValueError("blur_temperature must be >= 1")


def synth_predict(
    y_true: np.ndarray,
    bank: FilterBank,
    model: MixtureModel,
    subset=None,
    corruption: CorruptionConfig | None = None,
) -> WeightMap:
    """Oracle weight map: soft targets of the true coefficients, corrupted.

    For each pixel and filter in ``subset`` the row is the soft target of
    the true coefficient, temperature-blurred, then replaced by uniform
    with probability ``ambiguity_fraction``.  Deterministic given the seed.
    """
    corruption = corruption or CorruptionConfig()
    if model.num_filters != len(bank):
        raise ValueError("model filter count does not match bank")
    subset = tuple(sorted(set(range(len(bank)) if subset is None else subset)))
    if not subset:
        raise ValueError("empty filter subset")
    if subset[0] < 0 or subset[-1] >= model.num_filters:
        raise ValueError("subset not covered by model")
    y_true = np.asarray(y_true, dtype=np.float64)
    if not np.all(np.isfinite(y_true)):
        raise ValueError("scene map must be finite")

    h, w = y_true.shape
    m = model.num_components
    weights = np.empty((h, w, len(subset), m), dtype=np.float64)
    for slot, (i, coeff) in enumerate(analyze(y_true, bank, subset)):
        q = soft_target_map(coeff, model, i)
        if corruption.blur_temperature > 1.0:
            q = q ** (1.0 / corruption.blur_temperature)
            q /= q.sum(axis=-1, keepdims=True)
        weights[:, :, slot, :] = q
    if corruption.ambiguity_fraction > 0.0:
        rng = np.random.default_rng(corruption.seed)
        mask = rng.random((h, w, len(subset))) < corruption.ambiguity_fraction
        weights[mask] = 1.0 / m
    return WeightMap(subset, weights.astype(np.float32))


def write_weight_map(wmap: WeightMap, path) -> None:
    h, w = wmap.height, wmap.width
    f, m = len(wmap.filter_indices), wmap.num_components
    with open(path, "wb") as out:
        out.write(_OWM_MAGIC)
        out.write(np.array([w, h, f, m], dtype="<u4").tobytes())
        out.write(np.array(wmap.filter_indices, dtype="<u4").tobytes())
        out.write(np.ascontiguousarray(wmap.weights, dtype="<f4").tobytes())


def read_weight_map(path) -> WeightMap:
    data = Path(path).read_bytes()
    if data[:4] != _OWM_MAGIC:
        raise ValueError("bad magic")
    if len(data) < 20:
        raise ValueError("truncated payload")
    w, h, f, m = (int(v) for v in np.frombuffer(data[4:20], dtype="<u4"))
    idx_end = 20 + 4 * f
    expected = idx_end + 4 * h * w * f * m
    if len(data) < expected:
        raise ValueError("truncated payload")
    if len(data) > expected:
        raise ValueError("trailing bytes after payload")
    indices = tuple(int(v) for v in np.frombuffer(data[20:idx_end], dtype="<u4"))
    weights = np.frombuffer(data[idx_end:expected], dtype="<f4").reshape(h, w, f, m)
    wmap = WeightMap(indices, weights.copy())
    wmap.validate(tol=SIMPLEX_FILE_TOL)
    return wmap
