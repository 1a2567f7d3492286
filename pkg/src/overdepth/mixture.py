"""Per-filter Gaussian-mixture coefficient models.

Each filter i gets M component means c[i, j] (shared variance var[i]);
per-pixel predictions and training targets are M-vectors of mixture
weights on the probability simplex.  Models are fitted by 1-D k-means
over coefficient samples and serialized to a small binary format
(magic ``GMM1``: u32 K, u32 M, K*M float64 means filter-major, K float64
variances, all little-endian).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

VARIANCE_FLOOR = 1e-8
WEIGHT_CLAMP = 1e-12
_GMM_MAGIC = b"GMM1"


@dataclass
class MixtureModel:
    """Component means (K, M) and shared per-filter variances (K,)."""

    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        self.means = np.ascontiguousarray(self.means, dtype=np.float64)
        self.variances = np.ascontiguousarray(self.variances, dtype=np.float64)
        if self.means.ndim != 2:
            raise ValueError("means must be a (num_filters, num_components) grid")
        if self.variances.shape != (self.means.shape[0],):
            raise ValueError("variances must have one entry per filter")
        if not np.all(np.isfinite(self.means)):
            raise ValueError("means must be finite")
        if not np.all(np.isfinite(self.variances)) or np.any(self.variances <= 0):
            raise ValueError("variances must be positive and finite")
        if np.any(np.diff(self.means, axis=1) <= 0):
            raise ValueError("means must be strictly increasing per filter")

    @property
    def num_filters(self) -> int:
        return self.means.shape[0]

    @property
    def num_components(self) -> int:
        return self.means.shape[1]


@dataclass
class WeightMap:
    """Per-pixel, per-filter mixture weights, shape (H, W, F, M) float32.

    ``filter_indices`` names the bank filter behind each F slot.  Rows are
    expected to lie on the probability simplex; see :meth:`validate`.
    """

    filter_indices: tuple[int, ...]
    weights: np.ndarray

    def __post_init__(self):
        self.filter_indices = tuple(int(i) for i in self.filter_indices)
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float32)
        if self.weights.ndim != 4:
            raise ValueError("weights must have shape (H, W, F, M)")
        if self.weights.shape[2] != len(self.filter_indices):
            raise ValueError("filter axis does not match filter_indices")
        if len(set(self.filter_indices)) != len(self.filter_indices):
            raise ValueError("duplicate filter indices")

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    @property
    def num_components(self) -> int:
        return self.weights.shape[3]

    def slot(self, filter_index: int) -> int:
        """Position of a bank filter index along the F axis."""
        try:
            return self.filter_indices.index(filter_index)
        except ValueError:
            raise KeyError(f"filter {filter_index} not in weight map") from None

    def validate(self, tol: float = 1e-5) -> None:
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        if float(self.weights.min(initial=0.0)) < -tol:
            raise ValueError("simplex violation: negative weight")
        sums = self.weights.sum(axis=3, dtype=np.float64)
        if float(np.abs(sums - 1.0).max(initial=0.0)) > tol:
            raise ValueError("simplex violation: rows must sum to 1")


def _assign(xs: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # nearest center for sorted `centers`; midpoints tie toward the lower index
    mids = 0.5 * (centers[:-1] + centers[1:])
    return np.searchsorted(mids, xs, side="left")


def kmeans_1d(samples, num_centers: int, seed: int = 0, max_iter: int = 200,
              history: list | None = None) -> np.ndarray:
    """Lloyd's algorithm in one dimension; returns sorted centers.

    Centers start at the (j + 0.5)/M sample quantiles, assignment ties
    break toward the lower-index center, and an empty cluster is re-seeded
    at the sample farthest from its current center.  Iteration stops when
    assignments repeat or after ``max_iter`` passes.  The procedure is
    fully deterministic; ``seed`` is accepted for interface stability.
    If ``history`` is a list, the within-cluster sum of squares after each
    assignment pass is appended to it.
    """
    del seed
    xs = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if not np.all(np.isfinite(xs)):
        raise ValueError("samples must be finite")
    m = int(num_centers)
    if m < 1:
        raise ValueError("num_centers must be >= 1")
    if xs.size < m:
        raise ValueError("insufficient samples")
    centers = np.quantile(xs, (np.arange(m) + 0.5) / m)
    centers.sort()
    prev = None
    for _ in range(max_iter):
        assign = _assign(xs, centers)
        counts = np.bincount(assign, minlength=m)
        reseeds = 0
        while np.any(counts == 0) and reseeds < 4 * m:
            dist = np.abs(xs - centers[assign])
            far = int(np.argmax(dist))
            if dist[far] == 0.0:
                break  # fewer distinct samples than centers
            centers[int(np.flatnonzero(counts == 0)[0])] = xs[far]
            centers.sort()
            assign = _assign(xs, centers)
            counts = np.bincount(assign, minlength=m)
            reseeds += 1
        if history is not None:
            history.append(float(np.sum((xs - centers[assign]) ** 2)))
        if prev is not None and np.array_equal(assign, prev):
            break
        prev = assign
        filled = counts > 0
        sums = np.bincount(assign, weights=xs, minlength=m)
        centers[filled] = sums[filled] / counts[filled]
        centers.sort()
    return centers


def _strictly_increasing(centers: np.ndarray) -> np.ndarray:
    out = centers.copy()
    for j in range(1, out.size):
        if out[j] <= out[j - 1]:
            out[j] = np.nextafter(out[j - 1], np.inf)
    return out


def fit_mixture_model(coeff_samples, num_components: int, min_assign=None,
                      seed: int = 0) -> MixtureModel:
    """Fit one mixture per filter from lists of coefficient samples.

    Means come from :func:`kmeans_1d`; the shared variance is the average
    in-cluster variance over clusters with strictly more than ``min_assign``
    members (default: max(10, 0.1% of that filter's sample count)), falling
    back to all occupied clusters when none qualify.  Variances are floored
    at ``VARIANCE_FLOOR``.
    """
    m = int(num_components)
    means = np.empty((len(coeff_samples), m), dtype=np.float64)
    variances = np.empty(len(coeff_samples), dtype=np.float64)
    for i, samples in enumerate(coeff_samples):
        xs = np.asarray(samples, dtype=np.float64).ravel()
        centers = kmeans_1d(xs, m, seed=seed)
        assign = _assign(xs, centers)
        counts = np.bincount(assign, minlength=m)
        sums = np.bincount(assign, weights=xs, minlength=m)
        sqsums = np.bincount(assign, weights=xs * xs, minlength=m)
        occupied = counts > 0
        cvar = np.zeros(m, dtype=np.float64)
        mean_in = sums[occupied] / counts[occupied]
        cvar[occupied] = np.maximum(
            sqsums[occupied] / counts[occupied] - mean_in * mean_in, 0.0
        )
        threshold = (
            float(min_assign)
            if min_assign is not None
            else max(10.0, 1e-3 * xs.size)
        )
        eligible = counts > threshold
        if np.any(eligible):
            sigma2 = float(cvar[eligible].mean())
        else:
            sigma2 = float(cvar[occupied].mean())
        variances[i] = max(sigma2, VARIANCE_FLOOR)
        means[i] = _strictly_increasing(centers)
    return MixtureModel(means, variances)


def sample_coefficients(fields, bank, stride: int = 4, subset=None) -> list[np.ndarray]:
    """Coefficient samples per bank filter, subsampled on a stride grid.

    Returns one 1-D array per filter in ``range(len(bank))``; filters
    outside ``subset`` get empty arrays.  Neighboring coefficients are
    strongly correlated, so a coarse grid loses little.
    """
    from .bank import analyze

    active = sorted(set(range(len(bank)) if subset is None else subset))
    buckets: dict[int, list[np.ndarray]] = {i: [] for i in active}
    for y in fields:
        for i, coeff in analyze(y, bank, active):
            buckets[i].append(coeff[::stride, ::stride].ravel())
    out = []
    for i in range(len(bank)):
        if i in buckets and buckets[i]:
            out.append(np.concatenate(buckets[i]))
        else:
            out.append(np.empty(0))
    return out


def soft_targets(w: float, model: MixtureModel, i: int) -> np.ndarray:
    """Best-fit mixture weights for a known coefficient value ``w``."""
    z = -((w - model.means[i]) ** 2) / (2.0 * model.variances[i])
    z -= z.max()
    q = np.exp(z)
    return q / q.sum()


def soft_target_map(w_map: np.ndarray, model: MixtureModel, i: int) -> np.ndarray:
    """Vectorized :func:`soft_targets`: adds a trailing component axis."""
    w_map = np.asarray(w_map, dtype=np.float64)
    z = -((w_map[..., np.newaxis] - model.means[i]) ** 2) / (
        2.0 * model.variances[i]
    )
    z -= z.max(axis=-1, keepdims=True)
    q = np.exp(z)
    q /= q.sum(axis=-1, keepdims=True)
    return q


def kl_loss(predicted: WeightMap, targets: WeightMap, model: MixtureModel) -> float:
    """Variance-weighted KL divergence from targets to predictions.

    Averages sigma_i^2 * KL(q_i(n) || p_i(n)) over all pixels and listed
    filters; predictions are clamped at ``WEIGHT_CLAMP`` inside the log so
    zero-probability predictions stay finite.  Zero iff the maps agree.
    """
    if predicted.filter_indices != targets.filter_indices:
        raise ValueError("weight maps list different filters")
    if predicted.weights.shape != targets.weights.shape:
        raise ValueError("weight map shapes differ")
    total = 0.0
    for slot, i in enumerate(predicted.filter_indices):
        p = predicted.weights[:, :, slot, :].astype(np.float64)
        q = targets.weights[:, :, slot, :].astype(np.float64)
        log_p = np.log(np.maximum(p, WEIGHT_CLAMP))
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(q > 0.0, q * (log_p - np.log(q)), 0.0)
        total += model.variances[i] * float(term.sum())
    n = predicted.height * predicted.width
    return -total / (n * len(predicted.filter_indices))


def save_mixture_model(model: MixtureModel, path) -> None:
    k, m = model.means.shape
    with open(path, "wb") as f:
        f.write(_GMM_MAGIC)
        f.write(np.array([k, m], dtype="<u4").tobytes())
        f.write(model.means.astype("<f8").tobytes())
        f.write(model.variances.astype("<f8").tobytes())


def load_mixture_model(path) -> MixtureModel:
    data = Path(path).read_bytes()
    if data[:4] != _GMM_MAGIC:
        raise ValueError("bad magic")
    if len(data) < 12:
        raise ValueError("truncated payload")
    k, m = (int(v) for v in np.frombuffer(data[4:12], dtype="<u4"))
    expected = 12 + 8 * k * m + 8 * k
    if len(data) < expected:
        raise ValueError("truncated payload")
    if len(data) > expected:
        raise ValueError("trailing bytes after payload")
    means = np.frombuffer(data[12 : 12 + 8 * k * m], dtype="<f8").reshape(k, m)
    variances = np.frombuffer(data[12 + 8 * k * m : expected], dtype="<f8")
    return MixtureModel(means.copy(), variances.copy())
