"""Derivative-of-Gaussian filter bank and coefficient-map computation.

Scene maps are plain 2-D float64 arrays with shape ``(height, width)``;
axis 0 is y (rows), axis 1 is x (columns).  A bank of 64 filters turns one
scene map into an overcomplete stack of coefficient maps, one per filter,
via same-size correlation with edge-replicate boundary handling.

Bank layout (indices are stable and relied upon by file formats):

    index 0            1x1 impulse (identity; "scale 0")
    then per scale s in 1, 2, 3 (sigma = 2**s px), blocks of 21:
        +0             Gaussian, L2 norm 1/4
        +1  .. +8      first derivative along theta_k = k*pi/8, k = 0..7
        +9  .. +16     second derivative along theta_k, k = 0..7
        +17 .. +20     mixed second derivative (along theta_k and its
                       orthogonal), k = 0..3

First/second/mixed kernels are mean-corrected to exactly zero sum, then
scaled to unit L2 norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

NUM_FILTERS = 64
SCALES = (1, 2, 3)
_ORIENTATIONS = 8
_CROSS_ORIENTATIONS = 4


class FilterKind(Enum):
    IMPULSE = "impulse"
    GAUSSIAN = "gaussian"
    FIRST_DERIV = "first_deriv"
    SECOND_DERIV = "second_deriv"
    CROSS_DERIV = "cross_deriv"


@dataclass(frozen=True)
class Filter:
    """One bank entry: an odd-sided 2-D kernel plus its metadata."""

    kernel: np.ndarray
    scale: int
    order: int
    orientation_index: int
    kind: FilterKind

    @property
    def radius(self) -> int:
        return self.kernel.shape[0] // 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.kernel))


@dataclass
class FilterBank:
    """Ordered, immutable collection of filters (index 0 is the impulse)."""

    filters: tuple[Filter, ...]
    _multipliers: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.filters)

    def __getitem__(self, i: int) -> Filter:
        return self.filters[i]

    def radius(self, i: int) -> int:
        return self.filters[i].radius

    def max_radius(self, subset=None) -> int:
        indices = range(len(self.filters)) if subset is None else subset
        return max(self.filters[i].radius for i in indices)

    def multiplier(self, i: int, shape: tuple[int, int]) -> np.ndarray:
        """Fourier multiplier of filter ``i`` on a periodic ``shape`` domain.

        Multiplying ``rfft2`` of a field by this and inverting reproduces
        the same correlation that the spatial path computes (circularly).
        Results are cached per (index, shape).
        """
        key = (i, shape)
        cached = self._multipliers.get(key)
        if cached is None:
            cached = correlation_multiplier(self.filters[i].kernel, shape)
            cached.setflags(write=False)
            self._multipliers[key] = cached
        return cached


def _sampled_gaussian(sigma: float):
    r = math.ceil(3.0 * sigma)
    ax = np.arange(-r, r + 1, dtype=np.float64)
    xx = ax[np.newaxis, :]
    yy = ax[:, np.newaxis]
    g = np.exp(-(xx * xx + yy * yy) / (2.0 * sigma * sigma))
    return xx, yy, g


def _finish(kernel: np.ndarray, order: int, kind: FilterKind) -> np.ndarray:
    if order >= 1:
        kernel = kernel - kernel.mean()
    target = 0.25 if kind is FilterKind.GAUSSIAN else 1.0
    kernel = kernel * (target / np.linalg.norm(kernel))
    kernel.setflags(write=False)
    return kernel


def build_filter_bank() -> FilterBank:
    """Construct the 64-filter bank: impulse + 21 filters per scale 1..3."""
    impulse = np.ones((1, 1), dtype=np.float64)
    impulse.setflags(write=False)
    filters = [Filter(impulse, 0, 0, 0, FilterKind.IMPULSE)]
    for s in SCALES:
        sigma = float(2**s)
        xx, yy, g = _sampled_gaussian(sigma)
        s2 = sigma * sigma
        gx = -(xx / s2) * g
        gy = -(yy / s2) * g
        gxx = (xx * xx / s2 - 1.0) / s2 * g
        gyy = (yy * yy / s2 - 1.0) / s2 * g
        gxy = (xx * yy) / (s2 * s2) * g

        filters.append(
            Filter(_finish(g, 0, FilterKind.GAUSSIAN), s, 0, 0, FilterKind.GAUSSIAN)
        )
        thetas = [k * math.pi / _ORIENTATIONS for k in range(_ORIENTATIONS)]
        for k, t in enumerate(thetas):
            c, sn = math.cos(t), math.sin(t)
            kern = _finish(c * gx + sn * gy, 1, FilterKind.FIRST_DERIV)
            filters.append(Filter(kern, s, 1, k, FilterKind.FIRST_DERIV))
        for k, t in enumerate(thetas):
            c, sn = math.cos(t), math.sin(t)
            kern = _finish(
                c * c * gxx + 2.0 * c * sn * gxy + sn * sn * gyy,
                2,
                FilterKind.SECOND_DERIV,
            )
            filters.append(Filter(kern, s, 2, k, FilterKind.SECOND_DERIV))
        for k in range(_CROSS_ORIENTATIONS):
            t = k * math.pi / _ORIENTATIONS
            c, sn = math.cos(t), math.sin(t)
            kern = _finish(
                sn * c * (gyy - gxx) + (c * c - sn * sn) * gxy,
                2,
                FilterKind.CROSS_DERIV,
            )
            filters.append(Filter(kern, s, 2, k, FilterKind.CROSS_DERIV))
    assert len(filters) == NUM_FILTERS
    return FilterBank(tuple(filters))


def correlation_multiplier(kernel: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """rfft2 multiplier realizing circular correlation with ``kernel``.

    The kernel center lands on the origin of the periodic domain; kernels
    larger than the domain alias (fold) exactly as a circulant matrix
    built from the same taps would.
    """
    h, w = shape
    ry = kernel.shape[0] // 2
    rx = kernel.shape[1] // 2
    embedded = np.zeros(shape, dtype=np.float64)
    iy = (ry - np.arange(kernel.shape[0])) % h
    ix = (rx - np.arange(kernel.shape[1])) % w
    np.add.at(embedded, (iy[:, np.newaxis], ix[np.newaxis, :]), kernel)
    return np.fft.rfft2(embedded)


def _replicate_pad(field: np.ndarray, ry: int, rx: int) -> np.ndarray:
    if ry == 0 and rx == 0:
        return field
    return np.pad(field, ((ry, ry), (rx, rx)), mode="edge")


def convolve_same(field: np.ndarray, filt: Filter) -> np.ndarray:
    """Same-size correlation of ``field`` with ``filt.kernel``.

    Edge-replicate padding; output pixel n is sum_u kernel(u) * field(n+u)
    with u running over the centered kernel support.
    """
    field = np.asarray(field, dtype=np.float64)
    if field.ndim != 2 or field.shape[0] < 1 or field.shape[1] < 1:
        raise ValueError("field must be a 2-D array with at least one pixel")
    k = filt.kernel
    ry, rx = k.shape[0] // 2, k.shape[1] // 2
    if ry == 0 and rx == 0:
        return field * k[0, 0]
    padded = _replicate_pad(field, ry, rx)
    mult = correlation_multiplier(k, padded.shape)
    out = np.fft.irfft2(np.fft.rfft2(padded) * mult, s=padded.shape)
    return out[ry : ry + field.shape[0], rx : rx + field.shape[1]]


def analyze(
    y: np.ndarray, bank: FilterBank, subset=None
) -> list[tuple[int, np.ndarray]]:
    """Coefficient maps of ``y`` for each filter index in ``subset``.

    Equivalent to calling :func:`convolve_same` per filter but shares one
    padded transform across the whole subset.
    """
    if subset is None:
        subset = range(len(bank))
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise ValueError("empty filter subset")
    if subset[0] < 0 or subset[-1] >= len(bank):
        raise ValueError("filter index out of range")
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or min(y.shape) < 1:
        raise ValueError("field must be a 2-D array with at least one pixel")
    r = bank.max_radius(subset)
    padded = _replicate_pad(y, r, r)
    spectrum = np.fft.rfft2(padded)
    h, w = y.shape
    out = []
    for i in subset:
        if bank.radius(i) == 0:
            coeff = y * bank[i].kernel[0, 0]
        else:
            full = np.fft.irfft2(
                spectrum * bank.multiplier(i, padded.shape), s=padded.shape
            )
            coeff = full[r : r + h, r : r + w].copy()
        out.append((i, coeff))
    return out


def named_subsets(bank: FilterBank) -> dict[str, tuple[int, ...]]:
    """Predefined filter groups selectable by name (unions are allowed)."""
    groups: dict[str, list[int]] = {
        "full": list(range(len(bank))),
        "scale0": [],
        "scale1": [],
        "scale2": [],
        "scale3": [],
        "order0": [],
        "order1": [],
        "order2": [],
    }
    for i, f in enumerate(bank.filters):
        groups[f"scale{f.scale}"].append(i)
        groups[f"order{f.order}"].append(i)
    return {name: tuple(ids) for name, ids in groups.items()}


def resolve_subset(spec: str, bank: FilterBank) -> tuple[int, ...]:
    """Parse a comma list of group names and/or filter indices into indices."""
    groups = named_subsets(bank)
    chosen: set[int] = set()
    for token in spec.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token in groups:
            chosen.update(groups[token])
        else:
            try:
                idx = int(token)
            except ValueError:
                raise ValueError(f"unknown filter group or index: {token!r}") from None
            if not 0 <= idx < len(bank):
                raise ValueError(f"filter index out of range: {idx}")
            chosen.add(idx)
    if not chosen:
        raise ValueError("empty filter subset")
    return tuple(sorted(chosen))
