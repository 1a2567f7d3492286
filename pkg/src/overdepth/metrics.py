"""Depth/scene-map conversions and standard depth-accuracy metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DepthMetrics:
    rmse_lin: float
    rmse_log: float
    abs_rel: float
    sqr_rel: float
    delta1: float
    delta2: float
    delta3: float

    def as_dict(self) -> dict[str, float]:
        return {
            "rmse_lin": self.rmse_lin,
            "rmse_log": self.rmse_log,
            "abs_rel": self.abs_rel,
            "sqr_rel": self.sqr_rel,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta3": self.delta3,
        }

    def format_line(self) -> str:
        """Single-line record with six significant digits per field."""
        body = ", ".join(f'"{k}": {v:.6g}' for k, v in self.as_dict().items())
        return "{" + body + "}"


def depth_to_scene(z: np.ndarray, z_min: float = 0.1) -> np.ndarray:
    """Scene map y = 1 / max(z, z_min)."""
    return 1.0 / np.maximum(np.asarray(z, dtype=np.float64), z_min)


def scene_to_depth(y: np.ndarray, z_min: float = 0.1, z_max: float = 10.0) -> np.ndarray:
    """Depth z = clamp(1/y, z_min, z_max)."""
    y = np.asarray(y, dtype=np.float64)
    with np.errstate(divide="ignore"):
        z = 1.0 / y
    return np.clip(z, z_min, z_max)


def evaluate(z_hat: np.ndarray, z_true: np.ndarray, mask=None) -> DepthMetrics:
    """Pixel-pooled accuracy of predicted depth against ground truth.

    rmse_lin/rmse_log are root mean square errors of z and ln z, abs_rel
    and sqr_rel are mean |dz|/z and |dz|^2/z, and deltaT is the fraction of
    pixels with max(z/zhat, zhat/z) strictly below 1.25**T.
    """
    z_hat = np.asarray(z_hat, dtype=np.float64)
    z_true = np.asarray(z_true, dtype=np.float64)
    if z_hat.shape != z_true.shape:
        raise ValueError("depth map shapes differ")
    if mask is None:
        mask = np.ones(z_true.shape, dtype=bool)
    else:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != z_true.shape:
            raise ValueError("mask shape differs from depth maps")
    if not mask.any():
        raise ValueError("empty mask")
    zh = z_hat[mask]
    zt = z_true[mask]
    if np.any(zh <= 0) or np.any(zt <= 0) or not (
        np.all(np.isfinite(zh)) and np.all(np.isfinite(zt))
    ):
        raise ValueError("depths must be positive and finite under the mask")
    diff = zt - zh
    ratio = np.maximum(zt / zh, zh / zt)
    return DepthMetrics(
        rmse_lin=float(np.sqrt(np.mean(diff**2))),
        rmse_log=float(np.sqrt(np.mean((np.log(zt) - np.log(zh)) ** 2))),
        abs_rel=float(np.mean(np.abs(diff) / zt)),
        sqr_rel=float(np.mean(diff**2 / zt)),
        delta1=float(np.mean(ratio < 1.25)),
        delta2=float(np.mean(ratio < 1.25**2)),
        delta3=float(np.mean(ratio < 1.25**3)),
    )
