"""Grayscale PFM float rasters.

Header: "Pf", then "W H", then the scale line whose sign encodes byte
order (we write -1.0, little-endian).  Pixel rows are stored bottom-up
per the format's convention; readers get arrays back in top-down (H, W)
order.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def write_pfm(field: np.ndarray, path) -> None:
    field = np.asarray(field, dtype=np.float32)
    if field.ndim != 2:
        raise ValueError("only single-channel 2-D maps are supported")
    h, w = field.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.flipud(field).astype("<f4").tobytes())


def read_pfm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    try:
        magic_end = data.index(b"\n")
        dims_end = data.index(b"\n", magic_end + 1)
        scale_end = data.index(b"\n", dims_end + 1)
    except ValueError:
        raise ValueError("truncated PFM header") from None
    if data[:magic_end].strip() != b"Pf":
        raise ValueError("bad magic (expected grayscale 'Pf')")
    dims = data[magic_end + 1 : dims_end].split()
    if len(dims) != 2:
        raise ValueError("malformed PFM dimension line")
    w, h = int(dims[0]), int(dims[1])
    scale = float(data[dims_end + 1 : scale_end])
    dtype = "<f4" if scale < 0 else ">f4"
    payload = data[scale_end + 1 :]
    if len(payload) < 4 * w * h:
        raise ValueError("truncated PFM payload")
    field = np.frombuffer(payload[: 4 * w * h], dtype=dtype).reshape(h, w)
    field = np.flipud(field).astype(np.float64)
    if not np.all(np.isfinite(field)):
        raise ValueError("PFM payload contains non-finite values")
    return field
