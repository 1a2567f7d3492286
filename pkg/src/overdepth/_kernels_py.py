"""Pure-numpy twin of the compiled solver kernel.

Same contract as ``_kernels.posterior_select``; used when the extension
is unavailable or explicitly requested via OVERDEPTH_BACKEND=python.
"""

from __future__ import annotations

import numpy as np


def posterior_select(log_weights, centers, wbar, beta, sigma2, out):
    """Per-slot argmax of log p_hat_j - b*(c_j - wbar)^2 / (2*sigma2) with
    b = beta/(beta+1); writes (c_best + beta*wbar) / (1+beta) into ``out``.

    With beta = 0 this reduces to decoding the highest-weight component
    mean.  Ties go to the lowest component index (np.argmax convention).
    """
    if centers.shape[0] != log_weights.shape[1]:
        raise ValueError("centers length does not match component count")
    if wbar.shape[0] != log_weights.shape[0] or out.shape[0] != log_weights.shape[0]:
        raise ValueError("wbar/out length does not match slot count")
    scale = beta / ((beta + 1.0) * 2.0 * sigma2)
    diff = centers[np.newaxis, :] - wbar[:, np.newaxis]
    score = log_weights - scale * (diff * diff)
    best = np.argmax(score, axis=1)
    np.copyto(out, (centers[best] + beta * wbar) / (1.0 + beta))
