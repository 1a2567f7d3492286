# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loop of the alternating solver.

One call handles one filter: for every pixel slot it scores all mixture
components in the log domain, picks the best, and writes that component's
posterior mean.  This loop runs num_filters * num_iterations times per
solve and dominates runtime, hence the C path.
"""

from libc.math cimport INFINITY


def posterior_select(const float[:, ::1] log_weights,
                     const double[::1] centers,
                     const double[::1] wbar,
                     double beta,
                     double sigma2,
                     double[::1] out):
    """Per-slot argmax of log p_hat_j - b*(c_j - wbar)^2 / (2*sigma2) with
    b = beta/(beta+1); writes (c_best + beta*wbar) / (1+beta) into ``out``.

    With beta = 0 this reduces to decoding the highest-weight component
    mean.  Ties go to the lowest component index.
    """
    cdef Py_ssize_t n = log_weights.shape[0]
    cdef Py_ssize_t m = log_weights.shape[1]
    if centers.shape[0] != m:
        raise ValueError("centers length does not match component count")
    if wbar.shape[0] != n or out.shape[0] != n:
        raise ValueError("wbar/out length does not match slot count")
    cdef double scale = beta / ((beta + 1.0) * 2.0 * sigma2)
    cdef double shrink = 1.0 / (1.0 + beta)
    cdef Py_ssize_t p, j, best
    cdef double wb, diff, score, best_score
    for p in range(n):
        wb = wbar[p]
        best = 0
        best_score = -INFINITY
        for j in range(m):
            diff = centers[j] - wb
            score = <double> log_weights[p, j] - scale * (diff * diff)
            if score > best_score:
                best_score = score
                best = j
        out[p] = (centers[best] + beta * wb) * shrink
