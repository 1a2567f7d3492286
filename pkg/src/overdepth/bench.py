"""Timing comparison between the compiled and numpy decode kernels.

Two stages: a microbenchmark of ``posterior_select`` alone, and a small
end-to-end solve run once per backend (swapping the kernel the solver
module dispatches through).  Outputs are checked to agree across backends.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels
from .kernels import available_backends


def _best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_benchmark(slots: int, comps: int, repeats: int, seed: int = 0):
    """Per-backend best time for one posterior_select call; rows of dicts."""
    rng = np.random.default_rng(seed)
    p = rng.random((slots, comps)) + 1e-6
    p /= p.sum(axis=1, keepdims=True)
    log_p = np.log(p).astype(np.float32)
    centers = np.sort(rng.normal(size=comps))
    wbar = rng.normal(size=slots)
    beta, sigma2 = 1.0, 0.05
    rows = []
    outputs = {}
    for name, mod in available_backends().items():
        out = np.empty(slots, dtype=np.float64)
        mod.posterior_select(log_p, centers, wbar, beta, sigma2, out)  # warmup
        seconds = _best_time(
            lambda: mod.posterior_select(log_p, centers, wbar, beta, sigma2, out),
            repeats,
        )
        outputs[name] = out.copy()
        rows.append({"backend": name, "seconds": seconds})
    names = list(outputs)
    agree = all(np.array_equal(outputs[names[0]], outputs[n]) for n in names[1:])
    return rows, agree


def solve_benchmark(size: int, seed: int = 0):
    """One tiny full-bank solve per backend; returns rows and max |delta y|."""
    from .bank import build_filter_bank
    from .globalizer import SolverConfig, globalize
    from .mixture import fit_mixture_model, sample_coefficients
    from .predictor import synth_predict
    from .synth import make_corpus

    bank = build_filter_bank()
    corpus = make_corpus(8, (size, size), seed)
    model = fit_mixture_model(
        sample_coefficients(corpus, bank, stride=4), 16, seed=seed
    )
    rng = np.random.default_rng(seed + 1)
    from .synth import bump_field

    y_true = bump_field((size, size), rng)
    wmap = synth_predict(y_true, bank, model)

    rows = []
    results = {}
    original = kernels.posterior_select
    try:
        for name, mod in available_backends().items():
            kernels.posterior_select = mod.posterior_select
            t0 = time.perf_counter()
            y, _ = globalize(wmap, model, bank, SolverConfig())
            rows.append({"backend": name, "seconds": time.perf_counter() - t0})
            results[name] = y
    finally:
        kernels.posterior_select = original
    names = list(results)
    max_delta = 0.0
    for n in names[1:]:
        max_delta = max(max_delta, float(np.abs(results[names[0]] - results[n]).max()))
    return rows, max_delta


def format_report(
    slots: int = 12_544,
    comps: int = 64,
    repeats: int = 5,
    solve_size: int = 32,
    seed: int = 0,
    skip_solve: bool = False,
) -> str:
    lines = [f"active backend: {kernels.BACKEND}"]
    rows, agree = kernel_benchmark(slots, comps, repeats, seed)
    lines.append(f"kernel: {slots} slots x {comps} components, best of {repeats}")
    base = max(r["seconds"] for r in rows)
    for r in rows:
        speedup = base / r["seconds"] if r["seconds"] > 0 else float("inf")
        lines.append(f"  {r['backend']:7s} {r['seconds'] * 1e3:9.3f} ms  ({speedup:5.1f}x)")
    lines.append(f"  outputs identical: {agree}")
    if not skip_solve and len(rows) > 1:
        srows, max_delta = solve_benchmark(solve_size, seed)
        lines.append(f"solve: {solve_size}x{solve_size}, full bank, full schedule")
        for r in srows:
            lines.append(f"  {r['backend']:7s} {r['seconds']:9.3f} s")
        lines.append(f"  max |delta y| across backends: {max_delta:.3e}")
    return "\n".join(lines)
