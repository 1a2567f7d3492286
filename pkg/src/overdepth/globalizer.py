"""Scene-map recovery from per-pixel coefficient distributions.

Alternating minimization with an auxiliary coefficient stack: given mixture
weights for every (pixel, filter) slot, repeatedly (a) solve a quadratic
problem for the scene map y in the Fourier domain and (b) re-decode each
coefficient from its posterior mixture, while the coupling weight beta
grows geometrically.  The solver works on an edge-replicated, periodic
padding of the input (pad radius = largest active filter radius) and crops
on return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bank import FilterBank, correlation_multiplier
from .mixture import MixtureModel, WeightMap

DEFAULT_BETA_INIT = 2.0**-10
DEFAULT_BETA_FINAL = 2.0**7
DEFAULT_BETA_GROWTH = 2.0 ** (1.0 / 8.0)
_DENOM_EPS = 1e-12
_MIN_PAD = 8


@dataclass(frozen=True)
class Regularizer:
    """Four 3x3 second-difference kernels (each sums to zero)."""

    kernels: tuple[np.ndarray, ...]


def laplacian_regularizer() -> Regularizer:
    """Second differences along rows, columns, and both diagonals (x1/2)."""
    horiz = np.array([[0, 0, 0], [1, -2, 1], [0, 0, 0]], dtype=np.float64)
    vert = horiz.T.copy()
    diag = 0.5 * np.array([[1, 0, 0], [0, -2, 0], [0, 0, 1]], dtype=np.float64)
    anti = 0.5 * np.array([[0, 0, 1], [0, -2, 0], [1, 0, 0]], dtype=np.float64)
    for k in (horiz, vert, diag, anti):
        k.setflags(write=False)
    return Regularizer((horiz, vert, diag, anti))


@dataclass
class SolverConfig:
    """Solve settings: beta schedule, active filters, regularizer weight."""

    subset: tuple[int, ...] | None = None
    beta_init: float = DEFAULT_BETA_INIT
    beta_final: float = DEFAULT_BETA_FINAL
    beta_growth: float = DEFAULT_BETA_GROWTH
    reg_weight: float = 1.0
    pad_mode: str = "replicate"
    record_trace: bool = False

    def __post_init__(self):
        if not 0.0 < self.beta_init <= self.beta_final:
            raise ValueError("need 0 < beta_init <= beta_final")
        if self.beta_growth <= 1.0:
            raise ValueError("beta_growth must be > 1")
        if self.reg_weight < 0.0:
            raise ValueError("reg_weight must be >= 0")
        if self.pad_mode != "replicate":
            raise ValueError("only replicate padding is supported")
        if self.subset is not None:
            self.subset = tuple(sorted(set(int(i) for i in self.subset)))
            if not self.subset:
                raise ValueError("empty filter subset")


@dataclass
class SolveTrace:
    """Per-iteration beta, objective (NaN unless recorded), mean residual."""

    betas: np.ndarray
    objectives: np.ndarray
    residuals: np.ndarray
    dc_guard: bool = False

    def __len__(self) -> int:
        return len(self.betas)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as f:
            f.write("iter,beta,objective,residual\n")
            for t in range(len(self.betas)):
                f.write(
                    f"{t},{float(self.betas[t])!r},{float(self.objectives[t])!r},"
                    f"{float(self.residuals[t])!r}\n"
                )


def beta_schedule(
    beta_init: float = DEFAULT_BETA_INIT,
    beta_final: float = DEFAULT_BETA_FINAL,
    beta_growth: float = DEFAULT_BETA_GROWTH,
) -> np.ndarray:
    """Geometric ladder from beta_init through beta_final inclusive."""
    steps = math.log(beta_final / beta_init) / math.log(beta_growth)
    count = int(math.floor(steps + 1e-9)) + 1
    return beta_init * beta_growth ** np.arange(count, dtype=np.float64)


def _log_weights(w: np.ndarray) -> np.ndarray:
    """float32 log of weights with exact zeros mapped to -inf, warning-free."""
    out = np.full(w.shape, -np.inf, dtype=np.float32)
    positive = w > 0
    np.log(w, out=out, where=positive)
    return out


def init_w(weights: WeightMap, model: MixtureModel) -> np.ndarray:
    """Decode every slot to its highest-weight component mean, (F, H, W)."""
    f = len(weights.filter_indices)
    out = np.empty((f, weights.height, weights.width), dtype=np.float64)
    best = np.argmax(weights.weights, axis=3)
    for slot, i in enumerate(weights.filter_indices):
        out[slot] = model.means[i][best[:, :, slot]]
    return out


def w_step(p_hat, w_bar: float, beta: float, model: MixtureModel, i: int) -> float:
    """Single-slot coefficient update.

    Scores each component j by log p_hat_j - (beta/(beta+1)) *
    (c_j - w_bar)^2 / (2 sigma_i^2) (the log posterior weight up to a
    constant) and returns the winning component's posterior mean
    (c_j + beta*w_bar) / (1 + beta).  Ties go to the lowest j.
    """
    p_hat = np.asarray(p_hat, dtype=np.float64)
    c = model.means[i]
    with np.errstate(divide="ignore"):
        log_p = np.log(p_hat)
    scale = beta / ((beta + 1.0) * 2.0 * model.variances[i])
    score = log_p - scale * (c - w_bar) ** 2
    j = int(np.argmax(score))
    return float((c[j] + beta * w_bar) / (1.0 + beta))


def _reg_denominator(reg: Regularizer, shape: tuple[int, int]) -> np.ndarray:
    total = None
    for k in reg.kernels:
        m = correlation_multiplier(k, shape)
        power = (m * np.conj(m)).real
        total = power if total is None else total + power
    return total


def y_step(
    w_stack: np.ndarray,
    bank: FilterBank,
    subset,
    beta: float,
    reg: Regularizer | None = None,
    reg_weight: float = 1.0,
) -> np.ndarray:
    """Quadratic scene-map update on the (periodic) domain of ``w_stack``.

    Minimizes beta * sum_i ||k_i o y - w_i||^2 + reg_weight * sum_r
    ||d_r o y||^2 over y, where o is circular correlation; solved per
    frequency as Y = beta * sum conj(K_i) W_i / (beta * sum |K_i|^2 +
    reg_weight * sum |D_r|^2).  Frequencies where the denominator vanishes
    (possible only at DC for derivative-only subsets) get a tiny epsilon.
    """
    subset = tuple(sorted(set(int(i) for i in subset)))
    w_stack = np.asarray(w_stack, dtype=np.float64)
    if w_stack.ndim != 3 or w_stack.shape[0] != len(subset):
        raise ValueError("w_stack must be (num_filters, H, W) matching subset")
    shape = w_stack.shape[1:]
    reg = reg or laplacian_regularizer()
    numerator = None
    den_data = None
    for slot, i in enumerate(subset):
        m = bank.multiplier(i, shape)
        term = np.conj(m) * np.fft.rfft2(w_stack[slot])
        power = (m * np.conj(m)).real
        numerator = term if numerator is None else numerator + term
        den_data = power if den_data is None else den_data + power
    denom = beta * den_data + reg_weight * _reg_denominator(reg, shape)
    denom[denom == 0.0] = _DENOM_EPS
    return np.fft.irfft2(beta * numerator / denom, s=shape)


def _mixture_log_density(log_p, centers, sigma2, w):
    """log of the Gaussian-mixture density at w for each slot; (P,) out."""
    z = log_p - (w[:, np.newaxis] - centers[np.newaxis, :]) ** 2 / (2.0 * sigma2)
    zmax = z.max(axis=1)
    lse = zmax + np.log(np.exp(z - zmax[:, np.newaxis]).sum(axis=1))
    return lse - 0.5 * math.log(2.0 * math.pi * sigma2)


def objective_eq6(
    y: np.ndarray,
    w_stack: np.ndarray,
    weights: WeightMap,
    model: MixtureModel,
    bank: FilterBank,
    beta: float,
    reg: Regularizer | None = None,
    reg_weight: float = 1.0,
) -> float:
    """Split-objective value on the (periodic) domain of ``y``:

    sum_i sigma_i^2 * (-log mixture_i(w_i)) summed over pixels
    + (beta/2) * sum ||w_i - k_i o y||^2
    + (reg_weight/2) * sum_r ||d_r o y||^2.
    """
    y = np.asarray(y, dtype=np.float64)
    subset = weights.filter_indices
    if w_stack.shape != (len(subset), *y.shape):
        raise ValueError("w_stack shape does not match weight map and y")
    if weights.weights.shape[:2] != y.shape:
        raise ValueError("weight map dimensions do not match y")
    reg = reg or laplacian_regularizer()
    spectrum = np.fft.rfft2(y)
    total = 0.0
    for slot, i in enumerate(subset):
        log_p = _log_weights(weights.weights[:, :, slot, :]).reshape(-1, model.num_components)
        w = w_stack[slot].ravel()
        log_lik = _mixture_log_density(
            log_p.astype(np.float64), model.means[i], model.variances[i], w
        )
        total -= model.variances[i] * float(log_lik.sum())
        wbar = np.fft.irfft2(bank.multiplier(i, y.shape) * spectrum, s=y.shape)
        total += 0.5 * beta * float(((w_stack[slot] - wbar) ** 2).sum())
    for k in reg.kernels:
        d = np.fft.irfft2(correlation_multiplier(k, y.shape) * spectrum, s=y.shape)
        total += 0.5 * reg_weight * float((d * d).sum())
    return total


def globalize(
    weights: WeightMap,
    model: MixtureModel,
    bank: FilterBank,
    config: SolverConfig | None = None,
) -> tuple[np.ndarray, SolveTrace]:
    """Recover a scene map from a weight map.

    The solve runs on a periodic domain padded by max(largest active
    filter radius, 8); pad slots carry uniform (uninformative) weight
    rows so the solver extends the map freely there, and their
    coefficients start from the edge-replicated interior decode.  The
    interior coefficient stack is initialized by per-slot argmax decoding;
    iterations alternate the Fourier y-update and the per-slot posterior
    re-decode across the beta ladder.  Returns the y of the final-beta
    update, cropped to the input size, plus a per-iteration trace.  When
    no zeroth-order filter is active the mean level is unobservable; the
    output is then shifted to match the decoded mean of a zeroth-order
    filter present in the weight map (if any) and the trace flags it.
    """
    config = config or SolverConfig()
    if model.num_filters != len(bank):
        raise ValueError("model filter count does not match bank")
    if model.num_components != weights.num_components:
        raise ValueError("model component count does not match weight map")
    subset = config.subset if config.subset is not None else weights.filter_indices
    subset = tuple(sorted(set(subset)))
    missing = [i for i in subset if i not in weights.filter_indices]
    if missing:
        raise ValueError(f"weight map does not cover filters {missing}")
    if subset[0] < 0 or subset[-1] >= len(bank):
        raise ValueError("filter index out of range")

    h, w = weights.height, weights.width
    r = max(bank.max_radius(subset), _MIN_PAD)
    hp, wp = h + 2 * r, w + 2 * r
    n_slots = hp * wp
    n_filters = len(subset)
    m = model.num_components

    centers = [model.means[i] for i in subset]
    sig2 = [float(model.variances[i]) for i in subset]
    log_uniform = np.float32(-math.log(m))
    log_p = np.empty((n_filters, n_slots, m), dtype=np.float32)
    w_stack = np.empty((n_filters, n_slots), dtype=np.float64)
    zeros = np.zeros(h * w, dtype=np.float64)
    w_init = np.empty(h * w, dtype=np.float64)
    for f, i in enumerate(subset):
        lw = _log_weights(weights.weights[:, :, weights.slot(i), :])
        kernels.posterior_select(
            lw.reshape(h * w, m), centers[f], zeros, 0.0, sig2[f], w_init
        )
        w_stack[f] = np.pad(w_init.reshape(h, w), r, mode="edge").ravel()
        padded = np.full((hp, wp, m), log_uniform, dtype=np.float32)
        padded[r : r + h, r : r + w] = lw
        log_p[f] = padded.reshape(n_slots, m)

    mult = [bank.multiplier(i, (hp, wp)) for i in subset]
    den_data = np.zeros(mult[0].shape, dtype=np.float64)
    for mm in mult:
        den_data += (mm * np.conj(mm)).real
    reg = laplacian_regularizer()
    den_reg = config.reg_weight * _reg_denominator(reg, (hp, wp))
    reg_mult = [correlation_multiplier(k, (hp, wp)) for k in reg.kernels]
    dc_guard = bool(den_data[0, 0] <= _DENOM_EPS)

    betas = beta_schedule(config.beta_init, config.beta_final, config.beta_growth)
    residuals = np.empty(len(betas), dtype=np.float64)
    objectives = np.full(len(betas), np.nan)
    y_full = None
    for t, beta in enumerate(betas):
        numerator = np.zeros(mult[0].shape, dtype=np.complex128)
        for f in range(n_filters):
            numerator += np.conj(mult[f]) * np.fft.rfft2(
                w_stack[f].reshape(hp, wp)
            )
        denom = beta * den_data + den_reg
        denom[denom == 0.0] = _DENOM_EPS
        spectrum = beta * numerator / denom
        y_full = np.fft.irfft2(spectrum, s=(hp, wp))

        resid = 0.0
        nll = 0.0
        coupling = 0.0
        for f in range(n_filters):
            wbar = np.fft.irfft2(mult[f] * spectrum, s=(hp, wp)).ravel()
            kernels.posterior_select(
                log_p[f], centers[f], wbar, beta, sig2[f], w_stack[f]
            )
            diff = w_stack[f] - wbar
            resid += float(np.abs(diff).mean())
            if config.record_trace:
                coupling += 0.5 * beta * float((diff * diff).sum())
                log_lik = _mixture_log_density(
                    log_p[f].astype(np.float64), centers[f], sig2[f], w_stack[f]
                )
                nll -= sig2[f] * float(log_lik.sum())
        residuals[t] = resid / n_filters
        if config.record_trace:
            smooth = 0.0
            for rm in reg_mult:
                d = np.fft.irfft2(rm * spectrum, s=(hp, wp))
                smooth += float((d * d).sum())
            objectives[t] = nll + coupling + 0.5 * config.reg_weight * smooth

    y_out = y_full[r : r + h, r : r + w].copy()
    if dc_guard:
        anchor = _zeroth_order_anchor(weights, bank, subset)
        if anchor is not None:
            i = anchor
            best = np.argmax(weights.weights[:, :, weights.slot(i), :], axis=2)
            target = float(model.means[i][best].mean())
            gain = float(bank[i].kernel.sum())
            y_out += target / gain - y_out.mean()
    trace = SolveTrace(betas, objectives, residuals, dc_guard)
    return y_out, trace


def _zeroth_order_anchor(weights: WeightMap, bank: FilterBank, subset) -> int | None:
    """A zeroth-order filter available in the weight map, impulse first."""
    candidates = [i for i in weights.filter_indices if bank[i].order == 0]
    if not candidates:
        return None
    return min(candidates)
