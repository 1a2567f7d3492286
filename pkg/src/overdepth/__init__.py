"""Dense scene-map (inverse depth) recovery from per-pixel probability
distributions over an overcomplete set of depth-derivative coefficients.

Pipeline: a 64-filter derivative-of-Gaussian bank turns scene maps into
coefficient stacks; per-filter Gaussian mixtures model coefficient values;
weight maps (predicted or synthesized) give per-slot component weights;
an FFT-accelerated alternating solver recovers the single scene map most
consistent with all of them.
"""

from .bank import (
    Filter,
    FilterBank,
    FilterKind,
    NUM_FILTERS,
    analyze,
    build_filter_bank,
    convolve_same,
    correlation_multiplier,
    named_subsets,
    resolve_subset,
)
from .globalizer import (
    DEFAULT_BETA_FINAL,
    DEFAULT_BETA_GROWTH,
    DEFAULT_BETA_INIT,
    Regularizer,
    SolveTrace,
    SolverConfig,
    beta_schedule,
    globalize,
    init_w,
    laplacian_regularizer,
    objective_eq6,
    w_step,
    y_step,
)
from .kernels import BACKEND
from .metrics import DepthMetrics, depth_to_scene, evaluate, scene_to_depth
from .mixture import (
    MixtureModel,
    WeightMap,
    fit_mixture_model,
    kl_loss,
    kmeans_1d,
    load_mixture_model,
    sample_coefficients,
    save_mixture_model,
    soft_target_map,
    soft_targets,
)
from .pfm import read_pfm, write_pfm
from .predictor import (
    CorruptionConfig,
    read_weight_map,
    synth_predict,
    write_weight_map,
)
from .synth import bump_field, make_corpus

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CorruptionConfig",
    "DEFAULT_BETA_FINAL",
    "DEFAULT_BETA_GROWTH",
    "DEFAULT_BETA_INIT",
    "DepthMetrics",
    "Filter",
    "FilterBank",
    "FilterKind",
    "MixtureModel",
    "NUM_FILTERS",
    "Regularizer",
    "SolveTrace",
    "SolverConfig",
    "WeightMap",
    "analyze",
    "beta_schedule",
    "build_filter_bank",
    "bump_field",
    "convolve_same",
    "correlation_multiplier",
    "depth_to_scene",
    "evaluate",
    "fit_mixture_model",
    "globalize",
    "init_w",
    "kl_loss",
    "kmeans_1d",
    "laplacian_regularizer",
    "load_mixture_model",
    "make_corpus",
    "named_subsets",
    "objective_eq6",
    "read_pfm",
    "read_weight_map",
    "resolve_subset",
    "sample_coefficients",
    "save_mixture_model",
    "scene_to_depth",
    "soft_target_map",
    "soft_targets",
    "synth_predict",
    "w_step",
    "write_pfm",
    "write_weight_map",
    "y_step",
]
