"""Temporal logic concepts for interpretable time series classification.

The pipeline: sample random temporal logic formulae from a grammar, keep a
diverse subset as concepts, embed trajectories by their robustness against
every concept, train a linear classifier over class-discriminability scores,
and read explanations back out of the weights as satisfied formulae.
"""

from .bank import (
    ConceptBank,
    GrammarConfig,
    load_bank,
    rescale_bank,
    sample_formula,
    save_bank,
    select_concepts,
    signature,
)
from .data import (
    Dataset,
    NormalizationRecord,
    fit_normalization,
    load_dataset,
    load_multivariate_json,
    load_ucr_tsv,
    save_multivariate_json,
    save_ucr_tsv,
    standardize,
)
from .errors import HorizonError, ParseError
from .explain import (
    GlobalExplanation,
    LocalExplanation,
    global_explanation,
    greedy_cover,
    local_explanation,
    relevance,
    rewrite,
    select_relevant,
    simplify_for_sample,
)
from .formula import (
    And,
    Eventually,
    FALSE,
    Formula,
    Globally,
    Not,
    Or,
    Pred,
    TRUE,
    TrueNode,
    Until,
    format_formula,
    horizon,
    nnf,
    size,
    variables,
)
from .kernel import (
    KernelContext,
    cross_kernel,
    formula_kernel,
    median_squared_distance,
    trajectory_affinity,
)
from .measure import MeasureConfig, sample_measure, sample_values
from .model import (
    ClassStats,
    ConceptModel,
    ForwardPass,
    TrainConfig,
    attention,
    discriminability,
    embed,
    embed_batch,
    fit_stats,
    forward,
    load_model,
    predict_batch,
    save_model,
    train,
)
from .monitor import (
    LARGE,
    boolean_sat,
    robustness,
    robustness_trace,
    robustness_trace_batch,
    sat_trace_batch,
)
from .parser import parse_formula
from .synthetic import make_spike_dataset
from .trajectory import Trajectory

__version__ = "0.1.0"

__all__ = [
    "And",
    "ClassStats",
    "ConceptBank",
    "ConceptModel",
    "Dataset",
    "Eventually",
    "FALSE",
    "Formula",
    "ForwardPass",
    "GlobalExplanation",
    "Globally",
    "GrammarConfig",
    "HorizonError",
    "KernelContext",
    "LARGE",
    "LocalExplanation",
    "MeasureConfig",
    "NormalizationRecord",
    "Not",
    "Or",
    "ParseError",
    "Pred",
    "TRUE",
    "TrainConfig",
    "Trajectory",
    "TrueNode",
    "Until",
    "attention",
    "boolean_sat",
    "cross_kernel",
    "discriminability",
    "embed",
    "embed_batch",
    "fit_normalization",
    "fit_stats",
    "format_formula",
    "formula_kernel",
    "forward",
    "global_explanation",
    "greedy_cover",
    "horizon",
    "load_bank",
    "load_dataset",
    "load_model",
    "load_multivariate_json",
    "load_ucr_tsv",
    "local_explanation",
    "make_spike_dataset",
    "median_squared_distance",
    "nnf",
    "parse_formula",
    "predict_batch",
    "relevance",
    "rescale_bank",
    "rewrite",
    "robustness",
    "robustness_trace",
    "robustness_trace_batch",
    "sample_formula",
    "sample_measure",
    "sample_values",
    "sat_trace_batch",
    "save_bank",
    "save_model",
    "save_multivariate_json",
    "save_ucr_tsv",
    "select_concepts",
    "select_relevant",
    "signature",
    "simplify_for_sample",
    "size",
    "standardize",
    "train",
    "trajectory_affinity",
    "variables",
]
