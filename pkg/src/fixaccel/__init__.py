"""Interval analysis of affine loops with accelerated fixpoint iteration.

The package computes numerical invariants — one interval per state
variable — for small loop programs whose bodies are affine updates over
interval-valued inputs.  Plain Kleene iteration, widening (standard or
threshold-based), and an accelerated mode that extrapolates the bound
sequences with Aitken or epsilon-algorithm transforms and injects the
estimated limit back into the iteration are all provided, along with a
command-line front end that emits deterministic CSV traces and JSON
reports.
"""
from __future__ import annotations

from .bundled import PROGRAM_NAMES, bundled_path, bundled_source, load_bundled
from .engine import (
    EngineConfig,
    FixpointReport,
    IterationTrace,
    TraceRecord,
    accelerated_fixpoint,
    analyze,
    kleene,
    kleene_widened,
    verify_postfixpoint,
)
from .extraction import (
    ExtractionResult,
    ExtractionSchema,
    combine,
    combine_detailed,
    extract,
)
from .intervals import (
    BOTTOM,
    TOP,
    AbstractState,
    Interval,
    ThresholdSet,
    affine_eval,
    join,
    leq,
    state_join,
    state_leq,
    state_pointwise,
    state_widen_std,
    state_widen_thresholds,
    widen_std,
    widen_thresholds,
)
from .programs import Assignment, ParseError, Program, parse, step, transfer, unparse
from .transforms import (
    EpsilonTable,
    StallError,
    TransformConfig,
    TransformedElement,
    aitken,
    converged,
    epsilon_diagonal,
    epsilon_table,
    samelson_inverse,
    vector_epsilon_diagonal,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractState",
    "Assignment",
    "BOTTOM",
    "EngineConfig",
    "EpsilonTable",
    "ExtractionResult",
    "ExtractionSchema",
    "FixpointReport",
    "Interval",
    "IterationTrace",
    "PROGRAM_NAMES",
    "ParseError",
    "Program",
    "StallError",
    "TOP",
    "ThresholdSet",
    "TraceRecord",
    "TransformConfig",
    "TransformedElement",
    "accelerated_fixpoint",
    "affine_eval",
    "aitken",
    "analyze",
    "bundled_path",
    "bundled_source",
    "combine",
    "combine_detailed",
    "converged",
    "epsilon_diagonal",
    "epsilon_table",
    "extract",
    "join",
    "kleene",
    "kleene_widened",
    "leq",
    "load_bundled",
    "parse",
    "samelson_inverse",
    "state_join",
    "state_leq",
    "state_pointwise",
    "state_widen_std",
    "state_widen_thresholds",
    "step",
    "transfer",
    "unparse",
    "vector_epsilon_diagonal",
    "verify_postfixpoint",
    "widen_std",
    "widen_thresholds",
    "__version__",
]
