"""Batch polynomial root solving on companion matrices, root-density
rendering, and a cycle model of the pipelined core the algorithm maps to.

The numeric stages compose as scikit-learn transformers (see
``rootdensity.estimators``); everything is also available as plain
functions per stage.
"""

__version__ = "0.1.0"

from .approximator import (
    DomainPartition,
    FitResult,
    ParametricFamily,
    accept_cell,
    enumerate_family,
    fit_cell,
    fit_partition,
    load_family,
    parse_expression,
    resolve_function,
)
from .eigensolver import (
    CompactHessenberg,
    FlopCounter,
    GivensPair,
    SolveConfig,
    apply_left,
    apply_right,
    batch_solve,
    flops_per_solve,
    givens_coeffs,
    qr_iteration,
    shift_diag,
    solve_full_coefficients,
    solve_roots,
    solve_roots_compact,
)
from .estimators import AberthRootSolver, CompanionRootSolver, DensityRasterizer
from .oracle import RootMatch, aberth_solve, dense_qr_reference, match_roots
from .pipeline_model import (
    REFERENCE_CONSTANTS,
    PipelineConfig,
    SimReport,
    TaskState,
    efficiency_gain,
    efficiency_ratio,
    passes_per_task,
    scheduler_next,
    simulate,
    throughput_model,
    throughput_ratio,
)
from .polynomial import (
    CompanionMatrix,
    Polynomial,
    companion,
    evaluate,
    from_roots,
    make_monic,
)
from .raster import (
    DensityGrid,
    Image,
    ToneMap,
    Viewport,
    accumulate,
    merge,
    render,
    root_to_pixel,
    write_image,
    write_stats,
)

__all__ = [
    "AberthRootSolver",
    "CompactHessenberg",
    "CompanionMatrix",
    "CompanionRootSolver",
    "DensityGrid",
    "DensityRasterizer",
    "DomainPartition",
    "FitResult",
    "FlopCounter",
    "GivensPair",
    "Image",
    "REFERENCE_CONSTANTS",
    "ParametricFamily",
    "PipelineConfig",
    "Polynomial",
    "RootMatch",
    "SimReport",
    "SolveConfig",
    "TaskState",
    "ToneMap",
    "Viewport",
    "aberth_solve",
    "accept_cell",
    "accumulate",
    "apply_left",
    "apply_right",
    "batch_solve",
    "companion",
    "dense_qr_reference",
    "efficiency_gain",
    "efficiency_ratio",
    "enumerate_family",
    "evaluate",
    "fit_cell",
    "fit_partition",
    "flops_per_solve",
    "from_roots",
    "givens_coeffs",
    "load_family",
    "make_monic",
    "match_roots",
    "merge",
    "parse_expression",
    "passes_per_task",
    "qr_iteration",
    "render",
    "resolve_function",
    "root_to_pixel",
    "scheduler_next",
    "shift_diag",
    "simulate",
    "solve_full_coefficients",
    "solve_roots",
    "solve_roots_compact",
    "throughput_model",
    "throughput_ratio",
    "write_image",
    "write_stats",
]
