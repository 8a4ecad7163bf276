"""Product-space specialization dynamics: RCA, proximity/density, complexity
scores, density decomposition, and transition prediction."""

from .complexity import (
    ComplexityScores,
    OutlookIndicators,
    complexity_scores,
    ecoi,
    outlook_regressions,
)
from .decomposition import (
    DensityDecomposition,
    EventSample,
    LorDecomposition,
    SuccessBonus,
    TransitionModels,
    decompose_density,
    event_sample,
    fit_transition_models,
    lor_decompose,
    per_country_models,
    success_bonus,
    topk_confusion,
)
from .errors import (
    DegeneracyError,
    DegenerateInputError,
    InputError,
    NumericalError,
    ParseError,
    ProdspaceError,
    RankDeficiencyError,
    SchemaError,
    SeparationError,
    SingularityError,
)
from .ingest import (
    ExportPanel,
    IngestConfig,
    PanelReport,
    load_panel,
    panel_from_records,
    truncate_product_level,
)
from .pipeline import RunConfig, RunReport, STAGES, run_pipeline
from .product_space import (
    DensityMatrix,
    ProximityBundle,
    conditional_probabilities,
    density,
)
from .rca import (
    RcaMatrix,
    TransitionSet,
    compute_rca,
    per_country_transition_stats,
    transition_complexity_summary,
    transition_rates,
    transitions,
    ubiquity_gap,
)
from .regression import (
    DesignMatrix,
    FitResult,
    design_matrix,
    logit_fit,
    lr_test,
    ols_fit,
    probability_elasticity,
    pseudo_r2,
    summary_frame,
)
from .smoothing import KERNELS, SmoothResult, SmoothSpec, lpoly
from .synthetic import generate_synthetic, synthetic_records

__version__ = "0.1.0"

__all__ = [
    "ComplexityScores",
    "OutlookIndicators",
    "complexity_scores",
    "ecoi",
    "outlook_regressions",
    "DensityDecomposition",
    "EventSample",
    "LorDecomposition",
    "SuccessBonus",
    "TransitionModels",
    "decompose_density",
    "event_sample",
    "fit_transition_models",
    "lor_decompose",
    "per_country_models",
    "success_bonus",
    "topk_confusion",
    "DegeneracyError",
    "DegenerateInputError",
    "InputError",
    "NumericalError",
    "ParseError",
    "ProdspaceError",
    "RankDeficiencyError",
    "SchemaError",
    "SeparationError",
    "SingularityError",
    "ExportPanel",
    "IngestConfig",
    "PanelReport",
    "load_panel",
    "panel_from_records",
    "truncate_product_level",
    "RunConfig",
    "RunReport",
    "STAGES",
    "run_pipeline",
    "DensityMatrix",
    "ProximityBundle",
    "conditional_probabilities",
    "density",
    "RcaMatrix",
    "TransitionSet",
    "compute_rca",
    "per_country_transition_stats",
    "transition_complexity_summary",
    "transition_rates",
    "transitions",
    "ubiquity_gap",
    "DesignMatrix",
    "FitResult",
    "design_matrix",
    "logit_fit",
    "lr_test",
    "ols_fit",
    "probability_elasticity",
    "pseudo_r2",
    "summary_frame",
    "KERNELS",
    "SmoothResult",
    "SmoothSpec",
    "lpoly",
    "generate_synthetic",
    "synthetic_records",
]
