"""Numerical laboratory for contractive symbols on the disk: boundary
weights, weighted-moment matrices, polynomial-distance indicators, kernel
embeddings, and circle-set entropy machinery, all driven by declarative
scenario documents."""

__version__ = "0.1.0"

from .circlesets import (
    BCReport,
    BCSubsetFlag,
    CantorMeasurePart,
    CircleSet,
    DecompositionReport,
    RatioSchedule,
    SingularMeasureSpec,
    bc_entropy,
    carrier_and_support,
    contains_bc_subset_flag,
    decompose_measure,
)
from .classify import ChecklistItem, ClassifierVerdict, corollary_classifier
from .embedding import (
    DivisionReport,
    JPair,
    JSolveReport,
    KernelGram,
    annihilator_check,
    division_diagnostic,
    hardy_project,
    hardy_project_minus,
    hb_kernel,
    j_embedding_solve,
    kernel_embedding_pair,
    kernel_gram,
)
from .errors import (
    ConstructionInconsistencyError,
    DegenerateSymbolError,
    DegenerateTargetError,
    DomainError,
    NumericalInconsistencyError,
    RefusalError,
    ScenarioFormatError,
    SingularityError,
    UndersampledGridError,
)
from .moments import (
    DistanceSequence,
    MomentMatrix,
    MuMeasure,
    build_mu,
    cyclicity_indicator,
    distance_to_poly_span,
    gram_matrix,
    shift_contraction_bound,
    splitting_indicator,
)
from .symbols import (
    BoundaryGrid,
    DeltaWeight,
    DiskSeries,
    ExtremalityReport,
    OuterFactor,
    OuterProfile,
    SymbolEvaluation,
    SymbolSpec,
    blaschke_eval,
    delta_weight,
    evaluate_symbol,
    extremality_report,
    log_outer_series,
    outer_from_modulus,
    outer_on_grid,
    singular_inner_eval,
    symbol_eval,
)
from .xalpha import (
    NormEquivalenceReport,
    cauchy_pairing,
    disk_moment,
    xalpha_norm,
    xminus_norm_equiv_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
