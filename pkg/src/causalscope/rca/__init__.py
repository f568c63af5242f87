from causalscope.rca.tolerance import (
    DeviationEntry,
    DeviationReport,
    ToleranceBand,
    ToleranceSpec,
    detect_deviations,
    fit_tolerances,
)
from causalscope.rca.ranking import RcaCandidate, RcaReport, correlation_baseline, rank_root_causes
from causalscope.rca import metrics

__all__ = [
    "DeviationEntry",
    "DeviationReport",
    "RcaCandidate",
    "RcaReport",
    "ToleranceBand",
    "ToleranceSpec",
    "correlation_baseline",
    "detect_deviations",
    "fit_tolerances",
    "metrics",
    "rank_root_causes",
]
