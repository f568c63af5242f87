from causalscope.effects.total import EffectMatrices, default_levels, predict_intervention, total_effects
from causalscope.effects.counterfactual import (
    CSV_COLUMNS,
    CounterfactualResult,
    CounterfactualSpec,
    counterfactual_validate,
    results_to_csv,
)

__all__ = [
    "CSV_COLUMNS",
    "CounterfactualResult",
    "CounterfactualSpec",
    "EffectMatrices",
    "counterfactual_validate",
    "default_levels",
    "predict_intervention",
    "results_to_csv",
    "total_effects",
]
