from causalscope.core.dataset import Dataset, load_dataset, load_dataset_file
from causalscope.core.features import FeatureSelection, select_features
from causalscope.core.graph import (
    AcyclicityCheck,
    CausalGraph,
    EdgeRecord,
    check_acyclic,
    stability_tier,
)

__all__ = [
    "AcyclicityCheck",
    "CausalGraph",
    "Dataset",
    "EdgeRecord",
    "FeatureSelection",
    "check_acyclic",
    "load_dataset",
    "load_dataset_file",
    "select_features",
    "stability_tier",
]
