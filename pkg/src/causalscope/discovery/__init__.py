from causalscope.discovery.lingam import DiscoveryConfig, fit_lingam
from causalscope.discovery.bootstrap import (
    BootstrapSummary,
    PairStats,
    bootstrap_stability,
    filter_edges,
)

__all__ = [
    "BootstrapSummary",
    "DiscoveryConfig",
    "PairStats",
    "bootstrap_stability",
    "filter_edges",
    "fit_lingam",
]
