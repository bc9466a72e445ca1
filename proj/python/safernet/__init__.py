"""Bayesian-network road-safety model and safest-route engine."""

from ._safernet import (
    ComputeError,
    DataError,
    Network,
    RoadGraph,
    case_study_variables,
    edge_weight,
    learn,
    route_safety,
    route_score,
    safest_route,
)

__all__ = [
    "ComputeError",
    "DataError",
    "Network",
    "RoadGraph",
    "case_study_variables",
    "edge_weight",
    "learn",
    "route_safety",
    "route_score",
    "safest_route",
]
