"""Linear random fountain code caching for hub/satellite networks."""

from .analysis import (
    RateReport,
    backhaul_upper_bound,
    delta_u,
    expected_backhaul,
    expected_overhead,
    failure_probability,
    mds_expected_backhaul,
    zipf_pmf,
)
from .config import REFERENCE_GAMMA, NetworkConfig
from .gf import FieldContext, FieldElement, get_field
from .placement import Placement, optimize_bound, optimize_exact, optimize_mds
from .sim import GridGeometry, connectivity_distribution, crossvalidate, simulate_delivery

__version__ = "0.1.0"

__all__ = [
    "FieldContext",
    "FieldElement",
    "GridGeometry",
    "NetworkConfig",
    "Placement",
    "REFERENCE_GAMMA",
    "RateReport",
    "backhaul_upper_bound",
    "connectivity_distribution",
    "crossvalidate",
    "delta_u",
    "expected_backhaul",
    "expected_overhead",
    "failure_probability",
    "get_field",
    "mds_expected_backhaul",
    "optimize_bound",
    "optimize_exact",
    "optimize_mds",
    "simulate_delivery",
    "zipf_pmf",
]
