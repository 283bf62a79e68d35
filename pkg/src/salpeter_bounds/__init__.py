"""Energy bounds for semirelativistic (spinless Salpeter) Hamiltonians."""
from .bounds import (
    BoundReport,
    Problem,
    envelope_lower_convex,
    envelope_upper_concave,
    lower_bound,
    sum_subadditivity_check,
    theorem1_bounds,
    upper_bound,
    upper_bound_optimized,
)
from .kinetic_potentials import PotentialSum
from .oracle import OracleSettings, salpeter_ground, schrodinger_ground, ultrarelativistic_ground

__all__ = [
    "BoundReport",
    "OracleSettings",
    "PotentialSum",
    "Problem",
    "envelope_lower_convex",
    "envelope_upper_concave",
    "lower_bound",
    "salpeter_ground",
    "schrodinger_ground",
    "sum_subadditivity_check",
    "theorem1_bounds",
    "ultrarelativistic_ground",
    "upper_bound",
    "upper_bound_optimized",
]
