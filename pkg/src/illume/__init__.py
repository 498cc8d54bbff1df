"""Illumination of convex bodies with 1-symmetric norms.

Exact certificates for polyhedral unit balls, deterministic direction
families for bodies close to the cube, and a seeded sign-and-projection
construction for bodies far from it.
"""

from .bodies import SymBody, distance_to_cube, is_cube, norm_eval, parse_body, serialize_body
from .certify import (
    IlluminationCertificate,
    certify_directions,
    enumerate_vertices,
    illuminate_auto,
    min_illumination_search,
    verify_certificate,
)
from .directions import DirectionSet, Strategy, gen_direction_set, norm_implication_check, pair_condition, select_strategy
from .exceptions import IllumeError
from .randomized import bound_chain, build_Rk, check_Ek, estimate_threshold_n, trial_success_prob
from .subdiff import block_decompose, directional_derivative, extreme_subgradients, illuminates_point, is_vertex

__version__ = "0.1.0"

__all__ = [
    "SymBody",
    "distance_to_cube",
    "is_cube",
    "norm_eval",
    "parse_body",
    "serialize_body",
    "IlluminationCertificate",
    "certify_directions",
    "enumerate_vertices",
    "illuminate_auto",
    "min_illumination_search",
    "verify_certificate",
    "DirectionSet",
    "Strategy",
    "gen_direction_set",
    "norm_implication_check",
    "pair_condition",
    "select_strategy",
    "IllumeError",
    "bound_chain",
    "build_Rk",
    "check_Ek",
    "estimate_threshold_n",
    "trial_success_prob",
    "block_decompose",
    "directional_derivative",
    "extreme_subgradients",
    "illuminates_point",
    "is_vertex",
]
