"""Weighted random permutation lifts and their limiting spectra.

The package models operators a_0 (x) 1 + sum_i a_i (x) S_i built from a
finite family of matrix weights and permutations, computes their
nontrivial spectra at finite size, and reconstructs the limiting
spectrum on the infinite symmetric cover through a non-backtracking
fixed-point calculus.
"""

from .errors import (DepthTooLarge, DimensionMismatch, DimensionTooLarge,
                     EmptySet, IndexOutOfRange, LiftspecError, NoConvergence,
                     NotHermitian, NotSelfAdjoint, OddGroundSet, ParseError,
                     SingularIteration, SingularMatrix, SingularResolvent,
                     SingularShift)
from .freelimit import (CPBlockMap, MembershipBatch, ScanResult, TreeResolvent,
                        branch_root_identity_residual, cp_radius, free_moment,
                        herglotz_margin, is_in_limit_spectrum,
                        limit_nb_radius, limit_spectrum_scan, membership_batch,
                        nb_radius_sequence, shifted_blocks, solve_resolvent,
                        spectral_edge)
from .graphs import (ColoredGraph, ball, ball_excess, build_colored_graph,
                     canonical_edge, count_cycles, is_tangle_free,
                     local_moment)
from .lift import (ExtremeEigs, LiftOperator, SpectralSet, TensorLiftOperator,
                   dense_spectrum, extreme_eigs, hausdorff, helmert_basis)
from .model import (BaseGraphSpec, PermutationFamily, WeightSystem,
                    base_adjacency, canonical_star, from_base_graph,
                    load_weight_system, sample_symmetric, save_weight_system)
from .nonbacktracking import (NBOperator, ihara_bass_residual,
                              nb_radius_estimate, pencil_weights,
                              shifted_weight_system)
from .presets import (figure1_weight_system, parse_preset,
                      regular_weight_system)
from .proofchecks import (ConeCheck, SignedProductCheck, krein_rutman_check,
                          signed_product_bound, signed_product_bound_sq,
                          signed_product_check, signed_product_mean,
                          signed_product_small_regime)

__version__ = "0.1.0"

__all__ = [
    "BaseGraphSpec",
    "CPBlockMap",
    "ColoredGraph",
    "ConeCheck",
    "DepthTooLarge",
    "DimensionMismatch",
    "DimensionTooLarge",
    "EmptySet",
    "ExtremeEigs",
    "IndexOutOfRange",
    "LiftOperator",
    "LiftspecError",
    "MembershipBatch",
    "NBOperator",
    "NoConvergence",
    "NotHermitian",
    "NotSelfAdjoint",
    "OddGroundSet",
    "ParseError",
    "PermutationFamily",
    "ScanResult",
    "SignedProductCheck",
    "SingularIteration",
    "SingularMatrix",
    "SingularResolvent",
    "SingularShift",
    "SpectralSet",
    "TensorLiftOperator",
    "TreeResolvent",
    "WeightSystem",
    "ball",
    "ball_excess",
    "base_adjacency",
    "branch_root_identity_residual",
    "build_colored_graph",
    "canonical_edge",
    "canonical_star",
    "count_cycles",
    "cp_radius",
    "dense_spectrum",
    "extreme_eigs",
    "figure1_weight_system",
    "free_moment",
    "from_base_graph",
    "hausdorff",
    "helmert_basis",
    "herglotz_margin",
    "ihara_bass_residual",
    "is_in_limit_spectrum",
    "is_tangle_free",
    "krein_rutman_check",
    "limit_nb_radius",
    "limit_spectrum_scan",
    "load_weight_system",
    "local_moment",
    "membership_batch",
    "nb_radius_estimate",
    "nb_radius_sequence",
    "parse_preset",
    "pencil_weights",
    "regular_weight_system",
    "sample_symmetric",
    "save_weight_system",
    "shifted_blocks",
    "shifted_weight_system",
    "signed_product_bound",
    "signed_product_bound_sq",
    "signed_product_check",
    "signed_product_mean",
    "signed_product_small_regime",
    "solve_resolvent",
    "spectral_edge",
    "__version__",
]
