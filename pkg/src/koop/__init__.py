"""Koopman groups, weighted groups and cocycles over flows on grids."""

__version__ = "0.1.0"

from ._kernels import backend, use_backend
from .space import (CircleSpace, CircleFunction, FiniteSpace, GridFunction, SpecialFlowSpace,
                    SpaceMismatchError, character, constant, from_coefficients, indicator,
                    inner_product, make_circle_space, make_function, multiply, norms,
                    random_bandlimited, function_to_json, function_from_json)
from .flows import (Flow, RotationFlow, SpecialFlow, FiniteMapFlow, rotation_flow, special_flow,
                    finite_map, koopman_apply, pushforward_density, strip_indicator,
                    strip_symmetric_difference, flow_to_json, flow_from_json)
from .cocycles import (Cocycle, cocycle_from_derivative, coboundary_cocycle, explicit_cocycle,
                       cocycle_identity_residual, inverse_relation_residual,
                       derivative_residual, solve_transfer_function, c0_decay_report,
                       uniqueness_crosscheck, TransferFunction, ObstructionReport)
from .groups import (Group, KoopmanGroup, WeightedGroup, MultiplierGroup, AffineNilpotentGroup,
                     koopman_group, weighted_group, multiplier_group, affine_nilpotent_group,
                     estimate_generator, trotter_kato_product,
                     riemann_exponent_identity_residual, trotter_kato_limit_study,
                     operator_matrix, ConvergenceTable, GeneratorEstimate)
from .verify import (Verdict, GrowthFit, derivation_residual, perturbed_derivation_residual,
                     multiplicativity_residual, koopman_detector, linf_growth_fit,
                     weighted_nonsingular_check, unitary_modulus_residual, rn_bound_check,
                     generator_relation_residual, holder_scaling_probe, sliding_average,
                     unbounded_A1_study)
from .gallery import list_gallery, run_scenario
