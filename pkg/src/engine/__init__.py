from .anomaly import (anomaly_functional, anomaly_source, localization_check, parity_source, reduced_flux,
                      reflection_parity_check, scaling_degree)
from .boundary import boundary_identity_check, subgraph_boundary_reduction
from .checks import CheckResult, exponent_bound_check, kontsevich_check, rank_vanishing_check
from .integrals import components_factorization, disjoint_union, uv_limit, w_0_L, w_eps_L
from .integrand import build_integrand
from .problem import GraphIntegralProblem, TestSource
from .reducer import brute_force_reduce, compile_problem, reduce_positions
