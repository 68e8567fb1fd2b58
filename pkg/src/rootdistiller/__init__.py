"""Global real-root distillation for polynomials with high-order educated Newton maps."""

from .distiller import (
    FilterParams,
    RootEstimate,
    RootReport,
    bracket_sign_changes,
    dedup_union,
    distill,
    error_estimate,
    error_filter,
    filter_near_bisector,
    platform_representative,
    residual_filter,
)
from .educated_map import MapConfig, educated_g, newton_step, order_of
from .grid_sampler import Mesh, SampleList, is_invariant, is_monotone_step, sample_map, uniform_mesh
from .mpcontext import MPReal, PrecContext, is_numeric, make_context, parse_decimal, to_decimal
from .oracle import OracleRoot, bisection_refine, chebyshev_roots
from .polynomial import (
    ExactPolynomial,
    Polynomial,
    chebyshev_T,
    compensated_horner_eval,
    derivative,
    horner_eval,
    load_polynomial,
    round_coeffs,
)

__version__ = "0.1.0"
