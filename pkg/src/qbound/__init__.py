"""Lower bounds for quantum parameter estimation.

Cramer-Rao type bounds built from symmetric and right logarithmic
derivatives, their finite-difference versions for models that are not
differentiable, higher-order difference bounds, multiparameter weighted
bounds and asymptotic exponents, together with the estimators that attain
or approach them.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    InfoScalar,
    asymptotic_continuous_bound,
    discrete_asymptotic_exponent,
    gram_bound,
    info_matrix,
    info_scalar,
    log_derivative,
    multiparam_bound,
    qcr_bound,
    qhcrk_bound,
    qk_bound,
    relative_entropy,
    rld_info_via_trace,
    tensor_power_rld_info,
)
from .estimators import (
    EstimatorReport,
    Observable,
    Povm,
    discrete_alternative_observable,
    discrete_optimal_observable,
    exact_bias_mse,
    observable_to_pvm,
    simulate_concurrence_estimator,
    simulate_povm_sampling,
)
from .exceptions import (
    DomainError,
    InadmissibleStepError,
    InconsistentPovmError,
    InvalidInputError,
    QBoundError,
    SingularSupportError,
    TruncationError,
)
from .gaussian import (
    GaussianInfoConstants,
    GaussianParams,
    gaussian_fock_state,
    gaussian_info_constants,
    gaussian_model,
    gaussian_singular_submodel,
)
from .gaussian_bounds import (
    gaussian_2d_finite_delta_bound,
    gaussian_case2_bounds,
    gaussian_koike_bound,
    gaussian_koike_bound_matrix,
    gaussian_koike_bound_numeric,
    gaussian_overlap_trace,
)
from .linalg import SupportedState, eig_hermitian, pinv, solve_rld, solve_sld, spabs
from .models import (
    DifferenceSpec,
    DiscreteDomain,
    Estimand,
    Interval,
    ParametricModel,
    absolute_value,
    concurrence_model,
    coordinate,
    discrete_model,
    discrete_state,
    function_difference,
    kth_difference,
    kth_function_difference,
    state_difference,
)
