"""Radial supersolution certification and existence/nonexistence
classification for quasilinear inequalities with nonlocal
Riesz-convolution right-hand sides."""

__version__ = "0.1.0"

from .operators import (  # noqa: F401
    ConsistentWithConstant,
    Falsified,
    Indeterminate,
    OperatorSpec,
    StructureCondition,
    StructureReport,
    apply_L,
    check_structure,
    eval_A,
    eval_A_prime,
    m_laplace,
    m_mean_curvature,
    radial_divergence,
)
from .riesz import (  # noqa: F401
    BudgetExceeded,
    QuadratureConfig,
    RadialFunction,
    RieszValue,
    TailMetadataInvalid,
    angular_kernel,
    asymptotic_probe,
    finiteness_check_c1,
    riesz_constant,
    riesz_convolve,
)
from .profiles import (  # noqa: F401
    ConstantProfile,
    CustomProfile,
    EmptyInterval,
    LinearBounded,
    LogBounded,
    LogCorrectedDecay,
    PowerDecay,
    make_bounded,
    make_log_corrected,
    make_system_pair,
    select_gamma_case_i,
    select_gamma_case_ii,
)
from .verifier import (  # noqa: F401
    Certificate,
    GridSpec,
    IndeterminateOperator,
    NoAmplitudeFound,
    certify_single,
    certify_system,
    fit_loglog_slope,
    tune_amplitude,
    tune_system_amplitude,
)
from .classifier import (  # noqa: F401
    OperatorClassFlags,
    ProblemParams,
    SystemParams,
    Verdict,
    classify_single,
    classify_system,
    region_grid,
)
