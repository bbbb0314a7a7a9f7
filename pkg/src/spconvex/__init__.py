"""Numerical verification of 2-uniform convexity for Schatten p-norms.

Building blocks: a self-contained Hermitian eigensolver (compiled kernel
with a pure-Python fallback), divided differences with stable degenerate
branches, double operator integrals in the eigenbasis, unital
trace-preserving channels, and randomized inequality suites with
independent oracles.
"""

from ._backend import BACKEND
from .channels import (
    QuantumChannel,
    apply_channel,
    pinching_of,
    random_unitary,
    unitary_mixture,
    validate_channel,
)
from .config import DEFAULT, Tolerances
from .divdiff import (
    IDENTITY,
    LOG,
    SQUARE,
    Kernel2,
    ScalarFunction,
    div_diff1,
    div_diff2,
    divided_difference_kernel,
    fp_kernel,
    fp_pair_sum,
    g_alpha,
    h_log,
    kernel_Fp,
    kernel_from_ratio,
    log_dd_kernel,
    power,
    power_abs,
)
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    NumericalError,
    ParameterError,
    PreconditionError,
    SpconvexError,
)
from .matcore import (
    SpectralDecomposition,
    abs_matrix,
    as_selfadjoint,
    as_square,
    eigh,
    eigvalsh,
    hs_inner,
    matrix_function,
    schatten_norm,
    selfadjoint_embed,
    singular_values,
)
from .opint import (
    NormCurvature,
    norm_sq_second_derivative,
    q_apply,
    quad_form,
    quasi_entropy,
    trace_first_derivative,
    trace_second_derivative,
)
from .search import ExtremalResult, extremal_search
from .verify import (
    CHECK_TAGS,
    GapRecord,
    SuiteReport,
    TrialConfig,
    check_bcl,
    check_fp_lemma,
    check_integral_rep,
    check_key,
    check_midpoint_convexity,
    check_monotonicity,
    check_operator_monotone,
    fd_oracle,
    run_suite,
    sample_matrix,
    tightness_scan,
)

__version__ = "0.1.0"
