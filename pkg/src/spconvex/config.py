"""Central tolerance configuration.

Every hard-coded numerical threshold used by the library lives in one
record so that tests, the CLI and library callers agree on defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # matrix validation
    selfadjoint_rtol: float = 1e-12      # ||M - M*||_F <= rtol * max(1, ||M||_F)
    # Jacobi eigensolver
    jacobi_off_rtol: float = 1e-13       # stop when off-diag mass <= rtol * ||M||_F
    jacobi_max_sweeps: int = 100
    # spectral decompositions
    cluster_rtol: float = 1e-8           # default cluster tol = rtol * max(1, spectral radius)
    spectral_residual: float = 1e-10     # completeness / orthogonality / reconstruction
    # divided differences
    near_equal_rtol: float = 1e-7        # |r-s| <= rtol * max(1, |r|, |s|) -> limit branch
    taylor_window: float = 1e-5          # |x-1| window for series branches of g_alpha, h_log
    # operator integrals
    quad_form_imag: float = 1e-10        # allowed imaginary residue of <X, Q(X)>
    # channels
    channel_residual: float = 1e-10
    # verification suites
    gap_tolerance: float = 1e-9          # normalized gap below -tol counts as violation
    fp_gap_tolerance: float = 1e-10
    opmono_tolerance: float = 1e-8       # min eigenvalue floor for monotonicity sampling
    invertibility_floor: float = 1e-6    # min |eigenvalue| required of "invertible" inputs
    pd_shift: float = 1e-3               # delta added by the positive-definite ensemble
    indefinite_shift: float = 1e-2       # spectrum push-off used by the indefinite ensemble
    fd_step: float = 1e-4                # default central-difference step
    # quadrature
    quadrature_abs_tol: float = 1e-9
    quadrature_max_intervals: int = 2000

    def with_(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()
