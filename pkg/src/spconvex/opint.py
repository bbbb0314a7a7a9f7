"""Operator integrals over spectral decompositions.

Everything is computed in the eigenbasis by explicit sums over spectral
clusters: the two-sided integral Q_F(X) = sum_jk F(l_j, m_k) E_j X E_k,
its quadratic form, the exact second derivative of t -> Tr f(A+tB), the
chain-rule curvature of t -> ||A+tB||_p^2, and the quasi-entropy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .divdiff import ScalarFunction, div_diff2, power_abs, quasi_entropy_kernel
from .errors import DimensionError, NumericalError, ParameterError, PreconditionError
from .matcore import (
    SpectralDecomposition,
    as_square,
    eigh,
    hs_inner,
    matrix_function,
)


def _decompose(M, tol: Tolerances) -> SpectralDecomposition:
    if isinstance(M, SpectralDecomposition):
        return M
    return eigh(M, tol=tol)


def _kernel_matrix(F, da: SpectralDecomposition, db: SpectralDecomposition) -> np.ndarray:
    """F on the cluster representatives, expanded to eigenvector columns."""
    check = getattr(F, "check_domain", None)
    if check is not None:
        for lam in da.eigenvalues:
            check(float(lam))
        for mu in db.eigenvalues:
            check(float(mu))
    vals = np.array(
        [[float(F(float(lam), float(mu))) for mu in db.eigenvalues] for lam in da.eigenvalues]
    )
    return vals[np.ix_(da.column_cluster, db.column_cluster)]


def q_apply(F, A, B, X, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Apply the double operator integral Q_F^{A,B} to X.

    ``A`` and ``B`` may be self-adjoint matrices or precomputed
    SpectralDecompositions; passing the same object for both reuses one
    decomposition.  Linear in X; raises DomainError when a spectral cluster
    leaves the kernel's domain.
    """
    da = _decompose(A, tol)
    db = da if B is A else _decompose(B, tol)
    Xm = as_square(X)
    if Xm.shape[0] != da.dim or Xm.shape[0] != db.dim:
        raise DimensionError(
            f"operand dimension {Xm.shape} does not match spectra ({da.dim}, {db.dim})"
        )
    K = _kernel_matrix(F, da, db)
    Va, Vb = da.vectors, db.vectors
    return Va @ (K * (Va.conj().T @ Xm @ Vb)) @ Vb.conj().T


def quad_form(F, A, B, X, tol: Tolerances = DEFAULT) -> float:
    """<X, Q_F^{A,B}(X)>, asserted real.

    A large imaginary residue signals a broken self-adjointness
    precondition upstream, so it raises instead of being discarded.
    """
    value = hs_inner(X, q_apply(F, A, B, X, tol))
    if abs(value.imag) > tol.quad_form_imag * max(1.0, abs(value.real)):
        raise NumericalError(
            f"quadratic form has imaginary residue {value.imag:.3e}"
        )
    return float(value.real)


def _pair_sum_matrix(f: ScalarFunction, eigenvalues: np.ndarray, tol: Tolerances) -> np.ndarray:
    """S[i,j] = f^[2](l_i,l_j,l_i) + f^[2](l_j,l_i,l_j) on cluster representatives."""
    m = len(eigenvalues)
    S = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            r, s = float(eigenvalues[i]), float(eigenvalues[j])
            if f.pair_sum is not None:
                val = f.pair_sum(r, s)
            else:
                val = div_diff2(f, r, s, r, tol) + div_diff2(f, s, r, s, tol)
            S[i, j] = S[j, i] = val
    return S


def trace_second_derivative(f: ScalarFunction, A, B, tol: Tolerances = DEFAULT) -> float:
    """Exact d^2/dt^2 |_{t=0} Tr f(A + tB) for self-adjoint A, B.

    Uses the reduced double sum over A's spectral clusters:
    sum_ij [f^[2](l_i,l_j,l_i) + f^[2](l_j,l_i,l_j)] Tr(B E_j B E_i),
    with the cancellation-free pair-sum closed form when f provides one.
    """
    da = _decompose(A, tol)
    for lam in da.eigenvalues:
        f.check_domain(float(lam))
    Bm = as_square(B)
    if Bm.shape[0] != da.dim:
        raise DimensionError("B dimension does not match A")
    S = _pair_sum_matrix(f, da.eigenvalues, tol)
    # T[i,j] = Tr(B E_j B E_i) = ||V_i* B V_j||_F^2 >= 0, accumulated per cluster
    Bt = np.abs(da.vectors.conj().T @ Bm @ da.vectors) ** 2
    m = len(da.eigenvalues)
    T = np.zeros((m, m))
    np.add.at(T, (da.column_cluster[:, None], da.column_cluster[None, :]), Bt)
    return float(np.sum(S * T))


def trace_first_derivative(f: ScalarFunction, A, B, tol: Tolerances = DEFAULT) -> float:
    """d/dt |_{t=0} Tr f(A + tB) = Tr(f'(A) B)."""
    da = _decompose(A, tol)
    for lam in da.eigenvalues:
        f.check_domain(float(lam))
    Bm = as_square(B)
    grad = matrix_function(f.d, da, tol)
    value = hs_inner(grad.conj().T, Bm)  # Tr(grad @ B)
    if abs(value.imag) > tol.quad_form_imag * max(1.0, abs(value.real)):
        raise NumericalError(f"trace derivative has imaginary residue {value.imag:.3e}")
    return float(value.real)


@dataclass(frozen=True)
class NormCurvature:
    """Second derivative of t -> ||A+tB||_p^2 at t=0 and its chain lower bound.

    value            = (2/p) psi0^(2/p-1) psi2 + (2/p)(2/p-1) psi0^(2/p-2) psi1^2
    chain_lower_bound = (2/p) ||A||_p^(2-p) psi2   (the p <= 2 drop step)
    """

    value: float
    chain_lower_bound: float
    psi0: float
    psi1: float
    psi2: float


def norm_sq_second_derivative(p: float, A, B, tol: Tolerances = DEFAULT) -> NormCurvature:
    """Chain-rule curvature of the squared Schatten norm along A + tB.

    Requires invertible self-adjoint A (min |eigenvalue| above the
    configured floor) and self-adjoint B.
    """
    if not 1.0 < p <= 2.0:
        raise ParameterError(f"norm curvature requires p in (1, 2], got {p}")
    da = _decompose(A, tol)
    floor = tol.invertibility_floor
    if np.min(np.abs(da.column_reps)) < floor:
        raise PreconditionError(
            f"A must be invertible: min |eigenvalue| {np.min(np.abs(da.column_reps)):.3e} < {floor}"
        )
    f = power_abs(p)
    psi0 = float(np.sum(np.abs(da.column_reps) ** p))
    psi1 = trace_first_derivative(f, da, B, tol)
    psi2 = trace_second_derivative(f, da, B, tol)
    e = 2.0 / p
    value = e * psi0 ** (e - 1.0) * psi2 + e * (e - 1.0) * psi0 ** (e - 2.0) * psi1 * psi1
    lower = e * psi0 ** (e - 1.0) * psi2  # psi0^(2/p-1) == ||A||_p^(2-p)
    return NormCurvature(value=value, chain_lower_bound=lower, psi0=psi0, psi1=psi1, psi2=psi2)


def quasi_entropy(f, theta: float, A, B, X, tol: Tolerances = DEFAULT) -> float:
    """Monotone-metric trace functional with weights [f(l_j/m_k) m_k]^(-theta).

    ``f`` must be positive on (0, inf); A and B must be positive definite.
    With f the ratio representative of a divided-difference kernel (e.g.
    g_alpha with theta = 1 - alpha) this reproduces quad_form of that kernel.
    """
    if not 0.0 < theta <= 1.0:
        raise ParameterError(f"theta must lie in (0, 1], got {theta}")
    da = _decompose(A, tol)
    db = da if B is A else _decompose(B, tol)
    for dec, label in ((da, "A"), (db, "B")):
        if np.min(dec.eigenvalues) <= 0.0:
            raise PreconditionError(f"{label} must be positive definite")
    kernel = quasi_entropy_kernel(f, theta)
    return quad_form(kernel, da, db, X, tol)


def q_apply_bruteforce(F, A, B, X, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Direct double sum over projections; independent oracle for q_apply."""
    da = _decompose(A, tol)
    db = da if B is A else _decompose(B, tol)
    Xm = as_square(X)
    out = np.zeros_like(Xm)
    for lam, Ej in zip(da.eigenvalues, da.projections):
        for mu, Ek in zip(db.eigenvalues, db.projections):
            out += float(F(float(lam), float(mu))) * (Ej @ Xm @ Ek)
    return out


__all__ = [
    "NormCurvature",
    "norm_sq_second_derivative",
    "q_apply",
    "q_apply_bruteforce",
    "quad_form",
    "quasi_entropy",
    "trace_first_derivative",
    "trace_second_derivative",
]
