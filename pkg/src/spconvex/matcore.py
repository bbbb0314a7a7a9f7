"""Dense complex matrix core.

Square complex matrices (numpy arrays) are the universe of every
computation in this package.  This module provides validation helpers,
the clustered Hermitian eigendecomposition, spectral calculus
(``matrix_function``), Schatten norms, the Hilbert-Schmidt inner product
and the self-adjoint block embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import jacobi_eigh
from .config import DEFAULT, Tolerances
from .errors import ConvergenceError, DimensionError, ParameterError


def as_square(M) -> np.ndarray:
    """Coerce to a square complex128 matrix; reject NaN/Inf entries."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise ValueError("matrix entries must be finite")
    return A


def frobenius(M) -> float:
    return float(np.linalg.norm(np.asarray(M)))


def is_selfadjoint(M, rtol: float = DEFAULT.selfadjoint_rtol) -> bool:
    A = np.asarray(M)
    return frobenius(A - A.conj().T) <= rtol * max(1.0, frobenius(A))


def as_selfadjoint(M, rtol: float = DEFAULT.selfadjoint_rtol) -> np.ndarray:
    """Validate self-adjointness and return the exactly Hermitian part.

    Symmetrizing removes the sub-tolerance skew so downstream spectral code
    sees an exactly Hermitian matrix.
    """
    A = as_square(M)
    if not is_selfadjoint(A, rtol):
        raise ValueError(
            "matrix is not self-adjoint: ||M - M*||_F = "
            f"{frobenius(A - A.conj().T):.3e}"
        )
    return 0.5 * (A + A.conj().T)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Clustered spectral decomposition of a self-adjoint matrix.

    ``eigenvalues`` holds one representative per cluster (ascending,
    pairwise separated by more than ``cluster_tolerance``); ``projections``
    the matching orthogonal spectral projections.  ``vectors`` (unitary,
    columns ordered ascending) and ``column_reps`` (cluster representative
    per column) are derived conveniences used by the operator integrals.
    """

    eigenvalues: np.ndarray
    projections: tuple
    cluster_tolerance: float
    vectors: np.ndarray = field(repr=False)
    column_reps: np.ndarray = field(repr=False)
    column_cluster: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def multiplicities(self) -> np.ndarray:
        return np.array([int(round(np.trace(E).real)) for E in self.projections])

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for lam, E in zip(self.eigenvalues, self.projections):
            out += lam * E
        return out

    def residuals(self, original=None) -> dict:
        """Completeness / orthogonality / self-adjointness / reconstruction."""
        n = self.dim
        ident = np.eye(n)
        completeness = frobenius(sum(self.projections) - ident)
        orth = 0.0
        sa = 0.0
        for i, Ei in enumerate(self.projections):
            sa = max(sa, frobenius(Ei - Ei.conj().T))
            for j, Ej in enumerate(self.projections):
                prod = Ei @ Ej
                target = Ei if i == j else 0.0
                orth = max(orth, frobenius(prod - target))
        out = {"completeness": completeness, "orthogonality": orth, "selfadjointness": sa}
        if original is not None:
            M = np.asarray(original)
            out["reconstruction"] = frobenius(self.reconstruct() - M) / max(1.0, frobenius(M))
        return out


def _cluster(w: np.ndarray, tol: float):
    """Greedy adjacent-gap clustering of ascending eigenvalues."""
    groups = []
    start = 0
    for k in range(1, len(w)):
        if w[k] - w[k - 1] > tol:
            groups.append((start, k))
            start = k
    groups.append((start, len(w)))
    return groups


def eigvalsh(M, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Raw ascending eigenvalues of a self-adjoint matrix (no clustering)."""
    A = as_selfadjoint(M, tol.selfadjoint_rtol)
    w, _, _, converged = jacobi_eigh(A, tol.jacobi_off_rtol, tol.jacobi_max_sweeps)
    if not converged:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted ({tol.jacobi_max_sweeps}) without convergence"
        )
    return w


def eigh(M, cluster_tolerance: float | None = None, tol: Tolerances = DEFAULT) -> SpectralDecomposition:
    """Clustered spectral decomposition of a self-adjoint matrix.

    Eigenvalues closer than ``cluster_tolerance`` are merged into a single
    projection (sum of the rank-1 projectors) represented by their mean.
    Default tolerance: ``cluster_rtol * max(1, spectral radius)``.
    """
    A = as_selfadjoint(M, tol.selfadjoint_rtol)
    if cluster_tolerance is not None and cluster_tolerance < 0:
        raise ParameterError("cluster_tolerance must be >= 0")
    w, V, _, converged = jacobi_eigh(A, tol.jacobi_off_rtol, tol.jacobi_max_sweeps)
    if not converged:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted ({tol.jacobi_max_sweeps}) without convergence"
        )
    if cluster_tolerance is None:
        radius = float(np.max(np.abs(w))) if w.size else 0.0
        cluster_tolerance = tol.cluster_rtol * max(1.0, radius)

    reps = []
    projections = []
    column_reps = np.empty(len(w))
    column_cluster = np.empty(len(w), dtype=np.intp)
    for k, (start, stop) in enumerate(_cluster(w, cluster_tolerance)):
        rep = float(np.mean(w[start:stop]))
        block = V[:, start:stop]
        reps.append(rep)
        projections.append(block @ block.conj().T)
        column_reps[start:stop] = rep
        column_cluster[start:stop] = k
    return SpectralDecomposition(
        eigenvalues=np.array(reps),
        projections=tuple(projections),
        cluster_tolerance=float(cluster_tolerance),
        vectors=V,
        column_reps=column_reps,
        column_cluster=column_cluster,
    )


def _as_decomposition(M, tol: Tolerances = DEFAULT) -> SpectralDecomposition:
    if isinstance(M, SpectralDecomposition):
        return M
    return eigh(M, tol=tol)


def matrix_function(f, M, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Spectral calculus: sum of f(lambda_i) E_i.

    ``f`` is a ScalarFunction (domain-checked) or any scalar callable, which
    may be complex-valued (e.g. ``lambda x: np.exp(1j * x)`` gives a unitary).
    ``M`` may be a matrix or a precomputed SpectralDecomposition.
    """
    dec = _as_decomposition(M, tol)
    check = getattr(f, "check_domain", None)
    if check is not None:
        for lam in dec.eigenvalues:
            check(float(lam))
    values = [complex(f(float(lam))) for lam in dec.eigenvalues]
    out = np.zeros((dec.dim, dec.dim), dtype=np.complex128)
    for val, E in zip(values, dec.projections):
        out += val * E
    return out


def singular_values(M, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Singular values (ascending) via the spectral square root of M*M."""
    A = as_square(M)
    gram = A.conj().T @ A
    gram = 0.5 * (gram + gram.conj().T)
    w, _, _, converged = jacobi_eigh(gram, tol.jacobi_off_rtol, tol.jacobi_max_sweeps)
    if not converged:
        raise ConvergenceError("Jacobi sweeps exhausted on the Gram matrix")
    return np.sqrt(np.clip(w, 0.0, None))


def schatten_norm(M, p: float, tol: Tolerances = DEFAULT) -> float:
    """Schatten p-norm (sum sigma_i^p)^(1/p); p=2 is Frobenius."""
    if p < 1.0:
        raise ParameterError(f"Schatten norm requires p >= 1, got {p}")
    sigma = singular_values(M, tol)
    if not sigma.size:
        return 0.0
    top = float(sigma[-1])
    if top == 0.0:
        return 0.0
    # factor out the largest singular value to dodge overflow for large p
    return top * float(np.sum((sigma / top) ** p)) ** (1.0 / p)


def abs_matrix(M, tol: Tolerances = DEFAULT) -> np.ndarray:
    """|M| = (M*M)^(1/2) through the spectral path (no polar iteration)."""
    A = as_square(M)
    gram = A.conj().T @ A
    gram = 0.5 * (gram + gram.conj().T)
    dec = eigh(gram, tol=tol)
    return matrix_function(lambda x: np.sqrt(max(x, 0.0)), dec)


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product Tr(A* B)."""
    X = as_square(A)
    Y = as_square(B)
    if X.shape != Y.shape:
        raise DimensionError(f"shape mismatch {X.shape} vs {Y.shape}")
    return complex(np.sum(X.conj() * Y))


def selfadjoint_embed(A) -> np.ndarray:
    """2n x 2n self-adjoint embedding [[0, A], [A*, 0]].

    Carries every singular value of A twice (as +-sigma), so
    ||embed(A)||_p^p = 2 ||A||_p^p.
    """
    X = as_square(A)
    n = X.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, n:] = X
    out[n:, :n] = X.conj().T
    return out


def spectrum_in_domain(dec: SpectralDecomposition, f) -> None:
    """Raise DomainError unless every cluster representative lies in f's domain."""
    check = getattr(f, "check_domain", None)
    if check is None:
        return
    for lam in dec.eigenvalues:
        check(float(lam))


def min_abs_eigenvalue(M, tol: Tolerances = DEFAULT) -> float:
    return float(np.min(np.abs(eigvalsh(M, tol))))


def min_eigenvalue(M, tol: Tolerances = DEFAULT) -> float:
    return float(eigvalsh(M, tol)[0])


__all__ = [
    "SpectralDecomposition",
    "abs_matrix",
    "as_selfadjoint",
    "as_square",
    "eigh",
    "eigvalsh",
    "frobenius",
    "hs_inner",
    "is_selfadjoint",
    "matrix_function",
    "min_abs_eigenvalue",
    "min_eigenvalue",
    "schatten_norm",
    "selfadjoint_embed",
    "singular_values",
    "spectrum_in_domain",
]
