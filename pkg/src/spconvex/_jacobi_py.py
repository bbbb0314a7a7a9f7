"""Pure-Python cyclic Jacobi eigensolver for Hermitian matrices.

Twin of the compiled ``spconvex._jacobi`` extension; same signature, same
semantics, used as the import-time fallback and as a cross-check in tests.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def jacobi_eigh(H, off_rtol=1e-13, max_sweeps=100):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters
    ----------
    H : (n, n) complex ndarray, Hermitian.
    off_rtol : stop once sqrt(sum_{i!=j} |A_ij|^2) <= off_rtol * ||H||_F.
    max_sweeps : iteration budget (full cyclic sweeps).

    Returns
    -------
    (w, V, sweeps, converged) : eigenvalues ascending (float64), unitary V
    with eigenvector columns in matching order, sweeps used, and a flag
    that is False when the budget was exhausted.
    """
    A = np.array(H, dtype=np.complex128, copy=True)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    norm_f = np.linalg.norm(A)
    if n == 1 or norm_f == 0.0:
        w = A.diagonal().real.copy()
        return w, V, 0, True

    # off-diagonal mass summed directly: subtracting the diagonal from the
    # total Frobenius mass would cancel catastrophically near convergence
    offdiag_mask = ~np.eye(n, dtype=bool)

    threshold = off_rtol * norm_f
    skip = threshold / (2.0 * n)
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = np.sqrt((np.abs(A[offdiag_mask]) ** 2).sum())
        if off <= threshold:
            converged = True
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                phase = apq / mag
                pc = phase.conjugate()

                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * pc * colq
                A[:, q] = s * phase * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * phase * rowq
                A[q, :] = s * pc * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real

                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * pc * vq
                V[:, q] = s * phase * vp + c * vq
    else:
        # loop ran to the budget; re-test before declaring failure
        off = np.sqrt((np.abs(A[offdiag_mask]) ** 2).sum())
        converged = off <= threshold

    w = A.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(V[:, order]), sweeps, converged
