# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi eigensolver for Hermitian matrices (hot kernel).

Semantics are identical to the pure-Python twin ``spconvex._jacobi_py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

COMPILED = True


def jacobi_eigh(H, double off_rtol=1e-13, int max_sweeps=100):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns (w, V, sweeps, converged); see the pure-Python twin for docs.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] A = np.array(
        H, dtype=np.complex128, copy=True, order="C"
    )
    cdef Py_ssize_t n = A.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] V = np.eye(n, dtype=np.complex128)

    cdef double complex[:, :] a = A
    cdef double complex[:, :] v = V

    cdef double norm_sq = 0.0, diag_sq = 0.0, off, re, im
    cdef Py_ssize_t i, j, p, q
    for i in range(n):
        for j in range(n):
            re = a[i, j].real
            im = a[i, j].imag
            norm_sq += re * re + im * im
            if i == j:
                diag_sq += re * re + im * im

    if n == 1 or norm_sq == 0.0:
        w0 = A.diagonal().real.copy()
        return w0, V, 0, True

    cdef double threshold = off_rtol * sqrt(norm_sq)
    cdef double skip = threshold / (2.0 * n)
    cdef bint converged = 0
    cdef int sweeps = 0, sweep
    cdef double mag, app, aqq, tau, t, c, s
    cdef double complex apq, phase, pc, xp, xq

    for sweep in range(max_sweeps + 1):
        # off-diagonal Frobenius mass
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    re = a[i, j].real
                    im = a[i, j].imag
                    off += re * re + im * im
        if sqrt(off) <= threshold:
            converged = 1
            break
        if sweep == max_sweeps:
            break
        sweeps = sweep + 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if mag <= skip:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                phase = apq / mag
                pc = phase.conjugate()

                for i in range(n):
                    xp = a[i, p]
                    xq = a[i, q]
                    a[i, p] = c * xp - s * pc * xq
                    a[i, q] = s * phase * xp + c * xq
                for i in range(n):
                    xp = a[p, i]
                    xq = a[q, i]
                    a[p, i] = c * xp - s * phase * xq
                    a[q, i] = s * pc * xp + c * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                for i in range(n):
                    xp = v[i, p]
                    xq = v[i, q]
                    v[i, p] = c * xp - s * pc * xq
                    v[i, q] = s * phase * xp + c * xq

    w = A.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(V[:, order]), sweeps, bool(converged)
