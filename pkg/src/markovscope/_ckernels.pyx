# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: small Hermitian eigensolver, Kronecker product,
partial trace over one contiguous factor.

The eigensolver calls LAPACK ``zheevd`` through scipy's Cython bindings,
skipping the per-call dispatch overhead of ``numpy.linalg.eigh`` which
dominates at the 4x4..32x32 sizes used here.
"""

import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_lapack cimport zheevd

cnp.import_array()

NAME = "cython"


def eigh(h):
    """Eigenvalues (ascending) and column eigenvectors of Hermitian ``h``."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] a = np.array(
        h, dtype=np.complex128, order="C", copy=True)
    cdef int n = a.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0), dtype=np.complex128)
    cdef int lda = n
    cdef int lwork = 2 * n + n * n
    cdef int lrwork = 1 + 5 * n + 2 * n * n
    cdef int liwork = 3 + 5 * n
    cdef int info = 0
    cdef char jobz = b"V"
    cdef char uplo = b"L"
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] work = np.empty(lwork, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rwork = np.empty(lrwork, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] iwork = np.empty(liwork, dtype=np.int32)
    with nogil:
        # the C buffer read column-major is h^T = conj(h)
        zheevd(&jobz, &uplo, &n, <double complex *> a.data, &lda,
               <double *> w.data, <double complex *> work.data, &lwork,
               <double *> rwork.data, &lrwork, <int *> iwork.data, &liwork, &info)
    if info != 0:
        raise np.linalg.LinAlgError(f"zheevd failed with info={info}")
    # rows of the buffer are eigenvectors of conj(h)
    return w, np.ascontiguousarray(a.conj().T)


def kron(a, b):
    cdef const double complex[:, ::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const double complex[:, ::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t na = av.shape[0], nb = bv.shape[0]
    out = np.empty((na * nb, na * nb), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    cdef Py_ssize_t i, j, k, l
    cdef double complex x
    with nogil:
        for i in range(na):
            for k in range(nb):
                for j in range(na):
                    x = av[i, j]
                    for l in range(nb):
                        ov[i * nb + k, j * nb + l] = x * bv[k, l]
    return out


def trace_out(m, Py_ssize_t left, Py_ssize_t mid, Py_ssize_t right):
    cdef const double complex[:, ::1] mv = np.ascontiguousarray(m, dtype=np.complex128)
    cdef Py_ssize_t n = left * right
    out = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    cdef Py_ssize_t a, b, c, d, i, row, col
    cdef double complex acc
    with nogil:
        for a in range(left):
            for b in range(right):
                for c in range(left):
                    for d in range(right):
                        acc = 0
                        for i in range(mid):
                            row = (a * mid + i) * right + b
                            col = (c * mid + i) * right + d
                            acc = acc + mv[row, col]
                        ov[a * right + b, c * right + d] = acc
    return out
