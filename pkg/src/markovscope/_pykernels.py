"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is not built, or when
``MARKOVSCOPE_KERNELS=python`` is set.  Both backends share one contract:

eigh(h)
    ascending eigenvalues and column eigenvectors of a Hermitian matrix
kron(a, b)
    Kronecker product of two square complex matrices
trace_out(m, left, mid, right)
    trace out the middle factor of a ``left*mid*right`` square matrix
"""

import numpy as np

NAME = "python"


def eigh(h):
    w, v = np.linalg.eigh(h)
    return w, v


def kron(a, b):
    return np.kron(a, b)


def trace_out(m, left, mid, right):
    t = m.reshape(left, mid, right, left, mid, right)
    return np.einsum("aibcid->abcd", t).reshape(left * right, left * right)
