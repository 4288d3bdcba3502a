"""Backend selection for the hot kernels.

The compiled extension is preferred; the numpy fallback is used when it is
missing or when ``MARKOVSCOPE_KERNELS=python`` is set in the environment.
"""

import os
import warnings

from . import _pykernels

python_backend = _pykernels

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None


def select(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None=auto)."""
    if name is None:
        name = os.environ.get("MARKOVSCOPE_KERNELS", "auto").lower()
    if name == "python":
        return python_backend
    if name in ("cython", "compiled"):
        if compiled_backend is None:
            raise ImportError("compiled kernels requested but markovscope._ckernels is not built")
        return compiled_backend
    if name != "auto":
        warnings.warn(f"unknown MARKOVSCOPE_KERNELS={name!r}, using auto", stacklevel=2)
    return compiled_backend if compiled_backend is not None else python_backend


backend = select()
BACKEND = backend.NAME

eigh = backend.eigh
kron = backend.kron
trace_out = backend.trace_out
