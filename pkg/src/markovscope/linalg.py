"""Dense complex linear algebra on small Hermitian matrices.

Matrix functions act on the *support*: eigenvalues at or below
``relative_cutoff * dim * lambda_max`` are treated as exact zeros, and
``sqrt``, ``inv_sqrt_on_support``, ``log2_on_support`` and
``imaginary_power`` send them to 0.  This gives pseudo-inverses and
support-restricted logarithms for rank-deficient marginals.
"""

from dataclasses import dataclass
from math import prod

import numpy as np

from . import kernels
from .errors import CapacityError, DomainError, NumericError, ShapeError

MAX_DIM = 4096
HERMITIAN_TOL = 1e-10

MATRIX_FUNCTIONS = ("sqrt", "inv_sqrt_on_support", "log2_on_support", "imaginary_power", "exp")


@dataclass(frozen=True)
class SupportPolicy:
    """Relative threshold below which an eigenvalue counts as zero."""

    relative_cutoff: float = 2.0**-40

    def __post_init__(self):
        if not 0.0 < self.relative_cutoff < 1.0:
            raise DomainError(f"relative_cutoff must lie in (0, 1), got {self.relative_cutoff}")

    def cutoff(self, eigenvalues):
        w = np.asarray(eigenvalues)
        if w.size == 0:
            return 0.0
        return self.relative_cutoff * w.size * max(float(w.max()), 0.0)


DEFAULT_POLICY = SupportPolicy()


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns
    support_rank: int
    cutoff: float

    @property
    def dim(self):
        return self.eigenvalues.size

    @property
    def support(self):
        return self.eigenvalues > self.cutoff

    def assemble(self, values=None):
        """Return U diag(values) U^dagger (the input matrix by default)."""
        if values is None:
            values = self.eigenvalues
        v = self.eigenvectors
        return (v * values) @ v.conj().T

    def support_projector(self):
        v = self.eigenvectors[:, self.support]
        return v @ v.conj().T


def as_matrix(m):
    """Coerce to a finite square complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def hermitian_part(h, tol=HERMITIAN_TOL):
    """Symmetrize ``h``; reject if the correction exceeds ``tol`` times its scale."""
    h = as_matrix(h)
    scale = np.abs(h).max(initial=0.0)
    asym = np.abs(h - h.conj().T).max(initial=0.0)
    if asym > tol * max(scale, np.finfo(float).tiny):
        raise DomainError(f"matrix is not Hermitian (asymmetry {asym:.3e}, scale {scale:.3e})")
    return 0.5 * (h + h.conj().T)


def spectral(h, policy=DEFAULT_POLICY):
    h = hermitian_part(h)
    try:
        w, v = kernels.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericError(str(exc)) from exc
    w = np.ascontiguousarray(w[::-1])
    v = np.ascontiguousarray(v[:, ::-1])
    cut = policy.cutoff(w)
    return SpectralDecomposition(w, v, int(np.count_nonzero(w > cut)), cut)


def _function_values(sd, f, t):
    w = sd.eigenvalues
    on = sd.support
    if f in ("sqrt", "inv_sqrt_on_support", "log2_on_support"):
        if w.size and w[-1] < -sd.cutoff:
            raise DomainError(f"{f} needs a PSD matrix, found eigenvalue {w[-1]:.6e}")
    out = np.zeros(w.size, dtype=np.complex128)
    if f == "sqrt":
        out[on] = np.sqrt(w[on])
    elif f == "inv_sqrt_on_support":
        out[on] = 1.0 / np.sqrt(w[on])
    elif f == "log2_on_support":
        out[on] = np.log2(w[on])
    elif f == "imaginary_power":
        if t is None:
            raise DomainError("imaginary_power needs a real exponent t")
        out[on] = np.exp(1j * t * np.log(w[on]))
    elif f == "exp":
        out[:] = np.exp(w)
    else:
        raise DomainError(f"unknown matrix function {f!r}; choose from {MATRIX_FUNCTIONS}")
    return out


def matrix_function(h, f, policy=DEFAULT_POLICY, t=None):
    """Apply ``f`` to the spectrum of Hermitian ``h``.

    ``f`` is one of ``MATRIX_FUNCTIONS``; ``t`` is the real exponent for
    ``imaginary_power`` (``h^{it}`` on the support).
    """
    return matrix_function_from(spectral(h, policy), f, t)


def matrix_function_from(sd, f, t=None):
    return sd.assemble(_function_values(sd, f, t))


def sqrtm_psd(h, policy=DEFAULT_POLICY):
    return matrix_function(h, "sqrt", policy)


def inv_sqrtm(h, policy=DEFAULT_POLICY):
    return matrix_function(h, "inv_sqrt_on_support", policy)


def log2m(h, policy=DEFAULT_POLICY):
    return matrix_function(h, "log2_on_support", policy)


def ipowm(h, t, policy=DEFAULT_POLICY):
    return matrix_function(h, "imaginary_power", policy, t=t)


def expm_hermitian(h):
    return matrix_function(h, "exp")


def tensor(a, b, max_dim=MAX_DIM):
    a = as_matrix(a)
    b = as_matrix(b)
    n = a.shape[0] * b.shape[0]
    if n > max_dim:
        raise CapacityError(f"tensor product dimension {n} exceeds maximum {max_dim}")
    return kernels.kron(a, b)


def lift(op, dims, start, stop, max_dim=MAX_DIM):
    """Embed ``op`` acting on factors ``dims[start:stop]`` into the full product space."""
    op = as_matrix(op)
    dims = [int(d) for d in dims]
    if op.shape[0] != prod(dims[start:stop]):
        raise ShapeError(f"operator of dim {op.shape[0]} does not match factors {dims[start:stop]}")
    left = prod(dims[:start])
    right = prod(dims[stop:])
    if left * op.shape[0] * right > max_dim:
        raise CapacityError(f"lifted dimension {left * op.shape[0] * right} exceeds maximum {max_dim}")
    out = op
    if left > 1:
        out = kernels.kron(np.eye(left, dtype=np.complex128), out)
    if right > 1:
        out = kernels.kron(out, np.eye(right, dtype=np.complex128))
    return out


def partial_trace(m, dims, keep):
    """Reduced operator on the factors listed in ``keep``.

    ``keep`` empty returns the full trace as a 1x1 matrix.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or prod(dims) != m.shape[0]:
        raise ShapeError(f"dims {dims} do not match matrix dimension {m.shape[0]}")
    keep = set(keep)
    if not keep <= set(range(len(dims))):
        raise ShapeError(f"keep {sorted(keep)} has indices outside 0..{len(dims) - 1}")
    out = m
    for idx in sorted(set(range(len(dims))) - keep, reverse=True):
        out = kernels.trace_out(out, prod(dims[:idx]), dims[idx], prod(dims[idx + 1:]))
        del dims[idx]
    return out


def trace_norm(m, hermitian=False):
    """Schatten-1 norm.

    ``hermitian=True`` takes the eigenvalue route when ``m`` is Hermitian up
    to rounding and falls back to singular values otherwise.
    """
    m = as_matrix(m)
    if hermitian:
        mh = m.conj().T
        if np.abs(m - mh).max(initial=0.0) <= 1e-8 * max(np.abs(m).max(initial=0.0), 1.0):
            w, _ = kernels.eigh(0.5 * (m + mh))
            return float(np.abs(w).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def lie_trotter(a, b, n, symmetric=False):
    """``[e^{a/n} e^{b/n}]^n`` or the symmetric split ``[e^{a/2n} e^{b/n} e^{a/2n}]^n``."""
    if int(n) != n or n < 1:
        raise DomainError(f"Trotter step count must be a positive integer, got {n}")
    n = int(n)
    a = hermitian_part(a)
    b = hermitian_part(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    eb = expm_hermitian(b / n)
    if symmetric:
        ea = expm_hermitian(a / (2 * n))
        step = ea @ eb @ ea
    else:
        step = expm_hermitian(a / n) @ eb
    return np.linalg.matrix_power(step, n)
