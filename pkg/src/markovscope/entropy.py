"""Von Neumann entropy, relative entropy and conditional mutual information.

All entropies are in bits.  Relative entropy returns ``math.inf`` when the
support of the first argument escapes the support of the second.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ShapeError, StateValidationError
from .linalg import DEFAULT_POLICY, as_matrix, partial_trace, spectral

STATE_TOL = 1e-10
SUPPORT_LEAK_TOL = 1e-9
KLEIN_SLACK = 1e-9
SSA_SLACK = 1e-8


def validate_density(rho, tol=STATE_TOL, name="rho"):
    """Raise ``StateValidationError`` unless ``rho`` is a density matrix within ``tol``."""
    try:
        rho = as_matrix(rho)
    except ShapeError as exc:
        raise StateValidationError("shape", f"{name}: {exc}") from exc
    except ValueError as exc:
        raise StateValidationError("finite", f"{name}: {exc}") from exc
    asym = np.abs(rho - rho.conj().T).max(initial=0.0)
    if asym > tol:
        raise StateValidationError("hermitian", f"{name} deviates from Hermitian by {asym:.3e}")
    h = 0.5 * (rho + rho.conj().T)
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > tol:
        raise StateValidationError("trace", f"{name} has trace {tr!r}, expected 1")
    lam_min = float(np.linalg.eigvalsh(h)[0])
    if lam_min < -tol:
        raise StateValidationError("psd", f"{name} has eigenvalue {lam_min:.3e} < 0")
    return h


@dataclass(frozen=True, eq=False)
class TripartiteState:
    """Density matrix on A(x)B(x)C, basis index ``(a*dB + b)*dC + c``."""

    rho: np.ndarray
    dims: tuple
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise StateValidationError("shape", f"dims must be three positive integers, got {self.dims}")
        rho = np.asarray(self.rho, dtype=np.complex128)
        if rho.shape != (math.prod(dims),) * 2:
            raise StateValidationError("shape", f"matrix shape {rho.shape} does not match dims {dims}")
        if self.validate:
            rho = validate_density(rho)
        rho = np.array(rho, copy=True)
        rho.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self):
        return self.rho.shape[0]

    @cached_property
    def rho_ab(self):
        return partial_trace(self.rho, self.dims, {0, 1})

    @cached_property
    def rho_bc(self):
        return partial_trace(self.rho, self.dims, {1, 2})

    @cached_property
    def rho_b(self):
        return partial_trace(self.rho, self.dims, {1})

    def marginal(self, keep):
        return partial_trace(self.rho, self.dims, keep)


def _entropy_from_eigenvalues(sd):
    lam = sd.eigenvalues[sd.support]
    return float(-(lam * np.log2(lam)).sum())


def von_neumann_entropy(rho, policy=DEFAULT_POLICY, validate=True):
    """``-Tr rho log2 rho`` over the support of ``rho``."""
    if validate:
        rho = validate_density(rho)
    s = _entropy_from_eigenvalues(spectral(rho, policy))
    return max(s, 0.0)


def relative_entropy(rho, sigma, policy=DEFAULT_POLICY, validate=True):
    """``Tr rho (log2 rho - log2 sigma)`` or ``math.inf`` on support escape."""
    if validate:
        rho = validate_density(rho, name="rho")
        sigma = validate_density(sigma, name="sigma")
    if rho.shape != sigma.shape:
        raise ShapeError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    sr = spectral(rho, policy)
    ss = spectral(sigma, policy)
    u = sr.eigenvectors[:, sr.support]
    lam = sr.eigenvalues[sr.support]
    # overlaps[j, i] = |<v_j|u_i>|^2
    overlaps = np.abs(ss.eigenvectors.conj().T @ u) ** 2
    leak = overlaps[~ss.support].sum(axis=0)
    if leak.size and leak.max() > SUPPORT_LEAK_TOL:
        return math.inf
    mu = ss.eigenvalues[ss.support]
    cross = float((lam * (overlaps[ss.support] * np.log2(mu)[:, None]).sum(axis=0)).sum())
    d = float((lam * np.log2(lam)).sum()) - cross
    if -KLEIN_SLACK <= d < 0.0:
        d = 0.0
    return d


def conditional_mutual_information(s, policy=DEFAULT_POLICY):
    """Raw ``S(AB) + S(BC) - S(ABC) - S(B)`` in bits, without clamping."""
    ent = lambda m: _entropy_from_eigenvalues(spectral(m, policy))
    return ent(s.rho_ab) + ent(s.rho_bc) - ent(s.rho) - ent(s.rho_b)


def clamp_cmi(value):
    """Report value for a raw CMI: tiny SSA-violating negatives become 0."""
    if -SSA_SLACK <= value < 0.0:
        return 0.0
    return value
