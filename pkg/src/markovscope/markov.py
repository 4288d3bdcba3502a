"""The operator M = rho_AB^{1/2} rho_B^{-1/2} rho_BC^{1/2}, its Gram forms and
self-commutator, and the Petz transpose channel for general Kraus channels.
"""

from dataclasses import dataclass

import numpy as np

from .entropy import conditional_mutual_information
from .errors import DomainError, ShapeError
from .linalg import (
    DEFAULT_POLICY,
    as_matrix,
    hermitian_part,
    inv_sqrtm,
    lift,
    sqrtm_psd,
    trace_norm,
)

KRAUS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map ``X -> sum_k K_k X K_k^dagger``; each K_k is output_dim x input_dim."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus_ops)
        if not ops:
            raise DomainError("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ops):
            raise ShapeError("Kraus operators must be 2-D and share one shape")
        completeness = sum(k.conj().T @ k for k in ops)
        err = np.abs(completeness - np.eye(shape[1])).max()
        if err > KRAUS_TOL:
            raise DomainError(f"Kraus operators are not trace preserving (error {err:.3e})")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def input_dim(self):
        return self.kraus_ops[0].shape[1]

    @property
    def output_dim(self):
        return self.kraus_ops[0].shape[0]

    def __call__(self, x):
        x = as_matrix(x)
        if x.shape[0] != self.input_dim:
            raise ShapeError(f"channel input dim is {self.input_dim}, got {x.shape[0]}")
        return sum(k @ x @ k.conj().T for k in self.kraus_ops)

    def adjoint(self, y):
        """Heisenberg-picture map ``Y -> sum_k K_k^dagger Y K_k``."""
        y = as_matrix(y)
        if y.shape[0] != self.output_dim:
            raise ShapeError(f"channel output dim is {self.output_dim}, got {y.shape[0]}")
        return sum(k.conj().T @ y @ k for k in self.kraus_ops)

    @classmethod
    def identity(cls, dim):
        return cls((np.eye(dim, dtype=np.complex128),))

    @classmethod
    def partial_trace(cls, dims, traced):
        """Channel tracing out the single factor ``traced`` of ``dims``."""
        dims = [int(d) for d in dims]
        left = int(np.prod(dims[:traced]))
        right = int(np.prod(dims[traced + 1:]))
        ops = []
        for j in range(dims[traced]):
            bra = np.zeros((1, dims[traced]), dtype=np.complex128)
            bra[0, j] = 1.0
            ops.append(np.kron(np.kron(np.eye(left), bra), np.eye(right)))
        return cls(tuple(ops))

    @classmethod
    def from_isometry(cls, v, output_dim):
        """Split a Stinespring isometry ``V: in -> out (x) env`` into Kraus operators."""
        v = np.asarray(v, dtype=np.complex128)
        n_env = v.shape[0] // output_dim
        blocks = v.reshape(output_dim, n_env, v.shape[1])
        return cls(tuple(blocks[:, e, :] for e in range(n_env)))


@dataclass(frozen=True, eq=False)
class MOperatorBundle:
    m: np.ndarray
    mm_dagger: np.ndarray
    m_dagger_m: np.ndarray
    commutator: np.ndarray
    commutator_trace_norm: float


def build_m_bundle(s, policy=DEFAULT_POLICY):
    """M as the product of its three lifted factors, plus MM^dagger, M^dagger M, [M, M^dagger]."""
    dims = s.dims
    sqrt_ab = lift(sqrtm_psd(s.rho_ab, policy), dims, 0, 2)
    inv_sqrt_b = lift(inv_sqrtm(s.rho_b, policy), dims, 1, 2)
    sqrt_bc = lift(sqrtm_psd(s.rho_bc, policy), dims, 1, 3)
    m = sqrt_ab @ inv_sqrt_b @ sqrt_bc
    mh = m.conj().T
    mm = m @ mh
    mdm = mh @ m
    comm = mm - mdm
    return MOperatorBundle(m, mm, mdm, comm, trace_norm(comm, hermitian=True))


def petz_map(phi, sigma, omega, policy=DEFAULT_POLICY):
    """``sigma^{1/2} Phi^dagger(Phi(sigma)^{-1/2} omega Phi(sigma)^{-1/2}) sigma^{1/2}``.

    Inverse square roots are taken on the support of ``Phi(sigma)``.
    """
    sigma = hermitian_part(sigma)
    omega = as_matrix(omega)
    if sigma.shape[0] != phi.input_dim:
        raise ShapeError(f"sigma has dim {sigma.shape[0]}, channel input is {phi.input_dim}")
    if omega.shape[0] != phi.output_dim:
        raise ShapeError(f"omega has dim {omega.shape[0]}, channel output is {phi.output_dim}")
    r = inv_sqrtm(phi(sigma), policy)
    s_half = sqrtm_psd(sigma, policy)
    return s_half @ phi.adjoint(r @ omega @ r) @ s_half


@dataclass(frozen=True)
class SaturationResiduals:
    cmi: float
    dist_mm: float
    dist_mdm: float


def saturation_residuals(s, bundle, policy=DEFAULT_POLICY):
    """CMI and the trace distances of rho_ABC to MM^dagger and to M^dagger M."""
    return SaturationResiduals(
        cmi=conditional_mutual_information(s, policy),
        dist_mm=trace_norm(s.rho - bundle.mm_dagger, hermitian=True),
        dist_mdm=trace_norm(s.rho - bundle.m_dagger_m, hermitian=True),
    )
