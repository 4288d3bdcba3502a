"""Equality-condition checkers for vanishing CMI, the block-structured Markov
state generator, and the D1/D2/D3 classifier.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .entropy import TripartiteState, validate_density
from .errors import DomainError, ShapeError
from .linalg import (
    DEFAULT_POLICY,
    lift,
    matrix_function_from,
    spectral,
    trace_norm,
)

DEFAULT_T_GRID = (-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0)
SUPPORT_MATCH_TOL = 1e-8


def _log_and_projector(m, policy):
    sd = spectral(m, policy)
    return matrix_function_from(sd, "log2_on_support"), sd.support_projector()


def check_ruskai(s, policy=DEFAULT_POLICY):
    """Trace norm of ``P (log rho_ABC + log rho_B - log rho_AB - log rho_BC) P``.

    Logs are base 2 and restricted to supports; ``P`` projects onto
    supp(rho_ABC).
    """
    dims = s.dims
    log_abc, p = _log_and_projector(s.rho, policy)
    log_b, _ = _log_and_projector(s.rho_b, policy)
    log_ab, _ = _log_and_projector(s.rho_ab, policy)
    log_bc, _ = _log_and_projector(s.rho_bc, policy)
    x = log_abc + lift(log_b, dims, 1, 2) - lift(log_ab, dims, 0, 2) - lift(log_bc, dims, 1, 3)
    return trace_norm(p @ x @ p, hermitian=True)


def ruskai_support_degraded(s, policy=DEFAULT_POLICY):
    """True unless supp(rho_ABC) equals supp(rho_AB (x) 1) intersected with supp(1 (x) rho_BC).

    The log identity is only a faithful test when this holds.
    """
    dims = s.dims
    p_abc = spectral(s.rho, policy).support_projector()
    p_ab = lift(spectral(s.rho_ab, policy).support_projector(), dims, 0, 2)
    p_bc = lift(spectral(s.rho_bc, policy).support_projector(), dims, 1, 3)
    # the intersection of two ranges is the eigenvalue-1 eigenspace of their projector mean
    w, v = np.linalg.eigh(0.5 * (p_ab + p_bc))
    inter = v[:, w > 1.0 - 1e-6]
    p_int = inter @ inter.conj().T
    return bool(np.abs(p_int - p_abc).max() > SUPPORT_MATCH_TOL)


def check_petz_t(s, t_grid=DEFAULT_T_GRID, policy=DEFAULT_POLICY):
    """Max over ``t`` of ``|| rho_ABC^{it} rho_BC^{-it} - rho_AB^{it} rho_B^{-it} ||_1``."""
    t_grid = tuple(float(t) for t in t_grid)
    if not t_grid:
        raise DomainError("t_grid must contain at least one value")
    dims = s.dims
    sds = [spectral(m, policy) for m in (s.rho, s.rho_bc, s.rho_ab, s.rho_b)]
    worst = 0.0
    for t in t_grid:
        abc, bc, ab, b = (matrix_function_from(sd, "imaginary_power", t=sign * t)
                          for sd, sign in zip(sds, (1, -1, 1, -1)))
        diff = abc @ lift(bc, dims, 1, 3) - lift(ab, dims, 0, 2) @ lift(b, dims, 1, 2)
        worst = max(worst, trace_norm(diff))
    return worst


@dataclass(frozen=True, eq=False)
class MarkovBlock:
    p: float
    rho_left: np.ndarray  # on A (x) bL
    rho_right: np.ndarray  # on bR (x) C
    dim_bl: int
    dim_br: int


@dataclass(frozen=True, eq=False)
class MarkovBlockSpec:
    """Direct-sum data ``{p_k, rho_{A bL_k}, rho_{bR_k C}}`` with B = sum_k bL_k (x) bR_k."""

    blocks: tuple
    dim_a: int
    dim_c: int

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise DomainError("a Markov block spec needs at least one block")
        total = sum(b.p for b in blocks)
        if abs(total - 1.0) > 1e-12 or any(b.p < 0 for b in blocks):
            raise DomainError(f"block weights must be a probability vector, sum is {total!r}")
        for k, b in enumerate(blocks):
            if np.shape(b.rho_left) != (self.dim_a * b.dim_bl,) * 2:
                raise ShapeError(f"block {k}: rho_left has shape {np.shape(b.rho_left)}")
            if np.shape(b.rho_right) != (b.dim_br * self.dim_c,) * 2:
                raise ShapeError(f"block {k}: rho_right has shape {np.shape(b.rho_right)}")
            validate_density(b.rho_left, name=f"block {k} rho_left")
            validate_density(b.rho_right, name=f"block {k} rho_right")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim_b(self):
        return sum(b.dim_bl * b.dim_br for b in self.blocks)

    @property
    def dims(self):
        return (self.dim_a, self.dim_b, self.dim_c)


def build_markov_state(spec):
    """``sum_k p_k rho_{A bL_k} (x) rho_{bR_k C}`` embedded block-diagonally in B.

    Blocks occupy consecutive ranges of B in order of k; inside block k the
    B index is ``bl * dim_br + br``.
    """
    da, db, dc = spec.dims
    rho = np.zeros((da * db * dc,) * 2, dtype=np.complex128)
    offset = 0
    for b in spec.blocks:
        nb = b.dim_bl * b.dim_br
        embed = np.zeros((db, nb))
        embed[offset:offset + nb, :] = np.eye(nb)
        iso = np.kron(np.kron(np.eye(da), embed), np.eye(dc))
        block = np.kron(b.rho_left, b.rho_right)
        rho += b.p * (iso @ block @ iso.T)
        offset += nb
    if offset != db:
        raise ShapeError(f"blocks cover {offset} of {db} B dimensions")
    return TripartiteState(0.5 * (rho + rho.conj().T), spec.dims)


class StateClass(str, enum.Enum):
    D1 = "D1"  # rho = MM^dagger and [M, M^dagger] = 0
    D2 = "D2"  # rho != MM^dagger, [M, M^dagger] = 0
    D3 = "D3"  # [M, M^dagger] != 0


@dataclass(frozen=True)
class ClassLabel:
    label: StateClass
    comm_norm: float
    dist_mm: float
    eta_comm: float
    eta_state: float


def classify(s, bundle, eta_comm=1e-6, eta_state=1e-6):
    comm = bundle.commutator_trace_norm
    dist = trace_norm(s.rho - bundle.mm_dagger, hermitian=True)
    if comm > eta_comm:
        label = StateClass.D3
    elif dist <= eta_state:
        label = StateClass.D1
    else:
        label = StateClass.D2
    return ClassLabel(label, comm, dist, eta_comm, eta_state)
