"""Random states, channels and Markov block specs.

Every draw for sample ``index`` of a run seeded with ``seed`` comes from its
own generator ``default_rng(SeedSequence([seed, index]))``, so samples can be
produced in any order or in parallel without changing their values.
"""

from dataclasses import dataclass
from math import prod

import numpy as np

from .checkers import MarkovBlock, MarkovBlockSpec, build_markov_state
from .entropy import TripartiteState
from .errors import DomainError
from .linalg import trace_norm
from .markov import KrausChannel

MEASURES = ("hs_induced", "classical_dirichlet", "markov_perturbed")


def stream(seed, index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def ginibre(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_density(rng, dim, env_dim=None):
    """Hilbert-Schmidt-induced random state (partial trace of a Haar pure state on dim*env_dim)."""
    g = ginibre(rng, dim, dim if env_dim is None else env_dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_classical(rng, dim):
    """Diagonal state with flat-Dirichlet weights."""
    return np.diag(rng.dirichlet(np.ones(dim))).astype(np.complex128)


def random_unitary(rng, dim):
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, dim):
    g = ginibre(rng, dim, dim)
    return 0.5 * (g + g.conj().T)


def random_channel(rng, input_dim, output_dim, n_kraus):
    """Channel with a Haar-distributed Stinespring isometry."""
    if output_dim * n_kraus < input_dim:
        raise DomainError(f"{n_kraus} Kraus operators into dim {output_dim} cannot preserve trace on dim {input_dim}")
    q, r = np.linalg.qr(ginibre(rng, output_dim * n_kraus, input_dim))
    v = q * (np.diag(r) / np.abs(np.diag(r)))
    return KrausChannel.from_isometry(v, output_dim)


def _split_b(rng, dim_b, n_blocks=None):
    """Random composition of dim_b into blocks, each factored as dim_bl * dim_br."""
    if n_blocks is None:
        n_blocks = int(rng.integers(1, dim_b + 1))
    if not 1 <= n_blocks <= dim_b:
        raise DomainError(f"cannot split dim_b={dim_b} into {n_blocks} blocks")
    cuts = np.sort(rng.choice(np.arange(1, dim_b), size=n_blocks - 1, replace=False))
    sizes = np.diff(np.concatenate(([0], cuts, [dim_b])))
    out = []
    for n in sizes:
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        bl = int(rng.choice(divisors))
        out.append((bl, int(n) // bl))
    return out


def random_markov_spec(rng, dim_a, dim_c, factors=None, dim_b=None, n_blocks=None):
    """Random block spec with full-rank block states.

    ``factors`` is an explicit list of ``(dim_bl, dim_br)``; otherwise a
    random block structure of total size ``dim_b`` (with ``n_blocks`` blocks,
    random if None) is drawn.
    """
    if factors is None:
        if dim_b is None:
            raise DomainError("give either factors or dim_b")
        factors = _split_b(rng, dim_b, n_blocks)
    weights = rng.dirichlet(np.ones(len(factors)))
    weights = weights / weights.sum()
    blocks = []
    for p, (bl, br) in zip(weights, factors):
        blocks.append(MarkovBlock(
            p=float(p),
            rho_left=random_density(rng, dim_a * bl),
            rho_right=random_density(rng, br * dim_c),
            dim_bl=bl,
            dim_br=br,
        ))
    return MarkovBlockSpec(tuple(blocks), dim_a, dim_c)


def perturb_state(rng, rho, noise_scale):
    """Add a traceless Hermitian kick of trace norm ``noise_scale``; clip back to a state."""
    if noise_scale == 0:
        return rho
    h = random_hermitian(rng, rho.shape[0])
    h -= np.trace(h).real / h.shape[0] * np.eye(h.shape[0])
    h *= noise_scale / trace_norm(h, hermitian=True)
    w, v = np.linalg.eigh(rho + h)
    w = np.clip(w, 0.0, None)
    out = (v * (w / w.sum())) @ v.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class SampleConfig:
    dims: tuple = (2, 2, 2)
    measure: str = "hs_induced"
    count: int = 1000
    seed: int = 0
    env_dim: int = None  # hs_induced; None means dA*dB*dC
    noise_scale: float = 1e-3  # markov_perturbed

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise DomainError(f"dims must be three positive integers, got {self.dims}")
        if self.measure not in MEASURES:
            raise DomainError(f"unknown measure {self.measure!r}; choose from {MEASURES}")
        if self.count < 1:
            raise DomainError("count must be at least 1")
        if self.env_dim is not None and self.env_dim < 1:
            raise DomainError("env_dim must be at least 1")
        if self.noise_scale < 0:
            raise DomainError("noise_scale must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


def sample_state(cfg, index):
    if not 0 <= index < cfg.count:
        raise DomainError(f"index {index} outside 0..{cfg.count - 1}")
    rng = stream(cfg.seed, index)
    dim = prod(cfg.dims)
    if cfg.measure == "hs_induced":
        rho = random_density(rng, dim, cfg.env_dim or dim)
    elif cfg.measure == "classical_dirichlet":
        rho = random_classical(rng, dim)
    else:
        da, db, dc = cfg.dims
        spec = random_markov_spec(rng, da, dc, dim_b=db)
        rho = perturb_state(rng, build_markov_state(spec).rho, cfg.noise_scale)
    return TripartiteState(rho, cfg.dims)
