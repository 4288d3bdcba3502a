import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markovscope.checkers import build_markov_state
from markovscope.entropy import TripartiteState
from markovscope.errors import DomainError, ShapeError
from markovscope.linalg import matrix_function, partial_trace, trace_norm
from markovscope.markov import KrausChannel, build_m_bundle, petz_map, saturation_residuals
from markovscope.sampling import random_channel, random_classical, random_density, random_markov_spec

from conftest import product_state, random_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_product_state_bundle(rng):
    s, (a, b, c) = product_state(rng)
    bundle = build_m_bundle(s)
    expected_m = np.kron(np.kron(matrix_function(a, "sqrt"), matrix_function(b, "sqrt")), matrix_function(c, "sqrt"))
    np.testing.assert_allclose(bundle.m, expected_m, atol=1e-12)
    np.testing.assert_allclose(bundle.mm_dagger, s.rho, atol=1e-12)
    assert bundle.commutator_trace_norm < 1e-10


def test_classical_bundle_matches_marginal_formula(rng):
    dims = (2, 3, 2)
    rho = random_classical(rng, 12)
    p = np.diag(rho).real.reshape(dims)
    p_ij, p_jk, p_j = p.sum(axis=2), p.sum(axis=0), p.sum(axis=(0, 2))
    q = np.array([[[p_ij[i, j] * p_jk[j, k] / p_j[j] for k in range(2)] for j in range(3)] for i in range(2)])
    bundle = build_m_bundle(TripartiteState(rho, dims))
    np.testing.assert_allclose(bundle.mm_dagger, np.diag(q.ravel()), atol=1e-12)
    np.testing.assert_allclose(bundle.m_dagger_m, np.diag(q.ravel()), atol=1e-12)


def test_ghz_bundle(ghz):
    bundle = build_m_bundle(ghz)
    # all marginals are diagonal, so MM^+ is the classical approximant 1/2(|000><000| + |111><111|)
    expected = np.zeros((8, 8))
    expected[0, 0] = expected[7, 7] = 0.5
    np.testing.assert_allclose(bundle.mm_dagger, expected, atol=1e-15)
    res = saturation_residuals(ghz, bundle)
    assert res.cmi == pytest.approx(1.0, abs=1e-9)
    # rho - MM^+ restricted to span{000, 111} is [[0, 1/2], [1/2, 0]]
    assert res.dist_mm == pytest.approx(1.0, abs=1e-12)
    assert res.dist_mdm == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([(2, 2, 2), (2, 3, 2), (3, 2, 2)]), st.integers(1, 12))
def test_marginal_recovery(seed, dims, env):
    s = random_state(np.random.default_rng(seed), dims, env_dim=env)
    bundle = build_m_bundle(s)
    np.testing.assert_allclose(partial_trace(bundle.mm_dagger, dims, {0, 1}), s.rho_ab, atol=1e-8)
    np.testing.assert_allclose(partial_trace(bundle.m_dagger_m, dims, {1, 2}), s.rho_bc, atol=1e-8)
    assert np.trace(bundle.mm_dagger).real == pytest.approx(1.0, abs=1e-8)
    np.testing.assert_allclose(bundle.commutator, bundle.mm_dagger - bundle.m_dagger_m, atol=1e-10)
    assert np.linalg.eigvalsh(bundle.mm_dagger)[0] >= -1e-9


def test_saturation_on_markov_states(rng):
    for factors in ([(2, 2), (1, 2)], [(1, 1), (1, 1)], [(2, 1), (1, 2), (1, 1)]):
        s = build_markov_state(random_markov_spec(rng, 2, 2, factors=factors))
        bundle = build_m_bundle(s)
        res = saturation_residuals(s, bundle)
        assert max(abs(res.cmi), res.dist_mm, res.dist_mdm) < 1e-8
        assert bundle.commutator_trace_norm < 1e-8


def test_kraus_channel_validation():
    with pytest.raises(DomainError):
        KrausChannel((np.eye(2) * 0.5,))
    with pytest.raises(DomainError):
        KrausChannel(())
    with pytest.raises(ShapeError):
        KrausChannel((np.eye(2), np.eye(3)))


def test_partial_trace_channel_matches_partial_trace(rng):
    rho = random_density(rng, 12)
    phi = KrausChannel.partial_trace([2, 3, 2], 2)
    assert (phi.input_dim, phi.output_dim) == (12, 6)
    np.testing.assert_allclose(phi(rho), partial_trace(rho, [2, 3, 2], {0, 1}), atol=1e-14)
    psi = KrausChannel.partial_trace([2, 3, 2], 0)
    np.testing.assert_allclose(psi(rho), partial_trace(rho, [2, 3, 2], {1, 2}), atol=1e-14)


def test_adjoint_is_dual(rng):
    phi = random_channel(rng, 3, 2, 3)
    x = random_density(rng, 3)
    y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.trace(phi(x) @ y) == pytest.approx(np.trace(x @ phi.adjoint(y)), abs=1e-13)


def test_petz_identity_channel(rng):
    sigma = random_density(rng, 3)
    omega = random_density(rng, 3, 1)
    np.testing.assert_allclose(petz_map(KrausChannel.identity(3), sigma, omega), omega, atol=1e-12)


def test_petz_identity_channel_rank_deficient_sigma(rng):
    sigma = np.diag([0.6, 0.4, 0.0])
    omega = random_density(rng, 3)
    p = np.diag([1.0, 1.0, 0.0])
    np.testing.assert_allclose(petz_map(KrausChannel.identity(3), sigma, omega), p @ omega @ p, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(2, 4), st.integers(1, 4))
def test_petz_recovers_sigma(seed, din, dout, nk):
    rng = np.random.default_rng(seed)
    nk = max(nk, -(-din // dout))
    phi = random_channel(rng, din, dout, nk)
    sigma = random_density(rng, din)
    assert trace_norm(petz_map(phi, sigma, phi(sigma)) - sigma) < 1e-8


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_petz_positivity(seed):
    rng = np.random.default_rng(seed)
    phi = random_channel(rng, 3, 2, 2)
    out = petz_map(phi, random_density(rng, 3), random_density(rng, 2, 1))
    assert np.linalg.eigvalsh(0.5 * (out + out.conj().T))[0] >= -1e-9


def test_petz_reproduces_gram_forms(rng):
    """Tracing out C with reference rho_A (x) rho_BC recovers M^+M; tracing out A with rho_AB (x) rho_C gives MM^+."""
    dims = (2, 3, 2)
    s = random_state(rng, dims)
    bundle = build_m_bundle(s)
    rho_a, rho_c = s.marginal({0}), s.marginal({2})
    via_c = petz_map(KrausChannel.partial_trace(dims, 2), np.kron(rho_a, s.rho_bc), s.rho_ab)
    via_a = petz_map(KrausChannel.partial_trace(dims, 0), np.kron(s.rho_ab, rho_c), s.rho_bc)
    np.testing.assert_allclose(via_c, bundle.m_dagger_m, atol=1e-10)
    np.testing.assert_allclose(via_a, bundle.mm_dagger, atol=1e-10)


def test_petz_reconstructs_markov_state(rng):
    s = build_markov_state(random_markov_spec(rng, 2, 2, factors=[(2, 1), (1, 2)]))
    dims = s.dims
    rho_a = s.marginal({0})
    out = petz_map(KrausChannel.partial_trace(dims, 2), np.kron(rho_a, s.rho_bc), s.rho_ab)
    assert trace_norm(out - s.rho) < 1e-8
    # the state itself as reference is a fixed point for any state
    out = petz_map(KrausChannel.partial_trace(dims, 2), s.rho, s.rho_ab)
    assert trace_norm(out - s.rho) < 1e-8


def test_random_channel_needs_enough_kraus(rng):
    with pytest.raises(DomainError):
        random_channel(rng, 3, 2, 1)


def test_petz_shape_errors(rng):
    phi = random_channel(rng, 3, 2, 2)
    with pytest.raises(ShapeError):
        petz_map(phi, random_density(rng, 2), random_density(rng, 2))
    with pytest.raises(ShapeError):
        petz_map(phi, random_density(rng, 3), random_density(rng, 3))
