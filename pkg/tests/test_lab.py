import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markovscope.checkers import StateClass, build_markov_state
from markovscope.entropy import TripartiteState
from markovscope.errors import ShapeError
from markovscope.lab import (
    INV_2LN2,
    INV_8LN2,
    RECHECK_POLICY,
    Candidate,
    DeficitRecord,
    evaluate_deficits,
    is_violation,
    marginals_commute,
    monotonicity_gap,
    pinsker_identity_check,
    reexamine,
    run_scan,
    search_min_deficit,
    summarize,
    worker_count,
)
from markovscope.markov import KrausChannel
from markovscope.sampling import SampleConfig, random_channel, random_classical, random_density, random_markov_spec

from conftest import ghz_state, random_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_ghz_deficits():
    rec = evaluate_deficits(ghz_state())
    assert rec.cmi == pytest.approx(1.0, abs=1e-9)
    assert rec.deficit_conj == pytest.approx(1 - 1 / (2 * math.log(2)), abs=1e-9)
    assert rec.deficit_comm == pytest.approx(1.0, abs=1e-9)
    assert rec.class_label is StateClass.D2
    assert rec.is_consistent()


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 8))
def test_deficits_are_consistent_and_nonnegative(seed, env):
    s = random_state(np.random.default_rng(seed), env_dim=env)
    rec = evaluate_deficits(s, 5, {"src": "test"})
    assert rec.is_consistent()
    assert rec.cmi >= 0.0
    assert rec.deficit_conj >= -1e-6 and rec.deficit_comm >= -1e-6
    assert not is_violation(rec)
    assert rec.state_id == 5 and rec.provenance == {"src": "test"}


def test_record_dict_is_plain():
    d = evaluate_deficits(ghz_state()).to_dict()
    assert d["class_label"] == "D2"
    assert set(d) == {"state_id", "cmi", "cmi_raw", "dist_mm", "dist_mdm", "comm_norm",
                      "deficit_conj", "deficit_comm", "class_label", "provenance"}


def fake_record(conj, comm):
    return DeficitRecord(0, 0.1, 0.1, 0.0, 0.0, 0.0, conj, comm, StateClass.D1)


def test_violation_threshold():
    assert not is_violation(fake_record(-1e-6, 0.0))
    assert is_violation(fake_record(-2e-6, 0.0))
    assert is_violation(fake_record(0.0, -2e-6))


def test_reexamine_recomputes_at_tight_cutoff(rng):
    s = random_state(rng)
    cand = reexamine(s, fake_record(-1.0, 0.0))
    assert isinstance(cand, Candidate)
    assert not cand.confirmed  # the genuine recheck finds no violation
    assert cand.state is not s
    np.testing.assert_array_equal(cand.state.rho, s.rho)
    assert RECHECK_POLICY.relative_cutoff == 2.0**-52


def test_pinsker_identity_on_classical_states(rng):
    for _ in range(20):
        s = TripartiteState(random_classical(rng, 8), (2, 2, 2))
        rec = pinsker_identity_check(s)
        assert rec.commuting and not rec.support_escape
        assert rec.identity_residual < 1e-8


def test_pinsker_skips_noncommuting(rng):
    s = random_state(rng)
    assert not marginals_commute(s)
    rec = pinsker_identity_check(s)
    assert not rec.commuting and rec.identity_residual is None


def test_pinsker_ghz():
    # marginals of GHZ are diagonal; MM^+ is the dephased state and S(rho || MM^+) = 1 = I(A:C|B)
    rec = pinsker_identity_check(ghz_state())
    assert rec.commuting
    assert rec.relative_entropy == pytest.approx(1.0, abs=1e-9)
    assert rec.identity_residual < 1e-8


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_monotonicity_gap_nonnegative(seed):
    rng = np.random.default_rng(seed)
    phi = random_channel(rng, 4, 2, 2)
    rec = monotonicity_gap(random_density(rng, 4), random_density(rng, 4), phi)
    assert rec.dpi_gap >= -1e-9
    assert rec.recovery_distance >= 0.0
    assert rec.modified_residual == pytest.approx(rec.dpi_gap - INV_2LN2 * rec.recovery_distance**2)


def test_monotonicity_identity_channel_has_zero_gap(rng):
    rho, sigma = random_density(rng, 3), random_density(rng, 3)
    rec = monotonicity_gap(rho, sigma, KrausChannel.identity(3))
    assert rec.dpi_gap == pytest.approx(0.0, abs=1e-12)
    assert rec.recovery_distance < 1e-10


def test_monotonicity_support_escape():
    rec = monotonicity_gap(np.diag([0.5, 0.5]), np.diag([1.0, 0.0]), KrausChannel.identity(2))
    assert rec.support_escape and rec.dpi_gap == math.inf


def test_monotonicity_shape_check(rng):
    with pytest.raises(ShapeError):
        monotonicity_gap(random_density(rng, 3), random_density(rng, 2), KrausChannel.identity(3))


def test_markov_state_deficits_are_zero(rng):
    s = build_markov_state(random_markov_spec(rng, 2, 2, factors=[(1, 2), (2, 1)]))
    rec = evaluate_deficits(s)
    assert abs(rec.deficit_conj) < 1e-9 and abs(rec.deficit_comm) < 1e-9
    assert rec.class_label is StateClass.D1


@pytest.mark.parametrize("measure", ["hs_induced", "classical_dirichlet", "markov_perturbed"])
def test_run_scan_small(measure):
    cfg = SampleConfig(measure=measure, count=20, seed=4)
    records, candidates = run_scan(cfg, workers=1)
    assert [r.state_id for r in records] == list(range(20))
    assert candidates == []
    summary = summarize(records, candidates)
    assert summary["count"] == 20 and sum(summary["class_histogram"].values()) == 20
    assert summary["min_deficit_conj"] >= -1e-6
    if measure == "classical_dirichlet":
        assert summary["class_histogram"]["D3"] == 0


def test_run_scan_parallel_matches_serial():
    cfg = SampleConfig(count=12, seed=9)
    serial, _ = run_scan(cfg, workers=1)
    parallel, _ = run_scan(cfg, workers=3)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("MARKOVSCOPE_THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("MARKOVSCOPE_THREADS", "8")
    assert worker_count() == 8
    monkeypatch.setenv("MARKOVSCOPE_THREADS", "0")
    assert worker_count() == 1


def test_search_is_deterministic_and_spends_budget():
    a = search_min_deficit((2, 2, 2), budget=60, seed=1, restarts=3)
    b = search_min_deficit((2, 2, 2), budget=60, seed=1, restarts=3)
    assert a.evaluations <= 60
    assert a.best.to_dict() == b.best.to_dict()
    assert a.trail == b.trail
    deficits = [t["deficit_conj"] for t in a.trail]
    assert deficits == sorted(deficits, reverse=True)
    assert a.best.deficit_conj == deficits[-1]
    assert a.best.deficit_conj >= -1e-6


def test_search_budget_equals_restarts():
    res = search_min_deficit((2, 2, 2), budget=4, seed=0, restarts=4)
    assert res.evaluations == 4
    assert {t["restart"] for t in res.trail} <= {0, 1, 2, 3}


def test_search_rejects_bad_budget():
    with pytest.raises(ValueError):
        search_min_deficit((2, 2, 2), budget=2, seed=0, restarts=3)


def test_deficit_constants():
    assert INV_2LN2 == pytest.approx(0.7213475204444817)
    assert INV_8LN2 == pytest.approx(INV_2LN2 / 4)


def test_search_with_one_evaluation_per_restart_is_a_scan():
    res = search_min_deficit((2, 2, 2), budget=12, seed=5, restarts=12)
    scan, _ = run_scan(SampleConfig(count=12, seed=5), workers=1)
    assert res.evaluations == 12
    assert res.best.deficit_conj == pytest.approx(min(r.deficit_conj for r in scan), abs=1e-10)
    # the trail only records new global minima, each of which is some scanned state
    scanned = [r.deficit_conj for r in scan]
    for step in res.trail:
        assert min(abs(step["deficit_conj"] - x) for x in scanned) < 1e-10


def test_classical_soundness():
    records, _ = run_scan(SampleConfig(measure="classical_dirichlet", count=200, seed=13), workers=1)
    assert min(r.deficit_conj for r in records) >= -1e-8


def test_commutator_bounded_by_distances():
    for measure in ("hs_induced", "classical_dirichlet", "markov_perturbed"):
        records, _ = run_scan(SampleConfig(measure=measure, count=100, seed=17), workers=1)
        for r in records:
            assert r.comm_norm <= r.dist_mm + r.dist_mdm + 1e-9


def test_markov_perturbation_continuity():
    medians = []
    for noise in (1e-4, 1e-3, 1e-2):
        records, _ = run_scan(SampleConfig(measure="markov_perturbed", count=200, seed=21, noise_scale=noise),
                              workers=1)
        medians.append((np.median([r.cmi for r in records]), np.median([r.dist_mm for r in records])))
    cmis, dists = zip(*medians)
    assert list(cmis) == sorted(cmis) and list(dists) == sorted(dists)
