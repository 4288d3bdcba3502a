"""Stress tests for the conjectured trace-norm lower bounds on CMI.

Two deficits are tracked per state, both of which the conjecture says are
nonnegative::

    deficit_conj = I(A:C|B) - max(||rho - MM^+||_1^2, ||rho - M^+M||_1^2) / (2 ln 2)
    deficit_comm = I(A:C|B) - ||[M, M^+]||_1^2 / (8 ln 2)

``run_scan`` evaluates a sampled ensemble; ``search_min_deficit`` runs a
derivative-free descent over Cholesky-type factors looking for violations.
Anything below ``-VIOLATION_TOL`` is re-evaluated from scratch at a tighter
support cutoff before being reported as a candidate.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .checkers import StateClass, classify
from .entropy import TripartiteState, clamp_cmi, conditional_mutual_information, relative_entropy
from .errors import ShapeError
from .linalg import DEFAULT_POLICY, SupportPolicy, lift, trace_norm
from .markov import build_m_bundle, petz_map, saturation_residuals
from .sampling import random_density, sample_state, stream

INV_2LN2 = 1.0 / (2.0 * math.log(2.0))
INV_8LN2 = 1.0 / (8.0 * math.log(2.0))
VIOLATION_TOL = 1e-6
RECHECK_POLICY = SupportPolicy(2.0**-52)
COMMUTING_TOL = 1e-8
THREADS_ENV = "MARKOVSCOPE_THREADS"


@dataclass(frozen=True)
class DeficitRecord:
    state_id: int
    cmi: float
    cmi_raw: float
    dist_mm: float
    dist_mdm: float
    comm_norm: float
    deficit_conj: float
    deficit_comm: float
    class_label: StateClass
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["class_label"] = self.class_label.value
        return d

    def is_consistent(self, tol=1e-12):
        """Recompute both deficits from the stored parts."""
        conj = self.cmi - INV_2LN2 * max(self.dist_mm**2, self.dist_mdm**2)
        comm = self.cmi - INV_8LN2 * self.comm_norm**2
        return abs(conj - self.deficit_conj) <= tol and abs(comm - self.deficit_comm) <= tol


def evaluate_deficits(s, state_id=0, provenance=None, policy=DEFAULT_POLICY,
                      eta_comm=1e-6, eta_state=1e-6):
    bundle = build_m_bundle(s, policy)
    res = saturation_residuals(s, bundle, policy)
    label = classify(s, bundle, eta_comm, eta_state).label
    cmi = clamp_cmi(res.cmi)
    comm = bundle.commutator_trace_norm
    return DeficitRecord(
        state_id=state_id,
        cmi=cmi,
        cmi_raw=res.cmi,
        dist_mm=res.dist_mm,
        dist_mdm=res.dist_mdm,
        comm_norm=comm,
        deficit_conj=cmi - INV_2LN2 * max(res.dist_mm**2, res.dist_mdm**2),
        deficit_comm=cmi - INV_8LN2 * comm**2,
        class_label=label,
        provenance=dict(provenance or {}),
    )


@dataclass(frozen=True)
class PinskerRecord:
    commuting: bool
    identity_residual: float = None  # None when not commuting
    cmi: float = None
    relative_entropy: float = None
    support_escape: bool = False


def marginals_commute(s, tol=COMMUTING_TOL):
    dims = s.dims
    ops = (lift(s.rho_ab, dims, 0, 2), lift(s.rho_bc, dims, 1, 3), lift(s.rho_b, dims, 1, 2))
    pairs = ((0, 1), (0, 2), (1, 2))
    return all(trace_norm(ops[i] @ ops[j] - ops[j] @ ops[i]) < tol for i, j in pairs)


def pinsker_identity_check(s, policy=DEFAULT_POLICY):
    """Compare I(A:C|B) with S(rho || MM^+) when the lifted marginals commute."""
    if not marginals_commute(s):
        return PinskerRecord(commuting=False)
    cmi = conditional_mutual_information(s, policy)
    mm = build_m_bundle(s, policy).mm_dagger
    # MM^+ has unit trace only up to rounding; relative entropy wants a state
    mm = 0.5 * (mm + mm.conj().T)
    mm = mm / np.trace(mm).real
    d = relative_entropy(s.rho, mm, policy, validate=False)
    if math.isinf(d):
        return PinskerRecord(True, None, cmi, d, support_escape=True)
    return PinskerRecord(True, abs(cmi - d), cmi, d)


@dataclass(frozen=True)
class MonotonicityRecord:
    dpi_gap: float
    modified_residual: float
    recovery_distance: float
    support_escape: bool = False


def monotonicity_gap(rho, sigma, phi, policy=DEFAULT_POLICY):
    """Data-processing gap and the residual of its recovery-strengthened form.

    ``modified_residual = dpi_gap - ||rho - R(Phi(rho))||_1^2 / (2 ln 2)``
    where R is the Petz transpose channel of ``phi`` at ``sigma``.  A
    negative residual is data, not an error.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    sigma = np.asarray(sigma, dtype=np.complex128)
    if rho.shape != sigma.shape or rho.shape[0] != phi.input_dim:
        raise ShapeError(f"rho {rho.shape}, sigma {sigma.shape} and channel input {phi.input_dim} disagree")
    recovered = petz_map(phi, sigma, phi(rho), policy)
    rec = trace_norm(rho - recovered)
    before = relative_entropy(rho, sigma, policy)
    if math.isinf(before):
        return MonotonicityRecord(math.inf, math.inf, rec, support_escape=True)
    out_rho, out_sigma = phi(rho), phi(sigma)
    after = relative_entropy(0.5 * (out_rho + out_rho.conj().T), 0.5 * (out_sigma + out_sigma.conj().T),
                             policy, validate=False)
    if math.isinf(after):
        return MonotonicityRecord(math.nan, math.nan, rec, support_escape=True)
    gap = before - after
    return MonotonicityRecord(gap, gap - INV_2LN2 * rec**2, rec)


@dataclass
class Candidate:
    """A record that fell below ``-VIOLATION_TOL``, with its tighter re-evaluation."""

    record: DeficitRecord
    recheck: DeficitRecord
    state: TripartiteState

    @property
    def confirmed(self):
        return min(self.recheck.deficit_conj, self.recheck.deficit_comm) < -VIOLATION_TOL


def is_violation(record):
    return min(record.deficit_conj, record.deficit_comm) < -VIOLATION_TOL


def reexamine(s, record, eta_comm=1e-6, eta_state=1e-6):
    fresh = TripartiteState(np.array(s.rho), s.dims)
    recheck = evaluate_deficits(fresh, record.state_id, record.provenance, RECHECK_POLICY,
                                eta_comm, eta_state)
    return Candidate(record, recheck, fresh)


# scan -----------------------------------------------------------------------

def _scan_one(args):
    cfg, index, policy, eta_comm, eta_state = args
    s = sample_state(cfg, index)
    prov = {"measure": cfg.measure, "seed": cfg.seed, "index": index}
    rec = evaluate_deficits(s, index, prov, policy, eta_comm, eta_state)
    cand = reexamine(s, rec, eta_comm, eta_state) if is_violation(rec) else None
    return rec, cand


def worker_count(default=1):
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    return max(1, int(raw))


def run_scan(cfg, policy=DEFAULT_POLICY, eta_comm=1e-6, eta_state=1e-6, workers=None):
    """Evaluate ``cfg.count`` samples; results come back in index order."""
    workers = worker_count() if workers is None else workers
    jobs = [(cfg, i, policy, eta_comm, eta_state) for i in range(cfg.count)]
    if workers <= 1:
        results = [_scan_one(j) for j in jobs]
    else:
        chunk = max(1, cfg.count // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_one, jobs, chunksize=chunk))
    records = [r for r, _ in results]
    candidates = [c for _, c in results if c is not None]
    return records, candidates


def summarize(records, candidates):
    hist = {c.value: 0 for c in StateClass}
    for r in records:
        hist[r.class_label.value] += 1
    return {
        "count": len(records),
        "min_deficit_conj": min(r.deficit_conj for r in records),
        "min_deficit_comm": min(r.deficit_comm for r in records),
        "max_cmi": max(r.cmi for r in records),
        "class_histogram": hist,
        "violation_candidates": len(candidates),
        "confirmed_violations": sum(c.confirmed for c in candidates),
    }


# search ---------------------------------------------------------------------

@dataclass
class SearchResult:
    best: DeficitRecord
    best_state: TripartiteState
    trail: list
    evaluations: int
    candidates: list


def _state_from_factor(factor, dims):
    rho = factor @ factor.conj().T
    tr = np.trace(rho).real
    if not tr > 0:
        return None
    rho = rho / tr
    return TripartiteState(0.5 * (rho + rho.conj().T), dims, validate=False)


def search_min_deficit(dims, budget, seed, restarts, step_init=0.1, stall_limit=20,
                       step_floor=1e-7, policy=DEFAULT_POLICY, eta_comm=1e-6, eta_state=1e-6):
    """Coordinate-perturbation descent on ``deficit_conj`` over rho = LL^+/Tr(LL^+).

    Each restart starts from the Cholesky factor of an hs_induced sample
    (the one ``sample_state`` gives at index ``restart``) and spends its
    share of ``budget`` evaluations perturbing one entry at a time by a
    complex Gaussian of scale ``step``; improvements are kept, ``step``
    halves after ``stall_limit`` consecutive rejections, and the restart
    ends when ``step < step_floor`` or its share is spent.
    """
    if not budget >= restarts >= 1:
        raise ValueError(f"need budget >= restarts >= 1, got budget={budget}, restarts={restarts}")
    dims = tuple(int(d) for d in dims)
    d = int(np.prod(dims))
    rows, cols = np.tril_indices(d)
    shares = [budget // restarts + (1 if r < budget % restarts else 0) for r in range(restarts)]

    best = best_state = None
    trail, candidates = [], []
    evaluations = 0

    def evaluate(factor, restart, step_no):
        nonlocal evaluations
        evaluations += 1
        s = _state_from_factor(factor, dims)
        if s is None:
            return None, None
        prov = {"seed": seed, "restart": restart, "evaluation": step_no}
        rec = evaluate_deficits(s, evaluations - 1, prov, policy, eta_comm, eta_state)
        if is_violation(rec):
            candidates.append(reexamine(s, rec, eta_comm, eta_state))
        return rec, s

    for restart, share in enumerate(shares):
        rng = stream(seed, restart)
        # same draw as the hs_induced sampler at index ``restart``, so restarts == budget is a scan
        factor = np.linalg.cholesky(random_density(rng, d, d))
        cur, cur_state = evaluate(factor, restart, 0)
        if best is None or cur.deficit_conj < best.deficit_conj:
            best, best_state = cur, cur_state
            trail.append({"restart": restart, "evaluation": 0, "deficit_conj": cur.deficit_conj, "step": step_init})
        step, stalls, used = step_init, 0, 1
        while used < share and step >= step_floor:
            k = int(rng.integers(rows.size))
            kick = step * (rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2.0)
            trial = factor.copy()
            trial[rows[k], cols[k]] += kick
            rec, s = evaluate(trial, restart, used)
            used += 1
            if rec is not None and rec.deficit_conj < cur.deficit_conj:
                factor, cur, stalls = trial, rec, 0
                if rec.deficit_conj < best.deficit_conj:
                    best, best_state = rec, s
                    trail.append({"restart": restart, "evaluation": used - 1,
                                  "deficit_conj": rec.deficit_conj, "step": step})
            else:
                stalls += 1
                if stalls >= stall_limit:
                    step *= 0.5
                    stalls = 0
    return SearchResult(best, best_state, trail, evaluations, candidates)
