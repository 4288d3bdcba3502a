"""Report assembly and emission (JSON, JSONL, CSV)."""

import csv
import datetime as _dt
import io
import json
import os

from .checkers import check_petz_t, check_ruskai, classify, ruskai_support_degraded
from .entropy import clamp_cmi, von_neumann_entropy
from .files import FORMAT_VERSION, state_to_dict
from .kernels import BACKEND
from .lab import INV_2LN2, INV_8LN2, pinsker_identity_check, summarize
from .linalg import SupportPolicy, trace_norm
from .markov import build_m_bundle, saturation_residuals

CSV_COLUMNS = ("state_id", "cmi", "dist_mm", "dist_mdm", "comm_norm",
               "deficit_conj", "deficit_comm", "class_label")


def policy_for(cfg):
    return SupportPolicy(cfg.tol_support)


def analyze_state(s, cfg):
    """Every derived scalar for one state, plus the thresholds that produced the verdicts."""
    policy = policy_for(cfg)
    bundle = build_m_bundle(s, policy)
    res = saturation_residuals(s, bundle, policy)
    label = classify(s, bundle, cfg.eta_comm, cfg.eta_state)
    ruskai = check_ruskai(s, policy)
    petz = check_petz_t(s, cfg.t_grid, policy)
    pinsker = pinsker_identity_check(s, policy)
    cmi = clamp_cmi(res.cmi)
    comm = bundle.commutator_trace_norm
    ent = {name: von_neumann_entropy(m, policy, validate=False)
           for name, m in (("ABC", s.rho), ("AB", s.rho_ab), ("BC", s.rho_bc), ("B", s.rho_b))}
    residuals = {"cmi": res.cmi, "dist_mm": res.dist_mm, "dist_mdm": res.dist_mdm,
                 "ruskai": ruskai, "petz_t": petz}
    return {
        "format_version": FORMAT_VERSION,
        "report": "analysis",
        "dims": list(s.dims),
        "entropies": ent,
        "cmi": cmi,
        "cmi_raw": res.cmi,
        "dist_mm": res.dist_mm,
        "dist_mdm": res.dist_mdm,
        "dist_mm_mdm": trace_norm(bundle.mm_dagger - bundle.m_dagger_m, hermitian=True),
        "comm_norm": comm,
        "ruskai": {"residual": ruskai, "degraded_support": ruskai_support_degraded(s, policy)},
        "petz_t": {"residual": petz, "t_grid": list(cfg.t_grid)},
        "class_label": label.label.value,
        "pinsker": {"commuting": pinsker.commuting, "identity_residual": pinsker.identity_residual,
                    "relative_entropy": pinsker.relative_entropy,
                    "support_escape": pinsker.support_escape},
        "deficit_conj": cmi - INV_2LN2 * max(res.dist_mm**2, res.dist_mdm**2),
        "deficit_comm": cmi - INV_8LN2 * comm**2,
        "saturated": {k: abs(v) < cfg.tol_check for k, v in residuals.items()},
        "thresholds": {"tol_support": cfg.tol_support, "tol_check": cfg.tol_check,
                       "eta_comm": cfg.eta_comm, "eta_state": cfg.eta_state},
        "config": cfg.to_dict(),
    }


def csv_text(rows, columns=CSV_COLUMNS):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r[c] for c in columns])
    return buf.getvalue()


def dumps(obj):
    return json.dumps(obj, sort_keys=True)


def header(cfg, report):
    """Self-describing first line; the only place a timestamp appears."""
    return {"format_version": FORMAT_VERSION, "report": report, "config": cfg.to_dict(),
            "kernels": BACKEND,
            "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}


def write_candidates(outdir, candidates):
    paths = []
    if not candidates:
        return paths
    cdir = os.path.join(outdir, "candidates")
    os.makedirs(cdir, exist_ok=True)
    for k, c in enumerate(candidates):
        path = os.path.join(cdir, f"candidate_{k:04d}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(state_to_dict(c.state, record=c.record.to_dict(),
                                    recheck=c.recheck.to_dict(), confirmed=c.confirmed), fh)
            fh.write("\n")
        paths.append(path)
    return paths


def write_scan(outdir, cfg, records, candidates):
    """records.jsonl (header line, then one record per line), records.csv, candidates/."""
    os.makedirs(outdir, exist_ok=True)
    rows = [r.to_dict() for r in records]
    with open(os.path.join(outdir, "records.jsonl"), "w", encoding="utf-8") as fh:
        fh.write(dumps(header(cfg, "scan")) + "\n")
        for row in rows:
            fh.write(dumps(row) + "\n")
    with open(os.path.join(outdir, "records.csv"), "w", encoding="utf-8") as fh:
        fh.write(csv_text(rows))
    write_candidates(outdir, candidates)
    return summarize(records, candidates)


def write_search(outdir, cfg, result):
    os.makedirs(outdir, exist_ok=True)
    best = search_summary(result)
    with open(os.path.join(outdir, "best.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps({**header(cfg, "search"), **best,
                        "best_state": state_to_dict(result.best_state)}) + "\n")
    with open(os.path.join(outdir, "trail.jsonl"), "w", encoding="utf-8") as fh:
        for step in result.trail:
            fh.write(dumps(step) + "\n")
    write_candidates(outdir, result.candidates)
    return best


def search_summary(result):
    return {"best": result.best.to_dict(), "evaluations": result.evaluations,
            "improvements": len(result.trail),
            "violation_candidates": len(result.candidates),
            "confirmed_violations": sum(c.confirmed for c in result.candidates)}

