"""``markovscope`` command line.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 I/O error.
"""

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .checkers import build_markov_state, check_petz_t, check_ruskai, classify, ruskai_support_degraded
from .entropy import TripartiteState, conditional_mutual_information
from .errors import MarkovScopeError
from .files import (
    ConfigError,
    RunConfig,
    StateFileError,
    read_config,
    read_spec,
    read_state,
    write_state,
)
from .lab import pinsker_identity_check, run_scan, search_min_deficit, summarize
from .markov import build_m_bundle, saturation_residuals
from .reports import analyze_state, csv_text, dumps, policy_for, search_summary, write_scan, write_search
from .sampling import SampleConfig, random_classical, random_density, random_markov_spec, stream

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_IO = 0, 2, 3, 4

CHECKS = ("cmi", "saturation", "ruskai", "petz-t", "commutator", "pinsker", "classify")


def _dims(text):
    try:
        dims = [int(x) for x in text.replace("x", ",").split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 2,2,2 (got {text!r})")
    if len(dims) != 3:
        raise argparse.ArgumentTypeError("dims needs exactly three entries")
    return dims


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common(p):
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    g.add_argument("--dims", type=_dims, help="subsystem dimensions dA,dB,dC")
    g.add_argument("--seed", type=int)
    g.add_argument("--count", type=int)
    g.add_argument("--measure", choices=("hs_induced", "classical_dirichlet", "markov_perturbed"))
    g.add_argument("--env-dim", type=int, dest="env_dim")
    g.add_argument("--noise-scale", type=float, dest="noise_scale")
    g.add_argument("--t-grid", type=_floats, dest="t_grid")
    g.add_argument("--tol-support", type=float, dest="tol_support")
    g.add_argument("--tol-check", type=float, dest="tol_check")
    g.add_argument("--eta-comm", type=float, dest="eta_comm")
    g.add_argument("--eta-state", type=float, dest="eta_state")
    g.add_argument("--out")
    g.add_argument("--format", choices=("json", "csv", "jsonl"))


def build_parser():
    parser = argparse.ArgumentParser(prog="markovscope", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full report for one state file")
    p.add_argument("state")
    _common(p)

    p = sub.add_parser("check", help="run a single checker on a state file")
    p.add_argument("name", choices=CHECKS)
    p.add_argument("state")
    _common(p)

    p = sub.add_parser("generate", help="write a state file")
    p.add_argument("kind", choices=("markov", "classical", "random"))
    p.add_argument("--blocks", type=int, help="number of B blocks for kind=markov")
    p.add_argument("--spec", help="Markov block-spec JSON file (kind=markov)")
    _common(p)

    p = sub.add_parser("scan", help="evaluate conjecture deficits over a sampled ensemble")
    _common(p)

    p = sub.add_parser("search", help="descent search for conjecture violations")
    p.add_argument("--budget", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--step-init", type=float, dest="step_init")
    p.add_argument("--stall-limit", type=int, dest="stall_limit")
    p.add_argument("--step-floor", type=float, dest="step_floor")
    _common(p)
    return parser


CONFIG_FLAGS = ("dims", "seed", "count", "measure", "env_dim", "noise_scale", "t_grid",
                "tol_support", "tol_check", "eta_comm", "eta_state", "out", "format",
                "blocks", "budget", "restarts", "step_init", "stall_limit", "step_floor")


def resolve_config(args):
    cfg = read_config(args.config) if args.config else RunConfig()
    return cfg.updated(**{k: getattr(args, k, None) for k in CONFIG_FLAGS})


def _emit(obj, cfg, stdout):
    if cfg.format == "csv":
        stdout.write(csv_text([obj], columns=tuple(k for k, v in obj.items() if not isinstance(v, (dict, list)))))
    else:
        stdout.write(dumps(obj) + "\n")


def cmd_analyze(args, cfg, stdout):
    s = read_state(args.state)
    report = analyze_state(s, cfg)
    _emit(report, cfg, stdout)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(report) + "\n")
    return EXIT_OK


def cmd_check(args, cfg, stdout):
    s = read_state(args.state)
    policy = policy_for(cfg)
    name = args.name
    if name == "cmi":
        out = {"cmi": conditional_mutual_information(s, policy)}
    elif name == "ruskai":
        out = {"residual": check_ruskai(s, policy), "degraded_support": ruskai_support_degraded(s, policy)}
    elif name == "petz-t":
        out = {"residual": check_petz_t(s, cfg.t_grid, policy), "t_grid": list(cfg.t_grid)}
    else:
        bundle = build_m_bundle(s, policy)
        if name == "saturation":
            r = saturation_residuals(s, bundle, policy)
            out = {"cmi": r.cmi, "dist_mm": r.dist_mm, "dist_mdm": r.dist_mdm}
        elif name == "commutator":
            out = {"comm_norm": bundle.commutator_trace_norm}
        elif name == "classify":
            c = classify(s, bundle, cfg.eta_comm, cfg.eta_state)
            out = {"class_label": c.label.value, "comm_norm": c.comm_norm, "dist_mm": c.dist_mm,
                   "eta_comm": c.eta_comm, "eta_state": c.eta_state}
        else:
            p = pinsker_identity_check(s, policy)
            out = {"commuting": p.commuting, "identity_residual": p.identity_residual,
                   "relative_entropy": p.relative_entropy, "support_escape": p.support_escape}
    out = {"check": name, **out, "config": cfg.to_dict()}
    _emit(out, cfg, stdout)
    return EXIT_OK


def generate_state(kind, cfg, spec_path=None):
    dims = tuple(int(d) for d in cfg.dims)
    rng = stream(cfg.seed, 0)
    dim = int(np.prod(dims))
    if kind == "markov":
        spec = read_spec(spec_path) if spec_path else random_markov_spec(
            rng, dims[0], dims[2], dim_b=dims[1], n_blocks=cfg.blocks)
        return build_markov_state(spec)
    if kind == "classical":
        return TripartiteState(random_classical(rng, dim), dims)
    return TripartiteState(random_density(rng, dim, cfg.env_dim or dim), dims)


def cmd_generate(args, cfg, stdout):
    if not cfg.out:
        raise ConfigError("generate needs --out")
    s = generate_state(args.kind, cfg, args.spec)
    write_state(cfg.out, s)
    stdout.write(dumps({"written": cfg.out, "kind": args.kind, "dims": list(s.dims)}) + "\n")
    return EXIT_OK


def sample_config(cfg):
    return SampleConfig(dims=tuple(cfg.dims), measure=cfg.measure, count=cfg.count, seed=cfg.seed,
                        env_dim=cfg.env_dim, noise_scale=cfg.noise_scale)


def cmd_scan(args, cfg, stdout):
    records, candidates = run_scan(sample_config(cfg), policy_for(cfg), cfg.eta_comm, cfg.eta_state)
    if cfg.out:
        summary = write_scan(cfg.out, cfg, records, candidates)
    else:
        summary = summarize(records, candidates)
    stdout.write(dumps({"report": "scan_summary", **summary}) + "\n")
    return EXIT_OK


def cmd_search(args, cfg, stdout):
    result = search_min_deficit(cfg.dims, cfg.budget, cfg.seed, cfg.restarts, cfg.step_init,
                                cfg.stall_limit, cfg.step_floor, policy_for(cfg),
                                cfg.eta_comm, cfg.eta_state)
    summary = write_search(cfg.out, cfg, result) if cfg.out else search_summary(result)
    stdout.write(dumps({"report": "search_summary", **summary}) + "\n")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "check": cmd_check, "generate": cmd_generate,
            "scan": cmd_scan, "search": cmd_search}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg, stdout)
    except StateFileError as exc:
        stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except OSError as exc:
        stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO
    except (ConfigError, MarkovScopeError) as exc:
        invariant = getattr(exc, "invariant", None)
        prefix = f"invalid ({invariant})" if invariant else "invalid"
        stderr.write(f"{prefix}: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
