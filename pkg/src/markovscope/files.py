"""JSON state files, Markov block-spec files and run configuration.

State file::

    {"format": "markovscope-state", "format_version": 1,
     "dims": [dA, dB, dC],
     "matrix": [[[re, im], ...], ...]}

Row ``(a*dB + b)*dC + c`` of ``matrix`` is basis vector |a>|b>|c>.  Floats
are written with ``repr`` so a write/read round trip is bit exact.
"""

import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .checkers import DEFAULT_T_GRID, MarkovBlock, MarkovBlockSpec
from .entropy import TripartiteState
from .errors import MarkovScopeError

FORMAT_VERSION = 1


class StateFileError(MarkovScopeError):
    """Malformed state/spec/config file; carries a position when one is known."""

    def __init__(self, message, path=None, line=None, column=None, where=None):
        loc = []
        if path:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line} column {column}")
        if where:
            loc.append(where)
        super().__init__(f"{': '.join(loc)}: {message}" if loc else message)
        self.line, self.column, self.where = line, column, where


class ConfigError(MarkovScopeError, ValueError):
    """Invalid configuration value."""


def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj, where="matrix"):
    if not isinstance(obj, list) or not obj:
        raise StateFileError("expected a nonempty list of rows", where=where)
    n = len(obj)
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise StateFileError(f"row must be a list of {n} entries", where=f"{where}[{i}]")
        for j, z in enumerate(row):
            ok = (isinstance(z, list) and len(z) == 2
                  and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z))
            if not ok:
                raise StateFileError("entry must be a [re, im] pair of numbers", where=f"{where}[{i}][{j}]")
            out[i, j] = complex(z[0], z[1])
    return out


def _load_json(text, path=None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(exc.msg, path, exc.lineno, exc.colno) from exc


def state_to_dict(s, **extra):
    d = {"format": "markovscope-state", "format_version": FORMAT_VERSION,
         "dims": list(s.dims), "matrix": matrix_to_json(s.rho)}
    d.update(extra)
    return d


def parse_state(text, path=None):
    """Parse state-file text; raises StateFileError or StateValidationError."""
    obj = _load_json(text, path)
    if not isinstance(obj, dict):
        raise StateFileError("top level must be an object", path)
    dims = obj.get("dims")
    if (not isinstance(dims, list) or len(dims) != 3
            or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)):
        raise StateFileError("dims must be a list of three positive integers", path, where="dims")
    if "matrix" not in obj:
        raise StateFileError("missing key", path, where="matrix")
    try:
        rho = matrix_from_json(obj["matrix"])
    except StateFileError as exc:
        raise StateFileError(str(exc), path) from exc
    return TripartiteState(rho, tuple(dims))


def read_state(path):
    with open(path, encoding="utf-8") as fh:
        return parse_state(fh.read(), path)


def write_state(path, s, **extra):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(s, **extra), fh)
        fh.write("\n")


def spec_to_dict(spec):
    return {
        "format": "markovscope-markov-spec", "format_version": FORMAT_VERSION,
        "dims_ac": [spec.dim_a, spec.dim_c],
        "blocks": [{"p": b.p, "dim_bl": b.dim_bl, "dim_br": b.dim_br,
                    "rho_left": matrix_to_json(b.rho_left),
                    "rho_right": matrix_to_json(b.rho_right)} for b in spec.blocks],
    }


def parse_spec(text, path=None):
    obj = _load_json(text, path)
    try:
        da, dc = obj["dims_ac"]
        blocks = []
        for k, b in enumerate(obj["blocks"]):
            blocks.append(MarkovBlock(
                p=float(b["p"]),
                rho_left=matrix_from_json(b["rho_left"], f"blocks[{k}].rho_left"),
                rho_right=matrix_from_json(b["rho_right"], f"blocks[{k}].rho_right"),
                dim_bl=int(b["dim_bl"]),
                dim_br=int(b["dim_br"]),
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFileError(f"malformed block spec ({exc!r})", path) from exc
    return MarkovBlockSpec(tuple(blocks), int(da), int(dc))


def read_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), path)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


@dataclass
class RunConfig:
    # tolerances
    tol_support: float = 2.0**-40
    tol_check: float = 1e-7
    eta_comm: float = 1e-6
    eta_state: float = 1e-6
    t_grid: list = field(default_factory=lambda: list(DEFAULT_T_GRID))
    # sampling
    dims: list = field(default_factory=lambda: [2, 2, 2])
    measure: str = "hs_induced"
    count: int = 1000
    seed: int = 0
    env_dim: int = None
    noise_scale: float = 1e-3
    blocks: int = 2
    # search
    budget: int = 10_000
    restarts: int = 10
    step_init: float = 0.1
    stall_limit: int = 20
    step_floor: float = 1e-7
    # output
    out: str = None
    format: str = "json"

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("tol_support", "tol_check", "eta_comm", "eta_state", "step_init", "step_floor"):
            v = getattr(self, name)
            if not (_is_real(v) and v > 0):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        if not self.tol_support < 1:
            raise ConfigError("tol_support must be below 1")
        if not self.t_grid:
            raise ConfigError("t_grid must not be empty")
        if not isinstance(self.t_grid, (list, tuple)) or not all(_is_real(t) for t in self.t_grid):
            raise ConfigError(f"t_grid must be a list of numbers, got {self.t_grid!r}")
        if (not isinstance(self.dims, (list, tuple)) or len(self.dims) != 3
                or not all(_is_int(d) and d >= 1 for d in self.dims)):
            raise ConfigError(f"dims must be three positive integers, got {self.dims!r}")
        for name in ("count", "budget", "restarts", "stall_limit", "blocks"):
            v = getattr(self, name)
            if not _is_int(v) or v < 1:
                raise ConfigError(f"{name} must be an integer of at least 1, got {v!r}")
        if not _is_int(self.seed) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.env_dim is not None and (not _is_int(self.env_dim) or self.env_dim < 1):
            raise ConfigError(f"env_dim must be a positive integer, got {self.env_dim!r}")
        if not _is_real(self.noise_scale) or self.noise_scale < 0:
            raise ConfigError(f"noise_scale must be nonnegative, got {self.noise_scale!r}")
        if self.restarts > self.budget:
            raise ConfigError("restarts must not exceed budget")
        if self.format not in ("json", "csv", "jsonl"):
            raise ConfigError(f"format must be json, csv or jsonl, got {self.format!r}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def updated(self, **overrides):
        d = self.to_dict()
        d.update({k: v for k, v in overrides.items() if v is not None})
        return type(self).from_dict(d)


def read_config(path):
    with open(path, encoding="utf-8") as fh:
        obj = _load_json(fh.read(), path)
    if not isinstance(obj, dict):
        raise StateFileError("config must be a JSON object", path)
    return RunConfig.from_dict(obj)
