"""Run configuration shared by every CLI command.

Values are resolved as: built-in defaults, then a JSON config file, then
the ``KECD_OUTPUT_DIR`` environment variable (output directory only), then
command-line flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields

from .centrality import KatzParams
from .cluster import ClusterParams
from .errors import DomainError
from .netgen import AdHocSpec

ENV_OUTPUT_DIR = "KECD_OUTPUT_DIR"

# accepted in config files as another name for the window w
_ALIASES = {"d": "w"}


@dataclass
class RunConfig:
    input: list[str] = field(default_factory=list)
    output_dir: str = "kecd-out"
    # Katz
    alpha: float | None = None
    alpha_fraction: float = 0.5
    beta: float = 1.0
    # solvers
    tol: float = 1e-10
    max_iter: int = 10_000
    # line sweep
    w: float = 0.01
    phi_step: float = 0.5
    smooth_window: int = 5
    prominence: float = 0.05
    seed: int = 0
    weighted: bool = True
    per_component: bool = True
    # generate
    model: str = "BA"
    n1: int = 250
    n2: int = 250
    param1: float = 2
    param2: float = 8
    mu: int = 100
    # sweep
    grid_params: list[list[float]] = field(default_factory=lambda: [[2.0, 8.0]])
    grid_mu: list[int] = field(default_factory=lambda: [50, 100, 200, 400, 800])
    seeds: int = 10
    workers: int = 1
    spearman: bool = False
    # bench
    table: bool = False

    def katz(self) -> KatzParams:
        return KatzParams(self.alpha, self.beta, self.alpha_fraction)

    def cluster(self) -> ClusterParams:
        return ClusterParams(self.w, self.phi_step, self.smooth_window, self.prominence)

    def adhoc(self) -> AdHocSpec:
        return AdHocSpec(self.model, self.n1, self.n2, self.param1, self.param2, self.mu, self.seed)

    def validate(self) -> "RunConfig":
        """Raise :class:`DomainError` if any value is outside its module's range."""
        self.katz()
        self.cluster()
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")
        if self.seeds < 2:
            raise DomainError(f"seeds must be >= 2, got {self.seeds}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        if self.model not in ("ER", "BA"):
            raise DomainError(f"model must be 'ER' or 'BA', got {self.model!r}")
        for pair in self.grid_params:
            if len(pair) != 2:
                raise DomainError(f"grid_params entries must be [param1, param2], got {pair}")
        return self

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(name, value):
    default = getattr(RunConfig(), name)
    if value is None:
        if name == "alpha":
            return None
        raise DomainError(f"{name} may not be null")
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise DomainError(f"{name} must be true or false")
        return value
    if isinstance(default, int) and name not in ("param1", "param2"):
        if isinstance(value, bool) or int(value) != value:
            raise DomainError(f"{name} must be an integer, got {value!r}")
        return int(value)
    if isinstance(default, float) or name in ("alpha", "param1", "param2"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DomainError(f"{name} must be a number, got {value!r}")
        return value
    if name == "input":
        return [str(v) for v in ([value] if isinstance(value, str) else value)]
    if name == "grid_params":
        return [[float(a) for a in pair] for pair in value]
    if name == "grid_mu":
        return [int(v) for v in value]
    return value


def apply(cfg: RunConfig, values: dict) -> RunConfig:
    """Overlay ``values`` onto ``cfg``; unknown keys are rejected."""
    for key, value in values.items():
        name = _ALIASES.get(key, key)
        if name not in _FIELDS:
            raise DomainError(f"unknown config key {key!r}")
        setattr(cfg, name, _coerce(name, value))
    return cfg


def load(path=None, overrides: dict | None = None, environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise DomainError("config file must hold a JSON object")
        apply(cfg, data)
    if environ.get(ENV_OUTPUT_DIR):
        cfg.output_dir = environ[ENV_OUTPUT_DIR]
    if overrides:
        apply(cfg, overrides)
    return cfg.validate()
