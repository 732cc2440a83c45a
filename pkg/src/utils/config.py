import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

try:
    from .errors import ConfigError
    from .logger import logger
except ImportError:
    from utils.errors import ConfigError
    from utils.logger import logger

load_dotenv()

COMMANDS = ("graph-info", "integrate", "anomaly", "verify", "kernel-eval")
FORMATS = ("json", "csv", "plot-data")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}")
        return default


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings shared by every Schwinger-space integral.

    mc_samples == 0 selects tensor Gauss-Legendre on the sphere patches;
    a positive count selects seeded Monte Carlo there.
    """

    nodes_per_axis: int = 12
    mc_samples: int = 0
    seed: int = 0
    richardson_levels: int = 5

    def __post_init__(self):
        if self.nodes_per_axis < 2:
            raise ConfigError(f"nodes_per_axis must be >= 2, got {self.nodes_per_axis}")
        if self.mc_samples < 0:
            raise ConfigError(f"mc_samples must be >= 0, got {self.mc_samples}")
        if self.richardson_levels < 2:
            raise ConfigError(f"richardson_levels must be >= 2, got {self.richardson_levels}")

    @classmethod
    def from_env(cls) -> "QuadratureSpec":
        return cls(
            nodes_per_axis=_env_int("FEYNLAB_DEFAULT_NODES", 12),
            seed=_env_int("FEYNLAB_DEFAULT_SEED", 0),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QuadratureSpec":
        allowed = {f.name for f in fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"Unknown quadrature keys: {sorted(unknown)}")
        return cls(**{k: int(v) for k, v in data.items()})

    def to_dict(self) -> Dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def halved(self) -> "QuadratureSpec":
        """Coarser companion rule used for error estimates"""
        return replace(self, nodes_per_axis=max(2, self.nodes_per_axis // 2),
                       mc_samples=self.mc_samples // 2)


@dataclass(frozen=True)
class RunConfig:
    command: str
    graph_path: Optional[str] = None
    d: Optional[int] = None
    d_prime: Optional[int] = None
    L: float = 1.0
    eps_grid: int = 6
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec.from_env)
    jobs: int = 1
    out_path: Optional[str] = None
    format: str = "json"
    suite: str = "all"
    point: Optional[str] = None
    wall_time: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}', expected one of {COMMANDS}")
        if self.format not in FORMATS:
            raise ConfigError(f"Unknown format '{self.format}', expected one of {FORMATS}")
        if self.L <= 0:
            raise ConfigError(f"L must be positive, got {self.L}")
        if self.eps_grid < 1:
            raise ConfigError(f"eps grid needs k_max >= 1, got {self.eps_grid}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        for name in ("d", "d_prime"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"{name} must be non-negative, got {value}")

    @classmethod
    def from_sources(cls, command: str, config_path: Optional[str] = None,
                     overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """Merge a JSON config file with command-line overrides; flags win."""
        data: Dict[str, Any] = {}
        if config_path:
            path = Path(config_path)
            try:
                data = json.loads(path.read_text())
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"Cannot read config {config_path}: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"Config {config_path} must hold a JSON object")

        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key == "quadrature":
                merged = dict(data.get("quadrature", {}))
                merged.update({k: v for k, v in value.items() if v is not None})
                data["quadrature"] = merged
            else:
                data[key] = value

        allowed = {f.name for f in fields(cls)} - {"command"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")

        quadrature = data.pop("quadrature", None)
        if isinstance(quadrature, dict):
            base = QuadratureSpec.from_env().to_dict()
            base.update(quadrature)
            data["quadrature"] = QuadratureSpec.from_dict(base)
        if "jobs" not in data:
            data["jobs"] = _env_int("FEYNLAB_JOBS", 1)

        config = cls(command=command, **data)
        logger.debug(f"RunConfig resolved: {config}")
        return config


def results_dir() -> Path:
    path = Path(os.getenv("FEYNLAB_RESULTS_DIR", "data/results"))
    path.mkdir(parents=True, exist_ok=True)
    return path
