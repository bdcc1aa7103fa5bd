"""Scenario configuration: defaults, file parsing, and validation.

Config files are flat ``key = value`` text; blank lines and lines starting
with ``#`` are ignored. Every key has a default, and command-line flags
override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError
from .linalg import ToleranceSet
from .systems import SYSTEM_GENERATORS

FROM_FILE = "from-file"

_VALID_SYSTEMS = tuple(SYSTEM_GENERATORS) + (FROM_FILE,)
_VALID_INIT = ("zero", "random")

#: Documented defaults for every config key.
DEFAULTS = {
    "system": "stable-zeros",
    "N": 10,
    "L": "auto",
    "data_length": 520,
    "seed": 12345,
    "horizon": 300,
    "init_guess": "zero",
    "init_scale": 1.0,
    "y_trunc": 1e-4,
    "ls_trunc": 1e-3,
    "rank_tol": 1e-8,
    "system_path": "",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one experiment bit for bit."""

    system: str = DEFAULTS["system"]
    N: int = DEFAULTS["N"]
    L: int | None = None  # None means "auto": resolve via the inherent delay
    data_length: int = DEFAULTS["data_length"]
    seed: int = DEFAULTS["seed"]
    horizon: int = DEFAULTS["horizon"]
    init_guess: str = DEFAULTS["init_guess"]
    init_scale: float = DEFAULTS["init_scale"]
    tolerances: ToleranceSet = ToleranceSet()
    system_path: str = ""

    def __post_init__(self):
        if self.system not in _VALID_SYSTEMS:
            raise ConfigError(
                f"unknown system {self.system!r}; choose from {_VALID_SYSTEMS}"
            )
        if self.system == FROM_FILE and not self.system_path:
            raise ConfigError("system = from-file requires system_path")
        if self.N < 1:
            raise ConfigError(f"N must be positive, got {self.N}")
        if self.L is not None and self.L < 0:
            raise ConfigError(f"L must be nonnegative or 'auto', got {self.L}")
        if self.data_length < 1:
            raise ConfigError(f"data_length must be positive, got {self.data_length}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be positive, got {self.horizon}")
        if self.init_guess not in _VALID_INIT:
            raise ConfigError(
                f"init_guess must be one of {_VALID_INIT}, got {self.init_guess!r}"
            )
        if not self.init_scale >= 0.0:
            raise ConfigError(f"init_scale must be nonnegative, got {self.init_scale}")

    def to_mapping(self) -> dict[str, str]:
        """Canonical key/value echo of this config, e.g. for reports."""
        return {
            "system": self.system,
            "N": str(self.N),
            "L": "auto" if self.L is None else str(self.L),
            "data_length": str(self.data_length),
            "seed": str(self.seed),
            "horizon": str(self.horizon),
            "init_guess": self.init_guess,
            "init_scale": repr(self.init_scale),
            "y_trunc": repr(self.tolerances.y_trunc),
            "ls_trunc": repr(self.tolerances.ls_trunc),
            "rank_tol": repr(self.tolerances.rank_tol),
            "system_path": self.system_path,
        }


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a real number, got {raw!r}") from None


def config_from_mapping(mapping: dict[str, str]) -> ScenarioConfig:
    """Build a validated ScenarioConfig from raw string key/values."""
    unknown = set(mapping) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = {key: str(value) for key, value in DEFAULTS.items()}
    merged.update({key: str(value) for key, value in mapping.items()})
    L_raw = merged["L"]
    L = None if L_raw == "auto" else _parse_int("L", L_raw)
    return ScenarioConfig(
        system=merged["system"],
        N=_parse_int("N", merged["N"]),
        L=L,
        data_length=_parse_int("data_length", merged["data_length"]),
        seed=_parse_int("seed", merged["seed"]),
        horizon=_parse_int("horizon", merged["horizon"]),
        init_guess=merged["init_guess"],
        init_scale=_parse_float("init_scale", merged["init_scale"]),
        tolerances=ToleranceSet(
            rank_tol=_parse_float("rank_tol", merged["rank_tol"]),
            y_trunc=_parse_float("y_trunc", merged["y_trunc"]),
            ls_trunc=_parse_float("ls_trunc", merged["ls_trunc"]),
        ),
        system_path=merged["system_path"],
    )


def parse_config_file(path) -> dict[str, str]:
    """Read a flat key = value file into a raw string mapping."""
    mapping: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(
                    f"{path}:{lineno}: expected 'key = value', got {stripped!r}"
                )
            key, _, value = stripped.partition("=")
            mapping[key.strip()] = value.strip()
    return mapping


def load_config(path, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    """Parse a config file and apply command-line overrides on top."""
    mapping = parse_config_file(path) if path is not None else {}
    if overrides:
        mapping.update(overrides)
    return config_from_mapping(mapping)


def with_seed(config: ScenarioConfig, seed: int) -> ScenarioConfig:
    return replace(config, seed=seed)
