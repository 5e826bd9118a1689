"""Run configuration: flat key=value files plus command-line overrides.

The key set is closed; unknown keys are rejected so a stale or misspelled
config never silently changes a run.  Every run writes its fully resolved
configuration next to the outputs, and loading that file reproduces the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .integrals import INTEGRAL_NAMES

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_value", "config_lines"]


class ConfigError(ValueError):
    """Invalid configuration (bad key, bad type, out-of-range value)."""


@dataclass
class RunConfig:
    lam: float = 0.1
    max_shell: int = 30
    p_sizes: tuple[int, ...] = (1, 10, 15, 20)
    epsilon: float = 1e-3
    integrals: tuple[str, ...] = ("N", "l")
    bins: int = 20
    seed: int = 1
    output_dir: str = "out"

    def validate(self) -> "RunConfig":
        if not math.isfinite(self.lam):
            raise ConfigError(f"lambda must be finite, got {self.lam}")
        if self.max_shell < 0:
            raise ConfigError(f"max_shell must be >= 0, got {self.max_shell}")
        if not self.p_sizes:
            raise ConfigError("p_sizes must not be empty")
        for k in self.p_sizes:
            if k < 0:
                raise ConfigError(f"p_sizes entry {k} must be >= 0")
        # p_sizes <= max_shell is enforced where the model spaces are built,
        # so commands that never touch them accept any basis size
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not self.integrals:
            raise ConfigError("integrals must not be empty")
        for name in self.integrals:
            if name not in INTEGRAL_NAMES:
                raise ConfigError(f"unknown integral {name!r}, expected one of {INTEGRAL_NAMES}")
        if self.bins < 1:
            raise ConfigError(f"bins must be >= 1, got {self.bins}")
        if not self.output_dir:
            raise ConfigError("output_dir must not be empty")
        return self


#: config-file key -> RunConfig field
KEY_TO_FIELD = {
    "lambda": "lam",
    "max_shell": "max_shell",
    "p_sizes": "p_sizes",
    "epsilon": "epsilon",
    "integrals": "integrals",
    "bins": "bins",
    "seed": "seed",
    "output_dir": "output_dir",
}


def parse_value(key: str, raw: str):
    """Parse the text value of one config key."""
    raw = raw.strip()
    try:
        if key == "lambda":
            return float(raw)
        if key in ("max_shell", "bins", "seed"):
            return int(raw)
        if key == "epsilon":
            return float(raw)
        if key == "p_sizes":
            return tuple(int(tok) for tok in raw.split(",") if tok.strip() != "")
        if key == "integrals":
            return tuple(tok.strip() for tok in raw.split(",") if tok.strip() != "")
        if key == "output_dir":
            return raw
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key}={raw!r}: {exc}") from None
    raise ConfigError(f"unknown config key {key!r}")


def load_config(path: str, overrides: dict | None = None) -> RunConfig:
    """Load a key=value file (may be absent) and apply override values."""
    values: dict[str, object] = {}
    if path is not None:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                if "=" not in stripped:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
                key, raw = stripped.split("=", 1)
                key = key.strip()
                if key not in KEY_TO_FIELD:
                    raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
                values[KEY_TO_FIELD[key]] = parse_value(key, raw)
    if overrides:
        values.update(overrides)
    return RunConfig(**values).validate()


def config_lines(cfg: RunConfig) -> list[str]:
    """Fully resolved config in canonical key order."""
    return [
        f"lambda={cfg.lam:.17g}",
        f"max_shell={cfg.max_shell}",
        "p_sizes=" + ",".join(str(k) for k in cfg.p_sizes),
        f"epsilon={cfg.epsilon:.17g}",
        "integrals=" + ",".join(cfg.integrals),
        f"bins={cfg.bins}",
        f"seed={cfg.seed}",
        f"output_dir={cfg.output_dir}",
    ]
