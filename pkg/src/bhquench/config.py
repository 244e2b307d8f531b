"""Flat key=value run configuration with documented defaults."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ValidationError


class ConfigError(ValidationError):
    """Malformed or invalid configuration text."""


@dataclass
class RunConfig:
    """Every knob of the CLI pipelines; defaults match the module contracts."""

    L: int = 6
    N: int = 4
    J: float = 1.0
    U: float = 1.42
    h: float = 10.0
    barrier: str = "vertical"
    tmax: float = 50.0
    dt: float = 0.05
    U_min: float = 0.0
    U_max: float = 5.0
    dU: float = 0.02
    sweep_dt: float = 0.25
    threshold: float = 0.5
    top_k: int = 5
    report_threshold: float = 0.05
    coherent_n: tuple[float, ...] | None = None
    weight_tol: float = 1e-6
    N_max: int | None = None
    out: str | None = None
    format: str | None = None

    def barrier_value(self):
        """'vertical', 'angled', or the parsed custom potential list."""
        if self.barrier in ("vertical", "angled"):
            return self.barrier
        try:
            return [float(x) for x in self.barrier.split(",")]
        except ValueError:
            raise ConfigError(
                f"barrier must be 'vertical', 'angled' or a comma list, got "
                f"'{self.barrier}'"
            ) from None

    def coherent_occupations(self) -> tuple[float, ...]:
        """Configured means, or the default of 2 bosons per pre-barrier site."""
        if self.coherent_n is not None:
            return self.coherent_n
        occ = [0.0] * self.L
        for j in range(self.L // 2 - 1):
            occ[j] = 2.0
        return tuple(occ)

    def validate(self) -> "RunConfig":
        if self.L < 4 or self.L % 2 != 0:
            raise ConfigError(f"key L: must be even and >= 4, got {self.L}")
        if self.N < 1:
            raise ConfigError(f"key N: must be >= 1, got {self.N}")
        if not self.J > 0:
            raise ConfigError(f"key J: must be positive, got {self.J}")
        if self.h < 0:
            raise ConfigError(f"key h: must be >= 0, got {self.h}")
        if not self.tmax > 0:
            raise ConfigError(f"key tmax: must be positive, got {self.tmax}")
        if not 0 < self.dt <= self.tmax:
            raise ConfigError(f"key dt: must be in (0, tmax], got {self.dt}")
        if not 0 < self.sweep_dt <= self.tmax:
            raise ConfigError(f"key sweep_dt: must be in (0, tmax], got {self.sweep_dt}")
        if self.U_max < self.U_min:
            raise ConfigError("key U_max: must be >= U_min")
        if not self.dU > 0:
            raise ConfigError(f"key dU: must be positive, got {self.dU}")
        if not self.threshold > 0:
            raise ConfigError(f"key threshold: must be positive, got {self.threshold}")
        if self.top_k < 1:
            raise ConfigError(f"key top_k: must be >= 1, got {self.top_k}")
        if not 0 < self.weight_tol < 1:
            raise ConfigError(f"key weight_tol: must be in (0, 1), got {self.weight_tol}")
        if self.coherent_n is not None:
            if len(self.coherent_n) != self.L:
                raise ConfigError(
                    f"key coherent_n: {len(self.coherent_n)} entries for L = {self.L}"
                )
            if any(x < 0 for x in self.coherent_n):
                raise ConfigError("key coherent_n: entries must be >= 0")
        if self.format is not None and self.format not in ("csv", "json"):
            raise ConfigError(f"key format: must be csv or json, got '{self.format}'")
        barrier = self.barrier_value()
        if isinstance(barrier, list) and len(barrier) != self.L:
            raise ConfigError(
                f"key barrier: custom potential has {len(barrier)} entries for L = {self.L}"
            )
        return self


_INT_KEYS = {"L", "N", "top_k", "N_max"}
_FLOAT_KEYS = {"J", "U", "h", "tmax", "dt", "U_min", "U_max", "dU", "sweep_dt",
               "threshold", "report_threshold", "weight_tol"}
_STR_KEYS = {"barrier", "out", "format"}
_LIST_KEYS = {"coherent_n"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS


def _convert(key: str, raw: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _LIST_KEYS:
            return tuple(float(x) for x in raw.split(","))
        return raw
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse value '{raw}' for key '{key}'") from None


def parse_config(text: str) -> RunConfig:
    """Parse key = value lines ('#' starts a comment) into a validated RunConfig."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got '{stripped}'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        values[key] = _convert(key, raw, lineno)
    return RunConfig(**values).validate()


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """New validated config with non-None override values applied."""
    data = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return RunConfig(**data).validate()
