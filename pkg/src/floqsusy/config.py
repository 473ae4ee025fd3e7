"""Run configuration read from an INI file.

Schema (every key optional except where noted)::

    [model]
    kind = elliptic            ; elliptic | constant | cosine
    omega0 = 0.5978
    half_period_real = 2.0     ; elliptic: real half-period omega_r (period T = 2 omega_r)
    half_period_imag = 2.0     ; elliptic: |omega_i|
    period = 2.0               ; constant, cosine
    modulation = 0.0           ; cosine: omega^2 = omega0^2 (1 + m cos(2 pi t / T))
    tol = 1e-12

    [transformation]
    mode = none                ; none | create | delete
    k = 2

    [levels]
    n = 0, 1, 2, 3

    [grid]
    width = 12.0               ; x_max = width * sqrt(8 gamma_max)
    nx = 2049
    t_steps = 4096
    spectroscopy_periods = 256
    spectroscopy_nx = 1025
    spectroscopy_t_steps = 1024

    [verify]
    residual_tol = 1e-5
    floquet_tol = 1e-5
    floor_db = -40.0
    berry_tol = 1e-4

    [output]
    format = csv               ; csv | json
    path = -                   ; '-' writes to stdout
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field, fields

__all__ = ["ConfigError", "ModelConfig", "TransformationConfig", "GridConfig", "VerifyConfig",
           "OutputConfig", "RunConfig", "parse_config", "load_config", "dump_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    kind: str = "elliptic"
    omega0: float = 0.5978
    half_period_real: float = 2.0
    half_period_imag: float = 2.0
    period: float = 2.0
    modulation: float = 0.0
    tol: float = 1e-12

    def validate(self):
        if self.kind not in ("elliptic", "constant", "cosine"):
            raise ConfigError(f"model.kind must be elliptic, constant or cosine, not {self.kind!r}")
        for name in ("half_period_real", "half_period_imag", "period", "tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"model.{name} must be positive")
        if self.kind == "elliptic" and not self.omega0 >= 0:
            raise ConfigError("model.omega0 must be non-negative")
        if self.kind != "elliptic" and not self.omega0 > 0:
            raise ConfigError("model.omega0 must be positive")


@dataclass(frozen=True)
class TransformationConfig:
    mode: str = "none"
    k: int = 2

    def validate(self):
        if self.mode not in ("none", "create", "delete"):
            raise ConfigError(f"transformation.mode must be none, create or delete, not {self.mode!r}")
        if self.k < 0:
            raise ConfigError("transformation.k must be non-negative")
        if self.mode == "create" and self.k % 2:
            raise ConfigError("transformation.k must be even for mode = create")


@dataclass(frozen=True)
class GridConfig:
    width: float = 12.0
    nx: int = 2049
    t_steps: int = 4096
    spectroscopy_periods: int = 256
    spectroscopy_nx: int = 1025
    spectroscopy_t_steps: int = 1024

    def validate(self):
        if not self.width > 0:
            raise ConfigError("grid.width must be positive")
        for name in ("nx", "spectroscopy_nx"):
            v = getattr(self, name)
            if v < 5 or v % 2 == 0:
                raise ConfigError(f"grid.{name} must be odd and >= 5")
        for name in ("t_steps", "spectroscopy_periods", "spectroscopy_t_steps"):
            if getattr(self, name) < 4:
                raise ConfigError(f"grid.{name} must be >= 4")


@dataclass(frozen=True)
class VerifyConfig:
    residual_tol: float = 1e-5
    floquet_tol: float = 1e-5
    floor_db: float = -40.0
    berry_tol: float = 1e-4

    def validate(self):
        for name in ("residual_tol", "floquet_tol", "berry_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"verify.{name} must be positive")
        if not self.floor_db < 0:
            raise ConfigError("verify.floor_db must be negative")


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str = "-"

    def validate(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"output.format must be csv or json, not {self.format!r}")


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    transformation: TransformationConfig = field(default_factory=TransformationConfig)
    levels: tuple = (0, 1, 2, 3)
    grid: GridConfig = field(default_factory=GridConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self):
        for sec in (self.model, self.transformation, self.grid, self.verify, self.output):
            sec.validate()
        if not self.levels or any(n < 0 for n in self.levels):
            raise ConfigError("levels.n must be a non-empty list of non-negative integers")
        return self

    def replace(self, **sections):
        return dataclasses.replace(self, **sections)


_SECTIONS = {
    "model": ModelConfig,
    "transformation": TransformationConfig,
    "grid": GridConfig,
    "verify": VerifyConfig,
    "output": OutputConfig,
}


def _convert(cls, key, text):
    typ = {f.name: f.type for f in fields(cls)}[key]
    try:
        if typ == "int":
            return int(text)
        if typ == "float":
            return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {key} = {text!r} as {typ}") from None
    return text.strip()


def parse_config(text, overrides=()):
    """Parse INI text; ``overrides`` are ``section.key=value`` strings applied on top."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        lhs, value = item.split("=", 1)
        sec, key = lhs.strip().split(".", 1)
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key, value.strip())
    unknown = set(cp.sections()) - set(_SECTIONS) - {"levels"}
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    parts = {}
    for name, cls in _SECTIONS.items():
        kw = {}
        if cp.has_section(name):
            allowed = {f.name for f in fields(cls)}
            for key, value in cp.items(name):
                if key not in allowed:
                    raise ConfigError(f"unknown key {name}.{key}")
                kw[key] = _convert(cls, key, value)
        parts[name] = cls(**kw)
    levels = RunConfig.levels
    if cp.has_section("levels"):
        extra = set(cp.options("levels")) - {"n"}
        if extra:
            raise ConfigError(f"unknown key levels.{sorted(extra)[0]}")
        if cp.has_option("levels", "n"):
            try:
                levels = tuple(int(v) for v in cp.get("levels", "n").split(",") if v.strip())
            except ValueError:
                raise ConfigError("levels.n must be a comma-separated list of integers") from None
    return RunConfig(levels=levels, **parts).validate()


def load_config(path=None, overrides=()):
    text = ""
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text, overrides)


def dump_config(cfg: RunConfig) -> str:
    """Serialise so that ``parse_config(dump_config(c)) == c``."""
    lines = []
    for name in ("model", "transformation", "levels", "grid", "verify", "output"):
        lines.append(f"[{name}]")
        if name == "levels":
            lines.append("n = " + ", ".join(str(n) for n in cfg.levels))
        else:
            sec = getattr(cfg, name)
            for f in fields(sec):
                v = getattr(sec, f.name)
                lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
        lines.append("")
    return "\n".join(lines)
