"""
Scenario configuration: strict JSON schema, defaults and validation.

Configs are JSON. Lines whose first non-blank characters are ``//`` are
comments and are blanked out before parsing, so reported line numbers still
match the file. Unknown keys anywhere are errors.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError

__all__ = [
    "ScenarioConfig",
    "validate_config",
    "load_config",
    "config_hash",
    "strip_comments",
    "apply_override",
    "SCENARIOS",
]

SCENARIOS = ("fig1a", "fig1b", "fig2", "single_well", "double_well", "oracle_check")

_COMMENT = re.compile(r"^\s*//.*$", re.MULTILINE)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PumpSection(_Strict):
    rabi_frequency: float = Field(1.0, gt=0)
    detuning: float = 100.0
    pump_frequency: float = Field(1.0, gt=0)
    dipole: float = Field(1.0, gt=0)
    # a number, or "calibrated" to match the continuum prefactor
    coupling_scale: float | Literal["calibrated"] = 1.0

    @field_validator("detuning")
    @classmethod
    def _nonzero(cls, v):
        if v == 0 or not math.isfinite(v):
            raise ValueError("detuning must be finite and non-zero")
        return v

    @field_validator("coupling_scale")
    @classmethod
    def _positive_scale(cls, v):
        if not isinstance(v, str) and not v > 0:
            raise ValueError("coupling_scale must be > 0")
        return v


class DensitySection(_Strict):
    kind: Literal["free_space", "cavity_inverse_cubic", "tabulated"] = "cavity_inverse_cubic"
    scale: float = Field(1.0, gt=0)
    samples: Optional[List[List[float]]] = None


class GeometrySection(_Strict):
    kind: Literal["single_well", "double_well"] = "single_well"
    width: float = Field(1.0, gt=0)
    trap_frequency: float = Field(1.0, gt=0)
    separation: float = Field(8.0, ge=0)
    local_width: float = Field(1.0, gt=0)
    barrier_height: float = Field(1.0, gt=0)
    mass: float = Field(1.0, gt=0)
    splitting_scale: float = Field(1.0, gt=0)


class ExplicitMode(_Strict):
    omega: float
    coupling: float = 0.0
    coupling_imag: float = 0.0
    tunnel_coupling: float = 0.0
    tunnel_coupling_imag: float = 0.0
    weight: float = Field(1.0, gt=0)


class GridSection(_Strict):
    kind: Literal["built", "explicit"] = "built"
    k_min: float = Field(0.5, gt=0)
    k_max: float = Field(2.0, gt=0)
    n_radial: int = Field(32, ge=1)
    n_angular: int = Field(2, ge=1)
    modes: List[ExplicitMode] = Field(default_factory=list)


class TimesSection(_Strict):
    t_start: float = Field(0.0, ge=0)
    t_end: float = Field(10.0, gt=0)
    steps: int = Field(500, ge=2)


class SweepEntry(_Strict):
    path: str
    values: List[float] = Field(min_length=1)


class TruncationSection(_Strict):
    max_atoms: int = Field(2, ge=1)
    max_photons_per_mode: int = Field(20, ge=1)
    cap: int = Field(200_000, ge=1)


class UnitsSection(_Strict):
    hbar: float = Field(1.0, gt=0)
    c: float = Field(1.0, gt=0)


class OutputSection(_Strict):
    directory: Optional[str] = None
    format: Literal["csv", "json"] = "csv"


class ParamsSection(_Strict):
    """Scenario knobs. Unused ones are ignored by scenarios that do not need them."""

    m: int = Field(1, ge=0)
    n: int = Field(0, ge=0)
    lam: Optional[float] = Field(None, ge=0)
    variant: Literal["corrected", "verbatim"] = "corrected"
    alpha: float = Field(1.0, gt=0)
    amplitudes: Optional[List[float]] = None
    condensate_frequency: float = 1.0
    kappa: Optional[float] = None
    g_aa: float = 0.0
    delta: Optional[float] = Field(None, gt=0)
    n_ref: Optional[int] = Field(None, ge=2)
    tail_tol: float = Field(1e-12, gt=0)
    tolerance: float = Field(1e-10, gt=0)
    k_max: Optional[float] = Field(None, gt=0)
    method: Literal["grid", "continuum"] = "grid"
    max_sector: int = Field(2, ge=1)
    max_deviation: float = Field(1e-6, gt=0)


class ScenarioConfig(_Strict):
    scenario: Literal["fig1a", "fig1b", "fig2", "single_well", "double_well", "oracle_check"]
    pump: PumpSection = Field(default_factory=PumpSection)
    density: DensitySection = Field(default_factory=DensitySection)
    geometry: GeometrySection = Field(default_factory=GeometrySection)
    grid: GridSection = Field(default_factory=GridSection)
    times: TimesSection = Field(default_factory=TimesSection)
    sweep: List[SweepEntry] = Field(default_factory=list)
    truncation: TruncationSection = Field(default_factory=TruncationSection)
    units: UnitsSection = Field(default_factory=UnitsSection)
    output: OutputSection = Field(default_factory=OutputSection)
    params: ParamsSection = Field(default_factory=ParamsSection)
    workers: int = Field(1, ge=1)


# figure defaults are artifact choices; no parameter values are given for them
_FIGURE_DEFAULTS = {
    "fig1a": {"sweep": [{"path": "params.lam", "values": [1e-3, 5e-3, 2e-2]}],
              "times": {"t_start": 0.0, "t_end": 100.0, "steps": 500}},
    "fig1b": {"sweep": [{"path": "pump.pump_frequency", "values": [0.5, 1.0, 2.0, 4.0]}],
              "params": {"lam": 5e-3},
              "times": {"t_start": 0.0, "t_end": 100.0, "steps": 500}},
    "fig2": {"geometry": {"kind": "double_well"},
             "grid": {"kind": "explicit",
                      "modes": [{"omega": 1.0, "coupling": 0.0, "tunnel_coupling": 0.1}]},
             "params": {"delta": 0.2},
             "times": {"t_start": 0.0, "t_end": 30.0, "steps": 500}},
}


def strip_comments(raw: str) -> str:
    """Blank out ``//`` comment lines, keeping line numbering intact."""
    return _COMMENT.sub("", raw)


def _merge_defaults(data: dict) -> dict:
    defaults = _FIGURE_DEFAULTS.get(data.get("scenario"), {})
    out = dict(data)
    for key, value in defaults.items():
        if key not in out:
            out[key] = value
        elif isinstance(value, dict) and isinstance(out[key], dict):
            merged = dict(value)
            merged.update(out[key])
            out[key] = merged
    return out


def _path_exists(path: str) -> bool:
    parts = path.split(".")
    model: Any = ScenarioConfig
    for part in parts:
        fields = getattr(model, "model_fields", None)
        if fields is None or part not in fields:
            return False
        annotation = fields[part].annotation
        model = annotation if isinstance(annotation, type) and issubclass(annotation, BaseModel) else None
    return model is None


def _semantic_problems(cfg: ScenarioConfig) -> List[str]:
    problems = []
    if cfg.times.t_end <= cfg.times.t_start:
        problems.append("times.t_end: must exceed times.t_start")
    for i, entry in enumerate(cfg.sweep):
        if not _path_exists(entry.path):
            problems.append(f"sweep[{i}].path: unknown parameter path {entry.path!r}")
            continue
        for value in entry.values:
            try:
                apply_override(cfg, entry.path, value)
            except ConfigError as exc:
                problems.extend(f"sweep[{i}].values: {p}" for p in exc.problems)
    if cfg.density.kind == "tabulated" and not cfg.density.samples:
        problems.append("density.samples: required for a tabulated density")
    if cfg.grid.kind == "built" and cfg.grid.k_max <= cfg.grid.k_min:
        problems.append("grid.k_max: must exceed grid.k_min")
    if cfg.grid.kind == "explicit" and not cfg.grid.modes:
        problems.append("grid.modes: an explicit grid needs at least one mode")
    double = cfg.scenario in ("fig2", "double_well")
    if double and cfg.geometry.kind != "double_well":
        problems.append(f"geometry.kind: scenario {cfg.scenario} needs a double_well geometry")
    if cfg.scenario == "single_well" and cfg.geometry.kind != "single_well":
        problems.append("geometry.kind: scenario single_well needs a single_well geometry")
    if cfg.params.amplitudes is not None:
        total = sum(a * a for a in cfg.params.amplitudes)
        if abs(total - 1.0) > 1e-9:
            problems.append("params.amplitudes: squares must sum to 1")
    if cfg.scenario in ("fig1a", "fig1b") and cfg.density.kind != "cavity_inverse_cubic" \
            and cfg.params.lam is None:
        problems.append("params.lam: needed unless density.kind is cavity_inverse_cubic")
    return problems


def validate_config(raw: str) -> ScenarioConfig:
    """Parse and validate config text, reporting every problem at once."""
    text = strip_comments(raw)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    data = _merge_defaults(data)
    try:
        cfg = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        problems = [f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
                    for err in exc.errors()]
        raise ConfigError(problems) from None
    problems = _semantic_problems(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return validate_config(fh.read())


def config_hash(cfg: ScenarioConfig) -> str:
    """Short SHA-256 of the canonical config; output location and workers excluded."""
    data = cfg.model_dump(mode="json", exclude={"output": {"directory"}, "workers": True})
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def apply_override(cfg: ScenarioConfig, path: str, value) -> ScenarioConfig:
    """Return a copy of ``cfg`` with the dotted ``path`` set to ``value``."""
    data = cfg.model_dump()
    node = data
    parts = path.split(".")
    for part in parts[:-1]:
        node = node[part]
    node[parts[-1]] = value
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError([f"{path}={value!r}: {e['msg']}" for e in exc.errors()]) from None
