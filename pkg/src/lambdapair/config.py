"""Strict JSON run configuration.

Units: hbar = 1, gamma13 = 1.  Rates and detunings are in units of gamma13,
times in units of 1/gamma13, phases in radians.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from lambdapair.schemes import PRESETS, SCHEME_DEFAULT_PRESET, make_preset
from lambdapair.solvers import IntegratorConfig

UNITS = "hbar = 1, gamma13 = 1; rates in gamma13, times in 1/gamma13, phases in radians"

Vector3 = tuple[float, float, float]
Pair = tuple[float, float]
GridValue = Union[bool, int, float, str]


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometryModel(_Strict):
    e1: Vector3 = (0.0, 0.0, 1.0)
    e2: Vector3 = (0.0, 0.0, 1.0)
    eR: Vector3 = (1.0, 0.0, 0.0)


class SystemModel(_Strict):
    gamma13: Optional[float] = None
    gamma23: Optional[float] = None
    phi13: Optional[float] = None
    freq_ratio: Optional[float] = None
    geometry: Optional[GeometryModel] = None


class DriveModel(_Strict):
    omega: Optional[float] = None
    omega_ratio: Optional[float] = None
    pulse_area: Optional[float] = None
    pulse_width: Optional[float] = None
    pulse_delay: Optional[float] = None
    truncation: Optional[float] = None
    f13: Optional[float] = None
    alphas: Optional[Pair] = None
    deltas: Optional[Pair] = None
    auto_resonance: Optional[bool] = None


class JitterModel(_Strict):
    rate: Optional[float] = None
    mode: Optional[Literal["collective", "independent"]] = None


class IntegratorModel(_Strict):
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: Optional[float] = None
    n_samples: int = 201


class RunModel(_Strict):
    stirap_mode: Optional[Literal["schrodinger", "master"]] = None
    dissipation: Optional[bool] = None
    relax_time: Optional[float] = None


class OutputModel(_Strict):
    dir: Optional[str] = None


class RunConfig(_Strict):
    units: Optional[str] = None
    scheme: Optional[Literal["raman", "stirap", "pumping"]] = None
    preset: Optional[Literal["eq5", "eq6", "eq7", "eq8sym", "eq8asym"]] = None
    system: SystemModel = Field(default_factory=SystemModel)
    drive: DriveModel = Field(default_factory=DriveModel)
    jitter: JitterModel = Field(default_factory=JitterModel)
    integrator: IntegratorModel = Field(default_factory=IntegratorModel)
    run: RunModel = Field(default_factory=RunModel)
    grid: Optional[dict[str, list[GridValue]]] = None
    output: OutputModel = Field(default_factory=OutputModel)

    @model_validator(mode="after")
    def _scheme_matches_preset(self):
        if self.scheme and self.preset:
            expected = make_preset_scheme(self.preset)
            if expected != self.scheme:
                raise ValueError(f"preset {self.preset} belongs to scheme {expected}, not {self.scheme}")
        return self

    def preset_name(self) -> str:
        if self.preset:
            return self.preset
        if self.scheme:
            return SCHEME_DEFAULT_PRESET[self.scheme]
        raise ConfigError("config names neither a scheme nor a preset")

    def preset_params(self) -> dict:
        s, d, j, r = self.system, self.drive, self.jitter, self.run
        params = {
            "gamma13": s.gamma13, "gamma23": s.gamma23, "phi13": s.phi13,
            "freq_ratio": s.freq_ratio,
            "geometry": s.geometry.model_dump() if s.geometry else None,
            "omega": d.omega, "omega_ratio": d.omega_ratio, "pulse_area": d.pulse_area,
            "pulse_width": d.pulse_width, "pulse_delay": d.pulse_delay,
            "truncation": d.truncation, "f13": d.f13, "alphas": d.alphas,
            "deltas": d.deltas, "auto_resonance": d.auto_resonance,
            "jitter_rate": j.rate, "jitter_mode": j.mode,
            "stirap_mode": r.stirap_mode, "dissipation": r.dissipation,
            "relax_time": r.relax_time,
        }
        # f13 is explicitly cleared when a system distance is given without it
        if d.f13 is None and "f13" in PRESETS[self.preset_name()] and s.phi13 is not None:
            return {k: v for k, v in params.items() if v is not None} | {"f13": None}
        return {k: v for k, v in params.items() if v is not None}

    def integrator_config(self) -> IntegratorConfig:
        i = self.integrator
        kw = {"rtol": i.rtol, "atol": i.atol, "n_samples": i.n_samples}
        if i.max_step is not None:
            kw["max_step"] = i.max_step
        return IntegratorConfig(**kw)

    def build_preset(self, **overrides):
        return make_preset(self.preset_name(), **{**self.preset_params(), **overrides})


def make_preset_scheme(name: str) -> str:
    return {"eq5": "raman", "eq6": "raman", "eq7": "stirap"}.get(name, "pumping")


def format_validation_error(err: ValidationError) -> str:
    lines = [f"{len(err.errors())} config error(s):"]
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"  {loc}: {e['msg']}")
    return "\n".join(lines)


def parse_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(format_validation_error(err)) from None


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_config(data)


def config_echo(preset, integrator: IntegratorConfig, grid: dict | None = None) -> dict:
    """Config document (same schema as the input) that rebuilds ``preset``."""
    p = preset.to_dict()
    p.pop("name")
    system = {k: p[k] for k in ("gamma13", "gamma23", "phi13", "freq_ratio", "geometry") if p.get(k) is not None}
    drive = {k: p[k] for k in ("omega", "omega_ratio", "pulse_area", "pulse_width", "pulse_delay",
                               "truncation", "f13", "alphas", "deltas", "auto_resonance")
             if p.get(k) is not None}
    jitter = {}
    if p.get("jitter_rate") is not None:
        jitter["rate"] = p["jitter_rate"]
    if p.get("jitter_mode") is not None:
        jitter["mode"] = p["jitter_mode"]
    run = {k: p[k] for k in ("stirap_mode", "dissipation", "relax_time") if p.get(k) is not None}
    integ = {"rtol": integrator.rtol, "atol": integrator.atol, "n_samples": integrator.n_samples}
    if integrator.max_step != float("inf"):
        integ["max_step"] = integrator.max_step
    out = {
        "units": UNITS,
        "scheme": preset.scheme,
        "preset": preset.name,
        "system": system,
        "drive": drive,
        "jitter": jitter,
        "integrator": integ,
        "run": run,
    }
    if grid is not None:
        out["grid"] = grid
    return out
