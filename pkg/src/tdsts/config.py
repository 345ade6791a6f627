"""JSON run configuration: schema, defaults and conversion to model objects."""

from __future__ import annotations

import copy
import json
import math
import os
import re
from dataclasses import dataclass
from typing import Any

import jsonschema
import numpy as np

from .model import Displacement, DomainError, OscillatorParams, Squeeze, StateSpec, ThermalSpec

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_TEMP = {
    "type": "object",
    "oneOf": [
        {"required": ["T"], "not": {"required": ["tau"]}},
        {"required": ["tau"], "not": {"required": ["T"]}},
    ],
    "properties": {"T": {"type": "number", "minimum": 0}, "tau": {"type": "number", "minimum": 0}},
    "additionalProperties": False,
}
_GRID = {
    "type": "object",
    "properties": {
        "halfwidth_sigmas": _POS,
        "points": {"type": "integer", "minimum": 2},
    },
    "additionalProperties": False,
}


def _obj(props: dict, **extra) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False, **extra}


SCHEMA = _obj(
    {
        "state": _obj(
            {
                "units": _obj({"m": _POS, "omega": _POS, "hbar": _POS, "kb": _POS}),
                "alpha": _obj(
                    {"re": _NUM, "im": _NUM, "mod": {"type": "number", "minimum": 0}, "arg": _NUM},
                    oneOf=[
                        {"not": {"anyOf": [{"required": ["mod"]}, {"required": ["arg"]}]}},
                        {"not": {"anyOf": [{"required": ["re"]}, {"required": ["im"]}]}},
                    ],
                ),
                "squeeze": _obj({"r": {"type": "number", "minimum": 0}, "phi": _NUM}),
                "input_temps": {"type": "array", "items": _TEMP},
                "detector_temps": {"type": "array", "items": _TEMP},
            }
        ),
        "time_grid": _obj({"start": _NUM, "stop": _NUM, "count": {"type": "integer", "minimum": 1}}),
        "grids": _obj({"x": _GRID, "p": _GRID}),
        "oracle": _obj(
            {
                "fock_cutoff": {"type": "integer", "minimum": 8},
                "quad_points": {"type": "integer", "minimum": 101},
            }
        ),
        "output": _obj(
            {"format": {"enum": ["csv", "json"]}, "path": {"type": ["string", "null"]}}
        ),
    }
)

DEFAULTS: dict[str, Any] = {
    "state": {
        "units": {"m": 1.0, "omega": 1.0, "hbar": 1.0, "kb": 1.0},
        "alpha": {"re": 0.0, "im": 0.0},
        "squeeze": {"r": 0.0, "phi": 0.0},
        "input_temps": [],
        "detector_temps": [],
    },
    "time_grid": {"start": 0.0, "stop": 0.0, "count": 1},
    "grids": {
        "x": {"halfwidth_sigmas": 5.0, "points": 101},
        "p": {"halfwidth_sigmas": 5.0, "points": 101},
    },
    "oracle": {"fock_cutoff": 60, "quad_points": 2001},
    "output": {"format": "csv", "path": None},
}


class ConfigError(ValueError):
    """Invalid configuration; ``str()`` carries a line/field diagnostic."""


@dataclass(frozen=True)
class GridSpec:
    halfwidth_sigmas: float
    points: int


@dataclass(frozen=True)
class RunConfig:
    spec: StateSpec
    times: tuple[float, ...]
    x_grid: GridSpec
    p_grid: GridSpec
    fock_cutoff: int
    quad_points: int
    output_format: str
    output_path: str | None
    raw: dict

    @classmethod
    def from_dict(cls, data: dict, text: str | None = None) -> "RunConfig":
        validate_dict(data, text)
        raw = _merge(DEFAULTS, data)
        try:
            spec = _state(raw["state"])
        except DomainError as exc:
            raise ConfigError(f"field state: {exc}") from exc
        tg = raw["time_grid"]
        times = tuple(float(v) for v in np.linspace(tg["start"], tg["stop"], tg["count"]))
        cutoff = raw["oracle"]["fock_cutoff"]
        env = os.environ.get("TDSTS_FOCK_CUTOFF")
        if env is not None:
            try:
                cutoff = int(env)
            except ValueError:
                raise ConfigError(f"TDSTS_FOCK_CUTOFF must be an integer, got {env!r}") from None
            if cutoff < 8:
                raise ConfigError(f"TDSTS_FOCK_CUTOFF must be >= 8, got {cutoff}")
        quad = raw["oracle"]["quad_points"]
        if quad % 2 == 0:
            raise ConfigError(_where(text, ["oracle", "quad_points"]) + "must be odd")
        return cls(
            spec=spec,
            times=times,
            x_grid=GridSpec(**raw["grids"]["x"]),
            p_grid=GridSpec(**raw["grids"]["p"]),
            fock_cutoff=cutoff,
            quad_points=quad,
            output_format=raw["output"]["format"],
            output_path=raw["output"]["path"],
            raw=raw,
        )


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and key != "alpha":
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _temperature(entry: dict, osc: OscillatorParams) -> float:
    return entry["T"] if "T" in entry else osc.temperature_from_tau(entry["tau"])


def _state(state: dict) -> StateSpec:
    osc = OscillatorParams(**state["units"])
    a = state["alpha"]
    if "mod" in a or "arg" in a:
        alpha = Displacement.from_polar(a.get("mod", 0.0), a.get("arg", 0.0))
    else:
        alpha = Displacement(a.get("re", 0.0), a.get("im", 0.0))
    sq = state["squeeze"]
    thermal = ThermalSpec(
        [_temperature(e, osc) for e in state["input_temps"]],
        [_temperature(e, osc) for e in state["detector_temps"]],
    )
    return StateSpec(osc, alpha, Squeeze(sq["r"], sq["phi"]), thermal)


def _line_of(text: str | None, path: list) -> int | None:
    """Best-effort source line of the last object key on ``path``."""
    if not text:
        return None
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    pos = 0
    for key in keys:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            return None
        pos = m.start()
    return text.count("\n", 0, pos) + 1


def _where(text: str | None, path: list) -> str:
    field = ".".join(str(p) for p in path) or "<root>"
    line = _line_of(text, path)
    return f"line {line}, field {field}: " if line else f"field {field}: "


def validate_dict(data: Any, text: str | None = None) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if not errors:
        return
    lines = []
    for err in errors:
        path = list(err.absolute_path)
        msg = err.message
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            path = path + extra[:1]
            msg = f"unknown key(s) {', '.join(extra)}"
        elif err.validator == "oneOf" and path[-1:] == ["alpha"]:
            msg = "give alpha as {re, im} or {mod, arg}, not both"
        elif err.validator == "oneOf":
            msg = "temperature entry needs exactly one of T or tau"
        lines.append(_where(text, path) + msg)
    raise ConfigError("; ".join(lines))


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return RunConfig.from_dict(data, text)


def load(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return loads(text)


# sweep axes: short alias -> (path into raw config, temperature key or None)
_AXIS_ALIASES = {
    "r": ("state.squeeze.r", None),
    "phi": ("state.squeeze.phi", None),
    "T1": ("state.input_temps[0]", "T"),
    "T2": ("state.detector_temps[0]", "T"),
    "tau1": ("state.input_temps[0]", "tau"),
    "tau2": ("state.detector_temps[0]", "tau"),
}
_TEMP_AXIS = re.compile(r"^(?:state\.)?(input_temps|detector_temps)\[(\d+)\](?:\.(T|tau))?$")
_ALPHA_AXIS = re.compile(r"^(?:state\.)?alpha\.(re|im|mod|arg)$")
_SQUEEZE_AXIS = re.compile(r"^(?:state\.)?squeeze\.(r|phi)$")


def with_axis(raw: dict, axis: str, value: float) -> dict:
    """Copy of ``raw`` with the scalar parameter named by ``axis`` set to ``value``.

    Raises KeyError for an unknown or non-scalar axis.
    """
    out = copy.deepcopy(raw)
    state = out["state"]
    path, temp_key = _AXIS_ALIASES.get(axis, (axis, None))

    if m := _SQUEEZE_AXIS.match(path):
        state["squeeze"][m.group(1)] = value
        return out
    if m := _ALPHA_AXIS.match(path):
        part = m.group(1)
        a = state["alpha"]
        polar = "mod" in a or "arg" in a
        if part in ("mod", "arg") and not polar:
            z = complex(a.get("re", 0.0), a.get("im", 0.0))
            a = {"mod": abs(z), "arg": math.atan2(z.imag, z.real)}
        elif part in ("re", "im") and polar:
            z = a.get("mod", 0.0) * complex(math.cos(a.get("arg", 0.0)), math.sin(a.get("arg", 0.0)))
            a = {"re": z.real, "im": z.imag}
        a[part] = value
        state["alpha"] = a
        return out
    if m := _TEMP_AXIS.match(path):
        name, idx, key = m.group(1), int(m.group(2)), m.group(3) or temp_key
        temps = state[name]
        if idx > len(temps) or (idx == len(temps) and key is None):
            raise KeyError(axis)
        if idx == len(temps):
            temps.append({})
        key = key or next(iter(temps[idx]))
        temps[idx] = {key: value}
        return out
    raise KeyError(axis)
