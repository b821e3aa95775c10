"""JSON run configuration for the command-line front end.

A config names a gate, its couplings and its detunings in units of ``g``::

    {
      "gate": "fredkin",
      "couplings": {"g": 1.0},
      "detunings": {"Delta": 20.0, "Delta3": "auto", "Delta6": "auto"},
      "measure": true
    }

``"g"`` sets every coupling of the gate (``omega`` defaults to ``2 g`` for
``xrot``) and ``"Delta"`` sets every detuning that is not listed
explicitly.  Free detunings that are omitted default to ``"auto"``, which
means resonance-solved.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator, model_validator

from .effective import FREE_DETUNINGS, solve_resonance
from .errors import ConfigurationError
from .hamiltonian import COUPLING_NAMES, DETUNING_NAMES, GATES

AUTO = "auto"
_GATE_ALIASES = {"fredkin-fast": "fredkin", "fredkin3": "fredkin", "fredkin2": "fredkin-slow"}


class Sweep(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    parameter: str
    start: float = Field(alias="from")
    stop: float = Field(alias="to")
    points: int = Field(ge=2)
    scale: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _check_log(self):
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log sweeps need positive end points")
        return self

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


class TimeGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t_max: float = Field(gt=0)
    points: int = Field(ge=2)

    def values(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.points)


class RunConfig(BaseModel):
    """Validated run configuration.  Unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    gate: str
    couplings: dict[str, float] = Field(default_factory=lambda: {"g": 1.0})
    detunings: dict[str, Union[float, Literal["auto"]]] = Field(default_factory=dict)
    sweep: Optional[Sweep] = None
    time_grid: Optional[TimeGrid] = None
    measure: bool = False
    phase_mode: Literal["population", "strict"] = "population"
    output: Optional[str] = None
    g_hz: Optional[float] = Field(default=None, gt=0)
    theta: Optional[float] = None
    input: Optional[list[int]] = None
    polish: Optional[Literal["newton", "spectral"]] = None

    @field_validator("gate")
    @classmethod
    def _known_gate(cls, v: str) -> str:
        v = _GATE_ALIASES.get(v, v)
        if v not in GATES:
            raise ValueError(f"unknown gate {v!r}; expected one of {', '.join(GATES)}")
        return v

    @field_validator("couplings", "detunings")
    @classmethod
    def _finite(cls, v: dict) -> dict:
        for k, x in v.items():
            if not isinstance(x, str) and not math.isfinite(x):
                raise ValueError(f"{k} is not finite")
        return v

    @model_validator(mode="after")
    def _names(self):
        couplings = set(COUPLING_NAMES[self.gate]) | {"g"}
        bad = sorted(set(self.couplings) - couplings)
        if bad:
            raise ValueError(f"unknown coupling(s) for {self.gate}: {', '.join(bad)}")
        detunings = set(DETUNING_NAMES[self.gate]) | {"Delta"}
        bad = sorted(set(self.detunings) - detunings)
        if bad:
            raise ValueError(f"unknown detuning(s) for {self.gate}: {', '.join(bad)}")
        free = set(FREE_DETUNINGS.get(self.gate, ()))
        autos = {k for k, v in self.detunings.items() if v == AUTO}
        if autos - free:
            raise ValueError(f"only {', '.join(sorted(free)) or 'no detunings'} can be 'auto' for {self.gate}")
        if self.sweep is not None and self.sweep.parameter not in couplings | detunings:
            raise ValueError(f"sweep parameter {self.sweep.parameter!r} is not a coupling or detuning of {self.gate}")
        if self.input is not None and any(b not in (0, 1) for b in self.input):
            raise ValueError("input bits must be 0 or 1")
        return self

    def dump(self) -> str:
        """Canonical JSON that re-parses to an equal config."""
        return json.dumps(self.model_dump(by_alias=True, exclude_none=True), indent=2, sort_keys=True) + "\n"

    def params(self, **overrides: float) -> dict[str, float]:
        """Complete parameter set with shorthands expanded and ``auto`` solved.

        ``overrides`` replace config entries before expansion, so a sweep over
        ``Delta`` moves every detuning that is not given on its own.
        """
        couplings = dict(self.couplings)
        detunings: dict[str, Any] = dict(self.detunings)
        for k, v in overrides.items():
            (couplings if k in couplings or k in COUPLING_NAMES[self.gate] or k == "g" else detunings)[k] = v

        out: dict[str, float] = {}
        g = couplings.get("g")
        for name in COUPLING_NAMES[self.gate]:
            if name in couplings:
                out[name] = couplings[name]
            elif name == "omega" and g is not None:
                out[name] = 2 * g
            elif g is not None:
                out[name] = g
            else:
                raise ConfigurationError(f"couplings.{name} is missing")

        free = FREE_DETUNINGS.get(self.gate, ())
        shared = detunings.get("Delta")
        autos = []
        for name in DETUNING_NAMES[self.gate]:
            v = detunings.get(name, AUTO if name in free else shared)
            if v is None:
                raise ConfigurationError(f"detunings.{name} is missing")
            if v == AUTO:
                autos.append(name)
            else:
                out[name] = float(v)
        if autos:
            if set(autos) != set(free):
                raise ConfigurationError(f"{self.gate}: set all of {', '.join(free)} to 'auto' or none of them")
            polish = self.polish or ("spectral" if self.gate == "fredkin-slow" else None)
            out = solve_resonance(self.gate, out, polish=polish).params
        return out


def _locate(loc: tuple) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse JSON config text.

    Raises
    ------
    ConfigurationError
        With the line and column of a JSON syntax error, or with the dotted
        path of every schema violation.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: top level must be a JSON object")
    try:
        return RunConfig.model_validate(data)
    except PydanticValidationError as exc:
        lines = [f"{source}: {_locate(e['loc'])}: {e['msg']}" for e in exc.errors()]
        raise ConfigurationError("\n".join(lines)) from None


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
