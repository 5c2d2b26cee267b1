"""Run configuration: strict parsing of TOML/JSON config files.

Unknown keys are rejected and values are type-checked without coercion, so a
typo in a physics parameter fails loudly instead of running with a default.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

COMMANDS = ("sweep", "bsa", "teleport", "swap", "echo", "link")
BELL_NAMES = ("psi+", "psi-", "phi+", "phi-")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key path."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, frozen=True)


Complex = Annotated[list[float], Field(min_length=2, max_length=2)]


class GridRange(_Strict):
    start: float
    stop: float
    num: int = Field(ge=1)

    @model_validator(mode="after")
    def _ordered(self):
        if self.stop < self.start:
            raise ValueError("stop must be >= start")
        return self

    def values(self) -> list[float]:
        if self.num == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.num - 1)
        return [self.start + i * step for i in range(self.num)]


class SweepParams(_Strict):
    g_norm: Union[GridRange, list[float]] = GridRange(start=0.01, stop=3.0, num=300)
    ks_over_k: list[Annotated[float, Field(ge=0)]] = [1e-6, 0.3, 0.7, 1.1, 1.3]
    gamma_ratio: float = Field(default=0.01, ge=0)
    gamma_reference: Literal["total", "kappa"] = "total"
    window: Optional[Annotated[list[float], Field(min_length=2, max_length=2)]] = None
    n_scan: int = Field(default=20001, ge=3)

    @model_validator(mode="after")
    def _check(self):
        if self.window is not None and not self.window[1] > self.window[0]:
            raise ValueError("window upper bound must exceed lower bound")
        g = self.g_values()
        if not g:
            raise ValueError("g_norm grid is empty")
        if min(g) < 0:
            raise ValueError("g_norm values must be >= 0")
        if not self.ks_over_k:
            raise ValueError("ks_over_k grid is empty")
        return self

    def g_values(self) -> list[float]:
        return self.g_norm.values() if isinstance(self.g_norm, GridRange) else list(self.g_norm)


class CavityPoint(_Strict):
    g_norm: float = Field(ge=0)
    ks_over_k: float = Field(ge=0)
    gamma_ratio: float = Field(default=0.01, ge=0)
    gamma_reference: Literal["total", "kappa"] = "total"
    branch: Literal["eta", "f_phi"] = "eta"


class ModeSpec(_Strict):
    kind: Literal["ideal", "lossy", "ebs"] = "ideal"
    delta_phi: float = math.pi / 2
    r0: Optional[Complex] = None
    rh: Optional[Complex] = None
    t0: Optional[Complex] = None
    cavity: Optional[CavityPoint] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == "lossy":
            explicit = self.r0 is not None and self.rh is not None
            if explicit == (self.cavity is not None):
                raise ValueError("lossy mode needs either both r0 and rh, or a cavity block")
        for name in ("r0", "rh", "t0"):
            z = getattr(self, name)
            if z is not None and math.hypot(*z) > 1 + 1e-9:
                raise ValueError(f"|{name}| must be <= 1")
        return self


class BsaParams(_Strict):
    analyzer: Literal[1, 2] = 1
    bell: list[Literal["psi+", "psi-", "phi+", "phi-"]] = list(BELL_NAMES)
    mode: ModeSpec = ModeSpec()
    shots: int = Field(default=0, ge=0)


class TeleportParams(_Strict):
    analyzer: Literal[1, 2] = 1
    alpha: Complex = [1.0, 0.0]
    beta: Complex = [0.0, 0.0]
    mode: ModeSpec = ModeSpec()
    shots: int = Field(default=0, ge=0)
    t2e: Optional[float] = Field(default=None, gt=0)
    delta_t: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _normalized(self):
        nrm = sum(x * x for x in self.alpha) + sum(x * x for x in self.beta)
        if abs(nrm - 1) > 1e-9:
            raise ValueError("|alpha|^2 + |beta|^2 must equal 1")
        return self


class SwapParams(_Strict):
    analyzer: Literal[1, 2] = 1
    mode: ModeSpec = ModeSpec()
    shots: int = Field(default=0, ge=0)


class EchoParams(_Strict):
    t2_star: float = Field(default=1.0, gt=0)
    total_time: float = Field(default=1.0, ge=0)
    echo: bool = False
    n_samples: int = Field(default=100_000, ge=1)
    noise_axis: Literal["transverse", "longitudinal"] = "transverse"


class LinkParams(_Strict):
    p_arrival: float = Field(default=0.01, gt=0, le=1)
    window_attempts: int = Field(default=100, ge=1)
    attempt_period: float = Field(default=1.0, ge=0)
    t2e: Optional[float] = Field(default=None, gt=0)  # None: no dephasing
    n_trials: int = Field(default=1_000_000, ge=1)


class _Run(_Strict):
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    output: Optional[str] = None


class SweepRun(_Run):
    command: Literal["sweep"]
    params: SweepParams = SweepParams()


class BsaRun(_Run):
    command: Literal["bsa"]
    params: BsaParams = BsaParams()


class TeleportRun(_Run):
    command: Literal["teleport"]
    params: TeleportParams = TeleportParams()


class SwapRun(_Run):
    command: Literal["swap"]
    params: SwapParams = SwapParams()


class EchoRun(_Run):
    command: Literal["echo"]
    params: EchoParams = EchoParams()


class LinkRun(_Run):
    command: Literal["link"]
    params: LinkParams = LinkParams()


RunConfig = Annotated[
    Union[SweepRun, BsaRun, TeleportRun, SwapRun, EchoRun, LinkRun],
    Field(discriminator="command"),
]
_ADAPTER = TypeAdapter(RunConfig)


def _format_error(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        # drop the union tag (e.g. "sweep") that pydantic inserts after the discriminator
        loc = [str(x) for x in e["loc"]]
        if loc and loc[0] in COMMANDS:
            loc = loc[1:]
        if e["type"] in ("union_tag_invalid", "union_tag_not_found"):
            loc = ["command"]
        path = ".".join(loc) or "<root>"
        lines.append(f"{path}: {e['msg']}")
    return "; ".join(lines)


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>: config must be a table/object")
    try:
        # through JSON so strict mode treats TOML and JSON input identically
        return _ADAPTER.validate_json(json.dumps(data))
    except ValidationError as err:
        raise ConfigError(_format_error(err)) from None


def parse_config(text: str, fmt: Literal["json", "toml"] = "json") -> RunConfig:
    try:
        data = json.loads(text) if fmt == "json" else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as err:
        raise ConfigError(f"<root>: cannot parse {fmt}: {err}") from None
    return config_from_dict(data)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".json", ".toml"):
        raise ConfigError(f"<root>: config extension must be .json or .toml, got {suffix!r}")
    return parse_config(path.read_text(encoding="utf-8"), suffix[1:])


def serialize_config(cfg: RunConfig) -> str:
    return cfg.model_dump_json()
