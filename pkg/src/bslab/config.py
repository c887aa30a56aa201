"""Experiment configs: one JSON file per experiment, validated with unknown keys rejected."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from bslab.errors import ConfigError

Number = Union[int, float, str]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FunctionConfig(_Strict):
    kind: Literal["bspline"] = "bspline"
    k: int = Field(ge=2)
    a: list[Number]


class Range(_Strict):
    start: int = Field(ge=1)
    stop: int = Field(ge=1)
    step: int = Field(default=1, ge=1)

    def values(self) -> list[int]:
        return list(range(self.start, self.stop + 1, self.step))


Levels = Union[list[Annotated[int, Field(ge=1)]], Range]


def levels(v: Levels) -> list[int]:
    return v.values() if isinstance(v, Range) else list(v)


class _Common(_Strict):
    name: str = "experiment"
    out: Optional[str] = None
    seed: Optional[int] = None
    workers: int = Field(default=1, ge=1)


class EuclidFamily(_Strict):
    kind: Literal["counterexample", "dilation", "sublattice"]
    base: Optional[list[list[Number]]] = None
    exponents: Optional[list[int]] = None

    @model_validator(mode="after")
    def _needs_base(self):
        if self.kind != "counterexample" and self.base is None:
            raise ValueError(f"family kind {self.kind!r} needs 'base'")
        if self.kind == "sublattice" and self.exponents is None:
            raise ValueError("sublattice family needs 'exponents'")
        return self


class EuclidConfig(_Common):
    model: Literal["euclid"]
    family: EuclidFamily
    test_functions: list[FunctionConfig] = Field(min_length=1)
    n: Levels
    R: list[Number] = Field(min_length=1)
    tail_tol: Optional[float] = Field(default=None, gt=0)
    budget: int = Field(default=10**7, ge=1)


class GroupConfig(_Strict):
    kind: Literal["free", "surface", "free-abelian"]
    rank: int = Field(ge=1)


class SchemeConfig(_Strict):
    kind: Literal["exponent", "homology_cover", "partial_homology_cover", "custom"]
    kernel: Literal["trivial", "limit"] = "trivial"
    generator: Optional[int] = None
    chi: Optional[list[list[int]]] = None
    moduli: Optional[list[Union[int, str]]] = None


class SchreierConfig(_Common):
    model: Literal["schreier"]
    group: GroupConfig
    scheme: SchemeConfig
    n: Levels
    r: list[Annotated[int, Field(ge=0)]] = Field(min_length=1)
    method: Literal["auto", "literal", "normal"] = "auto"
    ball_budget: int = Field(default=10**6, ge=1)
    index_budget: int = Field(default=10**4, ge=1)


class HyperbolicConfig(_Common):
    model: Literal["hyperbolic"]
    seed: int
    scheme: Literal["chi", "homology"] = "chi"
    n: Levels
    R: list[float] = Field(min_length=1)
    R_unit: Literal["absolute", "systole"] = "absolute"
    samples: int = Field(default=10_000, ge=1)
    ball_budget: int = Field(default=2 * 10**6, ge=1)


class ZCoverConfig(_Common):
    model: Literal["zcover"]
    basis: list[list[Number]]
    chi: list[int]
    test_functions: list[FunctionConfig] = Field(min_length=1)
    n: Levels
    theta_grid: list[Number] = Field(default_factory=lambda: [0, "1/4", "1/2"])
    quadrature_m: Optional[int] = Field(default=None, ge=1)
    tail_tol: float = Field(default=1e-2, gt=0)


ExperimentConfig = Annotated[Union[EuclidConfig, SchreierConfig, HyperbolicConfig, ZCoverConfig],
                             Field(discriminator="model")]
_ADAPTER = TypeAdapter(ExperimentConfig)


def _describe(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"] if not (isinstance(x, str) and x in ("euclid", "schreier", "hyperbolic", "zcover")))
        parts.append(f"{loc or '<root>'}: {e['msg']}")
    return "; ".join(parts)


def parse_config(doc: dict, seed_override: int | None = None):
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    doc = dict(doc)
    if seed_override is not None:
        doc["seed"] = seed_override
    try:
        return _ADAPTER.validate_python(doc)
    except ValidationError as err:
        raise ConfigError(f"invalid config: {_describe(err)}") from None


def load_config(path: str | Path, seed_override: int | None = None):
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from None
    return parse_config(doc, seed_override)


def config_hash(cfg) -> str:
    """sha256 of the canonical JSON of the validated config (defaults filled in)."""
    canon = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
