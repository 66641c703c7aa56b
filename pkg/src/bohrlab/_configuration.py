# Copyright 2026 The bohrlab Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Experiment configuration.

Every field of ``ExperimentConfig`` can come from four places, later ones winning:

1. the field default,
2. an environment variable ``BOHRLAB_<FIELD>`` (JSON-decoded when possible),
3. the key/value config file given to ``bohrlab run``,
4. a command-line override such as ``--eps 0.05``.

A config file looks like:

```
# golden rotation, certified at eps = 0.1
experiment = certify
semigroup = zplus:d=1
system = torus:k=1,alpha=golden
eps = 0.1
windows = [1024, 2048, 4096]
```

Lists may also be written without brackets (``windows = 1024, 2048``).
"""
from __future__ import annotations

import logging
import os
import typing as t

import attr
import cattrs
import click_option_group as cog
import inflection
from deepmerge.merger import Merger

from .exceptions import ConfigError
from .utils import bohrlab_cattr
from .utils import dantic
from .utils.dantic import env_converter


if t.TYPE_CHECKING:
    from ._types import ClickFunctionWrapper
    from ._types import F
    from ._types import O_co
    from ._types import P

    DictStrAny = dict[str, t.Any]
else:
    DictStrAny = dict

__all__ = ["ExperimentConfig", "load_config_file"]

logger = logging.getLogger(__name__)

ExperimentName = t.Literal[
    "certify",
    "equicontinuity",
    "diamond",
    "haar",
    "unique-ergodicity",
    "folner-uniform",
    "shulman-jr",
    "cauchy",
    "semigroup-audit",
]

config_merger = Merger(
    # merge dicts
    type_strategies=[(DictStrAny, "merge")],
    # override all other types
    fallback_strategies=["override"],
    # override conflicting types
    type_conflict_strategies=["override"],
)


def _field_env_key(key: str) -> str:
    return f"BOHRLAB_{key.upper()}"


@attr.define(slots=True, frozen=True)
class ExperimentConfig:
    experiment: t.Optional[ExperimentName] = dantic.Field(
        None, description="Experiment to run.", env=_field_env_key("experiment")
    )
    semigroup: str = dantic.Field(
        "zplus:d=1", description="Semigroup tag, see 'bohrlab list'.", env=_field_env_key("semigroup")
    )
    system: str = dantic.Field(
        "torus:k=1,alpha=golden", description="Action tag, see 'bohrlab list'.", env=_field_env_key("system")
    )
    basepoint: str = dantic.Field("0", description="Basepoint y, parsed by the space.", env=_field_env_key("basepoint"))
    basepoints: int = dantic.Field(
        10, ge=1, description="The basepoint plus seeded samples, in total.", env=_field_env_key("basepoints")
    )
    eps: float = dantic.Field(0.1, gt=0.0, description="Error tolerance eps.", env=_field_env_key("eps"))
    windows: t.List[int] = dantic.Field(
        factory=lambda: [1024, 2048, 4096, 8192, 16384],
        validator=dantic.strictly_increasing,
        description="Window schedule (box widths or cutoffs).",
        env=_field_env_key("windows"),
    )
    max_gauge: int = dantic.Field(
        256, ge=1, description="Largest syndeticity gauge searched.", env=_field_env_key("max_gauge")
    )
    delta_depth: int = dantic.Field(
        60, ge=0, description="Rungs of the delta ladder eps·2^-j.", env=_field_env_key("delta_depth")
    )
    folner: str = dantic.Field("cube", description="Følner kind: cube, grid-cube or jr.", env=_field_env_key("folner"))
    family: str = dantic.Field(
        "characters", description="Test function family: characters, landmarks or arcs.", env=_field_env_key("family")
    )
    k_max: int = dantic.Field(8, ge=1, description="Largest character frequency.", env=_field_env_key("k_max"))
    landmarks: int = dantic.Field(
        16, ge=1, description="Number of landmark functions.", env=_field_env_key("landmarks")
    )
    landmark_radius: float = dantic.Field(
        0.25, gt=0.0, description="Radius r of landmark functions.", env=_field_env_key("landmark_radius")
    )
    arc_edges: t.List[float] = dantic.Field(
        factory=lambda: [0.0, 0.25, 0.5, 0.75], description="Edges of the arc family.", env=_field_env_key("arc_edges")
    )
    phi: str = dantic.Field("cos", description="Test function for folner-uniform.", env=_field_env_key("phi"))
    target: float = dantic.Field(0.0, description="Known value of the integral of phi.", env=_field_env_key("target"))
    schedule: t.List[int] = dantic.Field(
        factory=lambda: [100, 1000, 10000],
        validator=dantic.strictly_increasing,
        description="Følner indices n to evaluate.",
        env=_field_env_key("schedule"),
    )
    tolerance: float = dantic.Field(
        1e-12, gt=0.0, description="Haar averaging residual tolerance.", env=_field_env_key("tolerance")
    )
    max_iterations: int = dantic.Field(
        100_000, ge=1, description="Haar averaging iteration cap.", env=_field_env_key("max_iterations")
    )
    oracle_tolerance: float = dantic.Field(
        1e-10, gt=0.0, description="Allowed gap to the linear-solve oracle.", env=_field_env_key("oracle_tolerance")
    )
    starts: int = dantic.Field(5, ge=0, description="Seeded Haar starting distributions.", env=_field_env_key("starts"))
    ue_tolerance: float = dantic.Field(
        1e-2, gt=0.0, description="Final weak-* diameter for unique ergodicity.", env=_field_env_key("ue_tolerance")
    )
    n_max: int = dantic.Field(
        200, ge=1, description="Largest Følner index for shulman-jr.", env=_field_env_key("n_max")
    )
    tail: int = dantic.Field(20, ge=0, description="Tail index of the Cauchy check.", env=_field_env_key("tail"))
    terms: int = dantic.Field(40, ge=2, description="Length of the Fibonacci sequences.", env=_field_env_key("terms"))
    cauchy_threshold: float = dantic.Field(
        1e-3, gt=0.0, description="Cauchy tail threshold.", env=_field_env_key("cauchy_threshold")
    )
    algebra_threshold: t.Optional[float] = dantic.Field(
        None,
        ge=0.0,
        description="Allowed ⋄ algebra defect; unset means max(1e-9, 2.5·eps).",
        env=_field_env_key("algebra_threshold"),
    )
    seed: int = dantic.Field(
        0, ge=0, le=2**64 - 1, description="Seed for every random draw.", env=_field_env_key("seed")
    )
    out: str = dantic.Field("bohrlab-out", description="Output directory.", env=_field_env_key("out"))
    threads: int = dantic.Field(
        1, ge=1, description="Worker threads; affects speed, never results.", env=_field_env_key("threads")
    )

    def model_dump(self) -> DictStrAny:
        return bohrlab_cattr.unstructure(self)

    @classmethod
    def model_construct_env(cls, file_values: DictStrAny | None = None, **overrides: t.Any) -> ExperimentConfig:
        """Merge env vars, config file values and overrides (in that order) and structure the result."""
        env_values = {
            field.name: env_converter(os.environ[field.metadata["env"]])
            for field in attr.fields(cls)
            if field.metadata.get("env") in os.environ
        }
        cli_values = {k: v for k, v in overrides.items() if v is not None and v != ()}
        merged: DictStrAny = {}
        for layer in (env_values, file_values or {}, cli_values):
            merged = config_merger.merge(merged, _normalise(cls, layer))
        try:
            config = bohrlab_cattr.structure(merged, cls)
        except ConfigError:
            raise
        except (cattrs.BaseValidationError, ValueError, TypeError) as err:
            raise ConfigError(f"Invalid experiment configuration: {_describe(err)}") from err
        if config.experiment is None:
            raise ConfigError("No experiment given; set 'experiment = <name>' in the config file.")
        return config

    @classmethod
    def to_click_options(cls, f: t.Callable[P, O_co]) -> F[P, ClickFunctionWrapper[P, O_co]]:
        """Convert the config fields to grouped click options, usable as a decorator for click commands."""
        for name, field in attr.fields_dict(cls).items():
            f = dantic.attrs_to_options(name, field)(f)
        return cog.optgroup.group(f"{cls.__name__} overrides")(f)


attr.resolve_types(ExperimentConfig)


def _normalise(cls: type[ExperimentConfig], values: DictStrAny) -> DictStrAny:
    fields = attr.fields_dict(cls)
    out: DictStrAny = {}
    for key, value in values.items():
        name = inflection.underscore(key)
        if name not in fields:
            raise ConfigError(f"Unknown config key '{key}'; valid keys are {', '.join(fields)}.")
        if dantic.is_container(fields[name].type):
            if isinstance(value, str):
                value = [env_converter(v.strip()) for v in value.split(",") if v.strip()]
            elif isinstance(value, tuple):
                value = list(value)
            elif not isinstance(value, list):
                value = [value]
        out[name] = value
    return out


def _describe(err: BaseException) -> str:
    if isinstance(err, cattrs.BaseValidationError):
        return "; ".join(_describe(e) for e in err.exceptions)
    return str(err)


def load_config_file(path: str) -> DictStrAny:
    """Read ``key = value`` lines; ``#`` starts a comment and values are JSON-decoded when possible."""
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as err:
        raise ConfigError(f"Cannot read config file '{path}': {err}") from err
    valid = attr.fields_dict(ExperimentConfig)
    values: DictStrAny = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = inflection.underscore(key.strip())
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got '{raw.strip()}'.")
        if key not in valid:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}'; valid keys are {', '.join(valid)}.")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: '{key}' is set twice.")
        values[key] = env_converter(value.strip())
    logger.debug("read %d keys from %s", len(values), path)
    return values
