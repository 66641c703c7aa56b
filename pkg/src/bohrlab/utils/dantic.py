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
"""Pydantic-flavoured field declarations on top of attrs, plus their click projection."""

from __future__ import annotations

import typing as t

import attr
import click
import click_option_group as cog
import inflection
import orjson
from click import ParamType

from ..exceptions import ConfigError


if t.TYPE_CHECKING:
    from attr import _ValidatorType

    from .._types import ClickFunctionWrapper

_T = t.TypeVar("_T")


def attrs_to_options(
    name: str,
    field: attr.Attribute[t.Any],
    typ: type[t.Any] | None = None,
) -> t.Callable[..., ClickFunctionWrapper[..., t.Any]]:
    """Project one config field onto a grouped click option.

    Options never carry the field default: a missing option means "keep what the
    config file (or env) says", so every option defaults to None.
    """
    dasherized = inflection.dasherize(name)
    underscored = inflection.underscore(name)

    if typ in (None, attr.NOTHING):
        typ = field.type

    return cog.optgroup.option(
        underscored,
        f"--{dasherized}",
        type=parse_type(typ),
        required=False,
        default=None,
        multiple=allows_multiple(typ),
        help=field.metadata.get("description", "(No description provided)"),
    )


def env_converter(value: t.Any) -> t.Any:
    """JSON-decode strings coming from env vars, config files and tags; plain strings are kept."""
    if value is not None and isinstance(value, str):
        try:
            return orjson.loads(value)
        except orjson.JSONDecodeError:
            # plain strings (tags, paths) are kept verbatim
            return value
    return value


def Field(
    default: t.Any = None,
    *,
    ge: int | float | None = None,
    le: int | float | None = None,
    gt: int | float | None = None,
    validator: _ValidatorType[_T] | None = None,
    description: str | None = None,
    env: str | None = None,
    **attrs: t.Any,
):
    """A decorator that extends attr.field with additional arguments, which provides the same
    interface as pydantic's Field.

    Bounds (ge, le, gt) are piped first, then the given validator runs.

    Args:
        ge: Greater than or equal to. Defaults to None.
        le: Less than or equal to. Defaults to None.
        gt: Strictly greater than. Defaults to None.
        description: the documentation for the field. Defaults to None.
        env: the environment variable that may carry this field. Defaults to None.
        **attrs: The rest of the arguments are passed to attr.field
    """
    metadata = attrs.pop("metadata", {})
    metadata["description"] = description if description is not None else "(No description provided)"
    if env is not None:
        metadata["env"] = env
    piped: list[_ValidatorType[t.Any]] = []

    if ge is not None:
        piped.append(_optional(attr.validators.ge(ge)))
    if le is not None:
        piped.append(_optional(attr.validators.le(le)))
    if gt is not None:
        piped.append(_optional(attr.validators.gt(gt)))
    if validator is not None:
        piped.append(validator)

    if len(piped) == 0:
        _validator = None
    elif len(piped) == 1:
        _validator = piped[0]
    else:
        _validator = attr.validators.and_(*piped)

    factory = attrs.pop("factory", None)
    if factory is not None and default is not None:
        raise RuntimeError("'factory' and 'default' are mutually exclusive.")
    if factory is not None:
        attrs["factory"] = factory
    else:
        attrs["default"] = default

    return attr.field(metadata=metadata, validator=_validator, **attrs)


def _optional(validator: _ValidatorType[t.Any]) -> _ValidatorType[t.Any]:
    return attr.validators.optional(validator)


def strictly_increasing(_: t.Any, attribute: attr.Attribute[t.Any], value: t.Sequence[float] | None) -> None:
    if value is None:
        return
    if len(value) == 0:
        raise ConfigError(f"'{attribute.name}' must not be empty.")
    if any(b <= a for a, b in zip(value, value[1:])):
        raise ConfigError(f"'{attribute.name}' must be strictly increasing, got {list(value)}.")


def parse_type(field_type: t.Any) -> ParamType | t.Any:
    """Transforms an attrs field type into a click-compatible type."""
    if is_optional(field_type):
        field_type = next(arg for arg in t.get_args(field_type) if arg is not type(None))
    if is_literal(field_type):
        return click.Choice([str(v) for v in t.get_args(field_type)], case_sensitive=True)
    if is_container(field_type):
        return parse_container_args(field_type)
    return field_type


def is_optional(field_type: t.Any) -> bool:
    args = t.get_args(field_type)
    return len(args) == 2 and type(None) in args


def is_literal(field_type: t.Any) -> bool:
    """Literals are weird: isinstance and subclass do not work, so you compare
    the origin with the Literal declaration itself.
    """
    origin = t.get_origin(field_type)
    return origin is not None and origin is t.Literal


def allows_multiple(field_type: t.Any) -> bool:
    """Containers map onto repeated options: `--windows 1024 --windows 2048` becomes `windows: [1024, 2048]`."""
    if is_optional(field_type):
        field_type = next(arg for arg in t.get_args(field_type) if arg is not type(None))
    return is_container(field_type)


def is_container(field_type: t.Any) -> bool:
    from . import lenient_issubclass

    if field_type in (str, bytes):
        return False
    if lenient_issubclass(field_type, t.Container):
        return True
    origin = t.get_origin(field_type)
    if origin is None:
        return False
    return lenient_issubclass(origin, t.Container)


def parse_container_args(field_type: t.Any) -> t.Any:
    args = t.get_args(field_type)
    # untyped containers fall back to strings, avoiding click's type guessing
    if len(args) == 0 or args[0] is t.Any:
        return str
    return args[0]
