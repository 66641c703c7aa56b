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
Tag registries for semigroups and action systems.

A tag is ``name`` or ``name:key=value,key=value``; values are JSON-decoded when possible. Names are
normalised with ``inflection.underscore`` so that ``zbarplus-space`` and ``zbarplus_space`` agree.
"""
from __future__ import annotations

import importlib
import logging
import types
import typing as t
from collections import OrderedDict

import attr
import cattrs
import inflection
import numpy as np

from .exceptions import ConfigError
from .exceptions import ValidationError
from .utils import bohrlab_cattr
from .utils.dantic import env_converter


if t.TYPE_CHECKING:
    from collections import _odict_items
    from collections import _odict_keys
    from collections import _odict_values

    from .semigroup import SemigroupDescriptor
    from .space_action import ActionSystem

    RegistryOrderedDict = OrderedDict[str, type[t.Any]]

    RegistryKeysView = _odict_keys[str, type[t.Any]]
    RegistryValuesView = _odict_values[str, type[t.Any]]
    RegistryItemsView = _odict_items[str, type[t.Any]]
else:
    RegistryKeysView = RegistryValuesView = RegistryItemsView = t.Any
    RegistryOrderedDict = OrderedDict

logger = logging.getLogger(__name__)

# NOTE: This is the entrypoint when adding a new semigroup family
SEMIGROUP_MAPPING_NAMES = OrderedDict(
    [
        ("zplus", "ZPlusD"),
        ("rplusgrid", "RPlusGrid"),
        ("zbarplus", "ZbarPlus"),
        ("matnn", "NonnegIntMatrix"),
        ("finite", "FiniteTable"),
    ]
)

SYSTEM_MAPPING_NAMES = OrderedDict(
    [
        ("torus", "TorusTranslation"),
        ("zbarplus_space", "ZbarPlusTranslation"),
        ("doubling", "DoublingMap"),
        ("finite", "FiniteAction"),
    ]
)

# built-in finite tables: tag name -> (parameter, FiniteTable constructor)
FINITE_TABLE_BUILDERS: dict[str, tuple[str, str]] = {
    "cyclic": ("n", "cyclic"),
    "truncated_add": ("m", "truncated_addition"),
    "truncated_zbarplus": ("N", "truncated_zbarplus"),
}

# short parameter names accepted in tags
PARAM_ALIASES: dict[str, str] = {
    "T": "horizon",
    "N": "cutoff",
    "W": "window_width",
    "max": "max_entry",
}


class _LazyRegistryMapping(RegistryOrderedDict):
    def __init__(self, mapping: OrderedDict[str, str], module: str):
        self._mapping = mapping
        self._module_name = module
        self._extra_content: dict[str, t.Any] = {}
        self._module: types.ModuleType | None = None

    def __getitem__(self, key: str):
        if key in self._extra_content:
            return self._extra_content[key]
        if key not in self._mapping:
            raise KeyError(key)
        if self._module is None:
            self._module = importlib.import_module(self._module_name, "bohrlab")
        return getattr(self._module, self._mapping[key])

    def keys(self):
        return t.cast(RegistryKeysView, list(self._mapping.keys()) + list(self._extra_content.keys()))

    def values(self):
        return t.cast(RegistryValuesView, [self[k] for k in self._mapping.keys()] + list(self._extra_content.values()))

    def items(self):
        items = [(k, self[k]) for k in self._mapping.keys()]
        return t.cast(RegistryItemsView, items + list(self._extra_content.items()))

    def __iter__(self):
        return iter(list(self._mapping.keys()) + list(self._extra_content.keys()))

    def __contains__(self, item: t.Any):
        return item in self._mapping or item in self._extra_content

    def __len__(self) -> int:
        return len(self._mapping) + len(self._extra_content)

    def register(self, key: str, value: t.Any):
        """Register a new entry in this mapping."""
        key = inflection.underscore(key)
        if key in self._mapping.keys() or key in self._extra_content:
            raise ValueError(f"'{key}' is already used by a bohrlab registry entry, pick another name.")
        self._extra_content[key] = value


SEMIGROUP_MAPPING: dict[str, type[SemigroupDescriptor]] = _LazyRegistryMapping(SEMIGROUP_MAPPING_NAMES, ".semigroup")
SYSTEM_MAPPING: dict[str, type[ActionSystem]] = _LazyRegistryMapping(SYSTEM_MAPPING_NAMES, ".space_action")


@attr.frozen
class ParsedTag:
    name: str
    params: t.Dict[str, t.Any] = attr.field(factory=dict)
    source: t.Optional[str] = None


def parse_tag(tag: str) -> ParsedTag:
    """Split ``name:k=v,...`` (or ``name:<source>``) into a normalised name and decoded parameters."""
    if not isinstance(tag, str) or not tag.strip():
        raise ConfigError(f"Empty or non-string tag: {tag!r}.")
    head, _, rest = tag.strip().partition(":")
    name = inflection.underscore(head.strip())
    rest = rest.strip()
    if not rest:
        return ParsedTag(name)
    if "=" not in rest:
        return ParsedTag(name, source=rest)
    params: dict[str, t.Any] = {}
    for item in rest.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Malformed parameter '{item}' in tag '{tag}'.")
        params[key.strip()] = env_converter(value.strip())
    return ParsedTag(name, params)


def _structure(cls: type[t.Any], params: dict[str, t.Any], tag: str) -> t.Any:
    params = {PARAM_ALIASES.get(k, k): v for k, v in params.items()}
    accepted = {a.name for a in attr.fields(cls) if a.init}
    unknown = sorted(set(params) - accepted)
    if unknown:
        raise ConfigError(
            f"Unknown parameter(s) {unknown} in tag '{tag}'; '{cls.__name__}' accepts {sorted(accepted)}."
        )
    attr.resolve_types(cls)
    try:
        return bohrlab_cattr.structure(params, cls)
    except (cattrs.BaseValidationError, ValueError, TypeError) as err:
        raise ConfigError(f"Invalid parameters in tag '{tag}': {err}") from err


class AutoSemigroup:
    def __init__(self, *_: t.Any, **__: t.Any):
        raise EnvironmentError("Cannot instantiate AutoSemigroup. Please use `AutoSemigroup.for_tag(tag)` instead.")

    @classmethod
    def for_tag(cls, tag: str) -> SemigroupDescriptor:
        """Resolve a semigroup tag such as ``zplus:d=2``, ``zbarplus:N=50``, ``cyclic:n=5`` or ``finite:table.csv``."""
        parsed = parse_tag(tag)
        if parsed.name in FINITE_TABLE_BUILDERS:
            return cls._builtin_table(parsed, tag)
        if parsed.name not in SEMIGROUP_MAPPING:
            raise ConfigError(
                f"Unrecognized semigroup tag '{tag}'. "
                f"Tag name should be one of {', '.join([*SEMIGROUP_MAPPING.keys(), *FINITE_TABLE_BUILDERS])}."
            )
        klass = SEMIGROUP_MAPPING[parsed.name]
        if parsed.name == "finite":
            if parsed.source is None:
                raise ConfigError(f"'{tag}' must name an operation table file, as in 'finite:table.csv'.")
            try:
                return klass.from_csv(parsed.source)
            except ValidationError as err:
                raise ConfigError(err.message) from err
        if parsed.source is not None:
            raise ConfigError(f"Tag '{tag}' takes key=value parameters.")
        return _structure(klass, parsed.params, tag)

    @staticmethod
    def _builtin_table(parsed: ParsedTag, tag: str) -> SemigroupDescriptor:
        from .semigroup import FiniteTable

        param, constructor = FINITE_TABLE_BUILDERS[parsed.name]
        unknown = sorted(set(parsed.params) - {param})
        if unknown or param not in parsed.params:
            raise ConfigError(f"Built-in table '{tag}' takes exactly one parameter '{param}'.")
        size = parsed.params[param]
        if not isinstance(size, int) or size < 1:
            raise ConfigError(f"'{param}' must be a positive integer in '{tag}', got {size!r}.")
        return getattr(FiniteTable, constructor)(size)


def _frequency(value: t.Any, tag: str) -> float:
    from .space_action import NAMED_FREQUENCIES

    if isinstance(value, str):
        if value not in NAMED_FREQUENCIES:
            raise ConfigError(
                f"Unknown frequency '{value}' in '{tag}'; use a number or one of {sorted(NAMED_FREQUENCIES)}."
            )
        return NAMED_FREQUENCIES[value]
    try:
        return float(value)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"Frequency {value!r} in '{tag}' is not a number.") from err


class AutoSystem:
    def __init__(self, *_: t.Any, **__: t.Any):
        raise EnvironmentError(
            "Cannot instantiate AutoSystem. Please use `AutoSystem.for_tag(tag, semigroup)` instead."
        )

    @classmethod
    def for_tag(cls, tag: str, semigroup: SemigroupDescriptor) -> ActionSystem:
        """Resolve an action tag against a semigroup; ``a+b`` builds the diagonal product of ``a`` and ``b``."""
        from .space_action import ProductAction

        parts = [p for p in tag.split("+") if p.strip()]
        if len(parts) > 1:
            try:
                return ProductAction(tuple(cls.for_tag(p, semigroup) for p in parts))
            except ValidationError as err:
                raise ConfigError(err.message) from err
        parsed = parse_tag(tag)
        if parsed.name not in SYSTEM_MAPPING:
            raise ConfigError(
                f"Unrecognized system tag '{tag}'. Tag name should be one of {', '.join(SYSTEM_MAPPING.keys())}."
            )
        builder = getattr(cls, f"_build_{parsed.name}")
        try:
            return builder(parsed, semigroup, tag)
        except (ValidationError, ValueError, TypeError) as err:
            raise ConfigError(f"Cannot build '{tag}' on '{semigroup.tag}': {err}") from err

    @staticmethod
    def _check_params(parsed: ParsedTag, allowed: set[str], tag: str) -> None:
        unknown = sorted(set(parsed.params) - allowed)
        if unknown:
            raise ConfigError(f"Unknown parameter(s) {unknown} in '{tag}'; accepted are {sorted(allowed)}.")

    @classmethod
    def _build_torus(cls, parsed: ParsedTag, semigroup: SemigroupDescriptor, tag: str) -> ActionSystem:
        from .space_action import Torus

        cls._check_params(parsed, {"k", "alpha"}, tag)
        k = parsed.params.get("k", 1)
        matrix = None
        if "alpha" in parsed.params:
            alpha = parsed.params["alpha"]
            # several frequencies are separated by ';' since ',' separates parameters
            values = [env_converter(v) for v in alpha.split(";")] if isinstance(alpha, str) else [alpha]
            matrix = np.asarray([_frequency(v, tag) for v in values])
            expected = getattr(semigroup, "d", 1) * k
            if matrix.size != expected:
                raise ConfigError(f"'{tag}' needs {expected} frequencies for a d×k translation matrix.")
        return SYSTEM_MAPPING["torus"](semigroup, Torus(k), matrix)

    @classmethod
    def _build_zbarplus_space(cls, parsed: ParsedTag, semigroup: SemigroupDescriptor, tag: str) -> ActionSystem:
        from .space_action import ZbarPlusSpace

        cls._check_params(parsed, {"N", "cutoff"}, tag)
        cutoff = parsed.params.get("N", parsed.params.get("cutoff", getattr(semigroup, "cutoff", 100)))
        return SYSTEM_MAPPING["zbarplus_space"](semigroup, ZbarPlusSpace(cutoff))

    @classmethod
    def _build_doubling(cls, parsed: ParsedTag, semigroup: SemigroupDescriptor, tag: str) -> ActionSystem:
        from .space_action import DyadicCircle

        cls._check_params(parsed, {"bits"}, tag)
        return SYSTEM_MAPPING["doubling"](semigroup, DyadicCircle(parsed.params.get("bits", 65536)))

    @classmethod
    def _build_finite(cls, parsed: ParsedTag, semigroup: SemigroupDescriptor, tag: str) -> ActionSystem:
        from .semigroup import FiniteTable

        cls._check_params(parsed, set(), tag)
        if not isinstance(semigroup, FiniteTable):
            raise ConfigError(f"'{tag}' is the regular action of a finite table, not of '{semigroup.tag}'.")
        return SYSTEM_MAPPING["finite"].regular(semigroup)


# (kind, tag, description), the body of `bohrlab list`
_BUILTINS: list[tuple[str, str, str]] = [
    ("semigroup", "zplus:d=1", "nonnegative integer vectors under addition"),
    ("semigroup", "rplusgrid:h=0.015625,T=64", "nonnegative reals on a uniform time grid"),
    ("semigroup", "zbarplus:N=100", "compactified naturals {0, 1, ..., INF}"),
    ("semigroup", "matnn:n=2,max=1", "nonsingular nonnegative integer matrices (non-abelian)"),
    ("semigroup", "finite:<table.csv>", "finite semigroup from an operation table"),
    ("semigroup", "cyclic:n=5", "cyclic group table"),
    ("semigroup", "truncated-add:m=10", "{0..m} with min(s + t, m)"),
    ("semigroup", "truncated-zbarplus:N=20", "{0..N, INF} with sums beyond N sent to INF"),
    ("space", "torus:k=1", "k-torus with the max circle metric"),
    ("space", "zbarplus-space:N=100", "compactified naturals with |1/(a+1) - 1/(b+1)|"),
    ("space", "dyadic-circle:bits=65536", "circle of exact dyadic rationals"),
    ("space", "finite", "finite metric space (discrete metric by default)"),
    ("space", "product", "max-metric product of spaces"),
    ("action", "torus:k=1,alpha=golden", "golden rotation x + n·alpha mod 1"),
    ("action", "torus:k=1,alpha=sqrt2", "rotation by sqrt(2) - 1"),
    ("action", "zbarplus-space:N=100", "compactified naturals acting by addition"),
    ("action", "doubling:bits=65536", "doubling map 2^n·x mod 1 (non-equicontinuous)"),
    ("action", "finite", "left-regular action of a finite table"),
    ("action", "<a>+<b>", "diagonal product of two actions"),
    ("folner", "cube", "[0, n)^d"),
    ("folner", "grid-cube", "[0, n)^d on a time grid"),
    ("folner", "jr", "{n^2, ..., n^2 + n}, Følner but not Shulman"),
    ("family", "characters", "cos and sin of 2πk·x, |k| ≤ k_max"),
    ("family", "arcs", "indicators of arcs with null boundaries"),
    ("family", "landmarks", "min(1, d(·, p)/r) for seeded landmarks p"),
    ("phi", "one", "constant 1"),
    ("phi", "cos", "cos 2πx on the first coordinate"),
    ("phi", "sin", "sin 2πx on the first coordinate"),
    ("phi", "dist-inf", "1/(x + 1) on the compactified naturals"),
    ("phi", "arc:a,b", "indicator of [a, b)"),
]


def list_systems() -> list[tuple[str, str, str]]:
    """Stable, sorted listing of the built-in semigroups, spaces, actions, Følner kinds and test functions."""
    return sorted(_BUILTINS)
