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
"""Lazy top-level package: names resolve to their submodule on first access."""
from __future__ import annotations

import importlib
import importlib.machinery
import os
import types
import typing as t

from ..exceptions import BohrLabException
from ..exceptions import ForbiddenAttributeError


class UsageNotAllowedError(BohrLabException):
    """The package was indexed like a dict but declares no shortcuts."""


class MissingAttributesError(BohrLabException):
    """The requested shortcut is not declared."""


SHORTCUTS_KEY = "__bohrlab_special__"


class LazyModule(types.ModuleType):
    """
    Stand-in for the ``bohrlab`` package module.

    ``import_structure`` maps a submodule to the public names it defines; a name is imported
    from its submodule the first time it is looked up and then cached on the module.
    ``extra_objects`` are served as is; its ``__bohrlab_special__`` entry maps shortcut keys to
    public names, so that ``bohrlab["system"]`` is ``bohrlab.AutoSystem``.
    """

    def __init__(
        self,
        name: str,
        module_file: str,
        import_structure: dict[str, list[str]],
        module_spec: importlib.machinery.ModuleSpec | None = None,
        extra_objects: dict[str, t.Any] | None = None,
    ):
        super().__init__(name)
        self._import_structure = import_structure
        self._owner = {public: module for module, names in import_structure.items() for public in names}
        self._objects = dict(extra_objects or {})
        self._shortcuts: dict[str, str] = self._objects.pop(SHORTCUTS_KEY, {})
        self.__all__ = [*import_structure, *self._owner]
        self.__file__ = module_file
        self.__spec__ = module_spec
        self.__path__ = [os.path.dirname(module_file)]

    def __dir__(self):
        return sorted({*super().__dir__(), *self.__all__})

    def __getitem__(self, key: str) -> t.Any:
        if not self._shortcuts:
            raise UsageNotAllowedError(f"'{self.__name__}' cannot be indexed.")
        if key not in self._shortcuts:
            raise MissingAttributesError(f"No shortcut '{key}' in '{self.__name__}'; known: {sorted(self._shortcuts)}.")
        return getattr(self, self._shortcuts[key])

    def __getattr__(self, name: str) -> t.Any:
        if name == SHORTCUTS_KEY:
            raise ForbiddenAttributeError(f"'{name}' is reserved by {self.__name__}.")
        if name in self._objects:
            return self._objects[name]
        if name in self._import_structure:
            value: t.Any = self._load(name)
        elif name in self._owner:
            value = getattr(self._load(self._owner[name]), name)
        else:
            raise AttributeError(f"module {self.__name__} has no attribute {name}")
        setattr(self, name, value)
        return value

    def _load(self, submodule: str) -> types.ModuleType:
        try:
            return importlib.import_module(f".{submodule}", self.__name__)
        except Exception as err:
            raise RuntimeError(f"Failed to import {self.__name__}.{submodule}: {err}") from err

    def __reduce__(self):
        return (self.__class__, (self.__name__, self.__file__, self._import_structure))
