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
Utilities function for bohrlab. User can import these function for convenience, but
we won't ensure backward compatibility for these functions. So use with caution.
"""
from __future__ import annotations as _annotations

import logging
import logging.config
import os
import sys
import types
import typing as t

import cattrs

from .lazy import LazyModule


logger = logging.getLogger(__name__)

if sys.version_info < (3, 10):
    _WithArgsTypes: t.Any = ()
else:
    _WithArgsTypes: t.Any = (
        t._GenericAlias,  # type: ignore (_GenericAlias is the actual GenericAlias implementation)
        types.GenericAlias,
        types.UnionType,
    )


def lenient_issubclass(cls: t.Any, class_or_tuple: type[t.Any] | tuple[type[t.Any], ...] | None) -> bool:
    try:
        return isinstance(cls, type) and issubclass(cls, class_or_tuple)  # type: ignore[arg-type]
    except TypeError:
        if isinstance(cls, _WithArgsTypes):
            return False
        raise


DEBUG = sys.flags.dev_mode or (not sys.flags.ignore_environment and bool(os.environ.get("BOHRLABDEVDEBUG")))

# Shared converter for config structuring and report unstructuring.
bohrlab_cattr = cattrs.Converter()

# Upper bound on enumerated window sizes, shared by every semigroup family.
MAX_WINDOW_ELEMENTS = int(os.environ.get("BOHRLAB_MAX_WINDOW_ELEMENTS", 1 << 22))

_QUIET_MODE = False
_DEBUG_MODE = False


def set_quiet_mode(enabled: bool = True) -> None:
    global _QUIET_MODE
    _QUIET_MODE = enabled


def set_debug_mode(enabled: bool = True) -> None:
    global _DEBUG_MODE
    _DEBUG_MODE = enabled


def get_quiet_mode() -> bool:
    return _QUIET_MODE


def get_debug_mode() -> bool:
    return _DEBUG_MODE


_LOGGING_CONFIG: dict[str, t.Any] = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {"format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s"},
    },
    "handlers": {
        "defaulthandler": {
            "class": "logging.StreamHandler",
            "formatter": "default",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "bohrlab": {
            "level": logging.INFO,
            "handlers": ["defaulthandler"],
            "propagate": False,
        },
    },
    "root": {"level": logging.WARNING},
}


def configure_logging() -> None:
    if get_quiet_mode():
        _LOGGING_CONFIG["loggers"]["bohrlab"]["level"] = logging.ERROR
        _LOGGING_CONFIG["root"]["level"] = logging.ERROR
    elif get_debug_mode() or DEBUG:
        _LOGGING_CONFIG["loggers"]["bohrlab"]["level"] = logging.DEBUG
        _LOGGING_CONFIG["root"]["level"] = logging.DEBUG
    else:
        _LOGGING_CONFIG["loggers"]["bohrlab"]["level"] = logging.INFO
        _LOGGING_CONFIG["root"]["level"] = logging.WARNING

    logging.config.dictConfig(_LOGGING_CONFIG)


# XXX: define all classes, functions import above this line
# since _extras will be the locals() import from this file.
_extras: dict[str, t.Any] = {
    k: v for k, v in locals().items() if not isinstance(v, types.ModuleType) and not k.startswith("_")
}

_import_structure: dict[str, list[str]] = {
    "dantic": [],
    "lazy": ["LazyModule"],
}

if t.TYPE_CHECKING:
    from . import DEBUG as DEBUG
    from . import MAX_WINDOW_ELEMENTS as MAX_WINDOW_ELEMENTS
    from . import bohrlab_cattr as bohrlab_cattr
    from . import configure_logging as configure_logging
    from . import dantic as dantic
    from . import get_debug_mode as get_debug_mode
    from . import get_quiet_mode as get_quiet_mode
    from . import lenient_issubclass as lenient_issubclass
    from . import set_debug_mode as set_debug_mode
    from . import set_quiet_mode as set_quiet_mode
    from .lazy import LazyModule as LazyModule
else:
    sys.modules[__name__] = LazyModule(
        __name__,
        globals()["__file__"],
        _import_structure,
        module_spec=__spec__,
        extra_objects=_extras,
    )
