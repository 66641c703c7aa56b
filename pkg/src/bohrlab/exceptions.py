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
Base exceptions for bohrlab. Every exception knows the process exit code the CLI should use.
"""
from __future__ import annotations

import typing as t


class BohrLabException(Exception):
    """Base class for all bohrlab exceptions."""

    exit_code: t.ClassVar[int] = 1

    def __init__(self, message: str = ""):
        self.message = message or self.__class__.__doc__ or ""
        super().__init__(self.message)


class ConfigError(BohrLabException):
    """Raised when an experiment config cannot be read or resolved."""

    exit_code = 2


class ValidationError(BohrLabException):
    """Raised when a validation fails."""

    exit_code = 3


class PreconditionError(BohrLabException):
    """Raised when the precondition of an operation is not met."""

    exit_code = 3

    def __init__(self, message: str = "", details: dict[str, t.Any] | None = None):
        super().__init__(message)
        self.details = details if details is not None else {}


class ResolutionError(BohrLabException):
    """Raised when the configured window or precision cannot resolve a request."""

    exit_code = 3


class ResourceError(BohrLabException):
    """Raised when a window grows past the configured maximum size."""

    exit_code = 3


class UnsupportedFamilyError(BohrLabException):
    """Raised when an operation is not defined for a semigroup family."""

    exit_code = 3


class OutOfNetError(BohrLabException):
    """Raised when a point lies farther than eps from every net point."""

    exit_code = 3


class NumericError(BohrLabException):
    """Raised on numeric non-convergence. Carries the residual history."""

    exit_code = 4

    def __init__(self, message: str = "", history: t.Sequence[float] = ()):
        super().__init__(message)
        self.history = list(history)


class ForbiddenAttributeError(BohrLabException):
    """Raised when using an _internal field."""
