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
"""Aliases for annotations only: numpy coordinate arrays and click-decorated callables."""
from __future__ import annotations

import typing as t

if not t.TYPE_CHECKING:
    raise RuntimeError(f"{__name__} is for type checkers; import it under 'if t.TYPE_CHECKING:'")

import click
import numpy as np
import numpy.typing as npt

P = t.ParamSpec("P")
O_co = t.TypeVar("O_co", covariant=True)

# rows are points or semigroup coordinates
FloatArray = npt.NDArray[np.float64]


class ClickFunctionWrapper(t.Protocol[P, O_co]):
    """A command callback after click has attached its options."""

    __name__: str
    __click_params__: list[click.Option]

    def __call__(self, *args: P.args, **kwargs: P.kwargs) -> O_co:
        ...


F = ClickFunctionWrapper
