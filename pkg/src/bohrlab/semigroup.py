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
Semigroup families
==================

Concrete semigroups with composition, identity, finite windows and quasi-Haar measures:

* ``ZPlusD``: the additive semigroup of nonnegative integer vectors in dimension d.
* ``RPlusGrid``: nonnegative reals on a uniform grid of step h (payloads are integer multiples of h).
* ``ZbarPlus``: the one-point compactification of the nonnegative integers, with ``INF`` absorbing.
* ``NonnegIntMatrix``: nonsingular nonnegative integer matrices under multiplication (non-abelian demo).
* ``FiniteTable``: any finite semigroup given by its operation table.

Elements are immutable ``SemigroupElement`` values tagged with their family, so that mixing
families is caught at composition time.
"""
from __future__ import annotations

import abc
import csv
import enum
import itertools
import logging
import math
import operator
import typing as t

import attr
import numpy as np

from .exceptions import ResolutionError
from .exceptions import ResourceError
from .exceptions import UnsupportedFamilyError
from .exceptions import ValidationError
from .utils import MAX_WINDOW_ELEMENTS


if t.TYPE_CHECKING:
    from ._types import FloatArray

logger = logging.getLogger(__name__)

INF: t.Final[float] = math.inf

Payload = t.Any


class Family(enum.Enum):
    ZPLUS_D = "zplus"
    RPLUS_GRID = "rplusgrid"
    ZBAR_PLUS = "zbarplus"
    NONNEG_INT_MATRIX = "matnn"
    FINITE_TABLE = "finite"


@attr.frozen(repr=False)
class SemigroupElement:
    family: Family
    payload: Payload

    def __repr__(self) -> str:
        return f"{self.family.value}:{_format_payload(self.payload)}"

    def coordinates(self) -> tuple[float, ...]:
        """Flat numeric coordinates, used for CSV and JSON exports."""
        return tuple(float(v) for v in _flatten(self.payload))


def _flatten(payload: Payload) -> tuple[t.Any, ...]:
    if isinstance(payload, tuple):
        return tuple(itertools.chain.from_iterable(_flatten(p) for p in payload))
    return (payload,)


def _format_payload(payload: Payload) -> str:
    if isinstance(payload, float) and math.isinf(payload):
        return "INF"
    return str(payload)


@attr.frozen
class WindowSpec:
    """Finite truncation of a semigroup.

    ``bound`` is family specific: the box radius W for ``ZPlusD`` (the box [0, W)^d), the number of
    grid steps for ``RPlusGrid``, the cutoff N for ``ZbarPlus`` ({0, ..., N-1, INF}) and the largest
    entry for ``NonnegIntMatrix``. ``explicit`` lists payloads directly.
    """

    bound: t.Optional[int] = attr.field(default=None)
    explicit: t.Optional[t.Tuple[Payload, ...]] = attr.field(default=None)

    @bound.validator
    def _check_bound(self, _: attr.Attribute[t.Any], value: int | None) -> None:
        if value is not None and value <= 0:
            raise ValidationError(f"Window bound must be positive, got {value}.")

    def __attrs_post_init__(self) -> None:
        if (self.bound is None) == (self.explicit is None):
            raise ValidationError("A window needs exactly one of 'bound' or 'explicit'.")

    @classmethod
    def box(cls, width: int) -> WindowSpec:
        return cls(bound=width)

    @classmethod
    def cutoff(cls, n: int) -> WindowSpec:
        return cls(bound=n)

    @classmethod
    def horizon(cls, horizon: float, h: float) -> WindowSpec:
        return cls(bound=max(1, int(round(horizon / h))))

    @classmethod
    def of(cls, payloads: t.Iterable[Payload]) -> WindowSpec:
        return cls(explicit=tuple(payloads))


@attr.define(slots=True)
class AlgebraWitness:
    """Outcome of an exhaustive law check on a window, with the first violating tuple if any."""

    holds: bool
    checked: int
    witness: t.Optional[t.Tuple[SemigroupElement, ...]] = None


@attr.define(slots=True)
class InjectivityReport:
    injective: bool
    witness: t.Optional[t.Tuple[SemigroupElement, SemigroupElement, SemigroupElement]] = None


@attr.define(slots=True)
class GroupInverse:
    """Inverse of an element inside the enveloping group."""

    element: SemigroupElement
    inverse: t.Any
    in_semigroup: bool


class SemigroupDescriptor(abc.ABC):
    """A concrete semigroup family: composition, identity, windows and vectorised helpers."""

    family: t.ClassVar[Family]
    compact: t.ClassVar[bool] = False
    group_embeddable: t.ClassVar[bool] = False

    @property
    def abelian(self) -> bool:
        return True

    @property
    def tag(self) -> str:
        return self.family.value

    @property
    @abc.abstractmethod
    def identity(self) -> SemigroupElement:
        ...

    @abc.abstractmethod
    def _validate(self, payload: Payload) -> Payload:
        """Return the canonical payload or raise ValidationError."""

    @abc.abstractmethod
    def _compose(self, p: Payload, q: Payload) -> Payload:
        ...

    @abc.abstractmethod
    def _window_size(self, window: WindowSpec) -> int:
        ...

    @abc.abstractmethod
    def _enumerate(self, window: WindowSpec) -> list[Payload]:
        ...

    @abc.abstractmethod
    def default_window(self) -> WindowSpec:
        ...

    @abc.abstractmethod
    def preimage_window(self, g: SemigroupElement, elements: t.Sequence[SemigroupElement]) -> WindowSpec:
        """A window guaranteed to contain every t with g∘t in ``elements``."""

    def element(self, payload: Payload) -> SemigroupElement:
        return SemigroupElement(self.family, self._validate(payload))

    def check_member(self, g: SemigroupElement) -> SemigroupElement:
        if not isinstance(g, SemigroupElement) or g.family is not self.family:
            raise ValidationError(f"{g!r} does not belong to the '{self.tag}' family.")
        return g

    def compose(self, g: SemigroupElement, h: SemigroupElement) -> SemigroupElement:
        self.check_member(g)
        self.check_member(h)
        return SemigroupElement(self.family, self._compose(g.payload, h.payload))

    def enumerate_window(self, window: WindowSpec | None = None) -> list[SemigroupElement]:
        window = window if window is not None else self.default_window()
        if window.explicit is not None:
            size = len(window.explicit)
        else:
            size = self._window_size(window)
        if size > MAX_WINDOW_ELEMENTS:
            raise ResourceError(
                f"Window of {size} elements exceeds the maximum of {MAX_WINDOW_ELEMENTS} for '{self.tag}'."
            )
        if window.explicit is not None:
            payloads = sorted({self._validate(p) for p in window.explicit}, key=self._sort_key)
        else:
            payloads = self._enumerate(window)
        return [SemigroupElement(self.family, p) for p in payloads]

    def _sort_key(self, payload: Payload) -> t.Any:
        return payload

    # vectorised helpers, used by actions and the Følner machinery
    def as_array(self, elements: t.Sequence[SemigroupElement]) -> np.ndarray[t.Any, t.Any]:
        raise NotImplementedError(f"'{self.tag}' has no array representation.")

    def compose_array(self, g: SemigroupElement, array: np.ndarray[t.Any, t.Any]) -> np.ndarray[t.Any, t.Any]:
        """Rows of ``array`` are element coordinates; returns the coordinates of g∘row."""
        raise NotImplementedError(f"'{self.tag}' has no array representation.")

    def from_array(self, array: np.ndarray[t.Any, t.Any]) -> list[SemigroupElement]:
        raise NotImplementedError(f"'{self.tag}' has no array representation.")

    def group_inverse(self, g: SemigroupElement) -> GroupInverse:
        raise UnsupportedFamilyError(f"'{self.tag}' does not embed in a group.")


@attr.define(slots=True)
class ZPlusD(SemigroupDescriptor):
    """Nonnegative integer vectors under addition."""

    family: t.ClassVar[Family] = Family.ZPLUS_D
    group_embeddable: t.ClassVar[bool] = True

    d: int = attr.field(default=1, validator=attr.validators.ge(1))
    window_width: int = attr.field(default=32, validator=attr.validators.ge(1))

    @property
    def tag(self) -> str:
        return f"{self.family.value}:d={self.d}"

    @property
    def identity(self) -> SemigroupElement:
        return SemigroupElement(self.family, (0,) * self.d)

    def _validate(self, payload: Payload) -> Payload:
        if not isinstance(payload, (tuple, list, np.ndarray)):
            payload = (payload,)
        try:
            coords = tuple(operator.index(c) for c in payload)
        except TypeError as err:
            raise ValidationError(f"'{self.tag}' coordinates must be integers, got {payload!r}.") from err
        if len(coords) != self.d:
            raise ValidationError(f"'{self.tag}' expects {self.d} coordinates, got {len(coords)}.")
        if any(c < 0 for c in coords):
            raise ValidationError(f"'{self.tag}' coordinates must be nonnegative, got {coords}.")
        return coords

    def _compose(self, p: Payload, q: Payload) -> Payload:
        return tuple(a + b for a, b in zip(p, q))

    def _window_size(self, window: WindowSpec) -> int:
        assert window.bound is not None
        return window.bound**self.d

    def _enumerate(self, window: WindowSpec) -> list[Payload]:
        assert window.bound is not None
        return list(itertools.product(range(window.bound), repeat=self.d))

    def default_window(self) -> WindowSpec:
        return WindowSpec.box(self.window_width)

    def preimage_window(self, g: SemigroupElement, elements: t.Sequence[SemigroupElement]) -> WindowSpec:
        # g∘t ≥ t componentwise, so the box up to the largest coordinate of the target suffices
        top = max((max(e.payload) for e in elements), default=0)
        return WindowSpec.box(top + 1)

    def as_array(self, elements: t.Sequence[SemigroupElement]) -> np.ndarray[t.Any, t.Any]:
        return np.asarray([e.payload for e in elements], dtype=np.int64).reshape(-1, self.d)

    def compose_array(self, g: SemigroupElement, array: np.ndarray[t.Any, t.Any]) -> np.ndarray[t.Any, t.Any]:
        return array + np.asarray(self.check_member(g).payload, dtype=np.int64)

    def from_array(self, array: np.ndarray[t.Any, t.Any]) -> list[SemigroupElement]:
        rows = np.asarray(array).reshape(-1, self.d)
        return [SemigroupElement(self.family, tuple(int(c) for c in row)) for row in rows]

    def group_inverse(self, g: SemigroupElement) -> GroupInverse:
        inverse = tuple(-c for c in self.check_member(g).payload)
        return GroupInverse(g, inverse, in_semigroup=all(c == 0 for c in inverse))


@attr.define(slots=True)
class RPlusGrid(ZPlusD):
    """Nonnegative reals sampled on a uniform grid of step ``h``; payloads count grid steps."""

    family: t.ClassVar[Family] = Family.RPLUS_GRID

    h: float = attr.field(default=2.0**-6, validator=attr.validators.gt(0.0))
    horizon: float = attr.field(default=64.0, validator=attr.validators.gt(0.0))

    @property
    def tag(self) -> str:
        return f"{self.family.value}:h={self.h!r},T={self.horizon!r}"

    def default_window(self) -> WindowSpec:
        return WindowSpec.horizon(self.horizon, self.h)

    def value(self, g: SemigroupElement) -> tuple[float, ...]:
        return tuple(c * self.h for c in self.check_member(g).payload)


@attr.define(slots=True)
class ZbarPlus(SemigroupDescriptor):
    """{0, 1, 2, ..., INF} with s∘t = s + t and INF absorbing."""

    family: t.ClassVar[Family] = Family.ZBAR_PLUS
    compact: t.ClassVar[bool] = True

    cutoff: int = attr.field(default=100, validator=attr.validators.ge(1))

    @property
    def tag(self) -> str:
        return f"{self.family.value}:N={self.cutoff}"

    @property
    def identity(self) -> SemigroupElement:
        return SemigroupElement(self.family, 0)

    def _validate(self, payload: Payload) -> Payload:
        if isinstance(payload, str) and payload.strip().upper() in ("INF", "∞"):
            return INF
        if isinstance(payload, float) and math.isinf(payload) and payload > 0:
            return INF
        try:
            value = operator.index(payload)
        except TypeError as err:
            raise ValidationError(f"'{self.tag}' elements are naturals or INF, got {payload!r}.") from err
        if value < 0:
            raise ValidationError(f"'{self.tag}' elements must be nonnegative, got {value}.")
        return value

    def _compose(self, p: Payload, q: Payload) -> Payload:
        if p == INF or q == INF:
            return INF
        return p + q

    def _window_size(self, window: WindowSpec) -> int:
        assert window.bound is not None
        return window.bound + 1

    def _enumerate(self, window: WindowSpec) -> list[Payload]:
        assert window.bound is not None
        return [*range(window.bound), INF]

    def default_window(self) -> WindowSpec:
        return WindowSpec.cutoff(self.cutoff)

    def preimage_window(self, g: SemigroupElement, elements: t.Sequence[SemigroupElement]) -> WindowSpec:
        targets = [e.payload for e in elements]
        if INF in targets and self.check_member(g).payload == INF:
            raise ResolutionError("L_INF^{-1}{INF} is all of the compactified semigroup; it cannot be enumerated.")
        finite = [p for p in targets if p != INF]
        return WindowSpec.cutoff(max(finite, default=0) + 1)

    def as_array(self, elements: t.Sequence[SemigroupElement]) -> np.ndarray[t.Any, t.Any]:
        return np.asarray([float(e.payload) for e in elements], dtype=np.float64).reshape(-1, 1)

    def compose_array(self, g: SemigroupElement, array: np.ndarray[t.Any, t.Any]) -> np.ndarray[t.Any, t.Any]:
        return array + float(self.check_member(g).payload)

    def from_array(self, array: np.ndarray[t.Any, t.Any]) -> list[SemigroupElement]:
        return [self.element(INF if math.isinf(v) else int(v)) for v in np.asarray(array).ravel()]


def _integer_determinant(matrix: tuple[tuple[int, ...], ...]) -> int:
    return int(round(float(np.linalg.det(np.asarray(matrix, dtype=np.float64)))))


@attr.define(slots=True)
class NonnegIntMatrix(SemigroupDescriptor):
    """Nonsingular nonnegative integer n×n matrices under multiplication.

    Only a semigroup-level demo: it is not abelian and no action on a space is shipped.
    """

    family: t.ClassVar[Family] = Family.NONNEG_INT_MATRIX

    n: int = attr.field(default=2, validator=attr.validators.ge(1))
    max_entry: int = attr.field(default=1, validator=attr.validators.ge(1))

    @property
    def abelian(self) -> bool:
        return self.n == 1

    @property
    def tag(self) -> str:
        return f"{self.family.value}:n={self.n}"

    @property
    def identity(self) -> SemigroupElement:
        return SemigroupElement(
            self.family, tuple(tuple(int(i == j) for j in range(self.n)) for i in range(self.n))
        )

    def _validate(self, payload: Payload) -> Payload:
        try:
            rows = tuple(tuple(operator.index(v) for v in row) for row in payload)
        except TypeError as err:
            raise ValidationError(f"'{self.tag}' elements are integer matrices, got {payload!r}.") from err
        if len(rows) != self.n or any(len(row) != self.n for row in rows):
            raise ValidationError(f"'{self.tag}' expects {self.n}x{self.n} matrices.")
        if any(v < 0 for row in rows for v in row):
            raise ValidationError(f"'{self.tag}' entries must be nonnegative, got {rows}.")
        if _integer_determinant(rows) == 0:
            raise ValidationError(f"'{self.tag}' elements must be nonsingular, got {rows}.")
        return rows

    def _compose(self, p: Payload, q: Payload) -> Payload:
        product = np.asarray(p, dtype=np.int64) @ np.asarray(q, dtype=np.int64)
        return tuple(tuple(int(v) for v in row) for row in product)

    def _window_size(self, window: WindowSpec) -> int:
        assert window.bound is not None
        return (window.bound + 1) ** (self.n * self.n)

    def _enumerate(self, window: WindowSpec) -> list[Payload]:
        assert window.bound is not None
        out: list[Payload] = []
        for flat in itertools.product(range(window.bound + 1), repeat=self.n * self.n):
            rows = tuple(tuple(flat[i * self.n : (i + 1) * self.n]) for i in range(self.n))
            if _integer_determinant(rows) != 0:
                out.append(rows)
        return out

    def default_window(self) -> WindowSpec:
        return WindowSpec(bound=self.max_entry)

    def preimage_window(self, g: SemigroupElement, elements: t.Sequence[SemigroupElement]) -> WindowSpec:
        # every column of a nonsingular nonnegative g has a positive entry, so (g t)_ij ≥ t_kj
        top = max((max(max(row) for row in e.payload) for e in elements), default=1)
        return WindowSpec(bound=max(1, top))

    def as_array(self, elements: t.Sequence[SemigroupElement]) -> np.ndarray[t.Any, t.Any]:
        return np.asarray([e.payload for e in elements], dtype=np.int64).reshape(-1, self.n, self.n)

    def compose_array(self, g: SemigroupElement, array: np.ndarray[t.Any, t.Any]) -> np.ndarray[t.Any, t.Any]:
        return np.matmul(np.asarray(self.check_member(g).payload, dtype=np.int64), array)

    def from_array(self, array: np.ndarray[t.Any, t.Any]) -> list[SemigroupElement]:
        return [self.element(m.tolist()) for m in np.asarray(array).reshape(-1, self.n, self.n)]

    def group_inverse(self, g: SemigroupElement) -> GroupInverse:
        matrix = np.asarray(self.check_member(g).payload, dtype=np.float64)
        inverse = np.linalg.inv(matrix)
        rounded = np.round(inverse)
        integral = bool(np.allclose(inverse, rounded, atol=1e-9))
        values = rounded.astype(np.int64) if integral else inverse
        payload = tuple(tuple(v.item() for v in row) for row in values)
        return GroupInverse(g, payload, in_semigroup=integral and bool((values >= 0).all()))


@attr.define(slots=True)
class FiniteTable(SemigroupDescriptor):
    """A finite semigroup given by its operation table; payloads index ``names``."""

    family: t.ClassVar[Family] = Family.FINITE_TABLE
    compact: t.ClassVar[bool] = True

    names: t.Tuple[str, ...] = attr.field(converter=tuple)
    table: np.ndarray[t.Any, t.Any] = attr.field(
        converter=lambda v: np.asarray(v, dtype=np.int64), eq=attr.cmp_using(eq=np.array_equal)
    )
    source: str = attr.field(default="inline", eq=False)
    _identity: int = attr.field(init=False, default=-1)

    def __attrs_post_init__(self) -> None:
        size = len(self.names)
        if size == 0:
            raise ValidationError("A finite table needs at least one element.")
        if self.table.shape != (size, size):
            raise ValidationError(f"Operation table must be {size}x{size}, got {self.table.shape}.")
        if self.table.min() < 0 or self.table.max() >= size:
            raise ValidationError("Operation table refers to elements outside the carrier.")
        idx = np.arange(size)
        for e in range(size):
            if (self.table[e] == idx).all() and (self.table[:, e] == idx).all():
                self._identity = e
                break
        else:
            raise ValidationError(f"Finite table '{self.source}' has no identity element.")

    @property
    def abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    @property
    def tag(self) -> str:
        return f"{self.family.value}:{self.source}"

    @property
    def identity(self) -> SemigroupElement:
        return SemigroupElement(self.family, self._identity)

    def name_of(self, g: SemigroupElement) -> str:
        return self.names[self.check_member(g).payload]

    def _validate(self, payload: Payload) -> Payload:
        if isinstance(payload, str):
            if payload not in self.names:
                raise ValidationError(f"'{payload}' is not an element of '{self.tag}'.")
            return self.names.index(payload)
        try:
            value = operator.index(payload)
        except TypeError as err:
            raise ValidationError(f"'{self.tag}' elements are indices or names, got {payload!r}.") from err
        if not 0 <= value < len(self.names):
            raise ValidationError(f"Index {value} is outside the carrier of '{self.tag}'.")
        return value

    def _compose(self, p: Payload, q: Payload) -> Payload:
        return int(self.table[p, q])

    def _window_size(self, window: WindowSpec) -> int:
        return len(self.names)

    def _enumerate(self, window: WindowSpec) -> list[Payload]:
        return list(range(len(self.names)))

    def default_window(self) -> WindowSpec:
        return WindowSpec(bound=len(self.names))

    def preimage_window(self, g: SemigroupElement, elements: t.Sequence[SemigroupElement]) -> WindowSpec:
        return self.default_window()

    def as_array(self, elements: t.Sequence[SemigroupElement]) -> np.ndarray[t.Any, t.Any]:
        return np.asarray([e.payload for e in elements], dtype=np.int64).reshape(-1, 1)

    def compose_array(self, g: SemigroupElement, array: np.ndarray[t.Any, t.Any]) -> np.ndarray[t.Any, t.Any]:
        return self.table[self.check_member(g).payload, array]

    def from_array(self, array: np.ndarray[t.Any, t.Any]) -> list[SemigroupElement]:
        return [SemigroupElement(self.family, int(v)) for v in np.asarray(array).ravel()]

    @classmethod
    def from_csv(cls, path: str) -> FiniteTable:
        """Header row of element names, then an n×n body whose cell (i, j) names element i∘j."""
        try:
            with open(path, newline="", encoding="utf-8") as f:
                rows = [[cell.strip() for cell in row] for row in csv.reader(f) if any(c.strip() for c in row)]
        except OSError as err:
            raise ValidationError(f"Cannot read operation table '{path}': {err}") from err
        if not rows:
            raise ValidationError(f"Operation table '{path}' is empty.")
        names = rows[0]
        body = rows[1:]
        if len(set(names)) != len(names):
            raise ValidationError(f"Operation table '{path}' repeats element names.")
        lookup = {name: i for i, name in enumerate(names)}
        try:
            table = [[lookup[cell] for cell in row] for row in body]
        except KeyError as err:
            raise ValidationError(f"Operation table '{path}' names unknown element {err}.") from err
        if len(table) != len(names) or any(len(row) != len(names) for row in table):
            raise ValidationError(f"Operation table '{path}' must have an {len(names)}x{len(names)} body.")
        return cls(names=names, table=table, source=path)

    @classmethod
    def cyclic(cls, n: int) -> FiniteTable:
        idx = np.arange(n)
        return cls(names=[str(i) for i in range(n)], table=(idx[:, None] + idx[None, :]) % n, source=f"cyclic:n={n}")

    @classmethod
    def truncated_addition(cls, m: int) -> FiniteTable:
        """{0, ..., m} with s∘t = min(s + t, m); m is absorbing."""
        idx = np.arange(m + 1)
        return cls(
            names=[str(i) for i in range(m + 1)],
            table=np.minimum(idx[:, None] + idx[None, :], m),
            source=f"truncated-add:m={m}",
        )

    @classmethod
    def truncated_zbarplus(cls, n: int) -> FiniteTable:
        """{0, ..., N, INF} with sums beyond N sent to INF."""
        size = n + 2
        idx = np.arange(size)
        table = idx[:, None] + idx[None, :]
        table[(table > n) | (idx[:, None] == size - 1) | (idx[None, :] == size - 1)] = size - 1
        return cls(names=[*(str(i) for i in range(n + 1)), "INF"], table=table, source=f"truncated-zbarplus:N={n}")


# measures


class MeasureKind(enum.Enum):
    COUNTING = "counting"
    GRID_LEBESGUE = "grid-lebesgue"
    FINITE_WEIGHTS = "finite-weights"


@attr.frozen
class QuasiHaarMeasure:
    """A translation-invariant-on-windows Radon measure, evaluated on finite element sets."""

    family: Family
    kind: MeasureKind
    cell: float = 1.0
    weights: t.Optional[t.Tuple[float, ...]] = None

    @classmethod
    def counting(cls, desc: SemigroupDescriptor) -> QuasiHaarMeasure:
        return cls(desc.family, MeasureKind.COUNTING)

    @classmethod
    def grid_lebesgue(cls, desc: RPlusGrid) -> QuasiHaarMeasure:
        return cls(desc.family, MeasureKind.GRID_LEBESGUE, cell=desc.h**desc.d)

    @classmethod
    def finite_weights(cls, desc: FiniteTable, weights: t.Sequence[float]) -> QuasiHaarMeasure:
        values = tuple(float(w) for w in weights)
        if len(values) != len(desc.names):
            raise ValidationError(f"Expected {len(desc.names)} weights, got {len(values)}.")
        if any(w < 0 or not math.isfinite(w) for w in values):
            raise ValidationError("Finite weights must be finite and nonnegative.")
        if not any(w > 0 for w in values):
            raise ValidationError("A quasi-Haar measure needs at least one positive weight.")
        return cls(desc.family, MeasureKind.FINITE_WEIGHTS, weights=values)

    @classmethod
    def for_semigroup(cls, desc: SemigroupDescriptor) -> QuasiHaarMeasure:
        if isinstance(desc, RPlusGrid):
            return cls.grid_lebesgue(desc)
        return cls.counting(desc)

    def point_mass(self, g: SemigroupElement) -> float:
        if g.family is not self.family:
            raise ValidationError(f"{g!r} is outside the measure's '{self.family.value}' family.")
        if self.kind is MeasureKind.FINITE_WEIGHTS:
            assert self.weights is not None
            return self.weights[g.payload]
        return self.cell

    def point_masses(self, elements: t.Sequence[SemigroupElement]) -> FloatArray:
        if self.kind is MeasureKind.FINITE_WEIGHTS:
            return np.asarray([self.point_mass(g) for g in elements], dtype=np.float64)
        for g in elements:
            if g.family is not self.family:
                raise ValidationError(f"{g!r} is outside the measure's '{self.family.value}' family.")
        return np.full(len(elements), self.cell, dtype=np.float64)

    def mass(self, elements: t.Iterable[SemigroupElement]) -> float:
        unique = list(dict.fromkeys(elements))
        return math.fsum(self.point_masses(unique))


def compose(desc: SemigroupDescriptor, g: SemigroupElement, h: SemigroupElement) -> SemigroupElement:
    return desc.compose(g, h)


def enumerate_window(desc: SemigroupDescriptor, window: WindowSpec | None = None) -> list[SemigroupElement]:
    return desc.enumerate_window(window)


def quasi_haar_mass(mu: QuasiHaarMeasure, elements: t.Iterable[SemigroupElement]) -> float:
    return mu.mass(elements)


def translate(
    desc: SemigroupDescriptor, g: SemigroupElement, elements: t.Iterable[SemigroupElement]
) -> list[SemigroupElement]:
    return list(dict.fromkeys(desc.compose(g, s) for s in elements))


def translate_preimage_mass(
    desc: SemigroupDescriptor,
    mu: QuasiHaarMeasure,
    g: SemigroupElement,
    elements: t.Sequence[SemigroupElement],
    window: WindowSpec | None = None,
) -> float:
    """λ(L_g⁻¹ S), found by enumerating a window that must contain the whole preimage."""
    desc.check_member(g)
    targets = set(elements)
    candidates = desc.enumerate_window(desc.preimage_window(g, elements))
    preimage = [c for c in candidates if desc.compose(g, c) in targets]
    if window is not None:
        available = set(desc.enumerate_window(window))
        missing = [c for c in preimage if c not in available]
        if missing:
            raise ResolutionError(f"Window is too small to enumerate the preimage; {missing[0]!r} lies outside it.")
    logger.debug("preimage of %d elements under %r has %d elements", len(targets), g, len(preimage))
    return mu.mass(preimage)


def check_translation_invariance(
    desc: SemigroupDescriptor, mu: QuasiHaarMeasure, g: SemigroupElement, elements: t.Sequence[SemigroupElement]
) -> float:
    """|λ(S) − λ(g∘S)|, zero for a quasi-Haar measure."""
    return abs(mu.mass(elements) - mu.mass(translate(desc, g, elements)))


def check_left_injective(
    desc: SemigroupDescriptor, window: WindowSpec | None = None, sample: t.Sequence[SemigroupElement] | None = None
) -> InjectivityReport:
    elements = desc.enumerate_window(window)
    for g in sample if sample is not None else elements:
        seen: dict[SemigroupElement, SemigroupElement] = {}
        for s in elements:
            image = desc.compose(g, s)
            if image in seen:
                return InjectivityReport(False, (g, seen[image], s))
            seen[image] = s
    return InjectivityReport(True)


def check_commutative(desc: SemigroupDescriptor, window: WindowSpec | None = None) -> AlgebraWitness:
    elements = desc.enumerate_window(window)
    checked = 0
    for a, b in itertools.combinations(elements, 2):
        checked += 1
        if desc.compose(a, b) != desc.compose(b, a):
            return AlgebraWitness(False, checked, (a, b))
    return AlgebraWitness(True, checked)


def check_associative(desc: SemigroupDescriptor, window: WindowSpec | None = None) -> AlgebraWitness:
    elements = desc.enumerate_window(window)
    checked = 0
    for a, b, c in itertools.product(elements, repeat=3):
        checked += 1
        if desc.compose(desc.compose(a, b), c) != desc.compose(a, desc.compose(b, c)):
            return AlgebraWitness(False, checked, (a, b, c))
    return AlgebraWitness(True, checked)


def check_identity(desc: SemigroupDescriptor, window: WindowSpec | None = None) -> AlgebraWitness:
    e = desc.identity
    elements = desc.enumerate_window(window)
    for checked, g in enumerate(elements, start=1):
        if desc.compose(e, g) != g or desc.compose(g, e) != g:
            return AlgebraWitness(False, checked, (g,))
    return AlgebraWitness(True, len(elements))


def group_inverse(desc: SemigroupDescriptor, g: SemigroupElement) -> GroupInverse:
    return desc.group_inverse(g)
