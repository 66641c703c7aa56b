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
Compact metric spaces and continuous semigroup actions on them.

Every space works on two representations: exact points (tuples of floats on the torus, naturals or
``INF`` on the compactified naturals, indices on finite spaces, ``DyadicPoint`` on the dyadic circle)
and coordinate arrays of shape ``(n, dim)`` used by the vectorised distance and orbit kernels.

Shipped actions:

* ``TorusTranslation``: π(n, x) = x + n·A mod 1 for ``ZPlusD`` (or a flow for ``RPlusGrid``).
* ``ZbarPlusTranslation``: the compactified naturals acting on themselves, INF absorbing.
* ``DoublingMap``: π(n, x) = 2ⁿx mod 1 on exact dyadic points, the expanding negative control.
* ``FiniteAction``: a finite semigroup acting on a finite space through an action table.
"""
from __future__ import annotations

import abc
import enum
import functools
import logging
import math
import operator
import typing as t

import attr
import numpy as np

from .exceptions import NumericError
from .exceptions import ResolutionError
from .exceptions import ValidationError
from .semigroup import INF
from .semigroup import FiniteTable
from .semigroup import RPlusGrid
from .semigroup import SemigroupDescriptor
from .semigroup import SemigroupElement
from .semigroup import WindowSpec
from .semigroup import ZbarPlus
from .semigroup import ZPlusD


if t.TYPE_CHECKING:
    from ._types import FloatArray

logger = logging.getLogger(__name__)

SpacePoint = t.Any

GOLDEN: t.Final[float] = (math.sqrt(5.0) - 1.0) / 2.0

# default translation entries, filled row-major into the d×k matrix
DEFAULT_FREQUENCIES: t.Final[tuple[float, ...]] = (
    GOLDEN,
    math.sqrt(2.0) - 1.0,
    math.sqrt(3.0) - 1.0,
    math.sqrt(5.0) - 2.0,
    math.sqrt(7.0) - 2.0,
    math.sqrt(11.0) - 3.0,
    math.sqrt(13.0) - 3.0,
    math.sqrt(17.0) - 4.0,
)

NAMED_FREQUENCIES: t.Final[dict[str, float]] = {
    "golden": GOLDEN,
    "sqrt2": math.sqrt(2.0) - 1.0,
    "sqrt3": math.sqrt(3.0) - 1.0,
}


class SpaceKind(enum.Enum):
    TORUS = "torus"
    ZBAR_PLUS = "zbarplus-space"
    FINITE = "finite"
    DYADIC_CIRCLE = "dyadic-circle"
    PRODUCT = "product"


def _circle(a: FloatArray, b: FloatArray) -> FloatArray:
    diff = np.abs(a - b) % 1.0
    return np.minimum(diff, 1.0 - diff)


def _reduce_mod1(values: FloatArray) -> FloatArray:
    out = np.mod(values, 1.0)
    out[out >= 1.0] = 0.0
    return out


class MetricSpace(abc.ABC):
    kind: t.ClassVar[SpaceKind]

    @property
    @abc.abstractmethod
    def dim(self) -> int:
        """Number of coordinate columns in the array form."""

    @property
    @abc.abstractmethod
    def diameter(self) -> float:
        ...

    @property
    def tag(self) -> str:
        return self.kind.value

    @abc.abstractmethod
    def check_point(self, x: SpacePoint) -> SpacePoint:
        """Canonical form of ``x`` or ValidationError when it is not a point of this space."""

    @abc.abstractmethod
    def as_array(self, points: t.Sequence[SpacePoint]) -> FloatArray:
        ...

    @abc.abstractmethod
    def to_point(self, row: FloatArray) -> SpacePoint:
        ...

    @abc.abstractmethod
    def distances(self, a: FloatArray, b: FloatArray) -> FloatArray:
        """Pointwise distances between coordinate arrays, broadcasting over leading axes."""

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator, n: int) -> list[SpacePoint]:
        ...

    @abc.abstractmethod
    def nudge(self, x: SpacePoint, delta: float) -> SpacePoint | None:
        """A point other than ``x`` at distance below ``delta`` (close to it), or None if none exists."""

    def distance(self, x: SpacePoint, y: SpacePoint) -> float:
        a = self.as_array([self.check_point(x)])
        b = self.as_array([self.check_point(y)])
        return float(self.distances(a, b)[0])

    def coordinates(self, x: SpacePoint) -> tuple[float, ...]:
        return tuple(float(v) for v in self.as_array([self.check_point(x)])[0])

    def parse_point(self, value: t.Any) -> SpacePoint:
        return self.check_point(value)


@attr.define(slots=True)
class Torus(MetricSpace):
    """The k-torus [0,1)^k with the max-over-coordinates circle distance."""

    kind: t.ClassVar[SpaceKind] = SpaceKind.TORUS

    k: int = attr.field(default=1, validator=attr.validators.ge(1))

    @property
    def dim(self) -> int:
        return self.k

    @property
    def diameter(self) -> float:
        return 0.5

    @property
    def tag(self) -> str:
        return f"{self.kind.value}:k={self.k}"

    def check_point(self, x: SpacePoint) -> SpacePoint:
        coords = x if isinstance(x, (tuple, list, np.ndarray)) else (x,)
        try:
            values = np.asarray([float(c) for c in coords], dtype=np.float64)
        except (TypeError, ValueError) as err:
            raise ValidationError(f"'{self.tag}' points are real coordinates, got {x!r}.") from err
        if values.shape != (self.k,) or not np.isfinite(values).all():
            raise ValidationError(f"'{self.tag}' points need {self.k} finite coordinates, got {x!r}.")
        return tuple(float(v) for v in _reduce_mod1(values))

    def as_array(self, points: t.Sequence[SpacePoint]) -> FloatArray:
        return np.asarray(points, dtype=np.float64).reshape(-1, self.k)

    def to_point(self, row: FloatArray) -> SpacePoint:
        return tuple(float(v) for v in np.asarray(row).reshape(self.k))

    def distances(self, a: FloatArray, b: FloatArray) -> FloatArray:
        return _circle(a, b).max(axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> list[SpacePoint]:
        return [self.to_point(row) for row in rng.random((n, self.k))]

    def nudge(self, x: SpacePoint, delta: float) -> SpacePoint | None:
        x = self.check_point(x)
        return self.check_point((x[0] + delta, *x[1:]))

    def parse_point(self, value: t.Any) -> SpacePoint:
        if isinstance(value, str):
            value = [float(v) for v in value.replace(";", ",").split(",")]
        return self.check_point(value)


@attr.define(slots=True)
class ZbarPlusSpace(MetricSpace):
    """{0, 1, ..., INF} with d(m, n) = |1/(m+1) − 1/(n+1)| and 1/(INF+1) = 0."""

    kind: t.ClassVar[SpaceKind] = SpaceKind.ZBAR_PLUS

    cutoff: int = attr.field(default=100, validator=attr.validators.ge(1))

    @property
    def dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return 1.0

    @property
    def tag(self) -> str:
        return f"{self.kind.value}:N={self.cutoff}"

    def check_point(self, x: SpacePoint) -> SpacePoint:
        if isinstance(x, str) and x.strip().upper() in ("INF", "∞"):
            return INF
        if isinstance(x, float) and math.isinf(x) and x > 0:
            return INF
        if isinstance(x, float) and x.is_integer():
            x = int(x)
        try:
            value = operator.index(x)
        except TypeError as err:
            raise ValidationError(f"'{self.tag}' points are naturals or INF, got {x!r}.") from err
        if value < 0:
            raise ValidationError(f"'{self.tag}' points must be nonnegative, got {value}.")
        return value

    def as_array(self, points: t.Sequence[SpacePoint]) -> FloatArray:
        return np.asarray([float(p) for p in points], dtype=np.float64).reshape(-1, 1)

    def to_point(self, row: FloatArray) -> SpacePoint:
        value = float(np.asarray(row).reshape(()))
        return INF if math.isinf(value) else int(round(value))

    def distances(self, a: FloatArray, b: FloatArray) -> FloatArray:
        return np.abs(1.0 / (a + 1.0) - 1.0 / (b + 1.0)).max(axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> list[SpacePoint]:
        draws = rng.integers(0, self.cutoff + 1, size=n)
        return [INF if v == self.cutoff else int(v) for v in draws]

    def nudge(self, x: SpacePoint, delta: float) -> SpacePoint | None:
        x = self.check_point(x)
        if x == INF:
            return int(math.floor(1.0 / delta))
        if 1.0 / (x + 1) - 1.0 / (x + 2) < delta:
            return x + 1
        return None


@attr.define(slots=True)
class FiniteSpace(MetricSpace):
    """A finite set of named points with a metric matrix (discrete metric by default)."""

    kind: t.ClassVar[SpaceKind] = SpaceKind.FINITE

    names: t.Tuple[str, ...] = attr.field(converter=tuple)
    metric: np.ndarray[t.Any, t.Any] = attr.field(default=None, eq=False)

    def __attrs_post_init__(self) -> None:
        n = len(self.names)
        if n == 0:
            raise ValidationError("A finite space needs at least one point.")
        if self.metric is None:
            self.metric = 1.0 - np.eye(n)
        self.metric = np.asarray(self.metric, dtype=np.float64)
        m = self.metric
        if m.shape != (n, n):
            raise ValidationError(f"Metric matrix must be {n}x{n}, got {m.shape}.")
        if not np.allclose(m, m.T) or (np.diag(m) != 0).any():
            raise ValidationError("Metric matrix must be symmetric with a zero diagonal.")
        if (m[~np.eye(n, dtype=bool)] <= 0).any():
            raise ValidationError("Distinct points must be at positive distance.")
        # triangle inequality: m[i, k] <= m[i, j] + m[j, k]
        if (m[:, None, :] > m[:, :, None] + m[None, :, :] + 1e-12).any():
            raise ValidationError("Metric matrix violates the triangle inequality.")

    @property
    def dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return float(self.metric.max())

    @property
    def tag(self) -> str:
        return f"{self.kind.value}:n={len(self.names)}"

    def check_point(self, x: SpacePoint) -> SpacePoint:
        if isinstance(x, str):
            if x not in self.names:
                raise ValidationError(f"'{x}' is not a point of '{self.tag}'.")
            return self.names.index(x)
        if isinstance(x, float) and x.is_integer():
            x = int(x)
        try:
            value = operator.index(x)
        except TypeError as err:
            raise ValidationError(f"'{self.tag}' points are indices or names, got {x!r}.") from err
        if not 0 <= value < len(self.names):
            raise ValidationError(f"Index {value} is outside '{self.tag}'.")
        return value

    def as_array(self, points: t.Sequence[SpacePoint]) -> FloatArray:
        return np.asarray(points, dtype=np.float64).reshape(-1, 1)

    def to_point(self, row: FloatArray) -> SpacePoint:
        return int(np.asarray(row).reshape(()))

    def distances(self, a: FloatArray, b: FloatArray) -> FloatArray:
        return self.metric[a[..., 0].astype(np.int64), b[..., 0].astype(np.int64)]

    def sample(self, rng: np.random.Generator, n: int) -> list[SpacePoint]:
        return [int(v) for v in rng.integers(0, len(self.names), size=n)]

    def nudge(self, x: SpacePoint, delta: float) -> SpacePoint | None:
        row = self.metric[self.check_point(x)]
        close = np.flatnonzero((row > 0) & (row < delta))
        return int(close[0]) if close.size else None


@attr.frozen
class DyadicPoint:
    """The dyadic rational numerator / 2**bits in [0, 1)."""

    numerator: int
    bits: int

    def __attrs_post_init__(self) -> None:
        if not 0 <= self.numerator < (1 << self.bits):
            raise ValidationError(f"Numerator must lie in [0, 2**{self.bits}).")

    def __float__(self) -> float:
        return _dyadic_to_float(self.numerator, self.bits)


def _dyadic_to_float(numerator: int, bits: int) -> float:
    if bits <= 53:
        return math.ldexp(numerator, -bits)
    return math.ldexp(numerator >> (bits - 53), -53)


@attr.define(slots=True)
class DyadicCircle(MetricSpace):
    """The circle ℝ/ℤ carried by exact dyadic rationals with ``bits`` binary digits."""

    kind: t.ClassVar[SpaceKind] = SpaceKind.DYADIC_CIRCLE

    bits: int = attr.field(default=65536)

    @bits.validator
    def _check_bits(self, _: attr.Attribute[int], value: int) -> None:
        if value < 128 or value % 8:
            raise ValidationError(f"Dyadic resolution must be a multiple of 8 and at least 128, got {value}.")

    @property
    def dim(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return 0.5

    @property
    def tag(self) -> str:
        return f"{self.kind.value}:bits={self.bits}"

    def check_point(self, x: SpacePoint) -> SpacePoint:
        if isinstance(x, DyadicPoint):
            if x.bits != self.bits:
                raise ValidationError(f"Point has {x.bits} bits, '{self.tag}' expects {self.bits}.")
            return x
        try:
            value = float(x)
        except (TypeError, ValueError) as err:
            raise ValidationError(f"'{self.tag}' points are dyadic or float coordinates, got {x!r}.") from err
        if not math.isfinite(value):
            raise ValidationError(f"'{self.tag}' points must be finite, got {x!r}.")
        value -= math.floor(value)
        num, den = value.as_integer_ratio()
        shift = self.bits - (den.bit_length() - 1)
        num = num << shift if shift >= 0 else num >> -shift
        return DyadicPoint(num % (1 << self.bits), self.bits)

    def as_array(self, points: t.Sequence[SpacePoint]) -> FloatArray:
        return np.asarray([float(self.check_point(p)) for p in points], dtype=np.float64).reshape(-1, 1)

    def to_point(self, row: FloatArray) -> SpacePoint:
        return self.check_point(float(np.asarray(row).reshape(())))

    def distances(self, a: FloatArray, b: FloatArray) -> FloatArray:
        return _circle(a, b).max(axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> list[SpacePoint]:
        return [DyadicPoint(int.from_bytes(rng.bytes(self.bits // 8), "big"), self.bits) for _ in range(n)]

    def nudge(self, x: SpacePoint, delta: float) -> SpacePoint | None:
        x = self.check_point(x)
        mantissa, exponent = math.frexp(delta)
        shift = self.bits + exponent - 53
        step = int(math.ldexp(mantissa, 53))
        step = step << shift if shift >= 0 else step >> -shift
        if step == 0:
            return None
        return DyadicPoint((x.numerator + step) % (1 << self.bits), self.bits)

    def from_binary_digits(self, positions: t.Iterable[int]) -> DyadicPoint:
        """The point Σ 2^-p over ``positions``, every p in [1, bits]."""
        numerator = 0
        for p in set(positions):
            if not 1 <= p <= self.bits:
                raise ValidationError(f"Binary digit {p} is outside [1, {self.bits}].")
            numerator |= 1 << (self.bits - p)
        return DyadicPoint(numerator, self.bits)


@attr.define(slots=True)
class ProductSpace(MetricSpace):
    """Finite product of spaces with the max metric; points are tuples of factor points."""

    kind: t.ClassVar[SpaceKind] = SpaceKind.PRODUCT

    factors: t.Tuple[MetricSpace, ...] = attr.field(converter=tuple)

    @factors.validator
    def _check_factors(self, _: attr.Attribute[t.Any], value: tuple[MetricSpace, ...]) -> None:
        if len(value) < 2:
            raise ValidationError("A product space needs at least two factors.")

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    @property
    def diameter(self) -> float:
        return max(f.diameter for f in self.factors)

    @property
    def tag(self) -> str:
        return "*".join(f.tag for f in self.factors)

    def _slices(self) -> list[slice]:
        offsets = np.cumsum([0, *(f.dim for f in self.factors)])
        return [slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:])]

    def check_point(self, x: SpacePoint) -> SpacePoint:
        if not isinstance(x, (tuple, list)) or len(x) != len(self.factors):
            raise ValidationError(f"'{self.tag}' points are {len(self.factors)}-tuples, got {x!r}.")
        return tuple(f.check_point(p) for f, p in zip(self.factors, x))

    def as_array(self, points: t.Sequence[SpacePoint]) -> FloatArray:
        columns = [f.as_array([p[i] for p in points]) for i, f in enumerate(self.factors)]
        return np.hstack(columns) if points else np.zeros((0, self.dim))

    def to_point(self, row: FloatArray) -> SpacePoint:
        row = np.asarray(row).reshape(self.dim)
        return tuple(f.to_point(row[s]) for f, s in zip(self.factors, self._slices()))

    def distances(self, a: FloatArray, b: FloatArray) -> FloatArray:
        parts = [f.distances(a[..., s], b[..., s]) for f, s in zip(self.factors, self._slices())]
        return np.maximum.reduce(parts)

    def sample(self, rng: np.random.Generator, n: int) -> list[SpacePoint]:
        columns = [f.sample(rng, n) for f in self.factors]
        return list(zip(*columns))

    def nudge(self, x: SpacePoint, delta: float) -> SpacePoint | None:
        x = self.check_point(x)
        for i, factor in enumerate(self.factors):
            moved = factor.nudge(x[i], delta)
            if moved is not None:
                return (*x[:i], moved, *x[i + 1 :])
        return None


# actions


class ActionSystem(abc.ABC):
    """A compact metric space with a continuous left action of a semigroup family."""

    isometric: t.ClassVar[bool] = False

    semigroup: SemigroupDescriptor
    space: MetricSpace

    @property
    @abc.abstractmethod
    def name(self) -> str:
        ...

    @property
    def lipschitz_hint(self) -> float | None:
        """Per-generator Lipschitz constant when one is known."""
        return None

    @abc.abstractmethod
    def _apply(self, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
        ...

    @abc.abstractmethod
    def evaluate(self, x: SpacePoint, elements: np.ndarray[t.Any, t.Any]) -> FloatArray:
        """Coordinates of π(g, x) for every row g of ``elements`` (the semigroup's array form)."""

    def apply(self, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
        if g.family is not self.semigroup.family:
            raise ValidationError(f"{g!r} does not act on '{self.name}'.")
        return self._apply(g, self.space.check_point(x))


def _split_frequencies(matrix: FloatArray) -> tuple[FloatArray, FloatArray]:
    # n·hi is exact for n < 2**32 because hi carries 21 fractional bits
    hi = np.round(matrix * 2.0**21) / 2.0**21
    return hi, matrix - hi


@attr.define(slots=True)
class TorusTranslation(ActionSystem):
    """π(n, x) = x + n·A mod 1, rows of A being the translation vectors of the generators."""

    isometric: t.ClassVar[bool] = True

    semigroup: ZPlusD
    space: Torus
    matrix: np.ndarray[t.Any, t.Any] = attr.field(default=None, eq=False)
    _hi: np.ndarray[t.Any, t.Any] = attr.field(init=False, default=None, eq=False, repr=False)
    _lo: np.ndarray[t.Any, t.Any] = attr.field(init=False, default=None, eq=False, repr=False)

    def __attrs_post_init__(self) -> None:
        if not isinstance(self.semigroup, ZPlusD):
            raise ValidationError("Torus translations are driven by 'zplus' or 'rplusgrid'.")
        shape = (self.semigroup.d, self.space.k)
        if self.matrix is None:
            count = shape[0] * shape[1]
            if count > len(DEFAULT_FREQUENCIES):
                raise ValidationError(f"No default translation matrix of shape {shape}; pass one explicitly.")
            self.matrix = np.asarray(DEFAULT_FREQUENCIES[:count]).reshape(shape)
        self.matrix = np.asarray(self.matrix, dtype=np.float64).reshape(shape)
        effective = self.matrix * self.semigroup.h if isinstance(self.semigroup, RPlusGrid) else self.matrix
        self._hi, self._lo = _split_frequencies(effective)

    @property
    def name(self) -> str:
        return f"torus-translation[{self.semigroup.tag} on {self.space.tag}]"

    @property
    def lipschitz_hint(self) -> float | None:
        return 1.0

    def evaluate(self, x: SpacePoint, elements: np.ndarray[t.Any, t.Any]) -> FloatArray:
        n = np.asarray(elements, dtype=np.float64).reshape(-1, self.semigroup.d)
        base = np.asarray(self.space.check_point(x), dtype=np.float64)
        return _reduce_mod1(base + np.mod(n @ self._hi, 1.0) + np.mod(n @ self._lo, 1.0))

    def _apply(self, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
        return self.space.to_point(self.evaluate(x, np.asarray([g.payload]))[0])


@attr.define(slots=True)
class ZbarPlusTranslation(ActionSystem):
    """The compactified naturals acting on themselves by s∘x = s + x."""

    isometric: t.ClassVar[bool] = False

    semigroup: ZbarPlus
    space: ZbarPlusSpace

    @property
    def name(self) -> str:
        return f"zbarplus-translation[{self.space.tag}]"

    @property
    def lipschitz_hint(self) -> float | None:
        return 1.0

    def evaluate(self, x: SpacePoint, elements: np.ndarray[t.Any, t.Any]) -> FloatArray:
        return np.asarray(elements, dtype=np.float64).reshape(-1, 1) + float(self.space.check_point(x))

    def _apply(self, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
        return self.semigroup._compose(g.payload, x)


@functools.lru_cache(maxsize=64)
def _dyadic_orbit(numerator: int, bits: int, n_max: int) -> FloatArray:
    mask = (1 << bits) - 1
    out = np.empty(n_max + 1, dtype=np.float64)
    value = numerator
    for n in range(n_max + 1):
        out[n] = _dyadic_to_float(value, bits)
        value = (value << 1) & mask
    out.setflags(write=False)
    return out


@attr.define(slots=True)
class DoublingMap(ActionSystem):
    """π(n, x) = 2ⁿx mod 1 on exact dyadic points."""

    semigroup: ZPlusD
    space: DyadicCircle

    def __attrs_post_init__(self) -> None:
        if type(self.semigroup) is not ZPlusD or self.semigroup.d != 1:
            raise ValidationError("The doubling map is driven by 'zplus:d=1'.")

    @property
    def name(self) -> str:
        return f"doubling[{self.space.tag}]"

    @property
    def lipschitz_hint(self) -> float | None:
        return 2.0

    @property
    def horizon(self) -> int:
        """Largest exponent whose image still carries 64 significant bits."""
        return self.space.bits - 64

    def _check_horizon(self, n: int) -> None:
        if n > self.horizon:
            raise ResolutionError(
                f"2^{n}·x exhausts the {self.space.bits}-bit dyadic resolution; raise the bit count above {n + 64}."
            )

    def evaluate(self, x: SpacePoint, elements: np.ndarray[t.Any, t.Any]) -> FloatArray:
        n = np.asarray(elements, dtype=np.int64).reshape(-1)
        if n.size == 0:
            return np.zeros((0, 1))
        self._check_horizon(int(n.max()))
        point = self.space.check_point(x)
        # tables are cached per power-of-two length so that nearby windows share them
        length = min(max(64, 1 << int(n.max()).bit_length()), self.horizon)
        table = _dyadic_orbit(point.numerator, point.bits, length)
        return table[n].reshape(-1, 1)

    def _apply(self, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
        (n,) = g.payload
        self._check_horizon(n)
        return DyadicPoint((x.numerator << n) & ((1 << x.bits) - 1), x.bits)


@attr.define(slots=True)
class FiniteAction(ActionSystem):
    """A finite semigroup acting on a finite space; ``table[g, x]`` is the index of π(g, x)."""

    semigroup: FiniteTable
    space: FiniteSpace
    table: np.ndarray[t.Any, t.Any] = attr.field(converter=lambda v: np.asarray(v, dtype=np.int64), eq=False)

    def __attrs_post_init__(self) -> None:
        k, n = len(self.semigroup.names), len(self.space.names)
        if self.table.shape != (k, n):
            raise ValidationError(f"Action table must be {k}x{n}, got {self.table.shape}.")
        if self.table.min() < 0 or self.table.max() >= n:
            raise ValidationError("Action table maps outside the space.")
        if (self.table[self.semigroup.identity.payload] != np.arange(n)).any():
            raise ValidationError("The identity must act trivially.")
        # π(g∘h, x) = π(g, π(h, x))
        composed = self.table[self.semigroup.table]
        chained = self.table[np.arange(k)[:, None, None], self.table[None, :, :]]
        if (composed != chained).any():
            raise ValidationError("Action table violates the action law.")

    @classmethod
    def regular(cls, semigroup: FiniteTable) -> FiniteAction:
        """The left-regular action of a finite semigroup on its own carrier (discrete metric)."""
        return cls(semigroup, FiniteSpace(semigroup.names), semigroup.table)

    @property
    def name(self) -> str:
        return f"finite-action[{self.semigroup.tag}]"

    def evaluate(self, x: SpacePoint, elements: np.ndarray[t.Any, t.Any]) -> FloatArray:
        g = np.asarray(elements, dtype=np.int64).reshape(-1)
        return self.table[g, self.space.check_point(x)].astype(np.float64).reshape(-1, 1)

    def _apply(self, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
        return int(self.table[g.payload, x])


@attr.define(slots=True)
class ProductAction(ActionSystem):
    """One semigroup acting diagonally on a product of spaces."""

    systems: t.Tuple[ActionSystem, ...] = attr.field(converter=tuple)
    semigroup: SemigroupDescriptor = attr.field(init=False)
    space: ProductSpace = attr.field(init=False)

    def __attrs_post_init__(self) -> None:
        if len(self.systems) < 2:
            raise ValidationError("A product action needs at least two factors.")
        first = self.systems[0].semigroup
        for other in self.systems[1:]:
            if other.semigroup != first:
                raise ValidationError(
                    f"Factors are driven by different semigroups: {first!r} and {other.semigroup!r}."
                )
        self.semigroup = first
        self.space = ProductSpace(tuple(s.space for s in self.systems))

    @property
    def isometric(self) -> bool:  # type: ignore[override]
        return all(s.isometric for s in self.systems)

    @property
    def name(self) -> str:
        return " x ".join(s.name for s in self.systems)

    def evaluate(self, x: SpacePoint, elements: np.ndarray[t.Any, t.Any]) -> FloatArray:
        x = self.space.check_point(x)
        return np.hstack([s.evaluate(p, elements) for s, p in zip(self.systems, x)])

    def _apply(self, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
        return tuple(s._apply(g, p) for s, p in zip(self.systems, x))


@attr.define(slots=True)
class OrbitSample:
    """The orbit of ``basepoint`` over an enumerated window, as coordinate rows in window order."""

    system: ActionSystem = attr.field(eq=False, repr=False)
    basepoint: SpacePoint
    elements: t.List[SemigroupElement]
    points: np.ndarray[t.Any, t.Any] = attr.field(eq=False, repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def point(self, i: int) -> SpacePoint:
        """Exact π(g_i, y), recomputed from the element rather than read off the float rows."""
        return self.system.apply(self.elements[i], self.basepoint)

    def pairs(self) -> t.Iterator[tuple[SemigroupElement, SpacePoint]]:
        for i, g in enumerate(self.elements):
            yield g, self.point(i)

    def header(self) -> list[str]:
        g_cols = len(self.elements[0].coordinates()) if self.elements else 0
        return [*(f"g{i}" for i in range(g_cols)), *(f"x{i}" for i in range(self.points.shape[1]))]

    def rows(self) -> t.Iterator[list[float]]:
        for g, row in zip(self.elements, self.points):
            yield [*g.coordinates(), *(float(v) for v in row)]


def distance(space: MetricSpace, x: SpacePoint, y: SpacePoint) -> float:
    return space.distance(x, y)


def apply(sys: ActionSystem, g: SemigroupElement, x: SpacePoint) -> SpacePoint:
    return sys.apply(g, x)


def orbit(sys: ActionSystem, y: SpacePoint, window: WindowSpec | None = None) -> OrbitSample:
    y = sys.space.check_point(y)
    elements = sys.semigroup.enumerate_window(window)
    points = sys.evaluate(y, sys.semigroup.as_array(elements))
    logger.debug("orbit of %r under %s: %d points", y, sys.name, len(elements))
    return OrbitSample(sys, y, elements, points)


def net_indices(space: MetricSpace, points: FloatArray, eps: float) -> list[int]:
    """Greedy ε-net over coordinate rows in input order; returns the selected row indices."""
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}.")
    points = np.asarray(points, dtype=np.float64)
    if len(points) == 0:
        return []
    chosen = np.empty_like(points)
    selected: list[int] = []
    for i, row in enumerate(points):
        if selected and space.distances(chosen[: len(selected)], row).min() <= eps:
            continue
        chosen[len(selected)] = row
        selected.append(i)
    return selected


def cover_radius(space: MetricSpace, points: FloatArray, net: FloatArray, chunk: int = 4096) -> float:
    """max over points of the distance to the nearest net point, by brute force."""
    worst = 0.0
    for start in range(0, len(points), chunk):
        block = points[start : start + chunk]
        nearest = space.distances(block[:, None, :], net[None, :, :]).min(axis=1)
        worst = max(worst, float(nearest.max()))
    return worst


def verify_net(space: MetricSpace, points: FloatArray, net: FloatArray, eps: float) -> None:
    radius = cover_radius(space, points, net)
    if radius > eps:
        raise NumericError(f"ε-net does not cover its input: cover radius {radius} > eps {eps}.", history=(radius,))
    if len(net) > 1:
        pairwise = space.distances(net[:, None, :], net[None, :, :])
        separation = float(pairwise[~np.eye(len(net), dtype=bool)].min())
        if separation <= eps:
            raise NumericError(f"ε-net points are only {separation} apart at eps {eps}.", history=(separation,))


def epsilon_net(space: MetricSpace, points: t.Sequence[SpacePoint], eps: float) -> list[SpacePoint]:
    """Greedy net: the first point is always kept and a later point joins when it is > eps from the net."""
    canonical = [space.check_point(p) for p in points]
    array = space.as_array(canonical)
    selected = net_indices(space, array, eps)
    if selected:
        verify_net(space, array, array[selected], eps)
    return [canonical[i] for i in selected]


def orbit_density(space: MetricSpace, sample: OrbitSample, targets: t.Sequence[SpacePoint]) -> float:
    """Largest distance from a target point to the orbit sample; small values mean the orbit fills the targets."""
    if len(sample) == 0 or not targets:
        return 0.0
    return cover_radius(space, space.as_array([space.check_point(p) for p in targets]), sample.points)
