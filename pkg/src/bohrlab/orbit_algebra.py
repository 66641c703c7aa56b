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
The orbit closure of y as a compact abelian semigroup.

An ε-net of the orbit stands in for cls G(y). Each net point carries a representative g with
π(g, y) within eps of it, and x ⋄ z is π(g_x∘g_z, y) for the representatives of the net points
nearest to x and z.
"""
from __future__ import annotations

import concurrent.futures
import logging
import typing as t

import attr
import numpy as np

from .exceptions import OutOfNetError
from .exceptions import PreconditionError
from .exceptions import ValidationError
from .semigroup import SemigroupElement
from .semigroup import WindowSpec
from .space_action import ActionSystem
from .space_action import SpacePoint
from .space_action import net_indices
from .space_action import orbit
from .space_action import verify_net


if t.TYPE_CHECKING:
    from ._types import FloatArray

logger = logging.getLogger(__name__)


@attr.define
class OrbitClosureNet:
    system: ActionSystem = attr.field(eq=False, repr=False)
    basepoint: SpacePoint
    eps: float
    points: np.ndarray[t.Any, t.Any] = attr.field(eq=False, repr=False)
    representatives: t.List[SemigroupElement]
    window: WindowSpec

    def __len__(self) -> int:
        return len(self.representatives)

    def point(self, i: int) -> SpacePoint:
        return self.system.apply(self.representatives[i], self.basepoint)

    def nearest(self, x: SpacePoint) -> tuple[int, float]:
        """Index of the nearest net point, ties going to the lower index, and its distance."""
        row = self.system.space.as_array([self.system.space.check_point(x)])[0]
        d = self.system.space.distances(self.points, row)
        i = int(np.argmin(d))
        return i, float(d[i])

    def locate(self, x: SpacePoint) -> int:
        i, d = self.nearest(x)
        if d > self.eps:
            raise OutOfNetError(f"{x!r} is {d} from the nearest net point, farther than eps={self.eps}.")
        return i


@attr.define
class DiamondTable:
    """``products[i, j]`` holds the coordinates of π(g_i∘g_j, y); ``snap_defects[i, j]`` its distance to the net."""

    net: OrbitClosureNet
    products: np.ndarray[t.Any, t.Any] = attr.field(eq=False, repr=False)
    snap_indices: np.ndarray[t.Any, t.Any] = attr.field(eq=False, repr=False)
    snap_defects: np.ndarray[t.Any, t.Any] = attr.field(eq=False, repr=False)

    @property
    def max_snap_defect(self) -> float:
        return float(self.snap_defects.max()) if self.snap_defects.size else 0.0

    def rows(self) -> t.Iterator[list[float]]:
        m = len(self.net)
        for i in range(m):
            for j in range(m):
                yield [i, j, *(float(v) for v in self.products[i, j]), float(self.snap_defects[i, j])]

    def header(self) -> list[str]:
        return ["i", "j", *(f"x{c}" for c in range(self.products.shape[-1])), "defect"]


@attr.define
class AlgebraReport:
    """Defects of ⋄ on the net.

    ``associativity`` compares (x ⋄ z) ⋄ w with x ⋄ (z ⋄ w), each intermediate product snapped back to
    the net. ``representative_associativity`` is the same law on the representatives before snapping,
    so it only ever shows round-off.
    """

    commutativity: float
    associativity: float
    identity: float
    representative_associativity: float
    witnesses: t.Dict[str, t.Optional[t.Tuple[int, ...]]] = attr.field(factory=dict)

    def within(self, threshold: float) -> bool:
        worst = max(self.commutativity, self.associativity, self.identity, self.representative_associativity)
        return worst <= threshold

    def to_json(self) -> dict[str, t.Any]:
        return {
            "commutativity": self.commutativity,
            "associativity": self.associativity,
            "identity": self.identity,
            "representative_associativity": self.representative_associativity,
            "witnesses": {k: None if v is None else list(v) for k, v in self.witnesses.items()},
        }


def default_algebra_threshold(eps: float) -> float:
    return max(1e-9, 2.5 * eps)


def _seed_order(sys: ActionSystem, elements: list[SemigroupElement]) -> list[int]:
    # identity first, then idempotents (limit points such as INF), then window order
    desc = sys.semigroup
    e = desc.identity
    first = [i for i, g in enumerate(elements) if g == e]
    idempotent = [i for i, g in enumerate(elements) if g != e and desc.compose(g, g) == g]
    seen = set(first) | set(idempotent)
    return first + idempotent + [i for i in range(len(elements)) if i not in seen]


def build_orbit_net(sys: ActionSystem, y: SpacePoint, eps: float, window: WindowSpec | None = None) -> OrbitClosureNet:
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}.")
    window = window if window is not None else sys.semigroup.default_window()
    sample = orbit(sys, y, window)
    if len(sample) == 0:
        raise PreconditionError("Cannot build an orbit net from an empty window.", details={"window_size": 0})
    order = _seed_order(sys, sample.elements)
    ordered = sample.points[order]
    chosen = [order[i] for i in net_indices(sys.space, ordered, eps)]
    points = sample.points[chosen]
    verify_net(sys.space, sample.points, points, eps)
    logger.debug("orbit net at eps=%s: %d points from %d orbit samples", eps, len(chosen), len(sample))
    return OrbitClosureNet(sys, sample.basepoint, eps, points, [sample.elements[i] for i in chosen], window)


def _product_rows(net: OrbitClosureNet, g: SemigroupElement, reps: np.ndarray[t.Any, t.Any]) -> FloatArray:
    sys = net.system
    return sys.evaluate(net.basepoint, sys.semigroup.compose_array(g, reps))


def build_diamond_table(net: OrbitClosureNet, threads: int = 1) -> DiamondTable:
    sys = net.system
    if not sys.semigroup.abelian:
        raise ValidationError(f"The ⋄ operation needs an abelian semigroup, '{sys.semigroup.tag}' is not.")
    reps = sys.semigroup.as_array(net.representatives)

    def row(g: SemigroupElement) -> FloatArray:
        return _product_rows(net, g, reps)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, net.representatives))
    else:
        rows = [row(g) for g in net.representatives]
    products = np.stack(rows)
    d = sys.space.distances(products[:, :, None, :], net.points[None, None, :, :])
    snap = d.argmin(axis=-1)
    return DiamondTable(net, products, snap, np.take_along_axis(d, snap[..., None], axis=-1)[..., 0])


def diamond(table: DiamondTable, x: SpacePoint, z: SpacePoint) -> SpacePoint:
    net = table.net
    i, j = net.locate(x), net.locate(z)
    g = net.system.semigroup.compose(net.representatives[i], net.representatives[j])
    return net.system.apply(g, net.basepoint)


def _worst(values: np.ndarray[t.Any, t.Any]) -> tuple[float, tuple[int, ...] | None]:
    if values.size == 0:
        return 0.0, None
    flat = int(np.argmax(values))
    return float(values.flat[flat]), tuple(int(v) for v in np.unravel_index(flat, values.shape))


def algebra_check(table: DiamondTable) -> AlgebraReport:
    """Commutativity, associativity and identity defects of ⋄ on the net, with worst witnesses."""
    net = table.net
    sys, space = net.system, net.system.space
    desc = sys.semigroup
    m = len(net)
    products = table.products

    commutativity, comm_at = _worst(space.distances(products, products.transpose(1, 0, 2)))

    snap = table.snap_indices
    idx = np.arange(m)
    # ((i ⋄ j) ⋄ k) against (i ⋄ (j ⋄ k)), every product snapped back to the net
    left = products[snap[:, :, None], idx[None, None, :]]
    right = products[idx[:, None, None], snap[None, :, :]]
    associativity, assoc_at = _worst(space.distances(left, right))

    reps = desc.as_array(net.representatives)
    exact = np.zeros((m, m, m))
    for i, gi in enumerate(net.representatives):
        for j, gj in enumerate(net.representatives):
            lhs = sys.evaluate(net.basepoint, desc.compose_array(desc.compose(gi, gj), reps))
            rhs = sys.evaluate(net.basepoint, desc.compose_array(gi, desc.compose_array(gj, reps)))
            exact[i, j] = space.distances(lhs, rhs)
    representative, rep_at = _worst(exact)

    e_index = next((i for i, g in enumerate(net.representatives) if g == desc.identity), None)
    if e_index is None:
        identity, id_at = float(net.nearest(net.basepoint)[1]), None
    else:
        identity_defect = np.maximum(
            space.distances(products[e_index], net.points), space.distances(products[:, e_index], net.points)
        )
        identity, id_at = _worst(identity_defect)

    return AlgebraReport(
        commutativity,
        associativity,
        identity,
        representative,
        {
            "commutativity": comm_at,
            "associativity": assoc_at,
            "identity": id_at,
            "representative_associativity": rep_at,
        },
    )


def translation_consistency(table: DiamondTable, g: SemigroupElement, x: SpacePoint) -> float:
    """d(π(g, x), π(g, y) ⋄ x)."""
    net = table.net
    sys = net.system
    moved = sys.apply(g, x)
    return sys.space.distance(moved, diamond(table, sys.apply(g, net.basepoint), x))
