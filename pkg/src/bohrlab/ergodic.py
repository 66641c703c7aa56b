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
Følner averaging and invariant measures.

Empirical measures are λ-weighted pushforwards of Følner sets along an orbit; weak-* closeness is
measured against a finite ``TestFunctionFamily`` with declared Lipschitz and sup constants. Finite
commutative semigroups get their Haar measure from an averaging iteration that is cross-checked
against a direct linear solve.
"""
from __future__ import annotations

import concurrent.futures
import enum
import itertools
import logging
import math
import typing as t

import attr
import numpy as np

from .exceptions import NumericError
from .exceptions import PreconditionError
from .exceptions import UnsupportedFamilyError
from .exceptions import ValidationError
from .semigroup import FiniteTable
from .semigroup import QuasiHaarMeasure
from .semigroup import RPlusGrid
from .semigroup import SemigroupDescriptor
from .semigroup import SemigroupElement
from .semigroup import ZbarPlus
from .semigroup import ZPlusD
from .semigroup import check_associative
from .space_action import ActionSystem
from .space_action import MetricSpace
from .space_action import SpacePoint
from .space_action import Torus
from .space_action import ZbarPlusSpace


if t.TYPE_CHECKING:
    from ._types import FloatArray

logger = logging.getLogger(__name__)

TAU = 2.0 * math.pi


class FolnerKind(enum.Enum):
    CUBE = "cube"
    GRID_CUBE = "grid-cube"
    JR = "jr"
    EXPLICIT = "explicit"


@attr.define
class FolnerSequence:
    """n ↦ F_n. Cubes are [0, n)^d (continuous side n on grids), JR sets are {n², ..., n² + n} in ℤ₊."""

    kind: FolnerKind
    semigroup: SemigroupDescriptor
    sets: t.Optional[t.Tuple[t.Tuple[SemigroupElement, ...], ...]] = None

    def __attrs_post_init__(self) -> None:
        desc = self.semigroup
        if self.kind is FolnerKind.CUBE and not isinstance(desc, (ZPlusD, ZbarPlus, FiniteTable)):
            raise UnsupportedFamilyError(f"No cube Følner sets on '{desc.tag}'.")
        if self.kind is FolnerKind.CUBE and isinstance(desc, RPlusGrid):
            raise ValidationError("Use the 'grid-cube' Følner kind on time grids.")
        if self.kind is FolnerKind.GRID_CUBE and not isinstance(desc, RPlusGrid):
            raise UnsupportedFamilyError("'grid-cube' Følner sets live on 'rplusgrid'.")
        if self.kind is FolnerKind.JR and not (type(desc) is ZPlusD and desc.d == 1):
            raise UnsupportedFamilyError("The JR Følner sequence lives on 'zplus:d=1'.")
        if self.kind is FolnerKind.EXPLICIT and not self.sets:
            raise ValidationError("An explicit Følner sequence needs at least one set.")

    @classmethod
    def explicit(cls, desc: SemigroupDescriptor, sets: t.Iterable[t.Iterable[SemigroupElement]]) -> FolnerSequence:
        return cls(FolnerKind.EXPLICIT, desc, tuple(tuple(s) for s in sets))

    def box(self, n: int) -> tuple[np.ndarray[t.Any, t.Any], np.ndarray[t.Any, t.Any]] | None:
        """Inclusive integer corners (lo, hi) when F_n is a box in payload coordinates."""
        if n < 1:
            raise ValidationError(f"Følner index must be ≥ 1, got {n}.")
        if self.kind is FolnerKind.JR:
            return np.array([n * n]), np.array([n * n + n])
        if self.kind is FolnerKind.CUBE and isinstance(self.semigroup, ZPlusD):
            d = self.semigroup.d
            return np.zeros(d, dtype=np.int64), np.full(d, n - 1, dtype=np.int64)
        if self.kind is FolnerKind.GRID_CUBE:
            assert isinstance(self.semigroup, RPlusGrid)
            steps = max(1, int(round(n / self.semigroup.h)))
            return np.zeros(self.semigroup.d, dtype=np.int64), np.full(self.semigroup.d, steps - 1, dtype=np.int64)
        return None

    def array(self, n: int) -> np.ndarray[t.Any, t.Any]:
        """F_n in the semigroup's array form, in lexicographic order."""
        corners = self.box(n)
        if corners is not None:
            lo, hi = corners
            axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
            mesh = np.meshgrid(*axes, indexing="ij")
            return np.stack([m.ravel() for m in mesh], axis=1)
        return self.semigroup.as_array(self(n))

    def __call__(self, n: int) -> list[SemigroupElement]:
        if n < 1:
            raise ValidationError(f"Følner index must be ≥ 1, got {n}.")
        desc = self.semigroup
        if self.kind is FolnerKind.EXPLICIT:
            assert self.sets is not None
            if n > len(self.sets):
                raise ValidationError(f"Explicit Følner sequence has only {len(self.sets)} sets.")
            return list(self.sets[n - 1])
        if isinstance(desc, ZbarPlus):
            return [desc.element(i) for i in range(n)]
        if isinstance(desc, FiniteTable):
            return desc.enumerate_window()
        return desc.from_array(self.array(n))


def jr_sequence(n: int, desc: ZPlusD | None = None) -> list[SemigroupElement]:
    """{n², n² + 1, ..., n² + n}."""
    if n < 1:
        raise ValidationError(f"JR index must be ≥ 1, got {n}.")
    desc = desc if desc is not None else ZPlusD(d=1)
    return FolnerSequence(FolnerKind.JR, desc)(n)


def folner_ratio(
    desc: SemigroupDescriptor, mu: QuasiHaarMeasure, elements: t.Sequence[SemigroupElement], g: SemigroupElement
) -> float:
    """λ(F △ g∘F) / λ(F)."""
    if not elements:
        raise PreconditionError("Følner ratio of an empty set.", details={"size": 0})
    base = set(elements)
    moved = {desc.compose(g, s) for s in base}
    ordered = sorted(base ^ moved, key=lambda e: e.coordinates())
    return mu.mass(ordered) / mu.mass(sorted(base, key=lambda e: e.coordinates()))


@attr.define
class EmpiricalMeasure:
    """Weighted point measure; ``support`` rows are space coordinates in lexicographic order."""

    space: MetricSpace = attr.field(repr=False)
    support: np.ndarray[t.Any, t.Any] = attr.field(eq=False, repr=False)
    weights: np.ndarray[t.Any, t.Any] = attr.field(eq=False, repr=False)

    def __attrs_post_init__(self) -> None:
        if len(self.support) != len(self.weights) or len(self.weights) == 0:
            raise ValidationError("An empirical measure needs one positive weight per support point.")
        if (self.weights < 0).any() or abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise NumericError("Empirical weights must be a probability vector.", history=(math.fsum(self.weights),))

    @classmethod
    def from_points(cls, space: MetricSpace, coords: FloatArray, masses: FloatArray) -> EmpiricalMeasure:
        """Merge identical points (ties broken by coordinate order) and normalise the masses."""
        total = math.fsum(masses)
        if not total > 0:
            raise ValidationError("Total mass must be positive.")
        unique, inverse = np.unique(np.asarray(coords, dtype=np.float64), axis=0, return_inverse=True)
        weights = np.bincount(inverse.reshape(-1), weights=np.asarray(masses, dtype=np.float64) / total)
        return cls(space, unique, weights / math.fsum(weights))

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, fn: t.Callable[[FloatArray], FloatArray]) -> float:
        return math.fsum(self.weights * fn(self.support))


def lebesgue_grid(space: Torus, resolution: int) -> EmpiricalMeasure:
    """Uniform weights on the midpoint grid of [0,1)^k, a quadrature stand-in for Lebesgue measure."""
    axis = (np.arange(resolution, dtype=np.float64) + 0.5) / resolution
    mesh = np.meshgrid(*([axis] * space.k), indexing="ij")
    coords = np.stack([m.ravel() for m in mesh], axis=1)
    return EmpiricalMeasure.from_points(space, coords, np.ones(len(coords)))


@attr.define
class TestFunction:
    """A bounded function on coordinate rows with declared Lipschitz constant and sup bound."""

    __test__: t.ClassVar[bool] = False

    name: str
    fn: t.Callable[[FloatArray], FloatArray] = attr.field(eq=False, repr=False)
    lipschitz: float
    sup: float

    def __call__(self, coords: FloatArray) -> FloatArray:
        return self.fn(coords)


class Normalisation(enum.Enum):
    SUP = "sup"
    BOUNDED_LIPSCHITZ = "bounded-lipschitz"


@attr.define
class TestFunctionFamily:
    """Finite stand-in for C(X) when testing weak-* closeness.

    ``SUP`` normalisation divides each gap by max(1, sup) (characters, arcs); ``BOUNDED_LIPSCHITZ``
    divides by max(1, Lip, sup) (landmark functions).
    """

    __test__: t.ClassVar[bool] = False

    name: str
    members: t.List[TestFunction]
    normalisation: Normalisation = Normalisation.BOUNDED_LIPSCHITZ

    def __len__(self) -> int:
        return len(self.members)

    def scale(self, phi: TestFunction) -> float:
        if self.normalisation is Normalisation.SUP:
            return max(1.0, phi.sup)
        return max(1.0, phi.lipschitz, phi.sup)

    @classmethod
    def characters(cls, k: int = 1, k_max: int = 8) -> TestFunctionFamily:
        """cos and sin of 2πk·x for nonzero integer k with max-norm ≤ k_max, one of each ±k pair."""
        members: list[TestFunction] = []
        for freq in itertools.product(range(-k_max, k_max + 1), repeat=k):
            nonzero = [f for f in freq if f != 0]
            if not nonzero or nonzero[0] < 0:
                continue
            vec = np.asarray(freq, dtype=np.float64)
            lip = TAU * float(np.abs(vec).sum())
            label = ",".join(str(f) for f in freq)
            members.append(TestFunction(f"cos[{label}]", _character(vec, np.cos), lip, 1.0))
            members.append(TestFunction(f"sin[{label}]", _character(vec, np.sin), lip, 1.0))
        return cls(f"characters:k_max={k_max}", members, Normalisation.SUP)

    @classmethod
    def arcs(cls, edges: t.Sequence[float]) -> TestFunctionFamily:
        """Indicators of the arcs [a, b) between consecutive edges on the first torus coordinate."""
        points = sorted(float(e) % 1.0 for e in edges)
        if len(points) < 2:
            raise ValidationError("Arc families need at least two edges.")
        members = []
        for a, b in zip(points, [*points[1:], points[0] + 1.0]):
            members.append(TestFunction(f"arc[{a},{b % 1.0})", _arc(a, b), math.inf, 1.0))
        return cls(f"arcs:{len(members)}", members, Normalisation.SUP)

    @classmethod
    def landmarks(
        cls, space: MetricSpace, rng: np.random.Generator, count: int = 16, radius: float = 0.25
    ) -> TestFunctionFamily:
        """min(1, d(·, p)/r) for seeded landmarks p."""
        if radius <= 0:
            raise ValidationError(f"Landmark radius must be positive, got {radius}.")
        members = []
        for i, p in enumerate(space.sample(rng, count)):
            row = space.as_array([p])[0]
            members.append(TestFunction(f"landmark[{i}]", _landmark(space, row, radius), 1.0 / radius, 1.0))
        return cls(f"landmarks:{count}", members, Normalisation.BOUNDED_LIPSCHITZ)

    @classmethod
    def single(cls, phi: TestFunction, normalisation: Normalisation = Normalisation.SUP) -> TestFunctionFamily:
        return cls(phi.name, [phi], normalisation)


def _character(freq: FloatArray, trig: t.Callable[[FloatArray], FloatArray]) -> t.Callable[[FloatArray], FloatArray]:
    def fn(coords: FloatArray) -> FloatArray:
        return trig(TAU * (np.asarray(coords) @ freq))

    return fn


def _arc(a: float, b: float) -> t.Callable[[FloatArray], FloatArray]:
    def fn(coords: FloatArray) -> FloatArray:
        x = np.asarray(coords)[:, 0]
        return (((x >= a) & (x < b)) | ((x + 1.0 >= a) & (x + 1.0 < b))).astype(np.float64)

    return fn


def _landmark(space: MetricSpace, row: FloatArray, radius: float) -> t.Callable[[FloatArray], FloatArray]:
    def fn(coords: FloatArray) -> FloatArray:
        return np.minimum(1.0, space.distances(np.asarray(coords), row) / radius)

    return fn


def named_test_function(name: str, space: MetricSpace) -> TestFunction:
    """Built-in φ by name: ``one``, ``cos``, ``sin``, ``dist-inf`` (compactified naturals) or ``arc:a,b``."""
    if name == "one":
        return TestFunction("one", lambda c: np.ones(len(c)), 0.0, 1.0)
    if name in ("cos", "sin"):
        if not isinstance(space, Torus):
            raise ValidationError(f"'{name}' is a torus test function, not one on '{space.tag}'.")
        freq = np.zeros(space.k)
        freq[0] = 1.0
        return TestFunction(f"{name}[1]", _character(freq, np.cos if name == "cos" else np.sin), TAU, 1.0)
    if name == "dist-inf":
        if not isinstance(space, ZbarPlusSpace):
            raise ValidationError("'dist-inf' lives on the compactified naturals.")
        return TestFunction("dist-inf", lambda c: 1.0 / (np.asarray(c)[:, 0] + 1.0), 1.0, 1.0)
    if name.startswith("arc:"):
        a, b = (float(v) for v in name[4:].split(","))
        return TestFunction(name, _arc(a, b), math.inf, 1.0)
    raise ValidationError(f"Unknown test function '{name}'.")


def empirical_measure(
    sys: ActionSystem,
    x: SpacePoint,
    elements: t.Sequence[SemigroupElement] | np.ndarray[t.Any, t.Any],
    mu: QuasiHaarMeasure | None = None,
) -> EmpiricalMeasure:
    """μ_{x,F}: the pushforward of λ restricted to F along the orbit of x, normalised."""
    desc = sys.semigroup
    mu = mu if mu is not None else QuasiHaarMeasure.for_semigroup(desc)
    if isinstance(elements, np.ndarray):
        array = elements
        masses = np.full(len(array), mu.cell) if mu.weights is None else mu.point_masses(desc.from_array(array))
    else:
        unique = list(dict.fromkeys(elements))
        array = desc.as_array(unique)
        masses = mu.point_masses(unique)
    if len(array) == 0:
        raise PreconditionError("Empirical measure over an empty Følner set.", details={"size": 0})
    coords = sys.evaluate(sys.space.check_point(x), array)
    return EmpiricalMeasure.from_points(sys.space, coords, masses)


def folner_average(
    sys: ActionSystem,
    x: SpacePoint,
    phi: t.Callable[[FloatArray], FloatArray],
    elements: t.Sequence[SemigroupElement] | np.ndarray[t.Any, t.Any],
    mu: QuasiHaarMeasure | None = None,
) -> float:
    """(1/λ(F)) Σ_{t∈F} φ(π(t, x)) λ({t}), summed with compensation in enumeration order."""
    desc = sys.semigroup
    mu = mu if mu is not None else QuasiHaarMeasure.for_semigroup(desc)
    if isinstance(elements, np.ndarray):
        array = elements
        masses = np.full(len(array), mu.cell) if mu.weights is None else mu.point_masses(desc.from_array(array))
    else:
        unique = list(dict.fromkeys(elements))
        array = desc.as_array(unique)
        masses = mu.point_masses(unique)
    if len(array) == 0:
        raise PreconditionError("Følner average over an empty set.", details={"size": 0})
    values = phi(sys.evaluate(sys.space.check_point(x), array))
    return math.fsum(masses * values) / math.fsum(masses)


def bl_distance(mu1: EmpiricalMeasure, mu2: EmpiricalMeasure, family: TestFunctionFamily) -> float:
    """max over the family of |∫φ dμ₁ − ∫φ dμ₂| divided by the family's normalisation of φ."""
    if not family.members:
        raise ValidationError(f"Test function family '{family.name}' is empty.")
    if mu1.space.tag != mu2.space.tag:
        raise ValidationError(f"Measures live on different spaces: '{mu1.space.tag}' and '{mu2.space.tag}'.")
    return max(abs(mu1.integrate(phi) - mu2.integrate(phi)) / family.scale(phi) for phi in family.members)


def pushforward(sys: ActionSystem, measure: EmpiricalMeasure, g: SemigroupElement) -> EmpiricalMeasure:
    """g_*μ, moving every support point by π(g, ·)."""
    space = sys.space
    moved = [sys.apply(g, space.to_point(row)) for row in measure.support]
    return EmpiricalMeasure.from_points(space, space.as_array(moved), measure.weights)


def support_coverage(measure: EmpiricalMeasure, centres: t.Sequence[SpacePoint], radius: float) -> FloatArray:
    """Mass of the ball B(p, radius) for every centre p; a diagnostic, nothing is asserted from it."""
    if radius <= 0:
        raise ValidationError(f"Ball radius must be positive, got {radius}.")
    space = measure.space
    if not centres:
        return np.zeros(0)
    rows = space.as_array([space.check_point(p) for p in centres])
    inside = space.distances(rows[:, None, :], measure.support[None, :, :]) < radius
    return np.asarray([math.fsum(measure.weights[mask]) for mask in inside])


# Haar measure of finite commutative semigroups


@attr.define
class InvariantMeasureSolution:
    carrier: t.Tuple[str, ...]
    weights: np.ndarray[t.Any, t.Any] = attr.field(eq=False)
    residual: float
    iterations: int
    oracle_gap: float
    history: t.List[float] = attr.field(factory=list, repr=False)

    def to_json(self) -> dict[str, t.Any]:
        return {
            "carrier": list(self.carrier),
            "weights": [float(w) for w in self.weights],
            "residual": self.residual,
            "iterations": self.iterations,
            "oracle_gap": self.oracle_gap,
        }


def _translation_matrices(desc: FiniteTable) -> np.ndarray[t.Any, t.Any]:
    """M[g, a, k] = 1 when g∘k = a, so (M[g] μ)(a) = μ(L_g⁻¹{a})."""
    size = len(desc.names)
    matrices = np.zeros((size, size, size))
    g_idx, k_idx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    matrices[g_idx, desc.table, k_idx] = 1.0
    return matrices


def invariance_residual(desc: FiniteTable, weights: FloatArray) -> float:
    """max over g and singletons {a} of |μ(L_g⁻¹{a}) − μ({a})|."""
    pushed = _translation_matrices(desc) @ np.asarray(weights)
    return float(np.abs(pushed - weights[None, :]).max())


def haar_oracle(desc: FiniteTable) -> FloatArray:
    """Direct least-squares solve of M_g μ = μ for all g together with Σμ = 1."""
    size = len(desc.names)
    matrices = _translation_matrices(desc)
    system = np.vstack([*(m - np.eye(size) for m in matrices), np.ones((1, size))])
    rhs = np.zeros(len(system))
    rhs[-1] = 1.0
    if np.linalg.matrix_rank(system) < size:
        raise NumericError("Invariance constraints do not determine a unique probability vector.")
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return solution


def start_distribution(desc: FiniteTable, rng: np.random.Generator | None = None) -> FloatArray:
    """Uniform when ``rng`` is None, otherwise a seeded Dirichlet draw."""
    size = len(desc.names)
    if rng is None:
        return np.full(size, 1.0 / size)
    return rng.dirichlet(np.ones(size))


def haar_solve_finite(
    desc: FiniteTable,
    start: FloatArray | None = None,
    tolerance: float = 1e-12,
    max_iterations: int = 100_000,
    oracle_tolerance: float = 1e-10,
) -> InvariantMeasureSolution:
    """Iterate μ ↦ (1/|K|) Σ_g (L_g)_*μ until the invariance residual is below ``tolerance``."""
    if not desc.abelian:
        raise ValidationError(f"'{desc.tag}' is not commutative; its Haar measure is out of scope.")
    associativity = check_associative(desc)
    if not associativity.holds:
        raise ValidationError(f"'{desc.tag}' is not associative: {associativity.witness}.")
    size = len(desc.names)
    matrices = _translation_matrices(desc)
    averaging = matrices.mean(axis=0)
    weights = start_distribution(desc) if start is None else np.asarray(start, dtype=np.float64)
    if weights.shape != (size,) or (weights < 0).any() or abs(math.fsum(weights) - 1.0) > 1e-12:
        raise ValidationError("Start distribution must be a probability vector over the carrier.")

    history: list[float] = []
    residual = float(np.abs(matrices @ weights - weights[None, :]).max())
    history.append(residual)
    iterations = 0
    while residual > tolerance:
        if iterations >= max_iterations:
            raise NumericError(
                f"Haar averaging did not reach {tolerance} within {max_iterations} iterations (residual {residual}).",
                history=tuple(history),
            )
        weights = averaging @ weights
        iterations += 1
        residual = float(np.abs(matrices @ weights - weights[None, :]).max())
        history.append(residual)
    weights = weights / math.fsum(weights)

    oracle = haar_oracle(desc)
    gap = float(np.abs(oracle - weights).max())
    if gap > oracle_tolerance:
        raise NumericError(f"Averaging and linear solve disagree by {gap}.", history=tuple(history))
    logger.debug("Haar measure of %s after %d iterations, oracle gap %s", desc.tag, iterations, gap)
    return InvariantMeasureSolution(desc.names, weights, residual, iterations, gap, history)


# unique ergodicity and uniform convergence


@attr.define
class UniqueErgodicityReport:
    schedule: t.List[int]
    diameters: t.List[float]
    tolerance: float
    consistent: bool
    integrals: t.List[t.List[t.List[float]]] = attr.field(factory=list, repr=False)

    def rows(self) -> t.Iterator[list[float]]:
        for n, value in zip(self.schedule, self.diameters):
            yield [n, value]

    def to_json(self) -> dict[str, t.Any]:
        return {
            "schedule": self.schedule,
            "diameters": self.diameters,
            "tolerance": self.tolerance,
            "verdict": "consistent with unique ergodicity" if self.consistent else "not consistent",
        }


def _integral_table(
    sys: ActionSystem,
    basepoints: t.Sequence[SpacePoint],
    elements: np.ndarray[t.Any, t.Any],
    family: TestFunctionFamily,
    mu: QuasiHaarMeasure,
    threads: int,
) -> FloatArray:
    def row(x: SpacePoint) -> list[float]:
        measure = empirical_measure(sys, x, elements, mu)
        return [measure.integrate(phi) for phi in family.members]

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, basepoints))
    else:
        rows = [row(x) for x in basepoints]
    return np.asarray(rows)


def unique_ergodicity_check(
    sys: ActionSystem,
    basepoints: t.Sequence[SpacePoint],
    folner: FolnerSequence,
    family: TestFunctionFamily,
    schedule: t.Sequence[int],
    mu: QuasiHaarMeasure | None = None,
    tolerance: float = 1e-2,
    threads: int = 1,
) -> UniqueErgodicityReport:
    """Weak-* diameter of {μ_{x,n}} over basepoints for each n in the schedule."""
    if len(basepoints) < 2:
        raise PreconditionError(
            "Unique ergodicity probing needs at least two basepoints.", details={"count": len(basepoints)}
        )
    if not family.members:
        raise ValidationError(f"Test function family '{family.name}' is empty.")
    mu = mu if mu is not None else QuasiHaarMeasure.for_semigroup(sys.semigroup)
    scales = np.asarray([family.scale(phi) for phi in family.members])
    diameters, integrals = [], []
    for n in schedule:
        table = _integral_table(sys, basepoints, folner.array(n), family, mu, threads)
        # max over basepoint pairs of the normalised gap equals max over φ of (max − min)
        spread = (table.max(axis=0) - table.min(axis=0)) / scales
        diameters.append(float(spread.max()))
        integrals.append(table.tolist())
        logger.info("n=%d: weak-* diameter %.3e over %d basepoints", n, diameters[-1], len(basepoints))
    decreasing = all(b <= a for a, b in itertools.pairwise(diameters))
    return UniqueErgodicityReport(
        list(schedule), diameters, tolerance, decreasing and diameters[-1] <= tolerance, integrals
    )


@attr.define
class ConvergenceSeries:
    phi: str
    target: float
    schedule: t.List[int]
    deviations: t.List[float]
    values: t.List[t.List[float]] = attr.field(factory=list, repr=False)

    @property
    def nonincreasing(self) -> bool:
        return all(b <= a for a, b in itertools.pairwise(self.deviations))

    def rows(self) -> t.Iterator[list[float]]:
        for n, deviation in zip(self.schedule, self.deviations):
            yield [n, deviation]

    def value_rows(self) -> t.Iterator[list[float]]:
        for n, values in zip(self.schedule, self.values):
            for basepoint_id, value in enumerate(values):
                yield [n, value, basepoint_id]

    def to_json(self) -> dict[str, t.Any]:
        return {
            "phi": self.phi,
            "target": self.target,
            "schedule": self.schedule,
            "deviations": self.deviations,
            "nonincreasing": self.nonincreasing,
        }


def uniform_convergence_check(
    sys: ActionSystem,
    basepoints: t.Sequence[SpacePoint],
    folner: FolnerSequence,
    phi: TestFunction,
    target: float,
    schedule: t.Sequence[int],
    mu: QuasiHaarMeasure | None = None,
    threads: int = 1,
) -> ConvergenceSeries:
    """max over basepoints of |Følner average of φ − target| along the schedule."""
    if not basepoints:
        raise PreconditionError("Uniform convergence needs basepoints.", details={"count": 0})
    family = TestFunctionFamily.single(phi)
    mu = mu if mu is not None else QuasiHaarMeasure.for_semigroup(sys.semigroup)
    deviations, values = [], []
    for n in schedule:
        table = _integral_table(sys, basepoints, folner.array(n), family, mu, threads)[:, 0]
        deviations.append(float(np.abs(table - target).max()))
        values.append([float(v) for v in table])
    return ConvergenceSeries(phi.name, target, list(schedule), deviations, values)


# Shulman diagnostics


class ShulmanVerdict(enum.Enum):
    BOUNDED = "bounded"
    GROWING = "growing"


@attr.define
class ShulmanReport:
    constants: t.List[float]
    verdict: ShulmanVerdict

    def rows(self) -> t.Iterator[list[float]]:
        for n, c in enumerate(self.constants, start=1):
            yield [n, c]

    def to_json(self) -> dict[str, t.Any]:
        return {"verdict": self.verdict.value, "max": max(self.constants, default=0.0), "constants": self.constants}


def _mark_boxes(boxes: list[tuple[np.ndarray[t.Any, t.Any], np.ndarray[t.Any, t.Any]]]) -> int:
    """Number of lattice points in a union of inclusive integer boxes, by difference-array marking."""
    if not boxes:
        return 0
    lows = np.stack([lo for lo, _ in boxes])
    highs = np.stack([hi for _, hi in boxes])
    origin = lows.min(axis=0)
    shape = tuple(int(s) for s in highs.max(axis=0) - origin + 2)
    marks = np.zeros(shape, dtype=np.int64)
    d = len(shape)
    for lo, hi in boxes:
        a, b = lo - origin, hi - origin + 1
        for corner in itertools.product((0, 1), repeat=d):
            index = tuple(int(b[i] if c else a[i]) for i, c in enumerate(corner))
            marks[index] += (-1) ** sum(corner)
    for axis in range(d):
        marks = np.cumsum(marks, axis=axis)
    return int((marks > 0).sum())


def _difference_count(folner: FolnerSequence, n: int) -> int:
    """#∪_{k<n} F_k⁻¹F_n inside the enveloping group."""
    target = folner.box(n)
    if target is not None:
        boxes = []
        for k in range(1, n):
            lo_k, hi_k = folner.box(k)  # type: ignore[misc]
            boxes.append((target[0] - hi_k, target[1] - lo_k))
        return _mark_boxes(boxes)
    desc = folner.semigroup
    f_n = desc.as_array(folner(n)).reshape(len(folner(n)), -1)
    differences: set[tuple[int, ...]] = set()
    for k in range(1, n):
        f_k = desc.as_array(folner(k)).reshape(len(folner(k)), -1)
        diff = (f_n[None, :, :] - f_k[:, None, :]).reshape(-1, f_n.shape[1])
        differences.update(map(tuple, diff.tolist()))
    return len(differences)


def shulman_constant(folner: FolnerSequence, n_max: int) -> ShulmanReport:
    """c_n = λ(∪_{k<n} F_k⁻¹F_n) / λ(F_n) for n ≤ n_max; the empty union gives c_1 = 0."""
    desc = folner.semigroup
    if not desc.group_embeddable:
        raise UnsupportedFamilyError(f"'{desc.tag}' does not embed in a group; F_k⁻¹F_n is undefined.")
    if n_max < 1:
        raise ValidationError(f"n_max must be ≥ 1, got {n_max}.")
    constants = []
    for n in range(1, n_max + 1):
        size = len(folner.array(n)) if folner.kind is not FolnerKind.EXPLICIT else len(set(folner(n)))
        constants.append(_difference_count(folner, n) / size)
    # c_1 is the empty union; growth is judged from n = 2 on
    tail = constants[1:]
    if len(tail) < 2:
        verdict = ShulmanVerdict.BOUNDED
    else:
        half = len(tail) // 2
        early, late = max(tail[:half]), max(tail[half:])
        verdict = ShulmanVerdict.GROWING if late > 1.5 * early else ShulmanVerdict.BOUNDED
    return ShulmanReport(constants, verdict)


def default_folner(desc: SemigroupDescriptor, kind: str = "cube") -> FolnerSequence:
    """Følner sequence by tag; ``cube`` becomes ``grid-cube`` on time grids."""
    folner_kind = FolnerKind(kind)
    if folner_kind is FolnerKind.CUBE and isinstance(desc, RPlusGrid):
        folner_kind = FolnerKind.GRID_CUBE
    return FolnerSequence(folner_kind, desc)

