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
Finite-resolution evidence for Bohr almost periodicity.

A point x is Bohr almost periodic when, for every eps, its ε-error period set
{τ : d(π(g, x), π(τ∘g, x)) < eps for all g} is left syndetic. Here both quantifiers run over
enumerated windows, syndeticity is searched over family gauges (boxes, prefixes, or the whole
compact carrier), and the verdict is a ``BohrCertificate`` that records every number it used.
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

from .exceptions import PreconditionError
from .exceptions import ResourceError
from .exceptions import UnsupportedFamilyError
from .exceptions import ValidationError
from .semigroup import FiniteTable
from .semigroup import SemigroupDescriptor
from .semigroup import SemigroupElement
from .semigroup import WindowSpec
from .semigroup import ZbarPlus
from .semigroup import ZPlusD
from .space_action import ActionSystem
from .space_action import SpacePoint
from .space_action import net_indices
from .space_action import orbit
from .utils import MAX_WINDOW_ELEMENTS


if t.TYPE_CHECKING:
    from ._types import FloatArray

logger = logging.getLogger(__name__)

DEFECT_CHUNK = 2048
COMPANION_SHRINK = 1.0 - 2.0**-10


class CertificateStatus(enum.Enum):
    CERTIFIED = "CertifiedAtResolution"
    REFUTED = "RefutedAtResolution"
    INCONCLUSIVE = "Inconclusive"


class GaugeKind(enum.Enum):
    BOX = "box"
    PREFIX = "prefix"
    CARRIER = "carrier"


@attr.define
class EpsilonPeriodSet:
    """Members are candidates with defect < eps.

    ``rejected`` keeps the (possibly partial) defect that ruled each other candidate out.
    """

    eps: float
    window: WindowSpec
    members: t.List[SemigroupElement]
    defects: t.Dict[SemigroupElement, float]
    candidate_window: t.Optional[WindowSpec] = None
    rejected: t.Dict[SemigroupElement, float] = attr.field(factory=dict)

    def __contains__(self, tau: SemigroupElement) -> bool:
        return tau in self.defects

    def __len__(self) -> int:
        return len(self.members)

    def to_json(self) -> dict[str, t.Any]:
        return {
            "eps": self.eps,
            "members": [list(tau.coordinates()) for tau in self.members],
            "defects": [[*tau.coordinates(), self.defects[tau]] for tau in self.members],
        }


@attr.define
class SyndeticityWitness:
    """``gauge`` is l for box and prefix gauges and None when L is the whole compact carrier."""

    success: bool
    kind: GaugeKind
    gauge: t.Optional[int] = None
    covered_bound: t.Optional[int] = None
    uncovered: t.Optional[SemigroupElement] = None

    @property
    def size(self) -> float:
        if not self.success:
            return math.inf
        return math.inf if self.gauge is None else float(self.gauge)

    def to_json(self) -> dict[str, t.Any]:
        return {
            "success": self.success,
            "kind": self.kind.value,
            "gauge": self.gauge,
            "covered_bound": self.covered_bound,
            "uncovered": None if self.uncovered is None else list(self.uncovered.coordinates()),
        }


@attr.define
class EquicontinuityEstimate:
    eps: float
    delta_hat: float
    window: WindowSpec
    sample_size: int
    worst_pair: t.Optional[t.Tuple[t.Any, t.Any]] = None
    worst_propagation: float = 0.0
    rung: t.Optional[int] = None

    def to_json(self) -> dict[str, t.Any]:
        return {
            "eps": self.eps,
            "delta_hat": self.delta_hat,
            "rung": self.rung,
            "sample_size": self.sample_size,
            "worst_propagation": self.worst_propagation,
        }


@attr.define
class BohrCertificate:
    status: CertificateStatus
    eps: float
    windows: t.List[int]
    witnesses: t.List[SyndeticityWitness] = attr.field(factory=list)
    period_sets: t.List[EpsilonPeriodSet] = attr.field(factory=list)
    equicontinuity: t.List[EquicontinuityEstimate] = attr.field(factory=list)
    reason: str = ""

    @property
    def gauges(self) -> list[int | None]:
        return [w.gauge for w in self.witnesses]

    def to_json(self) -> dict[str, t.Any]:
        last = self.period_sets[-1] if self.period_sets else None
        return {
            "status": self.status.value,
            "eps": self.eps,
            "windows": self.windows,
            "reason": self.reason,
            "gauge_history": [w.to_json() for w in self.witnesses],
            "member_counts": [len(p) for p in self.period_sets],
            "period_set": None if last is None else last.to_json(),
            "equicontinuity": [e.to_json() for e in self.equicontinuity],
        }


def _defect_against(
    sys: ActionSystem,
    x: SpacePoint,
    tau: SemigroupElement,
    base: FloatArray,
    elements: np.ndarray[t.Any, t.Any],
    stop: float | None = None,
) -> tuple[float, bool]:
    shifted = sys.semigroup.compose_array(tau, elements)
    worst = 0.0
    for start in range(0, len(elements), DEFECT_CHUNK):
        stop_at = start + DEFECT_CHUNK
        images = sys.evaluate(x, shifted[start:stop_at])
        worst = max(worst, float(sys.space.distances(base[start:stop_at], images).max()))
        if stop is not None and worst >= stop:
            return worst, False
    return worst, True


def period_defect(sys: ActionSystem, x: SpacePoint, tau: SemigroupElement, window: WindowSpec | None = None) -> float:
    """max over g in the window of d(π(g, x), π(τ∘g, x))."""
    x = sys.space.check_point(x)
    sys.semigroup.check_member(tau)
    elements = sys.semigroup.as_array(sys.semigroup.enumerate_window(window))
    base = sys.evaluate(x, elements)
    return _defect_against(sys, x, tau, base, elements)[0]


def epsilon_period_set(
    sys: ActionSystem,
    x: SpacePoint,
    eps: float,
    window: WindowSpec | None = None,
    candidate_window: WindowSpec | None = None,
    threads: int = 1,
) -> EpsilonPeriodSet:
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}.")
    desc = sys.semigroup
    x = sys.space.check_point(x)
    window = window if window is not None else desc.default_window()
    candidates = desc.enumerate_window(candidate_window if candidate_window is not None else window)
    elements = desc.as_array(desc.enumerate_window(window))
    base = sys.evaluate(x, elements)

    def measure(tau: SemigroupElement) -> tuple[float, bool]:
        return _defect_against(sys, x, tau, base, elements, stop=eps)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(measure, candidates))
    else:
        results = [measure(tau) for tau in candidates]

    members: list[SemigroupElement] = []
    defects: dict[SemigroupElement, float] = {}
    rejected: dict[SemigroupElement, float] = {}
    for tau, (value, complete) in zip(candidates, results):
        if complete and value < eps:
            members.append(tau)
            defects[tau] = value
        else:
            rejected[tau] = value
    logger.debug("eps=%s: %d of %d candidates are ε-periods", eps, len(members), len(candidates))
    return EpsilonPeriodSet(eps, window, members, defects, candidate_window, rejected)


def _dilate(grid: np.ndarray[t.Any, t.Any], length: int) -> np.ndarray[t.Any, t.Any]:
    """Cells g such that g − ℓ is marked for some ℓ in the box [0, length)^d."""
    out = grid.astype(np.int64)
    for axis in range(grid.ndim):
        c = np.cumsum(out, axis=axis)
        shifted = np.zeros_like(c)
        if length < c.shape[axis]:
            src = [slice(None)] * grid.ndim
            dst = [slice(None)] * grid.ndim
            src[axis] = slice(0, c.shape[axis] - length)
            dst[axis] = slice(length, None)
            shifted[tuple(dst)] = c[tuple(src)]
        out = ((c - shifted) > 0).astype(np.int64)
    return out.astype(bool)


def _member_grid(desc: ZPlusD, members: t.Sequence[SemigroupElement], width: int) -> np.ndarray[t.Any, t.Any]:
    grid = np.zeros((width,) * desc.d, dtype=bool)
    if members:
        coords = desc.as_array(members)
        coords = coords[(coords < width).all(axis=1)]
        grid[tuple(coords.T)] = True
    return grid


def _box_witness(desc: ZPlusD, members: t.Sequence[SemigroupElement], width: int, max_gauge: int) -> SyndeticityWitness:
    grid = _member_grid(desc, members, width)
    uncovered: tuple[int, ...] = (0,) * desc.d
    for length in range(1, min(max_gauge, max(1, width - 1)) + 1):
        inner = _dilate(grid, length)[(slice(0, width - length),) * desc.d]
        if inner.all():
            return SyndeticityWitness(True, GaugeKind.BOX, length, width - length)
        uncovered = tuple(int(c) for c in np.argwhere(~inner)[0])
    return SyndeticityWitness(False, GaugeKind.BOX, uncovered=desc.element(uncovered))


def _prefix_witness(
    desc: ZbarPlus, members: t.Sequence[SemigroupElement], cutoff: int, max_gauge: int
) -> SyndeticityWitness:
    marks = np.zeros(cutoff, dtype=bool)
    finite = [m.payload for m in members if m.payload != math.inf and m.payload < cutoff]
    marks[finite] = True
    uncovered = 0
    # the covered prefix must stay longer than the gauge itself
    for length in range(1, min(max_gauge, (cutoff - 1) // 2) + 1):
        inner = _dilate(marks, length)[: cutoff - length]
        if inner.all():
            return SyndeticityWitness(True, GaugeKind.PREFIX, length, cutoff - length)
        uncovered = int(np.argmin(inner))
    return SyndeticityWitness(False, GaugeKind.PREFIX, uncovered=desc.element(uncovered))


def _carrier_witness(
    desc: SemigroupDescriptor, members: t.Sequence[SemigroupElement], window: WindowSpec
) -> SyndeticityWitness:
    carrier = desc.enumerate_window(window)
    if desc.identity in set(members):
        return SyndeticityWitness(True, GaugeKind.CARRIER, covered_bound=len(carrier))
    if len(members) * len(carrier) > MAX_WINDOW_ELEMENTS:
        raise ResourceError("Carrier cover check exceeds the window element budget.")
    covered = {desc.compose(tau, ell) for tau in members for ell in carrier}
    for g in carrier:
        if g not in covered:
            return SyndeticityWitness(False, GaugeKind.CARRIER, uncovered=g)
    return SyndeticityWitness(True, GaugeKind.CARRIER, covered_bound=len(carrier))


def syndeticity_witness(
    pset: EpsilonPeriodSet,
    desc: SemigroupDescriptor,
    window: WindowSpec | None = None,
    max_gauge: int = 256,
) -> SyndeticityWitness:
    """Smallest family gauge L with ℙ(ε)∘L covering the window shrunken by L.

    Boxes [0, l)^d on ``ZPlusD``; prefixes {0, ..., l-1, INF} on ``ZbarPlus`` with the whole compact
    carrier as a fallback; the carrier itself on finite tables. A prefix gauge must be shorter than the
    part of the window it covers.
    """
    window = window if window is not None else pset.window
    if isinstance(desc, ZPlusD):
        if window.bound is None:
            raise PreconditionError("Box gauges need a box window.", details={"window": "explicit"})
        return _box_witness(desc, pset.members, window.bound, max_gauge)
    if isinstance(desc, ZbarPlus):
        if window.bound is None:
            raise PreconditionError("Prefix gauges need a cutoff window.", details={"window": "explicit"})
        witness = _prefix_witness(desc, pset.members, window.bound, max_gauge)
        if witness.success:
            return witness
        return _carrier_witness(desc, pset.members, window)
    if isinstance(desc, FiniteTable):
        return _carrier_witness(desc, pset.members, window)
    raise UnsupportedFamilyError(f"No syndeticity gauge for '{desc.tag}'.")


def recheck_witness(
    witness: SyndeticityWitness, pset: EpsilonPeriodSet, desc: SemigroupDescriptor, window: WindowSpec
) -> bool:
    """Re-verify a successful witness by brute-force enumeration of τ∘ℓ."""
    if not witness.success:
        return False
    members = pset.members
    if witness.kind is GaugeKind.CARRIER:
        gauge_elements = desc.enumerate_window(window)
        targets = gauge_elements
    elif witness.kind is GaugeKind.BOX:
        assert isinstance(desc, ZPlusD) and witness.gauge is not None and witness.covered_bound is not None
        gauge_elements = desc.enumerate_window(WindowSpec.box(witness.gauge))
        targets = desc.enumerate_window(WindowSpec.box(witness.covered_bound))
    else:
        assert witness.gauge is not None and witness.covered_bound is not None
        gauge_elements = desc.enumerate_window(WindowSpec.cutoff(witness.gauge))
        targets = desc.enumerate_window(WindowSpec.cutoff(witness.covered_bound))
    covered = {desc.compose(tau, ell) for tau in members for ell in gauge_elements}
    return all(g in covered for g in targets)


def relative_density_gap(pset: EpsilonPeriodSet, desc: SemigroupDescriptor) -> int:
    """Largest gap between consecutive finite one-dimensional members (relative density), 0 for ≤ 1 member."""
    if isinstance(desc, ZPlusD) and desc.d == 1:
        values = sorted(m.payload[0] for m in pset.members)
    elif isinstance(desc, ZbarPlus):
        values = sorted(m.payload for m in pset.members if m.payload != math.inf)
    else:
        raise UnsupportedFamilyError(f"Gaps are only defined on one-dimensional families, not '{desc.tag}'.")
    return max((b - a for a, b in itertools.pairwise(values)), default=0)


def equicontinuity_modulus(
    sys: ActionSystem,
    net: t.Sequence[SpacePoint],
    eps: float,
    window: WindowSpec | None = None,
    depth: int = 60,
) -> EquicontinuityEstimate:
    """Largest δ = eps·2⁻ʲ such that every tested pair closer than δ stays within eps over the window.

    Tested pairs are the net pairs plus, per rung, each net point with a companion just inside δ.
    """
    if not net:
        raise PreconditionError("Equicontinuity needs a nonempty net.", details={"net_size": 0})
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}.")
    space = sys.space
    window = window if window is not None else sys.semigroup.default_window()
    elements = sys.semigroup.as_array(sys.semigroup.enumerate_window(window))
    points = [space.check_point(p) for p in net]
    coords = space.as_array(points)
    pair_distances = space.distances(coords[:, None, :], coords[None, :, :])
    orbits = [sys.evaluate(p, elements) for p in points]

    def spread(a: FloatArray, b: FloatArray) -> float:
        return float(space.distances(a, b).max())

    checked = 0
    for rung in range(depth + 1):
        delta = eps * 2.0**-rung
        worst, worst_pair, ok = 0.0, None, True
        close = np.argwhere(np.triu(pair_distances < delta, k=1))
        for i, k in close:
            checked += 1
            value = spread(orbits[i], orbits[k])
            if value > worst:
                worst, worst_pair = value, (points[i], points[k])
            if value > eps:
                ok = False
                break
        if ok:
            for i, p in enumerate(points):
                companion = space.nudge(p, delta * COMPANION_SHRINK)
                if companion is None or space.distance(p, companion) == 0.0:
                    continue
                checked += 1
                value = spread(orbits[i], sys.evaluate(companion, elements))
                if value > worst:
                    worst, worst_pair = value, (p, companion)
                if value > eps:
                    ok = False
                    break
        if ok:
            return EquicontinuityEstimate(eps, delta, window, checked, worst_pair, worst, rung)
        logger.debug("rung %d (delta=%s) fails with propagation %s", rung, delta, worst)
    return EquicontinuityEstimate(eps, 0.0, window, checked, worst_pair, worst, None)


def _nonincreasing(sizes: list[float]) -> bool:
    return all(a >= b for a, b in itertools.pairwise(sizes))


def _orbit_net(sys: ActionSystem, x: SpacePoint, eps: float, window: WindowSpec) -> list[SpacePoint]:
    sample = orbit(sys, x, window)
    return [sample.point(i) for i in net_indices(sys.space, sample.points, eps)]


def certify_bohr(
    sys: ActionSystem,
    x: SpacePoint,
    eps: float,
    schedule: t.Sequence[int],
    max_gauge: int = 256,
    depth: int = 60,
    threads: int = 1,
) -> BohrCertificate:
    """Finite-resolution verdict on Bohr almost periodicity of ``x``.

    Refuted when some window admits no gauge up to ``max_gauge`` or the equicontinuity modulus
    collapses between the first and last window; certified when gauges do not increase over the
    last half of the schedule; inconclusive otherwise. On compact families a growing prefix gauge
    gives way to the carrier gauge when the carrier covers every window.
    """
    if not schedule:
        raise PreconditionError("certify needs a nonempty window schedule.", details={"schedule": []})
    if any(b <= a for a, b in itertools.pairwise(schedule)):
        raise PreconditionError("Window schedule must be strictly increasing.", details={"schedule": list(schedule)})
    x = sys.space.check_point(x)
    windows = [WindowSpec(bound=w) for w in schedule]
    certificate = BohrCertificate(CertificateStatus.INCONCLUSIVE, eps, list(schedule))

    for width, window in zip(schedule, windows):
        pset = epsilon_period_set(sys, x, eps, window, threads=threads)
        witness = syndeticity_witness(pset, sys.semigroup, window, max_gauge)
        certificate.period_sets.append(pset)
        certificate.witnesses.append(witness)
        logger.info("window %d: %d ε-periods, gauge %s (%s)", width, len(pset), witness.gauge, witness.kind.value)
        if not witness.success:
            certificate.status = CertificateStatus.REFUTED
            certificate.reason = f"no {witness.kind.value} gauge up to {max_gauge} covers window {width}"
            return certificate

    ends = [windows[0]] if len(windows) == 1 else [windows[0], windows[-1]]
    for window in ends:
        net = _orbit_net(sys, x, eps, window)
        certificate.equicontinuity.append(equicontinuity_modulus(sys, net, eps, window, depth))
    first, last = certificate.equicontinuity[0].delta_hat, certificate.equicontinuity[-1].delta_hat
    if last == 0.0 or last < first / 2:
        certificate.status = CertificateStatus.REFUTED
        certificate.reason = f"equicontinuity modulus collapses from {first} to {last}"
        return certificate

    tail = [w.size for w in certificate.witnesses[len(certificate.witnesses) // 2 :]]
    if not _nonincreasing(tail) and sys.semigroup.compact:
        carriers = [_carrier_witness(sys.semigroup, p.members, p.window) for p in certificate.period_sets]
        if all(w.success for w in carriers):
            logger.info("prefix gauges grow with the window, the compact carrier covers every window")
            certificate.witnesses = carriers
            tail = [w.size for w in carriers[len(carriers) // 2 :]]
    if _nonincreasing(tail):
        certificate.status = CertificateStatus.CERTIFIED
        certificate.reason = "gauge stable over the last half of the schedule"
    else:
        certificate.reason = f"gauge grows over the last half of the schedule: {tail}"
    return certificate


def cauchy_tail_defect(sys: ActionSystem, y: SpacePoint, seq: t.Sequence[SemigroupElement], tail: int) -> float:
    """max over n, m ≥ tail of d(π(s_n, y), π(s_m, y)) within the finite sequence."""
    if not 0 <= tail < len(seq):
        raise PreconditionError(
            f"Tail index {tail} is outside a sequence of length {len(seq)}.", details={"tail": tail}
        )
    images = sys.evaluate(sys.space.check_point(y), sys.semigroup.as_array(list(seq[tail:])))
    return float(sys.space.distances(images[:, None, :], images[None, :, :]).max())


def cauchy_product_check(
    sys: ActionSystem,
    y: SpacePoint,
    seq_t: t.Sequence[SemigroupElement],
    seq_s: t.Sequence[SemigroupElement],
    tail: int,
    threshold: float = 1e-3,
) -> float:
    """Tail diameter of (π(t_n∘s_n, y)), once both input sequences are Cauchy below ``threshold``."""
    if len(seq_t) != len(seq_s):
        raise PreconditionError(
            "Sequences must have equal length.", details={"len_t": len(seq_t), "len_s": len(seq_s)}
        )
    for label, seq in (("t", seq_t), ("s", seq_s)):
        value = cauchy_tail_defect(sys, y, seq, tail)
        if value > threshold:
            raise PreconditionError(
                f"Sequence '{label}' is not Cauchy beyond index {tail}: tail diameter {value} > {threshold}.",
                details={"sequence": label, "tail_defect": value, "threshold": threshold},
            )
    products = [sys.semigroup.compose(a, b) for a, b in zip(seq_t, seq_s)]
    return cauchy_tail_defect(sys, y, products, tail)
