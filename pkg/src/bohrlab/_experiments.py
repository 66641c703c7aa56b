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
Named experiments and the runner that persists them.

Each experiment returns an ``ExperimentResult``: a JSON-able summary plus CSV series. The runner
writes ``report.json`` (sorted keys, no timings), one CSV per series and ``timings.json`` into the
output directory. Outputs other than ``timings.json`` depend only on the config and its seed.

CSV columns per experiment:

* certify: ``gauges.csv`` (window, success, gauge, covered_bound, members),
  ``periods.csv`` (τ coordinates, defect) and ``equicontinuity.csv`` (window, delta_hat, worst, sample_size)
* equicontinuity: ``equicontinuity.csv`` (window, net_size, delta_hat, worst, sample_size)
* diamond: ``net.csv`` (index, x…, g…), ``diamond.csv`` (i, j, x…, defect), ``consistency.csv`` (i, j, defect)
* haar: ``haar.csv`` (index, name, weight), ``starts.csv`` (start, max_gap), ``history.csv`` (iteration, residual)
* unique-ergodicity: ``diameters.csv`` (n, value), ``integrals.csv`` (n, basepoint-id, phi, value)
* folner-uniform: ``deviations.csv`` (n, value), ``values.csv`` (n, value, basepoint-id),
  ``invariance.csv`` (n, value)
* shulman-jr: ``shulman.csv`` (n, jr, cube), ``folner_ratio.csv`` (n, value)
* cauchy: ``cauchy.csv`` (n, t, s, x…)
* semigroup-audit: ``audit.csv`` (check, holds, checked), ``inverses.csv`` (index, element, inverse, in_semigroup)

A ``NumericError`` leaves ``residuals.csv`` (iteration, residual) behind before it propagates.
"""
from __future__ import annotations

import csv
import logging
import os
import time
import typing as t

import attr
import numpy as np
import orjson

from . import almost_periodicity
from . import ergodic
from . import orbit_algebra
from . import semigroup as sg
from ._registry import AutoSemigroup
from ._registry import AutoSystem
from .exceptions import NumericError
from .exceptions import UnsupportedFamilyError
from .exceptions import ValidationError
from .space_action import ActionSystem
from .space_action import DoublingMap
from .space_action import DyadicCircle
from .space_action import SpacePoint
from .space_action import Torus
from .utils.dantic import env_converter


if t.TYPE_CHECKING:
    from ._configuration import ExperimentConfig

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
TIMINGS_FILE = "timings.json"
RESIDUALS_FILE = "residuals.csv"

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


@attr.define
class Series:
    header: t.List[str]
    rows: t.List[t.List[t.Any]]


@attr.define
class ExperimentResult:
    summary: t.Dict[str, t.Any]
    series: t.Dict[str, Series] = attr.field(factory=dict)


@attr.define
class RunReport:
    experiment: str
    config: t.Dict[str, t.Any]
    summary: t.Dict[str, t.Any]
    manifest: t.List[str]
    timings: t.Dict[str, float] = attr.field(factory=dict)
    out: str = "."

    def to_json(self) -> dict[str, t.Any]:
        # timings live in their own file so that report.json is reproducible byte for byte
        return {
            "experiment": self.experiment,
            "config": self.config,
            "summary": self.summary,
            "manifest": self.manifest,
        }


def _semigroup(config: ExperimentConfig) -> sg.SemigroupDescriptor:
    return AutoSemigroup.for_tag(config.semigroup)


def _system(config: ExperimentConfig) -> ActionSystem:
    return AutoSystem.for_tag(config.system, _semigroup(config))


def _basepoint(sys: ActionSystem, config: ExperimentConfig) -> SpacePoint:
    return sys.space.parse_point(env_converter(config.basepoint))


def _basepoints(sys: ActionSystem, config: ExperimentConfig) -> list[SpacePoint]:
    """The configured basepoint followed by seeded samples of the space."""
    rng = np.random.default_rng(config.seed)
    return [_basepoint(sys, config), *sys.space.sample(rng, config.basepoints - 1)]


def _family(sys: ActionSystem, config: ExperimentConfig) -> ergodic.TestFunctionFamily:
    space = sys.space
    if config.family == "characters":
        if not isinstance(space, (Torus, DyadicCircle)):
            raise ValidationError(f"Characters live on tori and the dyadic circle, not on '{space.tag}'.")
        return ergodic.TestFunctionFamily.characters(space.dim, config.k_max)
    if config.family == "arcs":
        return ergodic.TestFunctionFamily.arcs(config.arc_edges)
    if config.family == "landmarks":
        rng = np.random.default_rng([config.seed, 1])
        return ergodic.TestFunctionFamily.landmarks(space, rng, config.landmarks, config.landmark_radius)
    raise ValidationError(f"Unknown test function family '{config.family}'.")


def _cell(value: t.Any) -> t.Any:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


# experiments


def run_certify(config: ExperimentConfig) -> ExperimentResult:
    sys = _system(config)
    x = _basepoint(sys, config)
    certificate = almost_periodicity.certify_bohr(
        sys, x, config.eps, config.windows, config.max_gauge, config.delta_depth, config.threads
    )
    gauges = Series(
        ["window", "success", "gauge", "covered_bound", "members"],
        [
            [w, _cell(wit.success), _cell(wit.gauge), _cell(wit.covered_bound), len(p)]
            for w, wit, p in zip(config.windows, certificate.witnesses, certificate.period_sets)
        ],
    )
    series = {"gauges": gauges}
    if certificate.period_sets:
        last = certificate.period_sets[-1]
        width = len(last.members[0].coordinates()) if last.members else 1
        series["periods"] = Series(
            [*(f"tau{i}" for i in range(width)), "defect"],
            [[*tau.coordinates(), last.defects[tau]] for tau in last.members],
        )
    if certificate.equicontinuity:
        series["equicontinuity"] = Series(
            ["window", "delta_hat", "worst", "sample_size"],
            [[e.window.bound, e.delta_hat, e.worst_propagation, e.sample_size] for e in certificate.equicontinuity],
        )
    return ExperimentResult(certificate.to_json(), series)


def run_equicontinuity(config: ExperimentConfig) -> ExperimentResult:
    sys = _system(config)
    x = _basepoint(sys, config)
    estimates, rows = [], []
    for width in config.windows:
        window = sg.WindowSpec(bound=width)
        net = orbit_algebra.build_orbit_net(sys, x, config.eps, window)
        points = [net.point(i) for i in range(len(net))]
        estimate = almost_periodicity.equicontinuity_modulus(sys, points, config.eps, window, config.delta_depth)
        estimates.append(estimate)
        rows.append([width, len(net), estimate.delta_hat, estimate.worst_propagation, estimate.sample_size])
        logger.info("window %d: delta_hat(%s) = %s over %d net points", width, config.eps, estimate.delta_hat, len(net))
    deltas = [e.delta_hat for e in estimates]
    summary = {
        "eps": config.eps,
        "windows": config.windows,
        "delta_hat": deltas,
        "nonshrinking": all(b >= a for a, b in zip(deltas, deltas[1:])),
        "final": deltas[-1],
    }
    return ExperimentResult(
        summary, {"equicontinuity": Series(["window", "net_size", "delta_hat", "worst", "sample_size"], rows)}
    )


def run_diamond(config: ExperimentConfig) -> ExperimentResult:
    sys = _system(config)
    y = _basepoint(sys, config)
    window = sg.WindowSpec(bound=config.windows[-1])
    net = orbit_algebra.build_orbit_net(sys, y, config.eps, window)
    table = orbit_algebra.build_diamond_table(net, config.threads)
    algebra = orbit_algebra.algebra_check(table)
    threshold = config.algebra_threshold
    if threshold is None:
        threshold = orbit_algebra.default_algebra_threshold(config.eps)

    consistency_rows = []
    points = [net.point(i) for i in range(len(net))]
    for i, g in enumerate(net.representatives):
        for j, x in enumerate(points):
            consistency_rows.append([i, j, orbit_algebra.translation_consistency(table, g, x)])
    worst_consistency = max(row[2] for row in consistency_rows)

    width = len(net.representatives[0].coordinates())
    net_rows = [
        [i, *(float(v) for v in net.points[i]), *net.representatives[i].coordinates()] for i in range(len(net))
    ]
    summary = {
        "eps": config.eps,
        "window": config.windows[-1],
        "net_size": len(net),
        "algebra": algebra.to_json(),
        "algebra_threshold": threshold,
        "algebra_within_threshold": algebra.within(threshold),
        "translation_consistency": worst_consistency,
        "translation_consistency_within_2eps": worst_consistency <= 2 * config.eps,
        "max_snap_defect": table.max_snap_defect,
    }
    return ExperimentResult(
        summary,
        {
            "net": Series(
                ["index", *(f"x{c}" for c in range(net.points.shape[1])), *(f"g{c}" for c in range(width))], net_rows
            ),
            "diamond": Series(table.header(), [list(r) for r in table.rows()]),
            "consistency": Series(["i", "j", "defect"], consistency_rows),
        },
    )


def run_haar(config: ExperimentConfig) -> ExperimentResult:
    desc = _semigroup(config)
    if not isinstance(desc, sg.FiniteTable):
        raise UnsupportedFamilyError(f"The haar experiment needs a finite table, not '{desc.tag}'.")
    kwargs = {
        "tolerance": config.tolerance,
        "max_iterations": config.max_iterations,
        "oracle_tolerance": config.oracle_tolerance,
    }
    solution = ergodic.haar_solve_finite(desc, **kwargs)
    rng = np.random.default_rng(config.seed)
    start_rows = []
    for k in range(config.starts):
        other = ergodic.haar_solve_finite(desc, ergodic.start_distribution(desc, rng), **kwargs)
        start_rows.append([k, float(np.abs(other.weights - solution.weights).max())])
    spread = max((row[1] for row in start_rows), default=0.0)
    summary = {
        **solution.to_json(),
        "semigroup": desc.tag,
        "start_spread": spread,
        "starts_agree": spread <= config.oracle_tolerance,
    }
    return ExperimentResult(
        summary,
        {
            "haar": Series(
                ["index", "name", "weight"],
                [[i, n, float(w)] for i, (n, w) in enumerate(zip(desc.names, solution.weights))],
            ),
            "starts": Series(["start", "max_gap"], start_rows),
            "history": Series(["iteration", "residual"], [[i, r] for i, r in enumerate(solution.history)]),
        },
    )


def run_unique_ergodicity(config: ExperimentConfig) -> ExperimentResult:
    sys = _system(config)
    folner = ergodic.default_folner(sys.semigroup, config.folner)
    family = _family(sys, config)
    basepoints = _basepoints(sys, config)
    report = ergodic.unique_ergodicity_check(
        sys, basepoints, folner, family, config.schedule, tolerance=config.ue_tolerance, threads=config.threads
    )
    integral_rows = [
        [n, b, p, value]
        for n, table in zip(report.schedule, report.integrals)
        for b, row in enumerate(table)
        for p, value in enumerate(row)
    ]
    summary = {**report.to_json(), "family": family.name, "folner": folner.kind.value, "basepoints": len(basepoints)}
    return ExperimentResult(
        summary,
        {
            "diameters": Series(["n", "value"], [list(r) for r in report.rows()]),
            "integrals": Series(["n", "basepoint-id", "phi", "value"], integral_rows),
        },
    )


def run_folner_uniform(config: ExperimentConfig) -> ExperimentResult:
    sys = _system(config)
    folner = ergodic.default_folner(sys.semigroup, config.folner)
    phi = ergodic.named_test_function(config.phi, sys.space)
    basepoints = _basepoints(sys, config)
    series = ergodic.uniform_convergence_check(
        sys, basepoints, folner, phi, config.target, config.schedule, threads=config.threads
    )

    # the limit measure is invariant: μ_{y,n} and its translate by a fixed g should merge
    family = _family(sys, config)
    elements = sys.semigroup.enumerate_window()
    g = elements[min(1, len(elements) - 1)]
    invariance_rows = []
    for n in config.schedule:
        measure = ergodic.empirical_measure(sys, basepoints[0], folner.array(n))
        invariance_rows.append([n, ergodic.bl_distance(measure, ergodic.pushforward(sys, measure, g), family)])
    summary = {
        **series.to_json(),
        "folner": folner.kind.value,
        "basepoints": len(basepoints),
        "invariance_element": list(g.coordinates()),
        "invariance": [row[1] for row in invariance_rows],
    }
    return ExperimentResult(
        summary,
        {
            "deviations": Series(["n", "value"], [list(r) for r in series.rows()]),
            "values": Series(["n", "value", "basepoint-id"], [list(r) for r in series.value_rows()]),
            "invariance": Series(["n", "value"], invariance_rows),
        },
    )


def run_shulman_jr(config: ExperimentConfig) -> ExperimentResult:
    desc = _semigroup(config)
    jr = ergodic.FolnerSequence(ergodic.FolnerKind.JR, desc)
    cube = ergodic.default_folner(desc, "cube")
    jr_report = ergodic.shulman_constant(jr, config.n_max)
    cube_report = ergodic.shulman_constant(cube, config.n_max)
    mu = sg.QuasiHaarMeasure.for_semigroup(desc)
    one = desc.element((1,))
    ratios = [[n, ergodic.folner_ratio(desc, mu, jr(n), one)] for n in range(1, config.n_max + 1)]
    summary = {
        "n_max": config.n_max,
        "jr": jr_report.to_json(),
        "cube": cube_report.to_json(),
        "jr_ratio_final": ratios[-1][1],
    }
    rows = [[n, a, b] for n, a, b in zip(range(1, config.n_max + 1), jr_report.constants, cube_report.constants)]
    return ExperimentResult(
        summary,
        {"shulman": Series(["n", "jr", "cube"], rows), "folner_ratio": Series(["n", "value"], ratios)},
    )


def fibonacci(count: int) -> list[int]:
    """F(1), ..., F(count) with F(1) = F(2) = 1."""
    out = [1, 1]
    while len(out) < count:
        out.append(out[-1] + out[-2])
    return out[:count]


def _diagonal(desc: sg.SemigroupDescriptor, n: int) -> sg.SemigroupElement:
    if isinstance(desc, sg.ZPlusD):
        return desc.element((n,) * desc.d)
    return desc.element(n)


def doubling_cauchy_control(
    terms: int,
) -> tuple[DoublingMap, SpacePoint, list[sg.SemigroupElement], list[sg.SemigroupElement]]:
    """A doubling-map point with Cauchy orbits along t_n and s_n whose product orbit is not Cauchy.

    Binary digits come in blocks of 16. The block after bit 32m + 16 always opens with a 1, so
    2^(32n+16)·x sits just above 1/2 for every n. The block after bit 32m opens with a 1 only for odd m.
    With t_n = 32n + 16 and s_n = t_n + 32·(n mod 2), the product exponent is 32m with m = 2n + 1 for
    even n and m = 2n + 2 for odd n, so π(t_n∘s_n, x) alternates between ~1/2 and ~0.
    """
    desc = sg.ZPlusD(d=1)
    space = DyadicCircle(bits=64 * (terms + 4))
    blocks = space.bits // 32
    digits = [32 * m + 17 for m in range(blocks)] + [32 * m + 1 for m in range(1, blocks, 2)]
    x = space.from_binary_digits(digits)
    seq_t = [desc.element(32 * n + 16) for n in range(terms)]
    seq_s = [desc.element(32 * n + 16 + 32 * (n % 2)) for n in range(terms)]
    return DoublingMap(desc, space), x, seq_t, seq_s


def run_cauchy(config: ExperimentConfig) -> ExperimentResult:
    sys = _system(config)
    y = _basepoint(sys, config)
    desc = sys.semigroup
    fib = fibonacci(config.terms + 1)
    seq_t = [_diagonal(desc, fib[i]) for i in range(config.terms)]
    seq_s = [_diagonal(desc, fib[i + 1]) for i in range(config.terms)]
    defect = almost_periodicity.cauchy_product_check(sys, y, seq_t, seq_s, config.tail, config.cauchy_threshold)
    products = [desc.compose(a, b) for a, b in zip(seq_t, seq_s)]
    coords = sys.evaluate(y, desc.as_array(products))
    rows = [
        [n, fib[n - 1], fib[n], *(float(v) for v in coords[n - 1])] for n in range(1, config.terms + 1)
    ]

    # negative control: Cauchy inputs on a system that is not Bohr almost periodic
    doubling, x, control_t, control_s = doubling_cauchy_control(config.terms)
    control_defect = almost_periodicity.cauchy_product_check(
        doubling, x, control_t, control_s, config.tail, config.cauchy_threshold
    )
    images = [
        doubling.evaluate(x, doubling.semigroup.as_array(seq))[:, 0]
        for seq in (control_t, control_s, [doubling.semigroup.compose(a, b) for a, b in zip(control_t, control_s)])
    ]
    control_rows = [
        [n + 1, a.payload[0], b.payload[0], float(images[0][n]), float(images[1][n]), float(images[2][n])]
        for n, (a, b) in enumerate(zip(control_t, control_s))
    ]
    summary = {
        "tail": config.tail,
        "threshold": config.cauchy_threshold,
        "product_tail_defect": defect,
        "within_threshold": defect <= config.cauchy_threshold,
        "doubling_control": {
            "bits": doubling.space.bits,
            "product_tail_defect": control_defect,
            "exceeds_threshold": control_defect > config.cauchy_threshold,
        },
    }
    return ExperimentResult(
        summary,
        {
            "cauchy": Series(["n", "t", "s", *(f"x{c}" for c in range(coords.shape[1]))], rows),
            "doubling_control": Series(["n", "t", "s", "x_t", "x_s", "x_product"], control_rows),
        },
    )


AUDIT_ELEMENTS = 64


def _audit_window(desc: sg.SemigroupDescriptor) -> sg.WindowSpec:
    """The default window, cut down to its first AUDIT_ELEMENTS elements for the cubic law checks."""
    elements = desc.enumerate_window()
    if len(elements) <= AUDIT_ELEMENTS:
        return desc.default_window()
    return sg.WindowSpec.of(g.payload for g in elements[:AUDIT_ELEMENTS])


def run_semigroup_audit(config: ExperimentConfig) -> ExperimentResult:
    desc = _semigroup(config)
    window = _audit_window(desc)
    checks = {
        "associative": sg.check_associative(desc, window),
        "commutative": sg.check_commutative(desc, window),
        "identity": sg.check_identity(desc, window),
    }
    injective = sg.check_left_injective(desc, window)
    audit_rows = [[name, int(w.holds), w.checked] for name, w in checks.items()]
    audit_rows.append(["left_injective", int(injective.injective), ""])

    elements = desc.enumerate_window(window)
    mu = sg.QuasiHaarMeasure.for_semigroup(desc)
    sample = elements[: min(3, len(elements))]
    g = elements[1] if len(elements) > 1 else elements[0]
    summary: dict[str, t.Any] = {
        "semigroup": desc.tag,
        "abelian": desc.abelian,
        "compact": desc.compact,
        "window_size": len(elements),
        "checks": {name: {"holds": w.holds, "checked": w.checked} for name, w in checks.items()},
        "left_injective": injective.injective,
        "quasi_haar": {
            "set": [list(e.coordinates()) for e in sample],
            "translate": list(g.coordinates()),
            "mass": mu.mass(sample),
            "preimage_mass": sg.translate_preimage_mass(desc, mu, g, sample),
            "translation_gap": sg.check_translation_invariance(desc, mu, g, sample),
        },
    }

    inverse_rows = []
    try:
        for i, element in enumerate(elements[:8]):
            inverse = sg.group_inverse(desc, element)
            inverse_rows.append([i, repr(element), repr(inverse.inverse), int(inverse.in_semigroup)])
    except UnsupportedFamilyError as err:
        summary["group_inverse"] = err.message
    return ExperimentResult(
        summary,
        {
            "audit": Series(["check", "holds", "checked"], audit_rows),
            "inverses": Series(["index", "element", "inverse", "in_semigroup"], inverse_rows),
        },
    )


EXPERIMENTS: dict[str, t.Callable[[ExperimentConfig], ExperimentResult]] = {
    "certify": run_certify,
    "equicontinuity": run_equicontinuity,
    "diamond": run_diamond,
    "haar": run_haar,
    "unique-ergodicity": run_unique_ergodicity,
    "folner-uniform": run_folner_uniform,
    "shulman-jr": run_shulman_jr,
    "cauchy": run_cauchy,
    "semigroup-audit": run_semigroup_audit,
}


# persistence


def _write_csv(path: str, series: Series) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(series.header)
        writer.writerows([_cell(v) for v in row] for row in series.rows)


def dumps_json(payload: t.Any) -> bytes:
    """Sorted, indented JSON; numpy scalars and arrays are accepted and non-finite floats become null."""
    return orjson.dumps(payload, default=_json_default, option=_JSON_OPTIONS)


def _write_json(path: str, payload: t.Any) -> None:
    with open(path, "wb") as f:
        f.write(dumps_json(payload))
        f.write(b"\n")


def _json_default(value: t.Any) -> t.Any:
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"Cannot serialise {type(value).__name__}")


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Run the configured experiment and persist its report, series and timings under ``config.out``."""
    assert config.experiment is not None
    runner = EXPERIMENTS[config.experiment]
    os.makedirs(config.out, exist_ok=True)
    logger.info("running '%s' into %s", config.experiment, config.out)

    start = time.perf_counter()
    try:
        result = runner(config)
    except NumericError as err:
        _write_csv(
            os.path.join(config.out, RESIDUALS_FILE),
            Series(["iteration", "residual"], [[i, r] for i, r in enumerate(err.history)]),
        )
        logger.error("numeric failure, residual history written to %s", RESIDUALS_FILE)
        raise
    elapsed = time.perf_counter() - start

    manifest = []
    for name, series in sorted(result.series.items()):
        filename = f"{name}.csv"
        _write_csv(os.path.join(config.out, filename), series)
        manifest.append(filename)
    manifest.append(TIMINGS_FILE)

    report = RunReport(
        config.experiment, config.model_dump(), result.summary, manifest, {"experiment_seconds": elapsed}, config.out
    )
    _write_json(os.path.join(config.out, REPORT_FILE), report.to_json())
    report.timings["total_seconds"] = time.perf_counter() - start
    _write_json(os.path.join(config.out, TIMINGS_FILE), report.timings)
    return report
