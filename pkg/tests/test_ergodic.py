from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bohrlab import ergodic as erg
from bohrlab.exceptions import NumericError
from bohrlab.exceptions import PreconditionError
from bohrlab.exceptions import UnsupportedFamilyError
from bohrlab.exceptions import ValidationError
from bohrlab.semigroup import FiniteTable
from bohrlab.semigroup import QuasiHaarMeasure
from bohrlab.semigroup import RPlusGrid
from bohrlab.semigroup import ZbarPlus
from bohrlab.semigroup import ZPlusD
from bohrlab.space_action import DoublingMap
from bohrlab.space_action import DyadicCircle
from bohrlab.space_action import Torus
from bohrlab.space_action import ZbarPlusSpace


@pytest.mark.parametrize("n", [1, 5, 50])
def test_jr_folner_ratio(n):
    desc = ZPlusD(d=1)
    elements = erg.jr_sequence(n, desc)
    assert [g.payload[0] for g in elements] == list(range(n * n, n * n + n + 1))
    ratio = erg.folner_ratio(desc, QuasiHaarMeasure.counting(desc), elements, desc.element(1))
    assert ratio == pytest.approx(2 / (n + 1))


def test_folner_ratio_examples():
    desc = ZPlusD(d=1)
    counting = QuasiHaarMeasure.counting(desc)
    window = [desc.element(v) for v in range(100)]
    assert erg.folner_ratio(desc, counting, window, desc.element(1)) == pytest.approx(0.02)
    assert erg.folner_ratio(desc, counting, erg.jr_sequence(3), desc.element(2)) == pytest.approx(1.0)


@pytest.mark.parametrize("d, g", [(1, (1,)), (2, (1, 0)), (2, (1, 1)), (3, (2, 1, 0))])
def test_cube_folner_ratio_decays(d, g):
    desc = ZPlusD(d=d)
    cube = erg.FolnerSequence(erg.FolnerKind.CUBE, desc)
    counting = QuasiHaarMeasure.counting(desc)
    sizes = range(1, 13)
    ratios = [erg.folner_ratio(desc, counting, cube(n), desc.element(g)) for n in sizes]
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))
    for n, ratio in zip(sizes, ratios):
        assert ratio <= 2 * d * max(g) / n + 1e-12


@pytest.mark.parametrize(
    "table, absorbing",
    [
        (FiniteTable.truncated_addition(4), "4"),
        (FiniteTable.truncated_zbarplus(3), "INF"),
    ],
)
def test_haar_ignores_the_starting_distribution(table, absorbing):
    rng = np.random.default_rng(5)
    expected = np.zeros(len(table.names))
    expected[table.names.index(absorbing)] = 1.0
    for _ in range(5):
        solution = erg.haar_solve_finite(table, erg.start_distribution(table, rng))
        assert_allclose(solution.weights, expected, atol=1e-10)


def test_rotation_empirical_measures_become_invariant(golden, zplus):
    cube = erg.default_folner(golden.semigroup)
    family = erg.TestFunctionFamily.characters(1, 8)
    distances = []
    for n in (100, 1_000, 10_000):
        measure = erg.empirical_measure(golden, 0.0, cube.array(n))
        moved = erg.pushforward(golden, measure, zplus.element(1))
        distances.append(erg.bl_distance(measure, moved, family))
        # one step of the orbit leaves n - 1 atoms in place
        assert distances[-1] <= 2 / n + 1e-9
    assert distances == sorted(distances, reverse=True)


@pytest.mark.parametrize("n", [1, 10, 40])
def test_compactified_averages_of_the_distance_to_inf(zbarplus_system, n):
    phi = erg.named_test_function("dist-inf", zbarplus_system.space)
    folner = erg.default_folner(zbarplus_system.semigroup)
    harmonic = math.fsum(1 / k for k in range(1, n + 1))
    assert erg.folner_average(zbarplus_system, 0, phi, folner(n)) == pytest.approx(harmonic / n, rel=1e-12)


def test_folner_ratio_of_an_empty_set():
    desc = ZPlusD(d=1)
    with pytest.raises(PreconditionError):
        erg.folner_ratio(desc, QuasiHaarMeasure.counting(desc), [], desc.element(1))


def test_folner_kinds_and_families():
    with pytest.raises(UnsupportedFamilyError):
        erg.FolnerSequence(erg.FolnerKind.JR, ZbarPlus())
    with pytest.raises(UnsupportedFamilyError):
        erg.FolnerSequence(erg.FolnerKind.JR, ZPlusD(d=2))
    with pytest.raises(ValidationError):
        erg.FolnerSequence(erg.FolnerKind.CUBE, RPlusGrid())
    with pytest.raises(ValidationError):
        erg.FolnerSequence.explicit(ZPlusD(), [])
    assert erg.default_folner(RPlusGrid(h=0.5, horizon=8.0)).kind is erg.FolnerKind.GRID_CUBE
    with pytest.raises(ValueError):
        erg.default_folner(ZPlusD(), "spiral")


def test_folner_sets():
    cube = erg.FolnerSequence(erg.FolnerKind.CUBE, ZPlusD(d=2))
    assert cube.array(3).shape == (9, 2)
    assert cube(2)[-1].payload == (1, 1)
    with pytest.raises(ValidationError):
        cube(0)

    grid = erg.default_folner(RPlusGrid(h=0.5, horizon=8.0))
    assert grid.array(2).ravel().tolist() == [0, 1, 2, 3]

    zbar = erg.default_folner(ZbarPlus(cutoff=10))
    assert [g.payload for g in zbar(3)] == [0, 1, 2]

    table = FiniteTable.cyclic(4)
    assert erg.default_folner(table)(7) == table.enumerate_window()


def test_cube_shulman_constants_stay_bounded():
    report = erg.shulman_constant(erg.FolnerSequence(erg.FolnerKind.CUBE, ZPlusD(d=1)), 10)
    assert report.constants[0] == 0.0
    assert_allclose(report.constants[1:], [(2 * n - 2) / n for n in range(2, 11)])
    assert report.verdict is erg.ShulmanVerdict.BOUNDED


def test_jr_shulman_constants_grow():
    report = erg.shulman_constant(erg.FolnerSequence(erg.FolnerKind.JR, ZPlusD(d=1)), 50)
    assert_allclose(report.constants[1:], [n * n / (n + 1) for n in range(2, 51)])
    assert report.constants[-1] == pytest.approx(49.0196, abs=1e-4)
    assert report.verdict is erg.ShulmanVerdict.GROWING
    assert report.to_json()["verdict"] == "growing"


def test_two_dimensional_cube_shulman_constant():
    # the union of F_k⁻¹F_n is the box [-(n-2), n-1]^2
    report = erg.shulman_constant(erg.FolnerSequence(erg.FolnerKind.CUBE, ZPlusD(d=2)), 6)
    assert_allclose(report.constants[1:], [(2 * n - 2) ** 2 / n**2 for n in range(2, 7)])


def test_explicit_shulman_constants():
    desc = ZPlusD(d=1)
    sets = [[desc.element(v) for v in range(k)] for k in (1, 2, 3)]
    report = erg.shulman_constant(erg.FolnerSequence.explicit(desc, sets), 3)
    assert_allclose(report.constants, [0.0, 1.0, 4 / 3])


def test_shulman_needs_a_group():
    with pytest.raises(UnsupportedFamilyError):
        erg.shulman_constant(erg.default_folner(ZbarPlus()), 4)
    with pytest.raises(ValidationError):
        erg.shulman_constant(erg.default_folner(ZPlusD()), 0)


def test_empirical_measures_merge_points():
    torus = Torus(1)
    measure = erg.EmpiricalMeasure.from_points(torus, np.asarray([[0.3], [0.1], [0.1]]), np.asarray([2.0, 1.0, 1.0]))
    assert measure.support.ravel().tolist() == [0.1, 0.3]
    assert_allclose(measure.weights, [0.5, 0.5])
    with pytest.raises(ValidationError):
        erg.EmpiricalMeasure.from_points(torus, np.asarray([[0.1]]), np.asarray([0.0]))
    with pytest.raises(NumericError):
        erg.EmpiricalMeasure(torus, np.asarray([[0.1], [0.2]]), np.asarray([0.5, 0.6]))

    grid = erg.lebesgue_grid(torus, 4)
    assert_allclose(grid.support.ravel(), [0.125, 0.375, 0.625, 0.875])
    assert_allclose(grid.weights, 0.25)


def test_bl_distance_between_point_masses():
    torus = Torus(1)
    cos = erg.named_test_function("cos", torus)
    at_zero = erg.EmpiricalMeasure.from_points(torus, np.asarray([[0.0]]), np.asarray([1.0]))
    at_half = erg.EmpiricalMeasure.from_points(torus, np.asarray([[0.5]]), np.asarray([1.0]))
    assert erg.bl_distance(at_zero, at_half, erg.TestFunctionFamily.single(cos)) == pytest.approx(2.0)

    elsewhere = erg.EmpiricalMeasure.from_points(ZbarPlusSpace(), np.asarray([[0.0]]), np.asarray([1.0]))
    with pytest.raises(ValidationError):
        erg.bl_distance(at_zero, elsewhere, erg.TestFunctionFamily.single(cos))
    with pytest.raises(ValidationError):
        erg.bl_distance(at_zero, at_half, erg.TestFunctionFamily("empty", []))


def test_named_test_functions():
    torus = Torus(1)
    arc = erg.named_test_function("arc:0.25,0.5", torus)
    assert arc(np.asarray([[0.3], [0.6]])).tolist() == [1.0, 0.0]
    dist_inf = erg.named_test_function("dist-inf", ZbarPlusSpace())
    assert_allclose(dist_inf(np.asarray([[0.0], [3.0], [np.inf]])), [1.0, 0.25, 0.0])
    assert erg.named_test_function("one", torus)(np.zeros((3, 1))).tolist() == [1.0, 1.0, 1.0]
    with pytest.raises(ValidationError):
        erg.named_test_function("cos", ZbarPlusSpace())
    with pytest.raises(ValidationError):
        erg.named_test_function("tan", torus)


def test_test_function_families():
    assert [phi.name for phi in erg.TestFunctionFamily.characters(1, 2).members] == [
        "cos[1]",
        "sin[1]",
        "cos[2]",
        "sin[2]",
    ]
    assert len(erg.TestFunctionFamily.characters(2, 1)) == 8
    assert len(erg.TestFunctionFamily.arcs([0.0, 0.25, 0.5])) == 3
    with pytest.raises(ValidationError):
        erg.TestFunctionFamily.arcs([0.5])
    with pytest.raises(ValidationError):
        erg.TestFunctionFamily.landmarks(Torus(1), np.random.default_rng(0), radius=0.0)
    landmarks = erg.TestFunctionFamily.landmarks(Torus(1), np.random.default_rng(0), count=4)
    assert landmarks.normalisation is erg.Normalisation.BOUNDED_LIPSCHITZ
    assert landmarks.scale(landmarks.members[0]) == 4.0


def test_folner_averages_on_the_rotation(golden):
    cube = erg.default_folner(golden.semigroup)
    cos = erg.named_test_function("cos", golden.space)
    assert abs(erg.folner_average(golden, 0.2, cos, cube.array(10_000))) < 1e-3
    measure = erg.empirical_measure(golden, 0.0, cube(4))
    assert len(measure) == 4
    assert_allclose(measure.weights, 0.25)


def test_lebesgue_is_invariant_under_rotation(golden, zplus):
    grid = erg.lebesgue_grid(golden.space, 64)
    moved = erg.pushforward(golden, grid, zplus.element(1))
    assert erg.bl_distance(grid, moved, erg.TestFunctionFamily.characters(1, 8)) <= 1e-12


def test_support_coverage():
    grid = erg.lebesgue_grid(Torus(1), 10)
    assert_allclose(erg.support_coverage(grid, [0.5], 0.12), [0.2])
    assert erg.support_coverage(grid, [], 0.1).size == 0
    with pytest.raises(ValidationError):
        erg.support_coverage(grid, [0.5], 0.0)


def test_haar_of_a_cyclic_group(rng):
    table = FiniteTable.cyclic(5)
    solution = erg.haar_solve_finite(table, erg.start_distribution(table, rng))
    assert_allclose(solution.weights, 0.2, atol=1e-12)
    assert solution.iterations == 1
    assert solution.residual <= 1e-12
    assert_allclose(erg.haar_oracle(table), 0.2, atol=1e-12)
    assert erg.invariance_residual(table, np.full(5, 0.2)) <= 1e-15
    assert solution.to_json()["carrier"] == ["0", "1", "2", "3", "4"]


@pytest.mark.parametrize(
    "table, absorbing",
    [
        (FiniteTable.truncated_addition(4), "4"),
        (FiniteTable.truncated_zbarplus(3), "INF"),
    ],
)
def test_haar_concentrates_on_the_absorbing_element(table, absorbing):
    solution = erg.haar_solve_finite(table)
    expected = np.zeros(len(table.names))
    expected[table.names.index(absorbing)] = 1.0
    assert_allclose(solution.weights, expected, atol=1e-10)
    assert solution.oracle_gap <= 1e-10
    assert solution.history[0] > solution.history[-1]


def test_haar_non_convergence_keeps_history():
    with pytest.raises(NumericError) as excinfo:
        erg.haar_solve_finite(FiniteTable.truncated_addition(4), max_iterations=1)
    assert len(excinfo.value.history) == 2


def test_haar_rejects_bad_inputs():
    band = FiniteTable(names=["e", "a", "b"], table=[[0, 1, 2], [1, 1, 1], [2, 2, 2]])
    with pytest.raises(ValidationError):
        erg.haar_solve_finite(band)
    with pytest.raises(ValidationError):
        erg.haar_solve_finite(FiniteTable.cyclic(3), start=[0.5, 0.5])
    with pytest.raises(ValidationError):
        erg.haar_solve_finite(FiniteTable.cyclic(3), start=[0.5, 0.5, 0.5])


def test_start_distribution(rng):
    table = FiniteTable.cyclic(4)
    assert_allclose(erg.start_distribution(table), 0.25)
    draw = erg.start_distribution(table, rng)
    assert draw.sum() == pytest.approx(1.0)
    assert (draw >= 0).all()


def test_rotation_is_uniquely_ergodic(golden, rng):
    basepoints = [0.0, *golden.space.sample(rng, 9)]
    report = erg.unique_ergodicity_check(
        golden,
        basepoints,
        erg.default_folner(golden.semigroup),
        erg.TestFunctionFamily.characters(1, 8),
        [1_000, 10_000],
    )
    assert report.diameters[-1] < 1e-2
    assert report.consistent
    assert len(report.integrals[-1]) == 10
    assert [row[0] for row in report.rows()] == [1_000, 10_000]


def test_doubling_map_fixed_point_breaks_unique_ergodicity(zplus, rng):
    system = DoublingMap(zplus, DyadicCircle(bits=2048))
    basepoints = [0.0, *system.space.sample(rng, 9)]
    report = erg.unique_ergodicity_check(
        system, basepoints, erg.default_folner(zplus), erg.TestFunctionFamily.characters(1, 1), [1_000]
    )
    assert report.diameters[0] > 0.5
    assert not report.consistent
    assert report.to_json()["verdict"] == "not consistent"


def test_unique_ergodicity_needs_two_basepoints(golden):
    with pytest.raises(PreconditionError):
        erg.unique_ergodicity_check(
            golden, [0.0], erg.default_folner(golden.semigroup), erg.TestFunctionFamily.characters(), [10]
        )


@pytest.mark.parametrize(
    "kind, expected",
    [
        ("cube", [6.2e-3, 1.14e-4, 9.4e-5]),
        ("jr", [1.03e-2, 9.5e-4, 1.4e-5]),
    ],
)
def test_uniform_convergence_of_rotation_averages(golden, rng, kind, expected):
    basepoints = golden.space.sample(rng, 100)
    series = erg.uniform_convergence_check(
        golden,
        basepoints,
        erg.default_folner(golden.semigroup, kind),
        erg.named_test_function("cos", golden.space),
        0.0,
        [100, 1_000, 10_000],
    )
    assert series.nonincreasing
    assert series.deviations[-1] <= 1e-3
    assert_allclose(series.deviations, expected, rtol=0.1)
    assert len(list(series.value_rows())) == 300


def test_uniform_convergence_needs_basepoints(golden):
    with pytest.raises(PreconditionError):
        erg.uniform_convergence_check(
            golden, [], erg.default_folner(golden.semigroup), erg.named_test_function("one", golden.space), 1.0, [10]
        )
