from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bohrlab import space_action as sa
from bohrlab.exceptions import NumericError
from bohrlab.exceptions import ResolutionError
from bohrlab.exceptions import ValidationError
from bohrlab.semigroup import INF
from bohrlab.semigroup import FiniteTable
from bohrlab.semigroup import WindowSpec
from bohrlab.semigroup import ZPlusD


GOLDEN_ORBIT = {1: 0.6180339887, 3: 0.8541019662, 5: 0.0901699437}


@pytest.mark.parametrize(
    "space, x, y, expected",
    [
        (sa.Torus(1), 0.1, 0.9, 0.2),
        (sa.Torus(2), (0.1, 0.1), (0.4, 0.95), 0.3),
        (sa.ZbarPlusSpace(), 0, "INF", 1.0),
        (sa.ZbarPlusSpace(), 1, 3, 0.25),
        (sa.FiniteSpace(["a", "b"]), "a", "b", 1.0),
    ],
)
def test_distances(space, x, y, expected):
    assert_allclose(sa.distance(space, x, y), expected)
    assert_allclose(sa.distance(space, y, x), expected)
    assert sa.distance(space, x, x) == 0.0


def test_torus_points_are_reduced_and_parsed():
    assert sa.Torus(1).check_point(1.25) == (0.25,)
    assert sa.Torus(2).parse_point("0.1;0.2") == (0.1, 0.2)
    with pytest.raises(ValidationError):
        sa.Torus(2).check_point(0.5)
    with pytest.raises(ValidationError):
        sa.Torus(1).check_point(math.nan)


@pytest.mark.parametrize("n, expected", sorted(GOLDEN_ORBIT.items()))
def test_golden_rotation(golden, zplus, n, expected):
    (value,) = sa.apply(golden, zplus.element(n), 0.0)
    assert_allclose(value, expected, atol=1e-9)


def test_torus_translation_is_an_isometry(golden, zplus, rng):
    x, y = sa.Torus(1).sample(rng, 2)
    for n in (1, 17, 1000):
        g = zplus.element(n)
        assert_allclose(
            golden.space.distance(golden.apply(g, x), golden.apply(g, y)), golden.space.distance(x, y), atol=1e-12
        )


def test_torus_translation_needs_default_frequencies():
    with pytest.raises(ValidationError):
        sa.TorusTranslation(ZPlusD(d=3), sa.Torus(3))
    system = sa.TorusTranslation(ZPlusD(d=1), sa.Torus(2), matrix=[[0.5, 0.25]])
    assert system.apply(ZPlusD(d=1).element(1), (0.0, 0.0)) == (0.5, 0.25)


def test_zbarplus_translation_is_a_contraction(zbarplus_system):
    desc, space = zbarplus_system.semigroup, zbarplus_system.space
    assert zbarplus_system.apply(desc.element(2), 3) == 5
    assert zbarplus_system.apply(desc.element("INF"), 3) == INF
    for s in (1, 4, 9):
        g = desc.element(s)
        for x, y in ((0, 1), (2, 7), (3, "INF")):
            moved = space.distance(zbarplus_system.apply(g, x), zbarplus_system.apply(g, y))
            assert moved <= space.distance(x, y)


def test_finite_space_metric_validation():
    with pytest.raises(ValidationError):
        sa.FiniteSpace(["a", "b"], metric=[[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ValidationError):
        sa.FiniteSpace(["a", "b", "c"], metric=[[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(ValidationError):
        sa.FiniteSpace(["a", "b"], metric=[[0.0, 0.0], [0.0, 0.0]])
    assert sa.FiniteSpace(["a", "b", "c"], metric=[[0, 1, 2], [1, 0, 1], [2, 1, 0]]).diameter == 2.0


@pytest.mark.parametrize("bits", [64, 120, 130])
def test_dyadic_circle_resolution(bits):
    with pytest.raises(ValidationError):
        sa.DyadicCircle(bits=bits)


def test_dyadic_points():
    circle = sa.DyadicCircle(bits=256)
    half = circle.from_binary_digits([1])
    assert float(half) == 0.5
    assert circle.check_point(0.75).numerator == 3 << 254
    assert float(circle.from_binary_digits([1, 3])) == 0.625
    with pytest.raises(ValidationError):
        circle.from_binary_digits([257])


def test_doubling_map(doubling, zplus):
    assert doubling.horizon == 192
    assert float(doubling.apply(zplus.element(1), 0.25)) == 0.5
    assert float(doubling.apply(zplus.element(1), 0.5)) == 0.0
    assert_allclose(doubling.evaluate(0.375, np.asarray([[0], [1], [2]])).ravel(), [0.375, 0.75, 0.5])
    with pytest.raises(ResolutionError):
        doubling.apply(zplus.element(193), 0.25)
    with pytest.raises(ResolutionError):
        doubling.evaluate(0.25, np.asarray([[193]]))


def test_doubling_map_is_driven_by_the_naturals():
    with pytest.raises(ValidationError):
        sa.DoublingMap(ZPlusD(d=2), sa.DyadicCircle(bits=256))


def test_finite_regular_action():
    table = FiniteTable.cyclic(3)
    action = sa.FiniteAction.regular(table)
    assert action.apply(table.element(1), 2) == 0
    assert_allclose(action.evaluate(1, np.asarray([0, 1, 2])).ravel(), [1, 2, 0])


@pytest.mark.parametrize(
    "rows",
    [
        [[1, 0], [0, 1]],  # identity moves points
        [[0, 1], [0, 0]],  # breaks the action law
        [[0, 1], [1, 2]],  # leaves the space
    ],
)
def test_finite_action_table_validation(rows):
    table = FiniteTable.cyclic(2)
    with pytest.raises(ValidationError):
        sa.FiniteAction(table, sa.FiniteSpace(["p", "q"]), rows)


def test_product_action(golden, zplus, doubling, zbarplus_system):
    sqrt2 = sa.TorusTranslation(zplus, sa.Torus(1), matrix=[[math.sqrt(2.0) - 1.0]])
    product = sa.ProductAction((golden, sqrt2))
    assert product.isometric
    assert product.space.dim == 2
    (a,), (b,) = product.apply(zplus.element(1), (0.0, 0.0))
    assert_allclose([a, b], [GOLDEN_ORBIT[1], math.sqrt(2.0) - 1.0], atol=1e-9)
    assert product.space.distance(((0.1,), (0.2,)), ((0.15,), (0.5,))) == pytest.approx(0.3)

    assert not sa.ProductAction((golden, doubling)).isometric
    with pytest.raises(ValidationError):
        sa.ProductAction((golden, zbarplus_system))
    with pytest.raises(ValidationError):
        sa.ProductAction((golden,))


def test_product_factors_share_one_semigroup():
    # two inline tables share a tag but not an operation
    group = FiniteTable(names=["e", "a"], table=[[0, 1], [1, 0]])
    monoid = FiniteTable(names=["e", "a"], table=[[0, 1], [1, 1]])
    assert group.tag == monoid.tag
    with pytest.raises(ValidationError):
        sa.ProductAction((sa.FiniteAction.regular(group), sa.FiniteAction.regular(monoid)))

    twin = FiniteTable(names=["e", "a"], table=[[0, 1], [1, 0]], source="z2.csv")
    product = sa.ProductAction((sa.FiniteAction.regular(group), sa.FiniteAction.regular(twin)))
    assert product.semigroup == group


def test_orbit_sample(golden):
    sample = sa.orbit(golden, 0.0, WindowSpec.box(4))
    assert len(sample) == 4
    assert sample.points.shape == (4, 1)
    assert_allclose(sample.points[1, 0], GOLDEN_ORBIT[1], atol=1e-9)
    assert sample.header() == ["g0", "x0"]
    rows = list(sample.rows())
    assert rows[3][0] == 3.0
    assert_allclose(rows[3][1], 3 * sa.GOLDEN % 1.0, atol=1e-9)
    g, point = list(sample.pairs())[2]
    assert g.payload == (2,)
    assert_allclose(point[0], 2 * sa.GOLDEN % 1.0, atol=1e-9)


def test_greedy_net_keeps_input_order():
    torus = sa.Torus(1)
    points = np.asarray([[0.0], [0.05], [0.5], [0.52], [0.9]])
    assert sa.net_indices(torus, points, 0.1) == [0, 2]
    assert sa.epsilon_net(torus, [0.0, 0.3, 0.31, 0.7], 0.1) == [(0.0,), (0.3,), (0.7,)]
    with pytest.raises(ValidationError):
        sa.net_indices(torus, points, 0.0)


def test_verify_net_rejects_a_bad_cover():
    torus = sa.Torus(1)
    with pytest.raises(NumericError):
        sa.verify_net(torus, np.asarray([[0.0], [0.5]]), np.asarray([[0.0]]), 0.1)
    with pytest.raises(NumericError):
        sa.verify_net(torus, np.asarray([[0.0], [0.05]]), np.asarray([[0.0], [0.05]]), 0.1)


def test_nudge_stays_close():
    assert sa.Torus(1).nudge(0.2, 0.01) == pytest.approx((0.21,))
    space = sa.ZbarPlusSpace()
    moved = space.nudge("INF", 0.1)
    assert moved == 10
    assert space.distance(moved, "INF") < 0.1
    assert space.nudge(0, 0.1) is None
    assert sa.FiniteSpace(["a", "b"]).nudge("a", 0.5) is None


def test_orbit_density(golden):
    sample = sa.orbit(golden, 0.0, WindowSpec.box(200))
    targets = [i / 10 for i in range(10)]
    assert sa.orbit_density(golden.space, sample, targets) < 0.01
