from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from bohrlab import semigroup as sg
from bohrlab.exceptions import ResolutionError
from bohrlab.exceptions import ResourceError
from bohrlab.exceptions import UnsupportedFamilyError
from bohrlab.exceptions import ValidationError


def test_zplus_compose_and_identity():
    desc = sg.ZPlusD(d=2)
    g, h = desc.element((1, 2)), desc.element((3, 4))
    assert sg.compose(desc, g, h) == desc.element((4, 6))
    assert desc.compose(desc.identity, g) == g
    assert repr(g) == "zplus:(1, 2)"


@pytest.mark.parametrize("payload", [(-1,), (1, 2), ("a",), 1.5])
def test_zplus_rejects_bad_payloads(payload):
    with pytest.raises(ValidationError):
        sg.ZPlusD(d=1).element(payload)


def test_compose_family_mismatch():
    zplus, zbar = sg.ZPlusD(d=1), sg.ZbarPlus()
    with pytest.raises(ValidationError):
        zplus.compose(zplus.element(1), zbar.element(1))
    with pytest.raises(ValidationError):
        zplus.compose(zbar.element(1), zplus.element(1))
    with pytest.raises(ValidationError):
        sg.compose(zplus, zplus.element(1), (1,))


def test_zbarplus_inf_is_absorbing():
    desc = sg.ZbarPlus(cutoff=3)
    inf = desc.element("INF")
    assert desc.compose(inf, desc.element(2)) == inf
    assert desc.compose(desc.element(2), desc.element(5)) == desc.element(7)
    assert [g.payload for g in sg.enumerate_window(desc)] == [0, 1, 2, math.inf]
    assert repr(inf) == "zbarplus:INF"


def test_window_spec_needs_exactly_one_source():
    with pytest.raises(ValidationError):
        sg.WindowSpec()
    with pytest.raises(ValidationError):
        sg.WindowSpec(bound=3, explicit=(1,))
    with pytest.raises(ValidationError):
        sg.WindowSpec(bound=0)


def test_explicit_window_is_sorted_and_deduplicated():
    desc = sg.ZPlusD(d=1)
    elements = desc.enumerate_window(sg.WindowSpec.of([3, 1, 3, 0]))
    assert [g.payload for g in elements] == [(0,), (1,), (3,)]


def test_window_over_budget_raises_resource_error():
    with pytest.raises(ResourceError):
        sg.ZPlusD(d=3).enumerate_window(sg.WindowSpec.box(1000))


def test_grid_window_and_values():
    desc = sg.RPlusGrid(h=0.5, horizon=4.0)
    assert desc.tag == "rplusgrid:h=0.5,T=4.0"
    elements = desc.enumerate_window()
    assert len(elements) == 8
    assert desc.value(elements[-1]) == (3.5,)


def test_counting_mass_and_shift_preimage():
    desc = sg.ZPlusD(d=1)
    mu = sg.QuasiHaarMeasure.for_semigroup(desc)
    s = [desc.element(v) for v in (0, 1, 2)]
    assert sg.quasi_haar_mass(mu, s) == 3.0
    assert sg.translate_preimage_mass(desc, mu, desc.element(1), s) == 2.0
    assert sg.check_translation_invariance(desc, mu, desc.element(1), s) == 0.0


def test_preimage_outside_window_is_a_resolution_error():
    desc = sg.ZPlusD(d=1)
    mu = sg.QuasiHaarMeasure.counting(desc)
    s = [desc.element(v) for v in (0, 5, 9)]
    with pytest.raises(ResolutionError):
        sg.translate_preimage_mass(desc, mu, desc.element(1), s, window=sg.WindowSpec.box(4))


def test_inf_preimage_of_inf_cannot_be_enumerated():
    desc = sg.ZbarPlus(cutoff=10)
    mu = sg.QuasiHaarMeasure.counting(desc)
    with pytest.raises(ResolutionError):
        sg.translate_preimage_mass(desc, mu, desc.element("INF"), [desc.element("INF")])


def test_grid_lebesgue_mass():
    desc = sg.RPlusGrid(h=0.5, horizon=2.0)
    mu = sg.QuasiHaarMeasure.for_semigroup(desc)
    assert mu.mass(desc.enumerate_window()) == 2.0


def test_finite_weights_validation():
    table = sg.FiniteTable.cyclic(3)
    with pytest.raises(ValidationError):
        sg.QuasiHaarMeasure.finite_weights(table, [1.0, 1.0])
    with pytest.raises(ValidationError):
        sg.QuasiHaarMeasure.finite_weights(table, [0.0, 0.0, 0.0])
    mu = sg.QuasiHaarMeasure.finite_weights(table, [0.5, 0.25, 0.25])
    assert mu.mass([table.element(1), table.element(2)]) == 0.5


def test_law_checks():
    zplus = sg.ZPlusD(d=1)
    assert sg.check_associative(zplus, sg.WindowSpec.box(6)).holds
    assert sg.check_commutative(zplus, sg.WindowSpec.box(6)).holds
    assert sg.check_identity(zplus, sg.WindowSpec.box(6)).holds
    assert sg.check_left_injective(zplus, sg.WindowSpec.box(6)).injective

    matrices = sg.NonnegIntMatrix(n=2, max_entry=1)
    assert not matrices.abelian
    assert sg.check_associative(matrices).holds
    commutative = sg.check_commutative(matrices)
    assert not commutative.holds
    a, b = commutative.witness
    assert matrices.compose(a, b) != matrices.compose(b, a)


def test_zbarplus_is_not_left_injective():
    report = sg.check_left_injective(sg.ZbarPlus(cutoff=4))
    assert not report.injective
    g, s, t = report.witness
    assert g.payload == math.inf
    assert s != t


def test_matrix_group_inverse():
    desc = sg.NonnegIntMatrix(n=2)
    inverse = sg.group_inverse(desc, desc.element(((1, 1), (0, 1))))
    assert inverse.inverse == ((1, -1), (0, 1))
    assert not inverse.in_semigroup

    identity = sg.group_inverse(desc, desc.identity)
    assert identity.in_semigroup


def test_singular_matrix_is_rejected():
    with pytest.raises(ValidationError):
        sg.NonnegIntMatrix(n=2).element(((1, 1), (1, 1)))


def test_zplus_group_inverse():
    desc = sg.ZPlusD(d=2)
    assert sg.group_inverse(desc, desc.element((2, 0))).inverse == (-2, 0)
    assert sg.group_inverse(desc, desc.identity).in_semigroup


def test_compactified_naturals_have_no_group_inverse():
    desc = sg.ZbarPlus()
    with pytest.raises(UnsupportedFamilyError):
        sg.group_inverse(desc, desc.element(1))


def test_finite_table_from_csv(tmp_path):
    path = tmp_path / "z2.csv"
    path.write_text("e,a\ne,a\na,e\n", encoding="utf-8")
    table = sg.FiniteTable.from_csv(str(path))
    assert table.names == ("e", "a")
    assert table.identity == table.element("e")
    assert table.abelian
    assert table.name_of(table.compose(table.element("a"), table.element("a"))) == "e"
    assert table.tag == f"finite:{path}"


@pytest.mark.parametrize(
    "text",
    ["", "e,a\ne,a\n", "e,a\ne,b\na,e\n", "e,e\ne,e\ne,e\n"],
)
def test_finite_table_from_csv_rejects_malformed_tables(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ValidationError):
        sg.FiniteTable.from_csv(str(path))


def test_finite_table_needs_identity():
    with pytest.raises(ValidationError):
        sg.FiniteTable(names=["a", "b"], table=[[0, 0], [0, 0]])


def test_builtin_tables():
    add = sg.FiniteTable.truncated_addition(4)
    assert add.compose(add.element(3), add.element(3)) == add.element(4)

    zbar = sg.FiniteTable.truncated_zbarplus(2)
    assert zbar.names == ("0", "1", "2", "INF")
    assert zbar.name_of(zbar.compose(zbar.element(1), zbar.element(1))) == "2"
    assert zbar.name_of(zbar.compose(zbar.element(1), zbar.element(2))) == "INF"
    assert zbar.name_of(zbar.compose(zbar.element("INF"), zbar.element(0))) == "INF"

    cyclic = sg.FiniteTable.cyclic(5)
    assert_array_equal(cyclic.compose_array(cyclic.element(3), np.arange(5)), [3, 4, 0, 1, 2])
    assert sg.check_associative(cyclic).holds
