from __future__ import annotations

import math

import attr
import pytest

from bohrlab import _registry as registry
from bohrlab._configuration import ExperimentConfig
from bohrlab._configuration import load_config_file
from bohrlab.exceptions import ConfigError
from bohrlab.semigroup import FiniteTable
from bohrlab.semigroup import NonnegIntMatrix
from bohrlab.semigroup import RPlusGrid
from bohrlab.semigroup import ZbarPlus
from bohrlab.semigroup import ZPlusD
from bohrlab.space_action import GOLDEN
from bohrlab.space_action import FiniteAction
from bohrlab.space_action import ProductAction
from bohrlab.space_action import TorusTranslation


GOLDEN_CONF = """\
# golden rotation
experiment = certify
semigroup = zplus:d=1
system = torus:k=1,alpha=golden   # trailing comment
max-gauge = 8

eps = 0.05
windows = [64, 128]
"""


@pytest.fixture()
def golden_conf(tmp_path):
    path = tmp_path / "golden.conf"
    path.write_text(GOLDEN_CONF, encoding="utf-8")
    return str(path)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ("BOHRLAB_EPS", "BOHRLAB_WINDOWS", "BOHRLAB_EXPERIMENT", "BOHRLAB_SEED"):
        monkeypatch.delenv(key, raising=False)


def test_load_config_file(golden_conf):
    values = load_config_file(golden_conf)
    assert values == {
        "experiment": "certify",
        "semigroup": "zplus:d=1",
        "system": "torus:k=1,alpha=golden",
        "max_gauge": 8,
        "eps": 0.05,
        "windows": [64, 128],
    }


@pytest.mark.parametrize(
    "text, match",
    [
        ("eps 0.1\n", "expected 'key = value'"),
        ("bogus = 1\n", "unknown key"),
        ("eps = 0.1\neps = 0.2\n", "set twice"),
    ],
)
def test_load_config_file_errors(tmp_path, text, match):
    path = tmp_path / "bad.conf"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError, match=match):
        load_config_file(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(str(tmp_path / "missing.conf"))


def test_config_from_file(golden_conf):
    config = ExperimentConfig.model_construct_env(load_config_file(golden_conf))
    assert config.experiment == "certify"
    assert config.eps == 0.05
    assert config.windows == [64, 128]
    assert config.max_gauge == 8
    # untouched keys keep their defaults
    assert config.schedule == [100, 1000, 10000]
    assert config.basepoint == "0"


def test_precedence(monkeypatch):
    monkeypatch.setenv("BOHRLAB_EPS", "0.2")
    monkeypatch.setenv("BOHRLAB_EXPERIMENT", "haar")
    assert ExperimentConfig.model_construct_env().eps == 0.2
    assert ExperimentConfig.model_construct_env({"eps": 0.3}).eps == 0.3
    config = ExperimentConfig.model_construct_env({"eps": 0.3}, eps=0.05, seed=None)
    assert config.eps == 0.05
    assert config.seed == 0
    assert config.experiment == "haar"


def test_env_lists_are_decoded(monkeypatch):
    monkeypatch.setenv("BOHRLAB_WINDOWS", "[8, 16]")
    assert ExperimentConfig.model_construct_env({"experiment": "certify"}).windows == [8, 16]


def test_list_values_without_brackets():
    config = ExperimentConfig.model_construct_env({"experiment": "certify", "windows": "1024, 2048"})
    assert config.windows == [1024, 2048]
    config = ExperimentConfig.model_construct_env({"experiment": "certify"}, windows=(16, 32))
    assert config.windows == [16, 32]


@pytest.mark.parametrize(
    "values",
    [
        {"experiment": "certify", "windows": [4, 2]},
        {"experiment": "certify", "windows": []},
        {"experiment": "certify", "eps": 0.0},
        {"experiment": "certify", "eps": "small"},
        {"experiment": "certify", "threads": 0},
        {"experiment": "spiral"},
        {"experiment": "certify", "bogus": 1},
        {},
    ],
)
def test_invalid_configs(values):
    with pytest.raises(ConfigError):
        ExperimentConfig.model_construct_env(values)


def test_model_dump():
    dumped = ExperimentConfig.model_construct_env({"experiment": "cauchy", "tail": 10}).model_dump()
    assert dumped["experiment"] == "cauchy"
    assert dumped["tail"] == 10
    assert dumped["windows"] == [1024, 2048, 4096, 8192, 16384]
    assert set(dumped) == set(attr.fields_dict(ExperimentConfig))


def test_parse_tag():
    parsed = registry.parse_tag("torus:k=1,alpha=golden")
    assert parsed.name == "torus"
    assert parsed.params == {"k": 1, "alpha": "golden"}
    assert registry.parse_tag("zbarplus-space:N=50").name == "zbarplus_space"
    assert registry.parse_tag("finite:tables/z2.csv").source == "tables/z2.csv"
    assert registry.parse_tag("zplus") == registry.ParsedTag("zplus")


@pytest.mark.parametrize("tag", ["", "   ", "zplus:d=1,=3", "zplus:d=1,e"])
def test_parse_tag_errors(tag):
    with pytest.raises(ConfigError):
        registry.parse_tag(tag)


def test_semigroup_tags(tmp_path):
    assert registry.AutoSemigroup.for_tag("zplus:d=2") == ZPlusD(d=2)
    assert registry.AutoSemigroup.for_tag("zbarplus:N=50") == ZbarPlus(cutoff=50)
    grid = registry.AutoSemigroup.for_tag("rplusgrid:h=0.5,T=4")
    assert isinstance(grid, RPlusGrid)
    assert grid.horizon == 4.0
    matrices = registry.AutoSemigroup.for_tag("matnn:n=2,max=1")
    assert isinstance(matrices, NonnegIntMatrix)
    assert matrices.max_entry == 1

    assert registry.AutoSemigroup.for_tag("cyclic:n=5").names == ("0", "1", "2", "3", "4")
    assert len(registry.AutoSemigroup.for_tag("truncated-add:m=3").names) == 4
    assert registry.AutoSemigroup.for_tag("truncated-zbarplus:N=2").names[-1] == "INF"

    path = tmp_path / "z2.csv"
    path.write_text("e,a\ne,a\na,e\n", encoding="utf-8")
    table = registry.AutoSemigroup.for_tag(f"finite:{path}")
    assert isinstance(table, FiniteTable)
    assert table.names == ("e", "a")


@pytest.mark.parametrize(
    "tag",
    [
        "spiral",
        "zplus:e=1",
        "zplus:d=0",
        "zplus:table.csv",
        "cyclic",
        "cyclic:n=0",
        "cyclic:n=3,m=2",
        "finite",
        "finite:does-not-exist.csv",
    ],
)
def test_semigroup_tag_errors(tag):
    with pytest.raises(ConfigError):
        registry.AutoSemigroup.for_tag(tag)


def test_system_tags(zplus):
    golden = registry.AutoSystem.for_tag("torus:k=1,alpha=golden", zplus)
    assert isinstance(golden, TorusTranslation)
    assert golden.apply(zplus.element(1), 0.0)[0] == pytest.approx(GOLDEN)

    pair = registry.AutoSystem.for_tag("torus:k=2,alpha=golden;sqrt2", zplus)
    assert pair.matrix.shape == (1, 2)
    assert pair.matrix[0, 1] == pytest.approx(math.sqrt(2.0) - 1.0)
    assert registry.AutoSystem.for_tag("torus:k=1,alpha=0.25", zplus).apply(zplus.element(2), 0.0) == (0.5,)

    zbar = ZbarPlus(cutoff=50)
    assert registry.AutoSystem.for_tag("zbarplus-space", zbar).space.cutoff == 50
    assert registry.AutoSystem.for_tag("doubling:bits=256", zplus).horizon == 192

    cyclic = FiniteTable.cyclic(3)
    assert isinstance(registry.AutoSystem.for_tag("finite", cyclic), FiniteAction)

    product = registry.AutoSystem.for_tag("torus:k=1,alpha=golden+torus:k=1,alpha=sqrt2", zplus)
    assert isinstance(product, ProductAction)
    assert product.isometric


@pytest.mark.parametrize(
    "tag",
    [
        "spiral",
        "torus:k=2,alpha=golden",
        "torus:k=1,alpha=pi",
        "torus:k=1,beta=1",
        "finite",
        "doubling:bits=100",
    ],
)
def test_system_tag_errors(zplus, tag):
    with pytest.raises(ConfigError):
        registry.AutoSystem.for_tag(tag, zplus)


def test_list_systems_is_sorted():
    rows = registry.list_systems()
    assert rows == sorted(rows)
    tags = {tag for _, tag, _ in rows}
    assert {"torus:k=1,alpha=golden", "jr", "zbarplus:N=100", "cyclic:n=5"} <= tags


def test_registry_guards():
    with pytest.raises(ValueError):
        registry.SEMIGROUP_MAPPING.register("zplus", ZPlusD)
    with pytest.raises(OSError):
        registry.AutoSemigroup()
    with pytest.raises(OSError):
        registry.AutoSystem()
    assert registry.SEMIGROUP_MAPPING["zbarplus"] is ZbarPlus
    assert "finite" in registry.SYSTEM_MAPPING
