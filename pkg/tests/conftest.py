from __future__ import annotations

import numpy as np
import pytest

from bohrlab.semigroup import ZbarPlus
from bohrlab.semigroup import ZPlusD
from bohrlab.space_action import DoublingMap
from bohrlab.space_action import DyadicCircle
from bohrlab.space_action import Torus
from bohrlab.space_action import TorusTranslation
from bohrlab.space_action import ZbarPlusSpace
from bohrlab.space_action import ZbarPlusTranslation


@pytest.fixture()
def zplus() -> ZPlusD:
    return ZPlusD(d=1)


@pytest.fixture()
def golden(zplus: ZPlusD) -> TorusTranslation:
    return TorusTranslation(zplus, Torus(1))


@pytest.fixture()
def zbarplus_system() -> ZbarPlusTranslation:
    return ZbarPlusTranslation(ZbarPlus(cutoff=50), ZbarPlusSpace(cutoff=50))


@pytest.fixture()
def doubling(zplus: ZPlusD) -> DoublingMap:
    return DoublingMap(zplus, DyadicCircle(bits=256))


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
