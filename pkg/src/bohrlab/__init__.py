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
bohrlab
=======

A numerical lab for Bohr almost periodic motions of abelian semigroups.

* Finite-resolution certificates of Bohr almost periodicity (ε-periods, syndeticity gauges)
* Equicontinuity moduli and the orbit-closure semigroup of an almost periodic point
* Haar measures of finite commutative semigroups, checked against a linear solve
* Følner averages, unique ergodicity checks and Shulman diagnostics
"""
from __future__ import annotations

import logging
import typing as t

from . import utils as utils
from .__about__ import __version__ as __version__


if utils.DEBUG:
    utils.set_debug_mode(True)
    utils.set_quiet_mode(False)

    utils.configure_logging()
    logging.basicConfig(level=logging.NOTSET)


_import_structure = {
    "exceptions": [],
    "utils": [],
    "semigroup": [
        "SemigroupElement",
        "WindowSpec",
        "ZPlusD",
        "RPlusGrid",
        "ZbarPlus",
        "NonnegIntMatrix",
        "FiniteTable",
        "QuasiHaarMeasure",
    ],
    "space_action": [
        "Torus",
        "ZbarPlusSpace",
        "FiniteSpace",
        "DyadicCircle",
        "ProductSpace",
        "TorusTranslation",
        "ZbarPlusTranslation",
        "DoublingMap",
        "FiniteAction",
        "ProductAction",
    ],
    "almost_periodicity": ["BohrCertificate", "CertificateStatus", "certify_bohr"],
    "orbit_algebra": ["build_orbit_net", "build_diamond_table", "algebra_check"],
    "ergodic": ["FolnerSequence", "FolnerKind", "TestFunctionFamily", "haar_solve_finite"],
    "_configuration": ["ExperimentConfig", "load_config_file"],
    "_registry": ["AutoSemigroup", "AutoSystem", "SEMIGROUP_MAPPING", "SYSTEM_MAPPING", "list_systems"],
    "_experiments": ["run_experiment", "EXPERIMENTS"],
    "cli": [],
}


if t.TYPE_CHECKING:
    from . import almost_periodicity as almost_periodicity
    from . import cli as cli
    from . import ergodic as ergodic
    from . import exceptions as exceptions
    from . import orbit_algebra as orbit_algebra
    from . import semigroup as semigroup
    from . import space_action as space_action
    from ._configuration import ExperimentConfig as ExperimentConfig
    from ._configuration import load_config_file as load_config_file
    from ._experiments import EXPERIMENTS as EXPERIMENTS
    from ._experiments import run_experiment as run_experiment
    from ._registry import SEMIGROUP_MAPPING as SEMIGROUP_MAPPING
    from ._registry import SYSTEM_MAPPING as SYSTEM_MAPPING
    from ._registry import AutoSemigroup as AutoSemigroup
    from ._registry import AutoSystem as AutoSystem
    from ._registry import list_systems as list_systems
    from .almost_periodicity import BohrCertificate as BohrCertificate
    from .almost_periodicity import CertificateStatus as CertificateStatus
    from .almost_periodicity import certify_bohr as certify_bohr
    from .ergodic import FolnerKind as FolnerKind
    from .ergodic import FolnerSequence as FolnerSequence
    from .ergodic import TestFunctionFamily as TestFunctionFamily
    from .ergodic import haar_solve_finite as haar_solve_finite
    from .orbit_algebra import algebra_check as algebra_check
    from .orbit_algebra import build_diamond_table as build_diamond_table
    from .orbit_algebra import build_orbit_net as build_orbit_net
    from .semigroup import FiniteTable as FiniteTable
    from .semigroup import NonnegIntMatrix as NonnegIntMatrix
    from .semigroup import QuasiHaarMeasure as QuasiHaarMeasure
    from .semigroup import RPlusGrid as RPlusGrid
    from .semigroup import SemigroupElement as SemigroupElement
    from .semigroup import WindowSpec as WindowSpec
    from .semigroup import ZbarPlus as ZbarPlus
    from .semigroup import ZPlusD as ZPlusD
    from .space_action import DoublingMap as DoublingMap
    from .space_action import DyadicCircle as DyadicCircle
    from .space_action import FiniteAction as FiniteAction
    from .space_action import FiniteSpace as FiniteSpace
    from .space_action import ProductAction as ProductAction
    from .space_action import ProductSpace as ProductSpace
    from .space_action import Torus as Torus
    from .space_action import TorusTranslation as TorusTranslation
    from .space_action import ZbarPlusSpace as ZbarPlusSpace
    from .space_action import ZbarPlusTranslation as ZbarPlusTranslation
else:
    import sys

    sys.modules[__name__] = utils.LazyModule(
        __name__,
        globals()["__file__"],
        _import_structure,
        module_spec=__spec__,
        extra_objects={
            "__version__": __version__,
            # bohrlab["semigroup"].for_tag(...) and bohrlab["system"].for_tag(...) shortcuts
            "__bohrlab_special__": {"semigroup": "AutoSemigroup", "system": "AutoSystem"},
        },
    )
