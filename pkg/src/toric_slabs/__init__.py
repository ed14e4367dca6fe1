"""Normalized slab functions for mirrors of toric Calabi-Yau varieties.

The pipeline runs from a lattice polytope cut into standard simplices
(:mod:`.polytope`) through its monoid of convex PL functions
(:mod:`.kaehler`) to slab functions computed in truncated monoid rings
(:mod:`.series`, :mod:`.slabs`).  Tropical tree counts (:mod:`.trees`) and
broken lines (:mod:`.broken_lines`) give independent checks.
"""

from .broken_lines import BrokenLine, LiftResult, enumerate_broken_lines, lift_invariance
from .errors import ToricSlabError
from .fixtures import FIXTURE_NAMES, load_fixture
from .kaehler import KaehlerData, check_strict_convexity, kaehler_data, member_Pbar, phi_v
from .polytope import Decomposition, from_dict, monodromy_lambda, monodromy_P, parse_input, validate
from .series import Exponent, Grading, Series, exp, log, positive_grading, pure_Q_part, transport_slab
from .slabs import SlabFunction, cone_membership, mirror_equation, naive_slab, normalize, verify_conditions
from .trees import (
    TreeType,
    a_coefficient,
    aut_count,
    b_coefficient,
    enumerate_curve_types,
    enumerate_disk_types,
    exp_form,
    leaf_labels,
    product_expansion,
)

__all__ = [
    "BrokenLine",
    "Decomposition",
    "Exponent",
    "FIXTURE_NAMES",
    "Grading",
    "KaehlerData",
    "LiftResult",
    "Series",
    "SlabFunction",
    "ToricSlabError",
    "TreeType",
    "a_coefficient",
    "aut_count",
    "b_coefficient",
    "check_strict_convexity",
    "cone_membership",
    "enumerate_broken_lines",
    "enumerate_curve_types",
    "enumerate_disk_types",
    "exp",
    "exp_form",
    "from_dict",
    "kaehler_data",
    "leaf_labels",
    "lift_invariance",
    "load_fixture",
    "log",
    "member_Pbar",
    "mirror_equation",
    "monodromy_P",
    "monodromy_lambda",
    "naive_slab",
    "normalize",
    "parse_input",
    "phi_v",
    "positive_grading",
    "product_expansion",
    "pure_Q_part",
    "transport_slab",
    "validate",
    "verify_conditions",
]
