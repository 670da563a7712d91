"""Virtual cohomology rings of global quotient orbifolds [Y/G] with exact arithmetic."""

from .graded_ring import CohClass, ManifoldModel, make_cp, make_even_sphere, make_point, tensor_many
from .group_ring import FiniteGroup, GroupRingElement, cyclic_group, symmetric_group
from .inertia import InertiaScenario, build_scenario_cpn_zp, build_scenario_symprod2
from .subring import close_subring, invariant_subring, structure_constants, verify_presentation
from .sym_product import generators_symprod, perm_pushforward

__version__ = "0.1.0"

__all__ = [
    "CohClass",
    "FiniteGroup",
    "GroupRingElement",
    "InertiaScenario",
    "ManifoldModel",
    "build_scenario_cpn_zp",
    "build_scenario_symprod2",
    "close_subring",
    "cyclic_group",
    "generators_symprod",
    "invariant_subring",
    "make_cp",
    "make_even_sphere",
    "make_point",
    "perm_pushforward",
    "structure_constants",
    "symmetric_group",
    "tensor_many",
    "verify_presentation",
]
