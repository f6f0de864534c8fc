"""Exact computations with truncated A-infinity algebras over the rationals:
homotopy transfer, obstruction theory for weak morphisms, and isotopies
between a structure and its transfers."""

from .bar import (AInfStructure, WeakMorphism, codiff_check, compose_morphisms, dgmorph_check,
                  identity_morphism, invert_weak_iso, strict_morphism, structure_difference,
                  structures_equal, transport_structure, twist_structure)
from .graded import ChainComplex, GradedMap, GradedSpace, HomotopyData
from .lifting import (construct_isotopy, converse_isotopy_to_extension, lift_homotopic_chain_map,
                      quasi_inverse, weak_iso_variant)
from .obstruction import HomComplex, extend_chain_map, obstruction_classes
from .transfer import (extend_f, extend_g, retract_to_homology, transfer_over_inclusion,
                       transfer_structure)
from .trees import PlanarTree, count_trees, enumerate_trees

__all__ = [
    "AInfStructure", "ChainComplex", "GradedMap", "GradedSpace", "HomComplex", "HomotopyData",
    "PlanarTree", "WeakMorphism", "codiff_check", "compose_morphisms", "construct_isotopy",
    "converse_isotopy_to_extension", "count_trees", "dgmorph_check", "enumerate_trees",
    "extend_chain_map", "extend_f", "extend_g", "identity_morphism", "invert_weak_iso",
    "lift_homotopic_chain_map", "obstruction_classes", "quasi_inverse", "retract_to_homology",
    "strict_morphism", "structure_difference", "structures_equal", "transfer_over_inclusion",
    "transfer_structure", "transport_structure", "twist_structure", "weak_iso_variant",
]
