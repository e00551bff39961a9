"""Dihedral group actions on curves: Hurwitz systems, move orbits, invariants and component catalogs."""
from .classification import CanonicalForm, CaseTag, canonical_invariant, equivalent, normal_form, nu_realizable
from .group_core import BinaryDihedralElement, ConjClassId, DihedralElement
from .hurwitz import HurwitzVector, NuType, enumerate_hs, is_hurwitz_system, nu_type
from .invariants import h2_order, h2_sigma_order, relative_h2_class, schur_lift_product
from .mcg_moves import Move, MoveKind, apply_move, orbit
from .moduli_catalog import components, primary_types

__version__ = "0.1.0"

__all__ = [
    "BinaryDihedralElement",
    "CanonicalForm",
    "CaseTag",
    "ConjClassId",
    "DihedralElement",
    "HurwitzVector",
    "Move",
    "MoveKind",
    "NuType",
    "apply_move",
    "canonical_invariant",
    "components",
    "enumerate_hs",
    "equivalent",
    "h2_order",
    "h2_sigma_order",
    "is_hurwitz_system",
    "normal_form",
    "nu_realizable",
    "nu_type",
    "orbit",
    "primary_types",
    "relative_h2_class",
    "schur_lift_product",
]
