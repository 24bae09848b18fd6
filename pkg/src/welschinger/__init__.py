"""Welschinger invariants of real blow-ups: lattice arithmetic, blow-up and
wall-crossing relations, a fact store with closure, generating polynomials
and a solver for degeneration splittings."""

from .errors import (ContactError, InvalidKey, LatticeError, MalformedRecord, MissingFact,
                     ParityError, SideConditionError)
from .factbase import Bounds, Contradiction, Fact, FactBase, closure
from .genfun import GenPoly, Poly, build, verify_blowup_identities, verify_wall_identity
from .lattice import (Base, HClass, Surface, c1_dot, canonicalize, conic_bundle, intersect,
                      parse_class, parse_surface, pullback, render_class)
from .presets import load_preset
from .relations import InvariantKey, Relation, relations_of, theta
from .splitting import (brute_force_degenerations, classify, derive_wall_crossing,
                        feasible_degenerations)
from .tangency import TangencyVec, node_count, point_budget, validate_contact

__version__ = "0.1.0"

__all__ = [
    "ContactError", "InvalidKey", "LatticeError", "MalformedRecord", "MissingFact", "ParityError",
    "SideConditionError", "Bounds", "Contradiction", "Fact", "FactBase", "closure", "GenPoly",
    "Poly", "build", "verify_blowup_identities", "verify_wall_identity", "Base", "HClass",
    "Surface", "c1_dot", "canonicalize", "conic_bundle", "intersect", "parse_class",
    "parse_surface", "pullback", "render_class", "load_preset", "InvariantKey", "Relation",
    "relations_of", "theta", "brute_force_degenerations", "classify", "derive_wall_crossing",
    "feasible_degenerations", "TangencyVec", "node_count", "point_budget", "validate_contact",
]
