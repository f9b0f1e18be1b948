"""Exact cluster-algebra computations on Grassmannians and flag configurations.

The package covers quiver and seed mutation, the Grassmann-Cayley algebra
of meets and wedges, the braid-group action on Gr(k, n) through explicit
configuration maps, Fock-Goncharov coordinates on triangulated polygons,
and SL3 tensor diagrams with their skein reduction.
"""
from .cluster import Seed, mutate_seed, mutation_path
from .exact import MultiPoly, PolyRing, exact_divide, normalize, proportional
from .explorer import ClassAtlas, enumerate_clusters, enumerate_quiver_classes, orbit
from .fock_goncharov import Triangulation, fg_coordinate, flip_sequence, triangulation_seed
from .grassmannian import ExteriorElement, GenericConfig, meet, plucker, scott_initial_seed, wedge
from .identities import braid_relation, verify_proportional_maps, verify_words
from .maps import GroupWord, dot_action, parse_expr, pullback
from .quiver import ExtQuiver, canonical_form, mutate
from .webs import TensorDiagram, WebExpr, arborize, compatible, evaluate, reduce

__all__ = [
    "ClassAtlas", "ExtQuiver", "ExteriorElement", "GenericConfig", "GroupWord", "MultiPoly",
    "PolyRing", "Seed", "TensorDiagram", "Triangulation", "WebExpr", "arborize", "braid_relation",
    "canonical_form", "compatible", "dot_action", "enumerate_clusters", "enumerate_quiver_classes",
    "evaluate", "exact_divide", "fg_coordinate", "flip_sequence", "meet", "mutate", "mutate_seed",
    "mutation_path", "normalize", "orbit", "parse_expr", "plucker", "proportional", "pullback",
    "reduce", "scott_initial_seed", "triangulation_seed", "verify_proportional_maps", "verify_words",
    "wedge",
]
