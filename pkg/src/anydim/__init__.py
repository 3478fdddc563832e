"""Lower bounds for polynomial problems posed in every dimension at once.

A cost given in one dimension is dualized into a cost whose symmetrization
lower-bounds the original minimum at every larger dimension.  The four
supported settings are listed in :mod:`anydim.settings`.
"""
from .combinat import MultiIndexList, Partition
from .graphs import GraphPoly, MultiGraph, canonical_form, named_graph
from .kernels import BACKEND
from .parsing import parse_cost, resolve_cost, to_polynomial
from .settings import SETTINGS, dualize
from .symfunc import Basis, SymPoly

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Basis", "GraphPoly", "MultiGraph", "MultiIndexList", "Partition", "SETTINGS", "SymPoly",
    "canonical_form", "dualize", "named_graph", "parse_cost", "resolve_cost", "to_polynomial",
]
