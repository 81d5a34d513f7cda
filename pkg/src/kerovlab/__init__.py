"""Branching graphs, Kerov operators, coherent measures and their Markov dynamics."""

from .graph import BranchingGraph, build_graph
from .multiplicity import MultiplicityFn

__all__ = ["BranchingGraph", "build_graph", "MultiplicityFn"]
__version__ = "0.1.0"
