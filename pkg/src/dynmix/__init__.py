"""dynmix: simulation lab for non-backtracking random walks on a
degree-preserving edge-rewiring multigraph."""

__version__ = "0.1.0"
