"""Exact Dirac-Bergmann constraint analysis of first-order lattice field theories."""
from ._parallel import get_threads, parallel_map, set_threads, threads
from .lattice import LatticeSpec

__version__ = "0.1.0"

__all__ = ["LatticeSpec", "get_threads", "parallel_map", "set_threads", "threads", "__version__"]
