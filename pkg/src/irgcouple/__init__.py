"""Coupled inhomogeneous random graphs: samplers, exact solvers and predictors."""
__version__ = "0.1.0"

from .graph import Graph, new_graph  # noqa: E402
from .kernels import Kernel, ScalingSequence, make_block, make_bump, make_constant, make_rank1  # noqa: E402
from .rng import UniformStream  # noqa: E402
from .samplers import CoupledTriple, RateFunction, sample_coupled_triple, sample_er, sample_irg  # noqa: E402

__all__ = [
    "Graph", "new_graph", "Kernel", "ScalingSequence", "make_block", "make_bump",
    "make_constant", "make_rank1", "UniformStream", "CoupledTriple", "RateFunction",
    "sample_coupled_triple", "sample_er", "sample_irg", "__version__",
]
