from .budget import SolveBudget, SolveResult
from .chromatic import chromatic_number_exact, dsatur_coloring, is_proper_coloring, k_colorable
from .clique import greedy_clique, is_clique, maximum_clique
from .quasi_clique import is_quasi_clique, quasi_clique_number_exact
from .predictors import (PredictionWindow, kl_divergence_bernoulli, predict_chromatic_dense_d,
                         predict_chromatic_sparse_ell, predict_quasi_clique, slowly_varying_ratio)

__all__ = [
    "SolveBudget", "SolveResult", "chromatic_number_exact", "dsatur_coloring",
    "is_proper_coloring", "k_colorable", "greedy_clique", "is_clique", "maximum_clique",
    "is_quasi_clique", "quasi_clique_number_exact", "PredictionWindow",
    "kl_divergence_bernoulli", "predict_chromatic_dense_d", "predict_chromatic_sparse_ell",
    "predict_quasi_clique", "slowly_varying_ratio",
]
