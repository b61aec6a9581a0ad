from .base import ExplicitModel, FactorizableModel, PosteriorModel
from .bvs import BvsModel, r_squared
from .edges import adjacency, edge_index, edge_pairs, edges_from_adjacency, n_edges, n_nodes
from .ggm import GgmModel
from .ising import IsingModel, fit_logistic

__all__ = [
    "PosteriorModel", "ExplicitModel", "FactorizableModel", "GgmModel", "IsingModel",
    "BvsModel", "r_squared", "fit_logistic", "edge_pairs", "edge_index", "n_edges",
    "n_nodes", "adjacency", "edges_from_adjacency",
]
