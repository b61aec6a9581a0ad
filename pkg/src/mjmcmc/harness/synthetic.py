"""Synthetic instances with known truth."""

from dataclasses import dataclass

import numpy as np

from ..errors import GenerationError
from ..models.edges import adjacency, edge_pairs, n_edges

MAX_CONDITION = 1e6


@dataclass
class SyntheticGgmInstance:
    graph: np.ndarray       # edge bits, lexicographic pair order
    precision: np.ndarray
    data: np.ndarray
    p: int
    n: int
    alpha: float
    seed: int

    @property
    def adjacency(self):
        return adjacency(self.graph, self.p)


def _precision_on_support(adj, rng, max_retries):
    p = adj.shape[0]
    A = rng.standard_normal((p, p))
    off = (A @ A.T) * adj
    np.fill_diagonal(off, 0.0)
    lam_min = float(np.linalg.eigvalsh(off)[0]) if p > 1 else 0.0
    load = max(1.0, 1.2 * -lam_min)
    for _ in range(max_retries):
        K = off + load * np.eye(p)
        eig = np.linalg.eigvalsh(K)
        if eig[0] > 0 and eig[-1] / eig[0] < MAX_CONDITION:
            return K
        load *= 1.5
    raise GenerationError("could not build a well-conditioned precision matrix")


def generate_ggm_instance(p, n, alpha, seed, max_retries=50):
    """Random Bernoulli(alpha) graph, a precision matrix on its support, and Gaussian data.

    The precision matrix is the support-masked off-diagonal of A A' plus a
    diagonal load chosen to make it positive definite with condition
    number below 1e6.
    """
    if p < 2 or n < 2:
        raise ValueError("need p >= 2 and n >= 2")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    graph = (rng.random(n_edges(p)) < alpha).astype(np.uint8)
    K = _precision_on_support(adjacency(graph, p), rng, max_retries)
    cov = np.linalg.inv(K)
    cov = (cov + cov.T) / 2
    data = rng.multivariate_normal(np.zeros(p), cov, size=n, method="cholesky")
    return SyntheticGgmInstance(graph, K, data, p, n, alpha, seed)


def gibbs_ising(interactions, fields, n, seed, sweeps=200):
    """``n`` independent draws from a 0/1 Ising model, one Gibbs chain per draw.

    P(y_i = 1 | rest) = logistic(fields_i + sum_j interactions_ij y_j).
    """
    J = np.asarray(interactions, dtype=float)
    h = np.asarray(fields, dtype=float)
    p = h.size
    if J.shape != (p, p) or not np.allclose(J, J.T) or np.any(np.diag(J) != 0):
        raise ValueError("interactions must be symmetric with zero diagonal")
    rng = np.random.default_rng(seed)
    y = (rng.random((n, p)) < 0.5).astype(float)
    for _ in range(sweeps):
        for i in range(p):
            eta = h[i] + y @ J[:, i]
            y[:, i] = rng.random(n) < 1.0 / (1.0 + np.exp(-eta))
    return y.astype(np.uint8)


@dataclass
class SyntheticIsingInstance:
    graph: np.ndarray
    interactions: np.ndarray
    fields: np.ndarray
    data: np.ndarray
    p: int
    n: int
    seed: int


def chain_ising_instance(p, n, seed, strength=1.0, sweeps=200):
    """Path graph 0-1-...-(p-1); fields centre every node's conditional at 1/2 mass."""
    J = np.zeros((p, p))
    idx = np.arange(p - 1)
    J[idx, idx + 1] = J[idx + 1, idx] = strength
    fields = -0.5 * J.sum(axis=1)
    data = gibbs_ising(J, fields, n, seed, sweeps)
    pairs = edge_pairs(p)
    graph = (pairs[:, 1] - pairs[:, 0] == 1).astype(np.uint8)
    return SyntheticIsingInstance(graph, J, fields, data, p, n, seed)


@dataclass
class SyntheticBvsInstance:
    y: np.ndarray
    x: np.ndarray
    coefficients: np.ndarray
    truth: np.ndarray
    seed: int


def generate_bvs_instance(n, k, n_active, seed, min_coef=1.0, max_coef=2.0):
    """Gaussian design, ``n_active`` coefficients with |beta| in [min_coef, max_coef], unit noise."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, k))
    beta = np.zeros(k)
    active = rng.choice(k, n_active, replace=False)
    beta[active] = rng.uniform(min_coef, max_coef, n_active) * rng.choice([-1.0, 1.0], n_active)
    y = x @ beta + rng.standard_normal(n)
    return SyntheticBvsInstance(y, x, beta, (beta != 0).astype(np.uint8), seed)
