"""Ising structure posterior via nodewise logistic pseudo-likelihood.

Each node's marginal likelihood is approximated by -BIC/2 of a maximum
likelihood logistic regression of that node on its neighbours (intercept
included). With ``ebic_gamma > 0`` the extended BIC penalty
``2 * gamma * d * log(p - 1)`` is added for ``d`` neighbours.
"""

import math

import numpy as np

from ..errors import FitError
from .cache import DEFAULT_CAPACITY
from .graph import NodewiseGraphModel

MAX_ITER = 100
GRAD_TOL = 1e-8
RIDGE = 1e-6
# |coefficient| beyond this means fitted probabilities saturate: separation
MAX_COEF = 30.0
RATE_FLOOR = 1e-12


def fit_logistic(X, y, max_iter=MAX_ITER, tol=GRAD_TOL, ridge=RIDGE, node=None):
    """IRLS fit; returns (coefficients, maximised log-likelihood)."""
    beta = np.zeros(X.shape[1])
    ridge_eye = ridge * np.eye(X.shape[1])
    for _ in range(max_iter):
        eta = X @ beta
        mu = 0.5 * (1.0 + np.tanh(0.5 * eta))
        grad = X.T @ (y - mu)
        if np.abs(grad).max() < tol:
            break
        w = mu * (1.0 - mu)
        H = X.T @ (X * w[:, None]) + ridge_eye
        beta = beta + np.linalg.solve(H, grad)
        if np.abs(beta).max() > MAX_COEF:
            raise FitError(node, "logistic fit diverged (separation)")
    else:
        raise FitError(node)
    eta = X @ beta
    loglik = float(np.sum(y * eta - np.logaddexp(0.0, eta)))
    return beta, loglik


class IsingModel(NodewiseGraphModel):
    rate_floor = RATE_FLOOR

    def __init__(self, data, rho=0.5, ebic_gamma=0.0, cache_capacity=DEFAULT_CAPACITY,
                 use_cache=True):
        y = np.asarray(data)
        if y.ndim != 2:
            raise ValueError("data must be an n x p matrix")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("Ising data must be binary (0/1)")
        n, p = y.shape
        const = np.flatnonzero(y.min(axis=0) == y.max(axis=0))
        if const.size:
            raise ValueError(f"constant columns {const.tolist()} carry no information")
        if ebic_gamma < 0:
            raise ValueError("ebic_gamma must be >= 0")
        super().__init__(p, rho, cache_capacity, use_cache)
        self.n = n
        self.data = y.astype(float)
        self.ebic_gamma = float(ebic_gamma)
        self._log_floor = math.log(RATE_FLOOR)

    def bic(self, h, nb):
        nb = np.asarray(nb, dtype=np.int64)
        X = np.column_stack([np.ones(self.n), self.data[:, nb]])
        _, loglik = fit_logistic(X, self.data[:, h], node=h)
        d = nb.size
        penalty = (d + 1) * math.log(self.n)
        if self.ebic_gamma and self.p > 2:
            penalty += 2 * self.ebic_gamma * d * math.log(self.p - 1)
        return -2 * loglik + penalty

    def _node_score(self, h, nb):
        # failed fits are cached as NaN and mapped to the rate floor
        try:
            return -0.5 * self.bic(h, nb)
        except FitError:
            return float("nan")

    def log_ratios(self, m, idx=None):
        lr = super().log_ratios(m, idx)
        return np.where(np.isnan(lr), self._log_floor, lr)
