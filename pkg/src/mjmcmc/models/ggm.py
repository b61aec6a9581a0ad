"""Gaussian graphical model posterior with fractional marginal pseudo-likelihood.

Each node h contributes the fractional marginal likelihood of regressing
y_h on its neighbours A (fraction 1/n):

    log p(y_h | y_A) = -(n-1)/2 log(pi) + lgamma((n+d)/2) - lgamma((d+1)/2)
                       - (2d+1)/2 log(n) - (n-1)/2 log(|S_{A+h}| / |S_A|)

with d = |A| and S = y'y for column-centred data. The determinant ratio is
the residual sum of squares of that regression.
"""

import math

import numpy as np
from scipy.special import gammaln

from ..errors import IllConditionedMarginalError
from .cache import DEFAULT_CAPACITY
from .graph import NodewiseGraphModel


class GgmModel(NodewiseGraphModel):
    def __init__(self, data, rho=0.5, cache_capacity=DEFAULT_CAPACITY, use_cache=True,
                 vectorized=True):
        y = np.asarray(data, dtype=float)
        if y.ndim != 2:
            raise ValueError("data must be an n x p matrix")
        n, p = y.shape
        super().__init__(p, rho, cache_capacity, use_cache)
        self.n = n
        self.data = y - y.mean(axis=0)
        self.scatter = self.data.T @ self.data
        self.vectorized = vectorized
        self._const = -(n - 1) / 2 * math.log(math.pi)

    def _log_marginal(self, d, rss):
        n = self.n
        return (self._const + gammaln((n + d) / 2) - gammaln((d + 1) / 2)
                - (2 * d + 1) / 2 * math.log(n) - (n - 1) / 2 * np.log(rss))

    def _check_size(self, h, d):
        # centring costs one degree of freedom: |A| + 1 columns need rank n - 1
        if d + 1 >= self.n:
            raise IllConditionedMarginalError(
                f"node {h} has {d} neighbours but only n={self.n} observations")

    def _rss(self, h, nb):
        S = self.scatter
        if nb.size == 0:
            return S[h, h]
        S_AA = S[np.ix_(nb, nb)]
        beta = np.linalg.solve(S_AA, S[nb, h])
        return S[h, h] - S[h, nb] @ beta

    def _node_score(self, h, nb):
        self._check_size(h, nb.size)
        rss = self._rss(h, nb)
        if not rss > 0:
            raise IllConditionedMarginalError(f"singular scatter for node {h}")
        return float(self._log_marginal(nb.size, rss))

    def _node_deltas(self, h, nb):
        if not self.vectorized:
            return super()._node_deltas(h, nb)
        S = self.scatter
        d = nb.size
        if d < self.p - 1:
            self._check_size(h, d + 1)
        base_rss = self._rss(h, nb)
        base = self._log_marginal(d, base_rss)
        # additions: rank-one Schur update of the residual sum of squares
        if d:
            proj = np.linalg.solve(S[np.ix_(nb, nb)], S[nb, :])
            resid_h = S[:, h] - S[:, nb] @ proj[:, h]
            resid_jj = np.diag(S) - np.einsum("aj,aj->j", S[nb, :], proj)
        else:
            resid_h = S[:, h].copy()
            resid_jj = np.diag(S).copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._log_marginal(d + 1, base_rss - resid_h ** 2 / resid_jj) - base
        for j in nb.tolist():
            out[j] = self.node_score(h, nb[nb != j]) - base
        out[h] = 0.0
        return out
