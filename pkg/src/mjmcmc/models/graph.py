"""Shared machinery for graph posteriors scored node by node.

The log score of a graph is ``sum_h node_score(h, nb(h)) + log prior``, so
flipping edge (i, j) only changes the terms of nodes i and j.
"""

import numpy as np

from .base import PosteriorModel
from .cache import DEFAULT_CAPACITY, NodeCache, neighbourhood_key
from .edges import adjacency, edge_pairs, n_edges


class NodewiseGraphModel(PosteriorModel):
    def __init__(self, p, rho, cache_capacity=DEFAULT_CAPACITY, use_cache=True):
        if p < 2:
            raise ValueError("need at least two nodes")
        if not 0.0 < rho < 1.0:
            raise ValueError(f"prior density rho must lie in (0, 1), got {rho}")
        self.p = p
        self.k = n_edges(p)
        self.rho = rho
        self.pairs = edge_pairs(p)
        self._log_prior_odds = float(np.log(rho) - np.log1p(-rho))
        self.score_cache = NodeCache(cache_capacity, use_cache)
        self.delta_cache = NodeCache(cache_capacity, use_cache)

    # subclasses provide the node score and optionally a faster delta vector
    def _node_score(self, h, nb):
        raise NotImplementedError

    def node_score(self, h, nb):
        nb = np.sort(np.asarray(nb, dtype=np.int64))
        return self.score_cache.get_or_compute(
            neighbourhood_key(h, nb), lambda: self._node_score(h, nb))

    def _node_deltas(self, h, nb):
        base = self.node_score(h, nb)
        out = np.zeros(self.p)
        members = set(nb.tolist())
        for j in range(self.p):
            if j == h:
                continue
            other = nb[nb != j] if j in members else np.sort(np.append(nb, j))
            out[j] = self.node_score(h, other) - base
        return out

    def node_deltas(self, h, nb):
        """Vector over j of node_score(h, nb xor {j}) - node_score(h, nb)."""
        nb = np.sort(np.asarray(nb, dtype=np.int64))
        return self.delta_cache.get_or_compute(
            neighbourhood_key(h, nb), lambda: self._node_deltas(h, nb))

    def log_prior_term(self, m, i):
        bits = np.asarray(m.bits if hasattr(m, "bits") else m)
        return self._log_prior_odds if bits[i] == 0 else -self._log_prior_odds

    def neighbours(self, bits):
        adj = adjacency(np.asarray(bits, dtype=np.uint8), self.p)
        return [np.flatnonzero(row) for row in adj]

    def log_ratios(self, m, idx=None):
        bits = np.asarray(m.bits if hasattr(m, "bits") else m, dtype=np.uint8)
        nbs = self.neighbours(bits)
        idx = np.arange(self.k) if idx is None else np.asarray(idx)
        pi, pj = self.pairs[idx, 0], self.pairs[idx, 1]
        deltas = {h: self.node_deltas(h, nbs[h]) for h in np.union1d(pi, pj).tolist()}
        D = np.zeros((self.p, self.p))
        for h, vec in deltas.items():
            D[h] = vec
        prior = np.where(bits[idx] == 0, self._log_prior_odds, -self._log_prior_odds)
        return D[pi, pj] + D[pj, pi] + prior

    def parallel_log_ratios(self, m, executor):
        """Same values as :meth:`log_ratios`, with the per-node work spread over ``executor``."""
        bits = np.asarray(m.bits if hasattr(m, "bits") else m, dtype=np.uint8)
        nbs = self.neighbours(bits)
        # fill the delta cache for uncached nodes; the assembly below then only reads it
        todo = [h for h in range(self.p)
                if neighbourhood_key(h, nbs[h]) not in self.delta_cache]
        if len(todo) > 1 and self.delta_cache.enabled:
            list(executor.map(lambda h: self.node_deltas(h, nbs[h]), todo))
        return self.log_ratios(bits)

    def log_score(self, m):
        """Unnormalised log posterior of a graph (pseudo-likelihood times prior)."""
        bits = np.asarray(m.bits if hasattr(m, "bits") else m, dtype=np.uint8)
        nbs = self.neighbours(bits)
        e = int(bits.sum())
        return (sum(self.node_score(h, nbs[h]) for h in range(self.p))
                + e * np.log(self.rho) + (self.k - e) * np.log1p(-self.rho))
