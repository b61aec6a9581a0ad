"""Posterior model interface plus the two table-driven models."""

import numpy as np

from ..state import all_states, pack

TINY = np.finfo(float).tiny


class PosteriorModel:
    """Evaluates log(p(m^i | y) / p(m | y)) for single-element flips.

    Subclasses implement :meth:`log_ratios`; it must be safe to call
    concurrently with disjoint ``idx`` against the same ``m``.
    """

    k = None
    #: lower clamp for rates so every rate stays strictly positive
    rate_floor = TINY

    def log_ratios(self, m, idx=None):
        raise NotImplementedError

    def log_ratio(self, m, i):
        return float(self.log_ratios(m, np.array([i]))[0])

    def log_prior_term(self, m, i):
        """Additive log prior contribution of flipping ``i`` (0 when flat)."""
        return 0.0


class ExplicitModel(PosteriorModel):
    """Posterior given as a full table over all 2**k states (small k only)."""

    def __init__(self, probs=None, log_probs=None):
        if (probs is None) == (log_probs is None):
            raise ValueError("pass exactly one of probs or log_probs")
        if probs is not None:
            probs = np.asarray(probs, dtype=float)
            if np.any(probs <= 0):
                raise ValueError("all state probabilities must be positive")
            log_probs = np.log(probs)
        log_probs = np.asarray(log_probs, dtype=float)
        n = log_probs.size
        k = n.bit_length() - 1
        if n != 1 << k or k < 1:
            raise ValueError("table length must be 2**k")
        self.k = k
        self.log_probs = log_probs - np.logaddexp.reduce(log_probs)
        self._flip = 1 << np.arange(k, dtype=np.int64)

    @property
    def probs(self):
        return np.exp(self.log_probs)

    def log_ratios(self, m, idx=None):
        code = pack(m)
        flips = self._flip if idx is None else self._flip[np.asarray(idx)]
        return self.log_probs[code ^ flips] - self.log_probs[code]

    def log_ratio_path(self, m, flips):
        code = pack(m)
        target = code ^ int(np.bitwise_or.reduce(self._flip[np.asarray(flips)], initial=0))
        return self.log_probs[target] - self.log_probs[code]

    def log_ratios_code(self, code):
        return self.log_probs[code ^ self._flip] - self.log_probs[code]


class FactorizableModel(PosteriorModel):
    """p(m | y) = prod_i p(m_i | y) with given marginals p(m_i = 1 | y)."""

    def __init__(self, marginals):
        marginals = np.asarray(marginals, dtype=float)
        if marginals.ndim != 1 or np.any((marginals <= 0) | (marginals >= 1)):
            raise ValueError("marginals must lie strictly inside (0, 1)")
        self.k = marginals.size
        self.marginals = marginals
        # log odds of switching 0 -> 1
        self._logit = np.log(marginals) - np.log1p(-marginals)

    def log_ratios(self, m, idx=None):
        bits = np.asarray(m.bits if hasattr(m, "bits") else m)
        if idx is not None:
            idx = np.asarray(idx)
            bits = bits[idx]
            logit = self._logit[idx]
        else:
            logit = self._logit
        return np.where(bits == 0, logit, -logit)

    def joint(self):
        """Exact product distribution over all states (bit-packed order)."""
        states = all_states(self.k)
        return np.prod(np.where(states == 1, self.marginals, 1 - self.marginals), axis=1)
