"""Linear-regression variable selection under Zellner's g-prior."""

import math
import threading
import warnings

import numpy as np

from ..errors import UndefinedRSquaredError
from .base import PosteriorModel
from .cache import DEFAULT_CAPACITY, NodeCache


class RankDeficientWarning(UserWarning):
    pass


def r_squared(y, x_active):
    """Intercept-free coefficient of determination 1 - RSS / sum(y^2).

    Rank-deficient designs use the minimum-norm least-squares solution;
    the second return value reports whether that happened.
    """
    y = np.asarray(y, dtype=float)
    tss = float(y @ y)
    if tss == 0.0:
        raise UndefinedRSquaredError("total sum of squares is zero")
    x_active = np.asarray(x_active, dtype=float)
    if x_active.size == 0:
        return 0.0, False
    if x_active.ndim == 1:
        x_active = x_active[:, None]
    coef, _, rank, _ = np.linalg.lstsq(x_active, y, rcond=None)
    resid = y - x_active @ coef
    r2 = 1.0 - float(resid @ resid) / tss
    return min(1.0, max(0.0, r2)), rank < x_active.shape[1]


class BvsModel(PosteriorModel):
    """Columns are scaled to unit norm and the response is centred; no intercept."""

    def __init__(self, y, x, g=None, rho=0.5, standardize=True,
                 cache_capacity=DEFAULT_CAPACITY, use_cache=True):
        y = np.asarray(y, dtype=float).ravel()
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[0] != y.size:
            raise ValueError("x must be n x k with n = len(y)")
        if not 0.0 < rho < 1.0:
            raise ValueError(f"prior inclusion probability must lie in (0, 1), got {rho}")
        n, k = x.shape
        if standardize:
            y = y - y.mean()
            norms = np.linalg.norm(x, axis=0)
            norms[norms == 0] = 1.0
            x = x / norms
        self.y = y
        self.x = x
        self.n = n
        self.k = k
        self.g = float(n if g is None else g)
        if self.g <= 0:
            raise ValueError("g must be positive")
        self.rho = rho
        self._log_prior_odds = math.log(rho) - math.log1p(-rho)
        self._log1g = math.log1p(self.g)
        self.rank_deficient_events = 0
        self._lock = threading.Lock()
        self.cache = NodeCache(cache_capacity, use_cache)

    def r2(self, bits):
        active = np.flatnonzero(bits)
        return self.cache.get_or_compute(active.astype(np.int32).tobytes(),
                                         lambda: self._r2(active))

    def _r2(self, active):
        value, deficient = r_squared(self.y, self.x[:, active])
        if deficient:
            with self._lock:
                self.rank_deficient_events += 1
            warnings.warn(f"rank-deficient design for active set {active.tolist()}",
                          RankDeficientWarning, stacklevel=3)
        return value

    def log_bayes_factor(self, size, size_new, r2, r2_new):
        return ((size - size_new) / 2 * self._log1g
                + (self.n - 1) / 2 * (math.log1p(self.g * (1 - r2))
                                      - math.log1p(self.g * (1 - r2_new))))

    def log_prior_term(self, m, i):
        bits = np.asarray(m.bits if hasattr(m, "bits") else m)
        return self._log_prior_odds if bits[i] == 0 else -self._log_prior_odds

    def log_ratios(self, m, idx=None):
        bits = np.asarray(m.bits if hasattr(m, "bits") else m, dtype=np.uint8)
        idx = np.arange(self.k) if idx is None else np.asarray(idx)
        size = int(bits.sum())
        r2 = self.r2(bits)
        out = np.empty(idx.size)
        for n_, i in enumerate(idx.tolist()):
            other = bits.copy()
            other[i] ^= 1
            sign = 1 if bits[i] == 0 else -1
            out[n_] = (self.log_bayes_factor(size, size + sign, r2, self.r2(other))
                       + sign * self._log_prior_odds)
        return out

    def log_score(self, m):
        bits = np.asarray(m.bits if hasattr(m, "bits") else m, dtype=np.uint8)
        size = int(bits.sum())
        r2 = self.r2(bits)
        return (-size / 2 * self._log1g - (self.n - 1) / 2 * math.log1p(self.g * (1 - r2))
                + size * math.log(self.rho) + (self.k - size) * math.log1p(-self.rho))
