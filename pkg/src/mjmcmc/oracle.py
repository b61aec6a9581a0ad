"""Exact dense-kernel computations on small binary spaces (k <= 12).

States are bit-packed: row/column ``c`` of every matrix is the model whose
element ``i`` equals bit ``i`` of ``c``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .chain import rates_from_log_ratios
from .errors import CapacityError, NumericalError
from .models.base import ExplicitModel
from .schedules import evaluate_schedule
from .state import all_states, as_bits, pack

MAX_K = 12


@dataclass
class DenseKernel:
    matrix: np.ndarray
    kind: str
    k: int
    eps: float = None

    @property
    def n(self):
        return self.matrix.shape[0]

    def row_sums(self):
        return self.matrix.sum(axis=1)


@dataclass
class RateTable:
    """Log ratios and rates of every element at every state."""

    log_ratios: np.ndarray
    rates: np.ndarray

    @property
    def k(self):
        return self.rates.shape[1]

    @property
    def exit_rates(self):
        return self.rates.sum(axis=1)


def _check_k(k):
    if k > MAX_K:
        raise CapacityError(f"exact oracle supports k <= {MAX_K}, got k={k}")


def rate_table(model):
    k = model.k
    _check_k(k)
    states = all_states(k)
    lr = np.vstack([np.asarray(model.log_ratios(b), dtype=float) for b in states])
    q = rates_from_log_ratios(lr, model.rate_floor)
    return RateTable(lr, q)


def _table(model_or_table):
    return model_or_table if isinstance(model_or_table, RateTable) else rate_table(model_or_table)


def log_posterior_table(model_or_table):
    """Unnormalised log p(m|y) for every state, chained from the empty model."""
    lr = _table(model_or_table).log_ratios
    n, k = lr.shape
    logp = np.zeros(n)
    for c in range(1, n):
        low = (c & -c).bit_length() - 1
        logp[c] = logp[c ^ (1 << low)] + lr[c ^ (1 << low), low]
    return logp - np.logaddexp.reduce(logp)


def _xor_index(n):
    codes = np.arange(n)
    return codes[:, None] ^ codes[None, :]


def _log_mj(q, eps):
    n, k = q.shape
    qe = q * eps
    log1m = np.log1p(-qe)
    patterns = all_states(k).astype(float)
    by_pattern = (np.log(qe) - log1m) @ patterns.T + log1m.sum(axis=1)[:, None]
    return np.take_along_axis(by_pattern, _xor_index(n), axis=1)


def build_mj_kernel(model, eps):
    """P_eps(m, m') = prod_{i in H} q_i(m) eps * prod_{i not in H} (1 - q_i(m) eps)."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    table = _table(model)
    return DenseKernel(np.exp(_log_mj(table.rates, eps)), "mj", table.k, eps)


def build_bd_rate_matrix(model):
    table = _table(model)
    n, k = table.rates.shape
    Q = np.zeros((n, n))
    codes = np.arange(n)
    for i in range(k):
        Q[codes, codes ^ (1 << i)] = table.rates[:, i]
    Q[codes, codes] = -table.rates.sum(axis=1)
    return DenseKernel(Q, "bd-rate-matrix", k)


def build_mh_kernel(model, eps):
    """Kernel of the Metropolis-corrected multiple jump chain."""
    table = _table(model)
    logp = log_posterior_table(table)
    logP = _log_mj(table.rates, eps)
    log_alpha = np.minimum(0.0, logp[None, :] + logP.T - logp[:, None] - logP)
    K = np.exp(logP + log_alpha)
    np.fill_diagonal(K, 0.0)
    np.fill_diagonal(K, 1.0 - K.sum(axis=1))
    return DenseKernel(K, "mh-corrected", table.k, eps)


def bd_stationary(model_or_kernel):
    """pi with pi Q = 0, sum pi = 1, from the birth-death rate matrix."""
    kern = model_or_kernel if isinstance(model_or_kernel, DenseKernel) else build_bd_rate_matrix(model_or_kernel)
    A = kern.matrix.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(kern.n)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    if np.any(pi < -1e-12):
        raise NumericalError("birth-death null vector has negative entries")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def stationary_distribution(kernel, tol=1e-12, max_sweeps=1_000_000, check_every=16):
    """Left fixed point of a row-stochastic kernel by power iteration.

    Falls back to a dense eigensolve if the residual does not reach ``tol``
    within ``max_sweeps``.
    """
    P = kernel.matrix if isinstance(kernel, DenseKernel) else np.asarray(kernel)
    n = P.shape[0]
    mu = np.full(n, 1.0 / n)
    sweeps = 0
    while sweeps < max_sweeps:
        for _ in range(check_every - 1):
            mu = mu @ P
        nxt = mu @ P
        sweeps += check_every
        if np.abs(nxt - mu).sum() < tol:
            nxt = np.clip(nxt, 0.0, None)
            return nxt / nxt.sum()
        mu = nxt
    return _eigen_stationary(P, tol)


def _eigen_stationary(P, tol):
    vals, vecs = scipy.linalg.eig(P.T)
    j = int(np.argmin(np.abs(vals - 1.0)))
    v = np.real(vecs[:, j])
    v = v / v.sum()
    if np.any(v < -1e-9) or np.abs(v @ P - v).sum() > max(tol, 1e-9):
        raise NumericalError("stationary distribution did not converge")
    v = np.clip(v, 0.0, None)
    return v / v.sum()


def tv_distance(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return 0.5 * float(np.abs(a - b).sum())


def loglog_slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@dataclass
class BiasReport:
    eps: list
    tv: list
    slope: float = None
    exact: bool = False

    def rows(self):
        return [(e, t, "exact" if self.exact else self.slope) for e, t in zip(self.eps, self.tv)]


EXACT_TV = 1e-10


def bias_slope(model, eps_list=(0.2, 0.1, 0.05, 0.025)):
    """Fit log TV(pi_eps, pi) against log eps."""
    if len(eps_list) < 4:
        raise ValueError("need at least four eps values")
    table = _table(model)
    pi = bd_stationary(table)
    tv = [tv_distance(stationary_distribution(build_mj_kernel(table, e)), pi) for e in eps_list]
    if all(t < EXACT_TV for t in tv):
        return BiasReport(list(eps_list), tv, exact=True)
    return BiasReport(list(eps_list), tv, slope=loglog_slope(eps_list, tv))


def check_detailed_balance(kernel, dist, tol):
    """Return (passed, max_violation) of pi(m) P(m,m') = pi(m') P(m',m)."""
    P = kernel.matrix if isinstance(kernel, DenseKernel) else np.asarray(kernel)
    dist = np.asarray(dist, dtype=float)
    if P.shape[0] != dist.size:
        raise ValueError("kernel and distribution sizes differ")
    flow = dist[:, None] * P
    worst = float(np.abs(flow - flow.T).max())
    return worst <= tol, worst


def _rates_at(model, m):
    bits = as_bits(m)
    if isinstance(model, RateTable):
        return model.rates[pack(bits)]
    return rates_from_log_ratios(model.log_ratios(bits), model.rate_floor)


@dataclass
class WaitingTimeRow:
    eps: float
    scaled_mean: float
    target_mean: float
    cdf_sup_error: float


def waiting_time_check(model, m, eps_list, n_grid=501, horizon=5.0):
    """Exact scaled waiting-time mean and CDF of the discrete chain versus Exponential(lambda)."""
    q = _rates_at(model, m)
    lam = q.sum()
    u = np.linspace(0.0, horizon / lam, n_grid)
    rows = []
    for eps in eps_list:
        log_r = np.log1p(-q * eps).sum()
        leave = -np.expm1(log_r)
        steps = np.floor(u / eps + 1e-9)
        cdf = -np.expm1(steps * log_r)
        target = -np.expm1(-lam * u)
        rows.append(WaitingTimeRow(eps, eps / leave, 1.0 / lam, float(np.abs(cdf - target).max())))
    return rows


@dataclass
class JumpRow:
    eps: float
    neighbor: np.ndarray
    target: np.ndarray
    max_non_neighbor: float
    non_neighbor_total: float

    @property
    def max_error(self):
        return float(np.abs(self.neighbor - self.target).max())


def jump_probability_check(model, m, eps_list):
    """Jump probabilities conditional on leaving m, against q_i / lambda."""
    q = _rates_at(model, m)
    k = q.size
    _check_k(k)
    lam = q.sum()
    patterns = all_states(k)
    order = patterns.sum(axis=1)
    rows = []
    for eps in eps_list:
        qe = q * eps
        log1m = np.log1p(-qe)
        leave = -np.expm1(log1m.sum())
        neighbor = qe * np.exp(log1m.sum() - log1m) / leave
        logP = patterns @ (np.log(qe) - log1m) + log1m.sum()
        far = np.exp(logP[order >= 2]) / leave
        rows.append(JumpRow(eps, neighbor, q / lam, float(far.max(initial=0.0)), float(far.sum())))
    return rows


@dataclass
class ConvergenceReport:
    tv_final: float
    steps: list = field(default_factory=list)
    tv: list = field(default_factory=list)
    mu: np.ndarray = None


def inhomogeneous_convergence_check(model, schedule, S, mu0=None, record_every=100):
    """Propagate mu_{s+1} = mu_s P_{eps_s} exactly and report TV(mu_s, pi)."""
    table = _table(model)
    pi = bd_stationary(table)
    n = table.rates.shape[0]
    if mu0 is None:
        mu = np.zeros(n)
        mu[0] = 1.0
    else:
        mu = np.asarray(mu0, dtype=float).copy()
    report = ConvergenceReport(tv_final=tv_distance(mu, pi), steps=[0], tv=[tv_distance(mu, pi)])
    last_eps, P = None, None
    for s in range(1, S + 1):
        eps = evaluate_schedule(schedule, s)
        if eps != last_eps:
            P = np.exp(_log_mj(table.rates, eps))
            last_eps = eps
        mu = mu @ P
        if s % record_every == 0 or s == S:
            report.steps.append(s)
            report.tv.append(tv_distance(mu, pi))
    report.tv_final = tv_distance(mu, pi)
    report.mu = mu
    return report


def kernel_rate_residual(model, eps):
    """max-norm of P_eps - I - eps Q."""
    table = _table(model)
    P = build_mj_kernel(table, eps).matrix
    Q = build_bd_rate_matrix(table).matrix
    return float(np.abs(P - np.eye(P.shape[0]) - eps * Q).max())


def kernel_rate_slope(model, eps_list=(0.2, 0.1, 0.05, 0.025)):
    table = _table(model)
    res = [kernel_rate_residual(table, e) for e in eps_list]
    return loglog_slope(eps_list, res), res


def random_posterior(k, seed, scale=1.0):
    """Posterior with iid Normal(0, scale^2) log masses on all 2**k states."""
    _check_k(k)
    rng = np.random.default_rng(seed)
    return ExplicitModel(log_probs=rng.normal(0.0, scale, size=1 << k))


def indicator_asymptotic_variance(kernel, pi=None):
    """CLT variance of the visit frequency of every state under a stationary chain.

    For the indicator of state j, sigma_j^2 = pi_j (2 Z_jj - 1 - pi_j) with
    Z = (I - P + 1 pi')^{-1} the fundamental matrix. Dividing by the run
    length gives the Monte Carlo variance of the empirical frequency.
    """
    P = kernel.matrix if isinstance(kernel, DenseKernel) else np.asarray(kernel)
    if pi is None:
        pi = stationary_distribution(P)
    n = P.shape[0]
    Z = np.linalg.inv(np.eye(n) - P + np.outer(np.ones(n), pi))
    return pi * (2 * np.diag(Z) - 1 - pi)
