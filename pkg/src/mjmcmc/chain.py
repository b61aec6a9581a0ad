"""Birth-death and multiple jump samplers on binary model spaces."""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .errors import ModelEvaluationError
from .schedules import EpsilonSchedule, evaluate_schedule, parse_schedule
from .state import BinaryModel, as_bits, pack

THREADS_ENV = "MJMCMC_THREADS"
DEFAULT_BURN_IN = 0.25
DEFAULT_CHECKPOINT = 1000

_executors = {}


def resolve_threads(threads=None):
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(threads))


def _executor(n):
    ex = _executors.get(n)
    if ex is None:
        ex = _executors[n] = ThreadPoolExecutor(max_workers=n, thread_name_prefix="mj-rates")
    return ex


@dataclass(frozen=True)
class RateVector:
    rates: np.ndarray
    state_id: object = None

    @property
    def total(self):
        """Total exit rate lambda(m)."""
        return float(self.rates.sum())

    def __len__(self):
        return self.rates.size


@dataclass(frozen=True)
class MaxJumpCap:
    """Limit on flips per iteration, ceil(r * k), for the first few iterations."""

    r: float
    active_iterations: int = 5

    def __post_init__(self):
        if not 0.0 < self.r <= 1.0:
            raise ValueError(f"max jump r must lie in (0, 1], got {self.r}")
        if self.active_iterations < 0:
            raise ValueError("active_iterations must be >= 0")

    def size(self, k):
        return max(1, math.ceil(self.r * k))

    def active(self, s):
        return s <= self.active_iterations


def _log_ratios(model, bits, threads):
    k = model.k
    if threads <= 1 or k < 2 * threads:
        return np.asarray(model.log_ratios(bits), dtype=float)
    parallel = getattr(model, "parallel_log_ratios", None)
    if parallel is not None:
        return np.asarray(parallel(bits, _executor(threads)), dtype=float)
    chunks = np.array_split(np.arange(k), threads)
    out = np.empty(k)
    parts = _executor(threads).map(lambda idx: model.log_ratios(bits, idx), chunks)
    for idx, vals in zip(chunks, parts):
        out[idx] = vals
    return out


def rates_from_log_ratios(log_ratios, floor=0.0, iteration=None):
    lr = np.asarray(log_ratios, dtype=float)
    bad = ~np.isfinite(lr)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ModelEvaluationError(i, float(lr[i]), iteration)
    q = np.exp(np.minimum(lr, 0.0))
    if floor > 0:
        np.maximum(q, floor, out=q)
    return q


def _rates(model, bits, threads=1, iteration=None):
    lr = _log_ratios(model, bits, threads)
    return rates_from_log_ratios(lr, model.rate_floor, iteration)


def compute_rates(model, m, threads=None):
    """Birth-death rates q_i(m) = min(1, p(m^i|y) / p(m|y)) for every element."""
    bits = as_bits(m)
    q = _rates(model, bits, resolve_threads(threads))
    return RateVector(q, bits.tobytes())


class ChainTrace:
    """Samples of one chain, stored as flip deltas plus periodic full checkpoints.

    Sample ``s`` (1-based) is the state at the start of iteration ``s``;
    ``flips_at(s)`` is the flip set that moves it to sample ``s + 1``.
    ``weights`` holds BD waiting times; discrete-time chains weight every
    sample equally.
    """

    def __init__(self, m0, seed, burn_in_start, checkpoint_interval=DEFAULT_CHECKPOINT,
                 record=True, kind="mj"):
        self.m0 = as_bits(m0)
        self.k = self.m0.size
        self.seed = seed
        self.kind = kind
        self.burn_in_start = burn_in_start
        self.checkpoint_interval = int(checkpoint_interval)
        self.record = record
        self.inclusion_accumulator = np.zeros(self.k)
        self.accumulated_weight = 0.0
        self.n_accumulated = 0
        self.checkpoints = {}
        self.accepted = 0
        self.final_state = None
        self._eps = []
        self._counts = []
        self._times = []
        self._weights = []
        self._buf = np.empty(1024, dtype=np.int64)
        self._fill = 0

    # -- recording ---------------------------------------------------------
    def _add_sample(self, s, bits, weight=1.0):
        if self.record and (s - 1) % self.checkpoint_interval == 0:
            self.checkpoints[s] = bits.copy()
        if s > self.burn_in_start and weight > 0:
            self.inclusion_accumulator += weight * bits
            self.accumulated_weight += weight
            self.n_accumulated += 1

    def _add_move(self, eps, flips, wall, weight=None):
        self._eps.append(eps)
        self._counts.append(flips.size)
        self._times.append(wall)
        if weight is not None:
            self._weights.append(weight)
        if self.record and flips.size:
            need = self._fill + flips.size
            if need > self._buf.size:
                self._buf = np.resize(self._buf, max(need, 2 * self._buf.size))
            self._buf[self._fill:need] = flips
            self._fill = need

    # -- access ------------------------------------------------------------
    @property
    def n_samples(self):
        return len(self._counts)

    @property
    def epsilons(self):
        return np.asarray(self._eps, dtype=float)

    @property
    def flip_counts(self):
        return np.asarray(self._counts, dtype=np.int64)

    @property
    def wall_times(self):
        return np.asarray(self._times, dtype=float)

    @property
    def weights(self):
        if self.kind == "bd":
            return np.asarray(self._weights, dtype=float)
        return np.ones(self.n_samples)

    waiting_times = weights

    def inclusion(self):
        """Post-burn-in (weighted) mean of every element."""
        if self.accumulated_weight <= 0:
            raise ValueError("trace has no post-burn-in samples")
        return self.inclusion_accumulator / self.accumulated_weight

    def _require_record(self):
        if not self.record:
            raise ValueError("trace was run with record=False; samples are not stored")

    def flips_at(self, s):
        self._require_record()
        offsets = self._offsets()
        return self._buf[offsets[s - 1]:offsets[s]].copy()

    def _offsets(self):
        return np.concatenate([[0], np.cumsum(self._counts)])

    def state_at(self, s, use_checkpoints=True):
        """Full state of sample ``s``, replayed from the nearest checkpoint."""
        self._require_record()
        if not 1 <= s <= self.n_samples:
            raise IndexError(f"sample {s} outside 1..{self.n_samples}")
        start = 1
        bits = self.m0.copy()
        if use_checkpoints:
            start = max(c for c in self.checkpoints if c <= s)
            bits = self.checkpoints[start].copy()
        offsets = self._offsets()
        seg = self._buf[offsets[start - 1]:offsets[s - 1]]
        if seg.size:
            np.bitwise_xor.at(bits, seg, 1)
        return bits

    def iter_states(self):
        self._require_record()
        bits = self.m0.copy()
        offsets = self._offsets()
        for s in range(1, self.n_samples + 1):
            yield s, bits
            bits = bits.copy()
            seg = self._buf[offsets[s - 1]:offsets[s]]
            if seg.size:
                np.bitwise_xor.at(bits, seg, 1)

    def packed_states(self):
        """Bit-packed code of every sample (k <= 62), computed by XOR-scan of deltas."""
        self._require_record()
        if self.k > 62:
            raise ValueError("packed_states needs k <= 62")
        counts = self.flip_counts
        masks = np.zeros(self.n_samples, dtype=np.int64)
        owner = np.repeat(np.arange(self.n_samples), counts)
        np.bitwise_xor.at(masks, owner, np.left_shift(1, self._buf[:self._fill]).astype(np.int64))
        moves = np.bitwise_xor.accumulate(masks)
        codes = np.empty(self.n_samples, dtype=np.int64)
        codes[0] = pack(self.m0)
        codes[1:] = codes[0] ^ moves[:-1]
        return codes

    def post_burn_in_mask(self):
        return np.arange(1, self.n_samples + 1) > self.burn_in_start


def _burn_in_start(burn_in, S):
    if not 0.0 <= burn_in < 1.0:
        raise ValueError(f"burn_in must lie in [0, 1), got {burn_in}")
    return burn_in * S


def _block_iters(width):
    return max(1, (1 << 18) // width)


def _cap_flips(flips, cap, k, seed, s):
    if cap is None or not cap.active(s):
        return flips
    size = cap.size(k)
    if flips.size <= size:
        return flips
    keep = _rng.iteration_generator(seed, _rng.CAP, s).choice(flips.size, size, replace=False)
    return np.sort(flips[keep])


def mj_step(m, rates, eps, cap=None, *, seed=0, s=1):
    """One multiple jump move: flip each element i with probability q_i * eps.

    Uniform ``i`` of iteration ``s`` on the seed's flip stream decides
    element ``i``.
    """
    bits = as_bits(m)
    q = rates.rates if isinstance(rates, RateVector) else np.asarray(rates, dtype=float)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    u = _rng.CounterStream(seed, _rng.FLIPS, bits.size).block(s, 1)[0]
    flips = _cap_flips(np.flatnonzero(u < q * eps), cap, bits.size, seed, s)
    bits[flips] ^= 1
    return BinaryModel(bits)


def _as_schedule(schedule):
    if isinstance(schedule, EpsilonSchedule):
        return schedule
    if isinstance(schedule, str):
        return parse_schedule(schedule)
    return EpsilonSchedule("constant", float(schedule))


def run_mj_mcmc(model, m0, schedule, S, cap=None, burn_in=DEFAULT_BURN_IN, seed=0,
                threads=None, checkpoint_interval=DEFAULT_CHECKPOINT, record=True,
                on_sample=None):
    """Run the multiple jump chain for ``S`` iterations.

    ``on_sample(s, bits, weight)`` is called with every sample before it
    moves; it is the hook for drawing model parameters given the sampled
    model. It must not modify ``bits``.
    """
    if S < 1:
        raise ValueError("S must be >= 1")
    schedule = _as_schedule(schedule)
    threads = resolve_threads(threads)
    bits = as_bits(m0)
    k = bits.size
    if k != model.k:
        raise ValueError(f"initial model has {k} elements, posterior model expects {model.k}")
    trace = ChainTrace(bits, seed, _burn_in_start(burn_in, S), checkpoint_interval, record)
    uniforms = _rng.BlockedUniforms(_rng.CounterStream(seed, _rng.FLIPS, k), _block_iters(k))
    q = None
    for s in range(1, S + 1):
        t0 = time.perf_counter()
        trace._add_sample(s, bits)
        if on_sample is not None:
            on_sample(s, bits, 1.0)
        eps = evaluate_schedule(schedule, s)
        if q is None:
            q = _rates(model, bits, threads, s)
        flips = np.flatnonzero(uniforms.row(s) < q * eps)
        flips = _cap_flips(flips, cap, k, seed, s)
        if flips.size:
            bits[flips] ^= 1
            q = None
        trace._add_move(eps, flips, time.perf_counter() - t0)
    trace.final_state = bits
    return trace


def run_bd(model, m0, n_events=None, total_time=None, burn_in=DEFAULT_BURN_IN, seed=0,
           threads=None, checkpoint_interval=DEFAULT_CHECKPOINT, record=True, on_sample=None):
    """Simulate the birth-death process via its embedded jump chain.

    Give exactly one of ``n_events`` (number of jumps) or ``total_time``.
    Each visited state is weighted by its exponential waiting time; with
    ``total_time`` the final holding time is truncated at the horizon and
    burn-in is measured in continuous time.
    """
    if (n_events is None) == (total_time is None):
        raise ValueError("give exactly one of n_events or total_time")
    threads = resolve_threads(threads)
    bits = as_bits(m0)
    k = bits.size
    if k != model.k:
        raise ValueError(f"initial model has {k} elements, posterior model expects {model.k}")
    if n_events is not None:
        if n_events < 1:
            raise ValueError("n_events must be >= 1")
        trace = ChainTrace(bits, seed, _burn_in_start(burn_in, n_events), checkpoint_interval,
                           record, kind="bd")
        cutoff = None
    else:
        if total_time <= 0:
            raise ValueError("total_time must be positive")
        trace = ChainTrace(bits, seed, 0, checkpoint_interval, record, kind="bd")
        cutoff = _burn_in_start(burn_in, 1.0) * total_time
    uniforms = _rng.BlockedUniforms(_rng.CounterStream(seed, _rng.BD_EVENTS, 2), 1 << 14)
    clock = 0.0
    s = 0
    while True:
        s += 1
        t0 = time.perf_counter()
        q = _rates(model, bits, threads, s)
        lam = q.sum()
        u = uniforms.row(s)
        wait = -math.log1p(-u[0]) / lam
        last = False
        if total_time is not None and clock + wait >= total_time:
            wait = total_time - clock
            last = True
        weight = wait
        if cutoff is not None:
            weight = max(0.0, clock + wait - max(clock, cutoff))
        trace._add_sample(s, bits, weight)
        if on_sample is not None:
            on_sample(s, bits, weight)
        clock += wait
        if last:
            trace._add_move(float("nan"), np.empty(0, dtype=np.int64), time.perf_counter() - t0, wait)
            break
        i = int(np.searchsorted(np.cumsum(q), u[1] * lam, side="right"))
        i = min(i, k - 1)
        bits[i] ^= 1
        trace._add_move(float("nan"), np.array([i]), time.perf_counter() - t0, wait)
        if n_events is not None and s >= n_events:
            break
    trace.final_state = bits
    trace.total_time = clock
    return trace


def log_kernel(q, eps, flips):
    """log P_eps(m, m') for rates ``q`` at m and the flip set H(m, m')."""
    qe = q * eps
    mask = np.zeros(q.size, dtype=bool)
    mask[flips] = True
    return float(np.log(qe[mask]).sum() + np.log1p(-qe[~mask]).sum())


def log_kernel_ratio(q_new, q, eps, flips):
    """log P_eps(m', m) - log P_eps(m, m') when m and m' differ in ``flips``."""
    d = np.log1p(-q_new * eps) - np.log1p(-q * eps)
    return float(d.sum() - d[flips].sum() + np.log(q_new[flips] / q[flips]).sum())


def log_path_ratio(model, bits, flips):
    """log(p(m'|y) / p(m|y)) summed over single flips along ``flips``."""
    path = getattr(model, "log_ratio_path", None)
    if path is not None:
        return float(path(bits, flips))
    cur = bits.copy()
    total = 0.0
    for i in flips:
        total += model.log_ratio(cur, int(i))
        cur[i] ^= 1
    return total


def _mh_move(model, bits, q, eps, u_flip, u_accept, threads, s):
    flips = np.flatnonzero(u_flip < q * eps)
    if flips.size == 0:
        return bits, q, flips, True
    proposal = bits.copy()
    proposal[flips] ^= 1
    q_new = _rates(model, proposal, threads, s)
    log_alpha = (log_path_ratio(model, bits, flips)
                 + log_kernel_ratio(q_new, q, eps, flips))
    if log_alpha >= 0.0 or u_accept < math.exp(log_alpha):
        return proposal, q_new, flips, True
    return bits, q, flips[:0], False


def mh_corrected_step(m, rates_at_m, eps, model, *, seed=0, s=1, threads=None):
    """Propose with the multiple jump kernel, accept with the Metropolis-Hastings ratio."""
    bits = as_bits(m)
    q = rates_at_m.rates if isinstance(rates_at_m, RateVector) else np.asarray(rates_at_m)
    u_flip = _rng.CounterStream(seed, _rng.FLIPS, bits.size).block(s, 1)[0]
    u_acc = _rng.CounterStream(seed, _rng.ACCEPT, 1).block(s, 1)[0, 0]
    new, _, _, _ = _mh_move(model, bits, q, eps, u_flip, u_acc, resolve_threads(threads), s)
    return BinaryModel(new)


def run_mh(model, m0, eps, S, burn_in=DEFAULT_BURN_IN, seed=0, threads=None,
           checkpoint_interval=DEFAULT_CHECKPOINT, record=True, on_sample=None):
    """Exact (Metropolis-corrected) multiple jump chain at a fixed eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    threads = resolve_threads(threads)
    bits = as_bits(m0)
    k = bits.size
    trace = ChainTrace(bits, seed, _burn_in_start(burn_in, S), checkpoint_interval, record, kind="mh")
    flips_u = _rng.BlockedUniforms(_rng.CounterStream(seed, _rng.FLIPS, k), _block_iters(k))
    accept_u = _rng.BlockedUniforms(_rng.CounterStream(seed, _rng.ACCEPT, 1), 1 << 16)
    q = _rates(model, bits, threads, 1)
    for s in range(1, S + 1):
        t0 = time.perf_counter()
        trace._add_sample(s, bits)
        if on_sample is not None:
            on_sample(s, bits, 1.0)
        bits, q, flips, accepted = _mh_move(model, bits, q, eps, flips_u.row(s),
                                            accept_u.row(s)[0], threads, s)
        trace.accepted += accepted
        trace._add_move(eps, flips, time.perf_counter() - t0)
    trace.final_state = bits
    return trace
