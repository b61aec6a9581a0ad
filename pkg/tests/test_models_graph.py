import math
import threading

import numpy as np
import pytest
from scipy.special import logsumexp

from mjmcmc.errors import IllConditionedMarginalError
from mjmcmc.harness import chain_ising_instance, generate_ggm_instance
from mjmcmc.models import (GgmModel, IsingModel, adjacency, edge_index, edge_pairs,
                           edges_from_adjacency, fit_logistic, n_edges, n_nodes)
from mjmcmc.models.cache import NodeCache


# -- edge bijection -----------------------------------------------------------------------
def test_edge_bijection():
    p = 6
    pairs = edge_pairs(p)
    assert pairs.shape == (n_edges(p), 2)
    assert pairs[:4].tolist() == [[0, 1], [0, 2], [0, 3], [0, 4]]
    for e, (i, j) in enumerate(pairs.tolist()):
        assert edge_index(i, j, p) == e == edge_index(j, i, p)
    assert n_nodes(15) == 6
    with pytest.raises(ValueError):
        n_nodes(14)
    with pytest.raises(ValueError):
        edge_index(2, 2, p)


def test_adjacency_roundtrip(rng):
    bits = (rng.random(n_edges(7)) < 0.4).astype(np.uint8)
    a = adjacency(bits, 7)
    assert np.array_equal(a, a.T) and not a.diagonal().any()
    np.testing.assert_array_equal(edges_from_adjacency(a), bits)


# -- cache --------------------------------------------------------------------------------------
def test_cache_lru():
    c = NodeCache(capacity=2)
    calls = []

    def make(v):
        return lambda: calls.append(v) or v

    assert c.get_or_compute("a", make(1)) == 1
    c.get_or_compute("b", make(2))
    c.get_or_compute("a", make(99))  # hit refreshes "a"
    c.get_or_compute("c", make(3))   # evicts "b"
    assert len(c) == 2 and calls == [1, 2, 3]
    c.get_or_compute("b", make(4))
    assert calls[-1] == 4


def test_cache_disabled():
    c = NodeCache(enabled=False)
    assert c.get_or_compute("a", lambda: 5) == 5 and len(c) == 0


# -- GGM -------------------------------------------------------------------------------------------
@pytest.fixture(scope="module")
def ggm_data():
    return generate_ggm_instance(6, 60, 0.3, seed=2).data


def test_ggm_quadrature_oracle():
    """Node score equals M(1)/M(1/n) computed by numerical integration."""
    rng = np.random.default_rng(0)
    n = 20
    Y = rng.standard_normal((n, 3))
    Y[:, 0] += 0.8 * Y[:, 1] - 0.5 * Y[:, 2]
    model = GgmModel(Y)
    for nb in ([1, 2], [1], []):
        nb = np.array(nb, dtype=int)
        d = nb.size
        S_AA = model.scatter[np.ix_(nb, nb)]
        rss = model._rss(0, nb)
        t = np.linspace(-8, 8, 3201)
        w = np.linspace(-9, 9, 161)
        sq = np.add.outer(w**2, w**2) if d == 2 else w**2
        log_w = (logsumexp(-sq / 2) + d * math.log(w[1] - w[0])) if d else 0.0

        def log_m(b):
            # beta = beta_hat + sigma S_AA^{-1/2} z / sqrt(b); prior sigma^{-(2d+1)}; t = log sigma
            sig2 = np.exp(2 * t)
            integrand = (-b * n / 2 * np.log(2 * np.pi * sig2) - b * rss / (2 * sig2)
                         - (2 * d + 1) * t + d * t + t)
            out = logsumexp(integrand) + math.log(t[1] - t[0]) + log_w
            if d:
                out += -0.5 * np.linalg.slogdet(S_AA)[1] - d / 2 * math.log(b)
            return out

        assert model.node_score(0, nb) == pytest.approx(log_m(1.0) - log_m(1.0 / n), abs=0.1)


def test_ggm_antisymmetry(ggm_data, rng):
    model = GgmModel(ggm_data, rho=0.3)
    for _ in range(5):
        bits = (rng.random(model.k) < 0.3).astype(np.uint8)
        lr = model.log_ratios(bits)
        for i in range(model.k):
            other = bits.copy()
            other[i] ^= 1
            assert model.log_ratio(other, i) == pytest.approx(-lr[i], abs=1e-8)


def test_ggm_path_independence(ggm_data, rng):
    """Log ratios sum to zero around every 4-cycle m -> m^i -> m^ij -> m^j -> m."""
    model = GgmModel(ggm_data, rho=0.3)
    bits = (rng.random(model.k) < 0.3).astype(np.uint8)
    for i, j in [(0, 1), (0, 5), (3, 9), (2, 14)]:
        mi = bits.copy(); mi[i] ^= 1
        mij = mi.copy(); mij[j] ^= 1
        mj = bits.copy(); mj[j] ^= 1
        total = (model.log_ratio(bits, i) + model.log_ratio(mi, j)
                 - model.log_ratio(mj, i) - model.log_ratio(bits, j))
        assert abs(total) < 1e-8


def test_ggm_ratios_match_scores(ggm_data, rng):
    model = GgmModel(ggm_data, rho=0.2)
    bits = (rng.random(model.k) < 0.3).astype(np.uint8)
    base = model.log_score(bits)
    lr = model.log_ratios(bits)
    for i in range(model.k):
        other = bits.copy(); other[i] ^= 1
        assert lr[i] == pytest.approx(model.log_score(other) - base, abs=1e-8)


def test_ggm_vectorized_matches_scalar(ggm_data, rng):
    fast = GgmModel(ggm_data, rho=0.3)
    slow = GgmModel(ggm_data, rho=0.3, vectorized=False)
    for _ in range(4):
        bits = (rng.random(fast.k) < 0.4).astype(np.uint8)
        np.testing.assert_allclose(fast.log_ratios(bits), slow.log_ratios(bits), atol=1e-8)


def test_ggm_cache_transparent(ggm_data, rng):
    cached = GgmModel(ggm_data, rho=0.3)
    plain = GgmModel(ggm_data, rho=0.3, use_cache=False)
    for _ in range(3):
        bits = (rng.random(cached.k) < 0.3).astype(np.uint8)
        np.testing.assert_array_equal(cached.log_ratios(bits), plain.log_ratios(bits))
    assert len(plain.score_cache) == 0 and cached.score_cache.hits > 0


def test_ggm_concurrent_calls(ggm_data):
    model = GgmModel(ggm_data, rho=0.3)
    bits = np.zeros(model.k, np.uint8)
    bits[[0, 4, 9]] = 1
    ref = GgmModel(ggm_data, rho=0.3, use_cache=False).log_ratios(bits)
    out = np.empty(model.k)

    def work(idx):
        out[idx] = model.log_ratios(bits, idx)

    threads = [threading.Thread(target=work, args=(np.arange(i, model.k, 4),)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    np.testing.assert_allclose(out, ref, atol=1e-10)


def test_ggm_prior_monotone(ggm_data):
    bits = np.zeros(n_edges(6), np.uint8)
    sparse = GgmModel(ggm_data, rho=0.1).log_ratios(bits)
    dense = GgmModel(ggm_data, rho=0.6).log_ratios(bits)
    # additions become more favourable as the prior density grows
    assert np.all(dense > sparse)
    np.testing.assert_allclose(dense - sparse, math.log(0.6 / 0.4) - math.log(0.1 / 0.9))


def test_ggm_detects_true_edge():
    rng = np.random.default_rng(1)
    n = 200
    z = rng.standard_normal((n, 3))
    z[:, 1] += 0.9 * z[:, 0]
    model = GgmModel(z)
    lr = model.log_ratios(np.zeros(3, np.uint8))
    assert lr[edge_index(0, 1, 3)] > 10
    assert lr[edge_index(0, 2, 3)] < 0


def test_ggm_size_guard():
    y = np.random.default_rng(0).standard_normal((3, 5))
    model = GgmModel(y)
    bits = np.zeros(n_edges(5), np.uint8)
    bits[[edge_index(0, 1, 5), edge_index(0, 2, 5)]] = 1
    with pytest.raises(IllConditionedMarginalError):
        model.node_score(0, np.array([1, 2]))
    with pytest.raises(IllConditionedMarginalError):
        model.log_ratios(bits)


def test_ggm_rejects_bad_args(ggm_data):
    with pytest.raises(ValueError):
        GgmModel(ggm_data, rho=1.0)
    with pytest.raises(ValueError):
        GgmModel(ggm_data[:, 0])


# -- Ising ---------------------------------------------------------------------------------
def test_logistic_fit_matches_closed_form():
    y = np.array([1, 1, 1, 0, 0, 1, 0, 1.0])
    beta, ll = fit_logistic(np.ones((8, 1)), y)
    pbar = y.mean()
    assert beta[0] == pytest.approx(math.log(pbar / (1 - pbar)), abs=1e-8)
    assert ll == pytest.approx(8 * (pbar * math.log(pbar) + (1 - pbar) * math.log(1 - pbar)))


def test_ising_intercept_only_bic():
    data = np.array([[1, 0], [1, 1], [0, 1], [1, 0], [0, 0], [1, 1]], dtype=np.uint8)
    model = IsingModel(data)
    pbar = 4 / 6
    ll = 6 * (pbar * math.log(pbar) + (1 - pbar) * math.log(1 - pbar))
    assert model.bic(0, []) == pytest.approx(-2 * ll + math.log(6))
    assert model.node_score(0, []) == pytest.approx(ll - math.log(6) / 2)


def test_ising_strong_pair():
    rng = np.random.default_rng(3)
    n = 200
    y = (rng.random((n, 4)) < 0.5).astype(np.uint8)
    flip = rng.random(n) < 0.1
    y[:, 1] = np.where(flip, 1 - y[:, 0], y[:, 0])
    model = IsingModel(y)
    lr = model.log_ratios(np.zeros(6, np.uint8))
    q = np.exp(np.minimum(lr, 0))
    assert q[edge_index(0, 1, 4)] > 0.9
    assert np.all(np.delete(q, edge_index(0, 1, 4)) < 0.9)


def test_ising_ebic_penalty():
    inst = chain_ising_instance(5, 150, seed=0)
    plain = IsingModel(inst.data)
    ext = IsingModel(inst.data, ebic_gamma=0.5)
    nb = np.array([1, 3])
    assert ext.bic(2, nb) - plain.bic(2, nb) == pytest.approx(2 * 0.5 * 2 * math.log(4))


def test_ising_separation_hits_floor():
    y = np.zeros((40, 3), np.uint8)
    y[:20, 0] = 1
    y[:, 1] = y[:, 0]           # perfectly separated pair
    y[::3, 2] = 1
    model = IsingModel(y)
    assert math.isnan(model.node_score(0, np.array([1])))
    lr = model.log_ratios(np.zeros(3, np.uint8))
    assert lr[edge_index(0, 1, 3)] == pytest.approx(math.log(1e-12))


def test_ising_antisymmetry():
    inst = chain_ising_instance(5, 300, seed=1)
    model = IsingModel(inst.data, rho=0.3)
    bits = inst.graph.copy()
    lr = model.log_ratios(bits)
    for i in range(model.k):
        other = bits.copy(); other[i] ^= 1
        assert model.log_ratio(other, i) == pytest.approx(-lr[i], abs=1e-6)


def test_ising_validation():
    with pytest.raises(ValueError):
        IsingModel(np.array([[0, 2], [1, 0]]))
    with pytest.raises(ValueError, match="constant"):
        IsingModel(np.array([[0, 1], [0, 0], [0, 1]]))
    with pytest.raises(ValueError):
        IsingModel(np.array([[0, 1], [1, 0]]), ebic_gamma=-1)
