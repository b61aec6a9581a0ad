import numpy as np
import pytest

from mjmcmc import oracle
from mjmcmc.errors import CapacityError
from mjmcmc.models import ExplicitModel, FactorizableModel
from mjmcmc.schedules import parse_schedule
from mjmcmc.state import BinaryModel

S00, S10, S01, S11 = 0, 1, 2, 3  # codes of (m_0, m_1)


def test_quirk_kernel(quirk_model):
    Q = oracle.build_bd_rate_matrix(quirk_model).matrix
    assert Q[S00, S11] == 0.0
    assert Q[S01, S11] == pytest.approx(1 / 33)
    assert Q[S01, S11] == pytest.approx(0.0303, abs=5e-5)
    P = oracle.build_mj_kernel(quirk_model, 0.9).matrix
    assert P[S00, S11] == pytest.approx(0.81, abs=1e-15)


def test_rate_matrix_rows_sum_to_zero():
    Q = oracle.build_bd_rate_matrix(oracle.random_posterior(4, 0)).matrix
    np.testing.assert_allclose(Q.sum(axis=1), 0.0, atol=1e-12)


def test_bd_stationary_is_posterior():
    model = oracle.random_posterior(5, seed=1)
    np.testing.assert_allclose(oracle.bd_stationary(model), model.probs, atol=1e-12)
    Q = oracle.build_bd_rate_matrix(model)
    passed, worst = oracle.check_detailed_balance(Q, model.probs, 1e-14)
    assert passed, worst


def test_log_posterior_table():
    model = oracle.random_posterior(4, seed=3)
    np.testing.assert_allclose(np.exp(oracle.log_posterior_table(model)), model.probs,
                               atol=1e-12)


def test_mj_kernel_stochastic():
    K = oracle.build_mj_kernel(oracle.random_posterior(4, 2), 0.7)
    np.testing.assert_allclose(K.row_sums(), 1.0, atol=1e-12)
    assert K.matrix.min() > 0


def test_power_iteration_matches_eigensolver():
    K = oracle.build_mj_kernel(oracle.random_posterior(5, 4), 0.3).matrix
    pi = oracle.stationary_distribution(K)
    np.testing.assert_allclose(pi, oracle._eigen_stationary(K, 1e-10), atol=1e-10)
    np.testing.assert_allclose(pi @ K, pi, atol=1e-12)


def test_stationary_fallback_on_sweep_budget():
    K = oracle.build_mj_kernel(oracle.random_posterior(3, 4), 0.3).matrix
    pi = oracle.stationary_distribution(K, max_sweeps=1)
    np.testing.assert_allclose(pi @ K, pi, atol=1e-10)


@pytest.mark.parametrize("eps", [0.1, 0.5, 0.9])
def test_factorizable_exact(eps):
    model = FactorizableModel([0.9, 0.5, 0.1])
    pi = oracle.stationary_distribution(oracle.build_mj_kernel(model, eps))
    assert oracle.tv_distance(pi, model.joint()) < 1e-10
    assert oracle.bias_slope(model, [0.4, 0.2, 0.1, 0.05]).exact


def test_generic_posterior_is_biased():
    model = oracle.random_posterior(4, seed=0)
    pi = oracle.stationary_distribution(oracle.build_mj_kernel(model, 0.5))
    assert oracle.tv_distance(pi, model.probs) > 1e-4


def test_mh_kernel_is_reversible():
    model = oracle.random_posterior(4, seed=6)
    K = oracle.build_mh_kernel(model, 0.6)
    passed, worst = oracle.check_detailed_balance(K, model.probs, 1e-14)
    assert passed, worst
    np.testing.assert_allclose(K.row_sums(), 1.0, atol=1e-12)


def test_tv_and_slope_helpers():
    assert oracle.tv_distance([1, 0], [0, 1]) == 1.0
    with pytest.raises(ValueError):
        oracle.tv_distance([1, 0], [1, 0, 0])
    x = np.array([0.2, 0.1, 0.05])
    assert oracle.loglog_slope(x, 3 * x**2) == pytest.approx(2.0)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        oracle.rate_table(FactorizableModel(np.full(13, 0.5)))


def test_waiting_time_converges():
    model = oracle.random_posterior(4, seed=2)
    rows = oracle.waiting_time_check(model, BinaryModel.zeros(4), [1e-1, 1e-2, 1e-3])
    errs = [r.cdf_sup_error for r in rows]
    assert errs[0] > errs[1] > errs[2]
    assert rows[-1].scaled_mean == pytest.approx(rows[-1].target_mean, rel=1e-2)


def test_jump_probabilities_converge():
    model = oracle.random_posterior(4, seed=2)
    rows = oracle.jump_probability_check(model, BinaryModel.zeros(4), [1e-1, 1e-3])
    assert rows[1].max_error < rows[0].max_error
    assert rows[1].max_non_neighbor < 1e-3
    assert rows[1].neighbor.sum() + rows[1].non_neighbor_total == pytest.approx(1.0)


def test_kernel_residual_is_second_order():
    slope, res = oracle.kernel_rate_slope(oracle.random_posterior(4, 1))
    assert 1.8 <= slope <= 2.2
    assert all(a > b for a, b in zip(res, res[1:]))


def test_inhomogeneous_constant_plateau():
    model = oracle.random_posterior(3, seed=1)
    rep = oracle.inhomogeneous_convergence_check(model, parse_schedule("constant:0.3"), 500)
    pi_eps = oracle.stationary_distribution(oracle.build_mj_kernel(model, 0.3))
    assert rep.tv_final == pytest.approx(oracle.tv_distance(pi_eps, model.probs), abs=1e-8)
    assert rep.steps[0] == 0 and rep.steps[-1] == 500


def test_explicit_model_validation():
    with pytest.raises(ValueError):
        ExplicitModel(probs=[0.5, 0.3, 0.2])
    with pytest.raises(ValueError):
        ExplicitModel(probs=[0.5, 0.0])


def test_asymptotic_variance_iid_and_sticky():
    pi = np.array([0.2, 0.3, 0.5])
    iid = np.tile(pi, (3, 1))
    np.testing.assert_allclose(oracle.indicator_asymptotic_variance(iid, pi), pi * (1 - pi))
    # lazy version of the same chain doubles the integrated autocorrelation
    lazy = 0.5 * iid + 0.5 * np.eye(3)
    np.testing.assert_allclose(oracle.indicator_asymptotic_variance(lazy, pi), 3 * pi * (1 - pi))
