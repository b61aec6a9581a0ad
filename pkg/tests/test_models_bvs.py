import math
import warnings

import numpy as np
import pytest

from mjmcmc.errors import UndefinedRSquaredError
from mjmcmc.harness import generate_bvs_instance
from mjmcmc.models import BvsModel, r_squared
from mjmcmc.models.bvs import RankDeficientWarning


def test_r_squared_hand_example():
    y = np.array([2.0, 1.0, 1.0, 1.0])
    eye = np.eye(4)
    assert r_squared(y, eye[:, :1])[0] == pytest.approx(4 / 7)
    assert r_squared(y, eye[:, :2])[0] == pytest.approx(5 / 7)
    assert r_squared(y, eye[:, :3])[0] == pytest.approx(6 / 7)
    assert r_squared(y, eye[:, :0]) == (0.0, False)


def test_r_squared_rank_deficient():
    y = np.array([1.0, 2.0, 0.5])
    x = np.column_stack([[1, 0, 0], [1, 0, 0.0]])
    r2, deficient = r_squared(y, x)
    assert deficient and r2 == pytest.approx(1 / 5.25)


def test_r_squared_undefined():
    with pytest.raises(UndefinedRSquaredError):
        r_squared(np.zeros(3), np.ones((3, 1)))


@pytest.fixture(scope="module")
def bvs():
    inst = generate_bvs_instance(100, 8, 2, seed=3)
    return inst, BvsModel(inst.y, inst.x, rho=0.3)


def test_bayes_factor_formula(bvs):
    _, model = bvs
    bits = np.zeros(8, np.uint8)
    bits[2] = 1
    r2_m = model.r2(bits)
    other = bits.copy(); other[5] = 1
    r2_o = model.r2(other)
    g, n = model.g, model.n
    expected = (-0.5 * math.log(1 + g) + (n - 1) / 2 * (math.log(1 + g * (1 - r2_m))
                                                      - math.log(1 + g * (1 - r2_o))))
    expected += math.log(0.3 / 0.7)
    assert model.log_ratio(bits, 5) == pytest.approx(expected)
    assert model.g == 100.0


def test_ratios_match_scores(bvs, rng):
    _, model = bvs
    for _ in range(3):
        bits = (rng.random(8) < 0.5).astype(np.uint8)
        lr = model.log_ratios(bits)
        base = model.log_score(bits)
        for i in range(8):
            other = bits.copy(); other[i] ^= 1
            assert lr[i] == pytest.approx(model.log_score(other) - base, abs=1e-9)
            assert model.log_ratio(other, i) == pytest.approx(-lr[i], abs=1e-9)


def test_active_variables_favoured(bvs):
    inst, model = bvs
    lr = model.log_ratios(np.zeros(8, np.uint8))
    active = np.flatnonzero(inst.truth)
    assert np.all(lr[active] > 5)
    assert np.all(np.delete(lr, active) < lr[active].min())


def test_prior_term(bvs):
    _, model = bvs
    assert model.log_prior_term(np.zeros(8), 0) == pytest.approx(math.log(0.3 / 0.7))
    assert model.log_prior_term(np.ones(8), 0) == pytest.approx(-math.log(0.3 / 0.7))


def test_rank_deficiency_is_reported():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((30, 3))
    x[:, 2] = x[:, 0]
    y = x[:, 0] + rng.standard_normal(30)
    model = BvsModel(y, x)
    bits = np.array([1, 0, 0], np.uint8)
    with pytest.warns(RankDeficientWarning):
        lr = model.log_ratios(bits)
    assert np.isfinite(lr).all() and model.rank_deficient_events == 1
    # the duplicate column explains nothing new
    assert lr[2] < 0


def test_cache_transparency(bvs, rng):
    inst, model = bvs
    plain = BvsModel(inst.y, inst.x, rho=0.3, use_cache=False)
    bits = (rng.random(8) < 0.5).astype(np.uint8)
    np.testing.assert_array_equal(model.log_ratios(bits), plain.log_ratios(bits))


def test_validation():
    x = np.ones((5, 2))
    with pytest.raises(ValueError):
        BvsModel(np.arange(4.0), x)
    with pytest.raises(ValueError):
        BvsModel(np.arange(5.0), x, rho=0.0)
    with pytest.raises(ValueError):
        BvsModel(np.arange(5.0), x, g=-1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        BvsModel(np.arange(5.0), np.random.default_rng(0).standard_normal((5, 2)))
