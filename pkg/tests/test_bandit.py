import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphopt import (
    NoisyOracle,
    ValueTable,
    budget_schedule,
    hardness,
    log_bar,
    oracle_sampler,
    sr_bound_loose,
    sr_error_bound,
    successive_reject,
)
from graphopt.bandit import bernoulli_sampler


def test_log_bar_values():
    assert log_bar(2) == pytest.approx(1.0)
    assert log_bar(3) == pytest.approx(0.5 + 0.5 + 1.0 / 3.0)
    assert log_bar(10) == pytest.approx(0.5 + sum(1.0 / i for i in range(2, 11)))


def test_schedule_worked_example():
    s = budget_schedule(3, 25)
    # B_k = ceil((B-K)/logbar(K)/(K+1-k)): 22/(4/3)/3 -> 6, 22/(4/3)/2 -> 9
    assert s.cumulative == (0, 6, 9)
    assert s.phase_pulls(1) == 6
    assert s.phase_pulls(2) == 3
    assert s.total_pulls() == 6 * 3 + 3 * 2
    assert s.total_pulls() <= 25


def test_schedule_second_example():
    s = budget_schedule(4, 49)
    assert s.cumulative == (0, 8, 10, 15)
    assert s.total_pulls() == 48


def test_schedule_rejects_tiny_budget():
    with pytest.raises(ValueError):
        budget_schedule(5, 5)
    with pytest.raises(ValueError):
        budget_schedule(1, 100)


@settings(max_examples=200, deadline=None)
@given(K=st.integers(2, 40), extra=st.integers(1, 5000))
def test_schedule_never_overspends(K, extra):
    B = K + extra
    s = budget_schedule(K, B)
    assert s.total_pulls() <= B
    assert all(b >= a for a, b in zip(s.cumulative, s.cumulative[1:]))


def test_zero_noise_always_finds_best():
    means = [0.1, 0.9, 0.4, 0.2]
    o = NoisyOracle(ValueTable(np.array(means)), noise="gaussian", R=0.0)
    sampler = oracle_sampler(o, [0, 1, 2, 3])
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert successive_reject(4, sampler, 60, rng) == 1


def test_zero_noise_minimization_via_sign():
    means = [0.1, 0.9, 0.4, 0.2]
    o = NoisyOracle(ValueTable(np.array(means)), noise="gaussian", R=0.0)
    sampler = oracle_sampler(o, [0, 1, 2, 3], sign=-1.0)
    rng = np.random.default_rng(0)
    assert successive_reject(4, sampler, 60, rng) == 0


def test_tie_rejects_higher_index():
    # all arms identical and noiseless: phases discard the highest index
    o = NoisyOracle(ValueTable(np.array([0.5, 0.5, 0.5])), noise="gaussian", R=0.0)
    sampler = oracle_sampler(o, [0, 1, 2])
    rng = np.random.default_rng(1)
    assert successive_reject(3, sampler, 30, rng) == 0


def test_bernoulli_sampler_validates_means():
    with pytest.raises(ValueError):
        bernoulli_sampler([0.5, 1.2])


def test_bernoulli_identification_rate_is_reasonable():
    sampler = bernoulli_sampler([0.7, 0.3])
    rng = np.random.default_rng(2)
    wins = sum(successive_reject(2, sampler, 100, rng) == 0 for _ in range(300))
    assert wins > 290


def test_exhaustion_mid_run_still_returns_an_arm():
    o = NoisyOracle(ValueTable(np.array([0.2, 0.8, 0.5])), budget=20)
    sampler = oracle_sampler(o, [0, 1, 2])
    rng = np.random.default_rng(3)
    arm = successive_reject(3, sampler, 200, rng)
    assert arm in (0, 1, 2)
    assert o.used <= 20


def test_hardness_pseudo_gap():
    # ranked gaps become [0.2, 0.2, 0.5]; max of 1/0.04, 2/0.04, 3/0.25
    assert hardness([0.2, 0.5]) == pytest.approx(50.0)
    assert hardness([0.3]) == pytest.approx(2 / 0.09)
    with pytest.raises(ValueError):
        hardness([])
    with pytest.raises(ValueError):
        hardness([0.0, 0.5])


def test_sr_error_bound_values():
    assert sr_error_bound(4, 50.0, 200) == pytest.approx(0.5045794320749739)
    # B <= K is vacuous
    assert sr_error_bound(4, 50.0, 3) == 1.0
    assert sr_error_bound(2, 200.0, 2000) == pytest.approx(math.exp(-1998.0 / 200.0))


def test_sr_error_bound_monotone_in_budget():
    vals = [sr_error_bound(5, 125.0, B) for B in (10, 100, 1000, 10000)]
    assert all(b >= a for a, b in zip(vals[1:], vals))


def test_loose_bound_formula():
    n, d1, B = 10, 0.5, 5000
    want = (n * (n - 1) / 2) * math.exp(-(B - n) * d1 * d1 / (n * log_bar(n)))
    assert sr_bound_loose(n, d1, B) == pytest.approx(min(1.0, want))
    assert sr_bound_loose(10, 0.3, 500) == 1.0  # clamped
