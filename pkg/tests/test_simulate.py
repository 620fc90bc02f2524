"""Tests for the Monte Carlo SIC simulator."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from hbgic.channel import BlocklengthConfig, ChannelParams
from hbgic.early_decoding import dt_bound_terms
from hbgic.fbl import LOG2_E, gaussian_capacity
from hbgic.simulate import (
    Codebook,
    SimExperiment,
    _density_matrix,
    _first_crossing,
    generate_codebook,
    information_density,
    run_experiment,
    sic_decode_user1,
    sic_decode_user2,
    wilson_interval,
)

DESK = ChannelParams(a12=1.2, a21=52.0, p1=0.11, p2=0.13)
STRONG = ChannelParams(a12=11.0, a21=35.0, p1=10.0, p2=10.0)


def test_codebook_determinism_and_shape():
    a = generate_codebook(8, 50, 2.0, seed=123)
    b = generate_codebook(8, 50, 2.0, seed=123)
    c = generate_codebook(8, 50, 2.0, seed=124)
    assert a.entries.shape == (8, 50)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, c.entries)
    assert a.power_limit == 100.0


def test_codebook_statistics():
    cb = generate_codebook(400, 256, 3.0, seed=7)
    var = cb.entries.var()
    # 102400 samples of N(0, 3): the sample variance sits within 5%
    assert abs(var - 3.0) < 0.15
    sums = np.sum(cb.entries**2, axis=1)
    assert np.array_equal(cb.violation_flags, sums > cb.power_limit)


def test_codebook_violation_rate_matches_chi2():
    # squared norm / p is chi-square with n degrees of freedom, so the
    # breach probability is its upper tail at n
    n = 100
    cb = generate_codebook(40000, n, 1.7, seed=11)
    expected = stats.chi2.sf(n, df=n)
    observed = cb.violation_flags.mean()
    assert abs(observed - expected) < 0.01


def test_information_density_mean_is_capacity():
    rng = np.random.default_rng(42)
    omega, p, length, trials = 1.8, 2.5, 64, 3000
    vals = np.empty(trials)
    for t in range(trials):
        x = rng.standard_normal(length) * math.sqrt(p)
        z = rng.standard_normal(length)
        y = math.sqrt(omega) * x + z
        vals[t] = information_density(x, y, omega, p)
    per_symbol = vals / length
    mean = per_symbol.mean()
    se = vals.std(ddof=1) / (length * math.sqrt(trials))
    assert abs(mean - gaussian_capacity(omega * p)) < 3.5 * se
    # per-symbol spread must at least carry the leading dispersion term
    wp = omega * p
    floor = (LOG2_E * wp / (math.sqrt(2.0) * (1.0 + wp))) ** 2
    assert vals.var(ddof=1) / length > floor


def test_information_density_mismatched_mean_negative():
    rng = np.random.default_rng(43)
    omega, p, length, trials = 1.8, 2.5, 64, 3000
    vals = np.empty(trials)
    for t in range(trials):
        x = rng.standard_normal(length) * math.sqrt(p)
        x_other = rng.standard_normal(length) * math.sqrt(p)
        z = rng.standard_normal(length)
        y = math.sqrt(omega) * x_other + z
        vals[t] = information_density(x, y, omega, p)
    se = vals.std(ddof=1) / math.sqrt(trials)
    assert vals.mean() < -3.0 * se


def test_information_density_validation():
    with pytest.raises(ValueError):
        information_density(np.zeros(3), np.zeros(4), 1.0, 1.0)
    with pytest.raises(ValueError):
        information_density(np.zeros((2, 2)), np.zeros((2, 2)), 1.0, 1.0)
    with pytest.raises(ValueError):
        information_density(np.zeros(3), np.zeros(3), 0.0, 1.0)


def test_density_matrix_matches_scalar_path():
    rng = np.random.default_rng(5)
    omega, p = 2.3, 1.7
    cb = rng.standard_normal((7, 33)) * math.sqrt(p)
    ys = rng.standard_normal((5, 33))
    mat = _density_matrix(cb, ys, omega, p)
    assert mat.shape == (5, 7)
    for b in range(5):
        for m in range(7):
            ref = information_density(cb[m], ys[b], omega, p)
            assert abs(mat[b, m] - ref) < 1e-9 * max(1.0, abs(ref))


def test_density_matrix_per_trial_codebooks():
    rng = np.random.default_rng(6)
    omega, p = 0.9, 3.1
    cb = rng.standard_normal((4, 6, 20)) * math.sqrt(p)
    ys = rng.standard_normal((4, 20))
    mat = _density_matrix(cb, ys, omega, p)
    assert mat.shape == (4, 6)
    for b in range(4):
        for m in range(6):
            ref = information_density(cb[b, m], ys[b], omega, p)
            assert abs(mat[b, m] - ref) < 1e-9 * max(1.0, abs(ref))


def test_first_crossing_smallest_index_and_sentinel():
    d = np.array([[0.5, 3.0, 5.0], [-1.0, -2.0, -3.0], [4.0, 1.0, 9.0]])
    hits = _first_crossing(d, 2.0)
    assert hits.tolist() == [1, -1, 0]


def test_noiseless_sic_decode_user2():
    cb1 = generate_codebook(4, 12, 10.0, seed=1)
    cb2 = generate_codebook(4, 8, 10.0, seed=2)
    m1_true, m2_true = 2, 1
    y2 = math.sqrt(STRONG.a21) * cb1.entries[m1_true, :8] + cb2.entries[m2_true]
    m1_hat, m2_hat = sic_decode_user2(y2, cb1, cb2, STRONG, 6, 2.0, 2.0)
    assert (m1_hat, m2_hat) == (m1_true, m2_true)


def test_noiseless_sic_decode_user1():
    cb1 = generate_codebook(4, 12, 10.0, seed=3)
    cb2 = generate_codebook(4, 8, 10.0, seed=4)
    m1_true, m2_true = 3, 0
    y1 = cb1.entries[m1_true].copy()
    y1[:8] += math.sqrt(STRONG.a12) * cb2.entries[m2_true]
    m1_hat, m2_hat = sic_decode_user1(y1, cb1, cb2, STRONG, 2.0, 2.0)
    assert (m1_hat, m2_hat) == (m1_true, m2_true)


def test_duplicate_codeword_resolves_to_smaller_index():
    base = generate_codebook(4, 12, 10.0, seed=9)
    entries = base.entries.copy()
    entries[1] = entries[0]
    cb1 = Codebook(
        entries=entries,
        power_limit=base.power_limit,
        violation_flags=base.violation_flags,
    )
    cb2 = generate_codebook(4, 8, 10.0, seed=10)
    y2 = math.sqrt(STRONG.a21) * entries[1, :8] + cb2.entries[2]
    m1_hat, _ = sic_decode_user2(y2, cb1, cb2, STRONG, 6, 2.0, 2.0)
    assert m1_hat == 0, "ties break toward the smallest message index"


def test_sic_decode_validation():
    cb1 = generate_codebook(4, 12, 10.0, seed=1)
    cb2 = generate_codebook(4, 8, 10.0, seed=2)
    with pytest.raises(ValueError):
        sic_decode_user2(np.zeros(7), cb1, cb2, STRONG, 6, 2.0, 2.0)
    with pytest.raises(ValueError):
        sic_decode_user2(np.zeros(8), cb1, cb2, STRONG, 9, 2.0, 2.0)
    with pytest.raises(ValueError):
        sic_decode_user1(np.zeros(8), cb1, cb2, STRONG, 2.0, 2.0)


def _desk_experiment(**overrides) -> SimExperiment:
    kw = dict(
        params=DESK,
        blocklengths=BlocklengthConfig(n1=400, n2=320, n1_tilde=87),
        log_m1=4,
        log_m2=3,
        trials=1000,
        seed=2025,
    )
    kw.update(overrides)
    return SimExperiment(**kw)


def test_experiment_validation():
    with pytest.raises(ValueError):
        _desk_experiment(log_m1=0)
    with pytest.raises(ValueError):
        _desk_experiment(log_m2=2.5)
    with pytest.raises(ValueError):
        _desk_experiment(trials=0)
    with pytest.raises(ValueError):
        _desk_experiment(seed=-1)
    with pytest.raises(ValueError):
        _desk_experiment(blocklengths=BlocklengthConfig(n1=400, n2=320))
    # without early decoding the window falls back to the full n2
    exp = _desk_experiment(
        blocklengths=BlocklengthConfig(n1=400, n2=320), ed_enabled=False
    )
    assert exp.step1_window == 320
    assert _desk_experiment().step1_window == 87


def test_run_determinism_and_thread_invariance():
    exp = _desk_experiment()
    r1 = run_experiment(exp, threads=1)
    r2 = run_experiment(exp, threads=1)
    r4 = run_experiment(exp, threads=4)
    assert r1.to_dict() == r2.to_dict()
    assert r1.to_dict() == r4.to_dict(), "worker count must not change counts"


def test_run_seed_sensitivity():
    a = run_experiment(_desk_experiment(trials=500, seed=1))
    b = run_experiment(_desk_experiment(trials=500, seed=2))
    assert a.to_dict() != b.to_dict()


def test_fixed_codebooks_reproducible():
    exp = _desk_experiment(trials=500, fresh_codebooks=False)
    r1 = run_experiment(exp)
    r2 = run_experiment(exp, threads=3)
    assert r1.to_dict() == r2.to_dict()


def test_count_invariants():
    res = run_experiment(_desk_experiment(trials=2000))
    n = res.trials
    for name in (
        "err_total",
        "err_user1",
        "err_user2",
        "err_sic11",
        "err_sic12",
        "err_sic21",
        "err_sic22",
        "power_violations",
    ):
        assert 0 <= getattr(res, name) <= n
    assert res.err_sic21 == res.err_sic21_outage + res.err_sic21_confusion
    assert res.err_user1 <= res.err_sic11 + res.err_sic12
    assert res.err_user2 <= res.err_sic21 + res.err_sic22
    assert res.err_user1 >= max(res.err_sic11, res.err_sic12)
    assert res.err_user2 >= max(res.err_sic21, res.err_sic22)
    assert res.err_total <= res.err_sic12 + res.err_sic22
    assert res.err_total >= max(res.err_sic12, res.err_sic22)


def test_power_violation_rate():
    # each codeword breaches its cap with probability chi2.sf(n, n),
    # about 0.49; two independent codewords per trial combine to ~0.74
    res = run_experiment(_desk_experiment(trials=2000))
    p1 = stats.chi2.sf(400, df=400)
    p2 = stats.chi2.sf(320, df=320)
    expected = p1 + p2 - p1 * p2
    rate = res.rate("power_violations")
    assert abs(rate - expected) < 0.04


def test_step1_error_within_dt_bound():
    params = STRONG
    n1, window = 400, 150
    exp = SimExperiment(
        params=params,
        blocklengths=BlocklengthConfig(n1=n1, n2=200, n1_tilde=window),
        log_m1=4,
        log_m2=1,
        trials=1500,
        seed=77,
    )
    res = run_experiment(exp, threads=2)
    terms = dt_bound_terms(params, n1, window, float(exp.log_m1))
    bound = terms.q_term + terms.lam
    _, upper = res.wilson("err_sic21")
    half = upper - res.rate("err_sic21")
    assert res.rate("err_sic21") <= bound + 3.0 * half


def test_rate_above_capacity_fails():
    # 10 bits over 40 symbols is nearly three times receiver 2's
    # capacity, so its own-message decode must collapse
    exp = SimExperiment(
        params=DESK,
        blocklengths=BlocklengthConfig(n1=80, n2=40),
        log_m1=2,
        log_m2=10,
        trials=400,
        seed=5,
        ed_enabled=False,
    )
    assert 10.0 > 2.5 * 40 * gaussian_capacity(DESK.p2)
    res = run_experiment(exp)
    assert res.rate("err_sic22") > 0.9


def test_wilson_matches_scipy():
    for k, n in [(0, 50), (50, 50), (26, 4000), (3, 17)]:
        lo, hi = wilson_interval(k, n)
        ref = stats.binomtest(k, n).proportion_ci(
            confidence_level=0.95, method="wilson"
        )
        assert lo == pytest.approx(ref.low, abs=1e-12)
        assert hi == pytest.approx(ref.high, abs=1e-12)


def test_wilson_validation():
    with pytest.raises(ValueError):
        wilson_interval(-1, 10)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)
    with pytest.raises(ValueError):
        wilson_interval(1, 10, confidence=1.0)


def test_result_dict_shape():
    res = run_experiment(_desk_experiment(trials=200))
    d = res.to_dict()
    assert d["trials"] == 200
    assert set(d["counts"]) == set(d["rates"])
    for name, cell in d["rates"].items():
        k = d["counts"][name]
        assert cell["estimate"] == k / 200
        assert 0.0 <= cell["wilson_lower"] <= cell["estimate"]
        assert cell["estimate"] <= cell["wilson_upper"] <= 1.0
