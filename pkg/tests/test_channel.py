"""Tests for the channel model and signal path."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hbgic.channel import (
    BlocklengthConfig,
    ChannelParams,
    effective_sic_snr,
    transmit,
    validate,
)


def test_validate_accepts_reference_setting():
    report = validate(ChannelParams(a12=11.0, a21=35.0, p1=10.0, p2=10.0))
    assert report.ok
    assert report.violations == ()


def test_validate_flags_weak_cross_gain():
    report = validate(ChannelParams(a12=10.9, a21=35.0, p1=10.0, p2=10.0))
    assert not report.ok
    assert report.violations == ("a12 >= 1 + p1",)


def test_validate_accepts_asymmetric_setting():
    report = validate(ChannelParams(a12=11.0, a21=250.0, p1=10.0, p2=15.0))
    assert report.ok


def test_validate_reports_all_violations():
    report = validate(ChannelParams(a12=5.0, a21=2.0, p1=10.0, p2=10.0))
    assert set(report.violations) == {
        "a21 >= 1 + p2",
        "a12 >= 1 + p1",
        "a21 > a12",
    }


def test_params_reject_garbage():
    with pytest.raises(ValueError):
        ChannelParams(a12=11.0, a21=float("nan"), p1=10.0, p2=10.0)
    with pytest.raises(ValueError):
        ChannelParams(a12=-1.0, a21=35.0, p1=10.0, p2=10.0)
    with pytest.raises(ValueError):
        ChannelParams(a12=11.0, a21=35.0, p1=0.0, p2=10.0)


def test_blocklengths_ordering():
    bl = BlocklengthConfig(n1=1024, n2=840)
    assert bl.n1_tilde is None
    with pytest.raises(ValueError):
        BlocklengthConfig(n1=840, n2=840)
    with pytest.raises(ValueError):
        BlocklengthConfig(n1=1024, n2=840, n1_tilde=841)
    assert BlocklengthConfig(n1=1024, n2=840, n1_tilde=840).n1_tilde == 840


def test_effective_sic_snr_goldens():
    # exact fractions 350/11 and 2500/11
    s = effective_sic_snr(ChannelParams(a12=11.0, a21=35.0, p1=10.0, p2=10.0))
    assert abs(s - 350.0 / 11.0) < 1e-12
    s = effective_sic_snr(ChannelParams(a12=11.0, a21=250.0, p1=10.0, p2=10.0))
    assert abs(s - 2500.0 / 11.0) < 1e-12


def test_effective_sic_snr_needs_receiver2_condition():
    # a21 below 1 + p2 has no clean SIC-step interpretation
    with pytest.raises(ValueError):
        effective_sic_snr(ChannelParams(a12=11.0, a21=10.0, p1=10.0, p2=10.0))
    # the a12 side is irrelevant for this quantity
    s = effective_sic_snr(ChannelParams(a12=0.0, a21=1.2, p1=10.0, p2=0.2))
    assert abs(s - 10.0) < 1e-12


def test_transmit_noiseless_structure():
    params = ChannelParams(a12=4.0, a21=9.0, p1=1.0, p2=1.0)
    x1 = np.ones(6)
    x2 = 2.0 * np.ones(4)
    z = (np.zeros(6), np.zeros(6))
    y1, y2 = transmit(x1, x2, params, z)
    # y1 = x1 + sqrt(a12) x2 in the overlap, x1 alone afterwards
    assert np.allclose(y1[:4], 1.0 + 2.0 * 2.0)
    assert np.allclose(y1[4:], 1.0)
    # y2 = x2 + sqrt(a21) x1 in the overlap, sqrt(a21) x1 afterwards
    assert np.allclose(y2[:4], 2.0 + 3.0 * 1.0)
    assert np.allclose(y2[4:], 3.0 * 1.0)


def test_transmit_is_linear_in_noise():
    params = ChannelParams(a12=4.0, a21=9.0, p1=1.0, p2=1.0)
    rng = np.random.default_rng(7)
    x1 = rng.standard_normal(10)
    x2 = rng.standard_normal(6)
    z1 = rng.standard_normal(10)
    z2 = rng.standard_normal(10)
    y1a, y2a = transmit(x1, x2, params, (z1, z2))
    y1b, y2b = transmit(x1, x2, params, (np.zeros(10), np.zeros(10)))
    assert np.allclose(y1a - y1b, z1)
    assert np.allclose(y2a - y2b, z2)


def test_transmit_rejects_length_mismatch():
    params = ChannelParams(a12=4.0, a21=9.0, p1=1.0, p2=1.0)
    with pytest.raises(ValueError):
        transmit(np.ones(6), np.ones(6), params, (np.zeros(6), np.zeros(6)))
    with pytest.raises(ValueError):
        transmit(np.ones(6), np.ones(4), params, (np.zeros(5), np.zeros(6)))


def test_transmit_received_power():
    """Sample variance of y2 in the overlap is 1 + p2 + a21*p1."""
    params = ChannelParams(a12=11.0, a21=35.0, p1=10.0, p2=10.0)
    rng = np.random.default_rng(12345)
    batch, n1, n2 = 12800, 90, 80
    x1 = rng.standard_normal((batch, n1)) * math.sqrt(params.p1)
    x2 = rng.standard_normal((batch, n2)) * math.sqrt(params.p2)
    z1 = rng.standard_normal((batch, n1))
    z2 = rng.standard_normal((batch, n1))
    _, y2 = transmit(x1, x2, params, (z1, z2))
    samples = y2[:, :n2].ravel()  # 1.024e6 draws
    var = float(np.var(samples))
    expected = 1.0 + params.p2 + params.a21 * params.p1
    assert abs(var - expected) / expected < 0.01, f"var={var} expected={expected}"
