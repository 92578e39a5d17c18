"""Two-trimmer channel calibration against the embedded part tables."""

import math
import random

import pytest

from twintbank.calibrate import (
    Attenuation,
    CalibrationFailure,
    CalibrationResult,
    ChannelSpec,
    DEFAULT_CHANNEL_SPECS,
    FACTORY_R2_INIT,
    FACTORY_R2_INIT_EVAL_HZ,
    KNOWN_BANDS,
    PotRangeError,
    R1_OHMS,
    TARGET_GAIN_DB,
    calibrate_all,
    calibrate_channel,
    chain_gain_constant,
    channel_response,
    default_spec,
)
from twintbank import twint
from twintbank.ratfunc import ratfunc_eval


def test_ladder_tap_factors():
    # 3.3k + 150 + 330 = 3780 ohms of ladder; taps at 330 and 480.
    assert Attenuation.LOW_330.factor == pytest.approx(330.0 / 3780.0)
    assert Attenuation.HIGH_480.factor == pytest.approx(480.0 / 3780.0)


def test_chain_gain_constant_literal():
    spec = default_spec(200.0)
    expected = (39e3 / 33e3) * (480.0 / 3780.0) * (56e3 / 39e3)
    assert chain_gain_constant(spec) == pytest.approx(expected, rel=1e-12)
    spec = default_spec(700.0)
    expected = (39e3 / 33e3) * (330.0 / 3780.0) * (56e3 / 33e3)
    assert chain_gain_constant(spec) == pytest.approx(expected, rel=1e-12)


def test_embedded_table_is_complete_and_consistent():
    assert len(DEFAULT_CHANNEL_SPECS) == 8
    assert tuple(s.band_hz for s in DEFAULT_CHANNEL_SPECS) == KNOWN_BANDS
    assert set(FACTORY_R2_INIT) == set(KNOWN_BANDS)
    assert FACTORY_R2_INIT_EVAL_HZ[3200.0] == 3500.0
    assert all(FACTORY_R2_INIT_EVAL_HZ[b] == b for b in KNOWN_BANDS
               if b != 3200.0)


def test_spec_validation():
    with pytest.raises(ValueError, match="band_hz"):
        ChannelSpec(440.0, 10e-9, 1e-9, 100e3, Attenuation.LOW_330, 33e3)
    with pytest.raises(ValueError, match="c2"):
        ChannelSpec(700.0, 10e-9, 0.0, 100e3, Attenuation.LOW_330, 33e3)
    with pytest.raises(ValueError, match="Attenuation"):
        ChannelSpec(700.0, 10e-9, 1e-9, 100e3, 0.2, 33e3)


def test_default_spec_lookup():
    assert default_spec(1400).band_hz == 1400.0
    with pytest.raises(ValueError, match="no channel"):
        default_spec(123.0)


def test_channel_response_shape_and_scaling():
    spec = default_spec(700.0)
    h = channel_response(spec, r2=200e3, r3=10e3)
    assert h.sign == -1
    assert h.num.coeffs[0] == 0.0 and h.num.degree == 2
    assert h.den.degree == 3 and h.den.coeffs[0] == 1.0
    bare = twint.coefficients(twint.TwinTParams(
        R1_OHMS, 200e3, 10e3, spec.c1_c3, spec.c2, spec.c1_c3))
    k = chain_gain_constant(spec)
    for got, want in zip(h.num.coeffs[1:], bare.num.coeffs[1:]):
        assert got == pytest.approx(k * want, rel=1e-12)
    assert h.den.coeffs == bare.den.coeffs


def test_channel_response_inversion_flag_flips_sign_only():
    spec = default_spec(700.0)
    flipped = ChannelSpec(700.0, spec.c1_c3, spec.c2, spec.r2_fixed,
                          spec.attenuation_class, spec.mixer_r,
                          inverted=True)
    a = channel_response(spec, 200e3, 10e3)
    b = channel_response(flipped, 200e3, 10e3)
    assert (a.sign, b.sign) == (-1, 1)
    assert a.num.coeffs == b.num.coeffs and a.den.coeffs == b.den.coeffs


def test_channel_response_enforces_trimmer_ranges():
    spec = default_spec(700.0)
    with pytest.raises(PotRangeError, match="r2"):
        channel_response(spec, spec.r2_fixed - 1.0, 10e3)
    with pytest.raises(PotRangeError, match="r2"):
        channel_response(spec, spec.r2_fixed + 1.5 * spec.r2_pot_max + 1.0,
                         10e3)
    with pytest.raises(PotRangeError, match="r3"):
        channel_response(spec, 200e3, 0.0)
    with pytest.raises(PotRangeError, match="r3"):
        channel_response(spec, 200e3, spec.r3_pot_max + 1.0)


def test_converged_channels_meet_the_stopping_rule(calibration):
    for r in calibration:
        spec = default_spec(r.band_hz)
        assert abs(r.f_peak - r.band_hz) <= 0.05
        assert abs(r.gain_db - TARGET_GAIN_DB) <= 0.001
        assert spec.r2_fixed <= r.r2 <= spec.r2_fixed + 1.5 * spec.r2_pot_max
        assert 0.0 < r.r3 <= spec.r3_pot_max
        assert r.q > 0.0 and r.iterations >= 1


def test_calibration_is_a_fixed_point_when_reseeded(calibration):
    """Seeding a channel with its own converged r2 finishes in one pass
    and lands on the same trimmer values.

    Agreement is bounded by the stopping tolerances (each pass solves r3
    against the previous pass's r2), not bit equality; one part in 1e4
    is what the 0.05 Hz / 0.001 dB stopping rule actually pins down.
    """
    spec = default_spec(700.0)
    first = next(r for r in calibration if r.band_hz == 700.0)
    again = calibrate_channel(spec, r2_init=first.r2)
    assert again.iterations == 1
    assert again.r2 == pytest.approx(first.r2, rel=1e-4)
    assert again.r3 == pytest.approx(first.r3, rel=1e-4)


def test_peak_gain_verified_independently(calibration):
    """Evaluate |H| at the reported peak directly from the polynomials."""
    for r in calibration:
        spec = default_spec(r.band_hz)
        h = channel_response(spec, r.r2, r.r3)
        mag = abs(ratfunc_eval(h, 2.0 * math.pi * r.f_peak))
        assert 20.0 * math.log10(mag) == pytest.approx(r.gain_db, abs=1e-9)


def test_calibrate_all_orders_by_band_and_isolates_failures():
    # The 150-ohm gain-trimmer ceiling makes 6.5 dB unreachable, so this
    # spec must fail without taking the healthy 700 Hz channel with it.
    crippled = ChannelSpec(500.0, 22e-9, 2.2e-9, 91e3, Attenuation.LOW_330,
                           33e3, r3_pot_max=150.0)
    out = calibrate_all([default_spec(700.0), crippled])
    assert [e.band_hz for e in out] == [500.0, 700.0]
    assert isinstance(out[0], CalibrationFailure)
    assert "gain trimmer" in out[0].reason
    assert isinstance(out[1], CalibrationResult)


def test_loose_tolerances_still_converge():
    r = calibrate_channel(default_spec(1000.0), tol_freq=5.0,
                          tol_gain_db=0.25)
    assert abs(r.f_peak - 1000.0) <= 5.0
    assert abs(r.gain_db - TARGET_GAIN_DB) <= 0.25


def test_factory_seeds_sit_inside_the_nominal_pot_range():
    """Every embedded starting value must be reachable on the real pot."""
    for spec in DEFAULT_CHANNEL_SPECS:
        seed = FACTORY_R2_INIT[spec.band_hz]
        assert spec.r2_fixed <= seed <= spec.r2_fixed + spec.r2_pot_max, (
            f"{spec.band_hz:g} Hz factory seed {seed:g} outside the pot")
