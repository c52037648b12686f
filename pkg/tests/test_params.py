import math

import pytest

from afdm_isac.params import DESK_SCALE, FULL_SCALE, AfdmParams, ParameterError, recommended_c1


def test_full_scale_derived_values_match_reported_table():
    p = FULL_SCALE
    assert p.subcarrier_spacing_hz == pytest.approx(22.729e3, rel=1e-4)
    assert p.symbol_duration_s == pytest.approx(44e-6, rel=1e-2)
    assert p.cpp_duration_s == pytest.approx(2.75e-6, rel=1e-2)
    assert p.total_symbol_duration_s == pytest.approx(46.75e-6, rel=1e-3)
    assert p.range_resolution_m == pytest.approx(1.61, abs=0.005)
    assert p.velocity_resolution_mps == pytest.approx(0.52, abs=0.005)
    assert p.processing_gain_db == pytest.approx(60.2, abs=0.05)


def test_reciprocal_spacings():
    for p in (FULL_SCALE, DESK_SCALE):
        assert p.subcarrier_spacing_hz * p.symbol_duration_s == pytest.approx(1.0)
        assert p.alt_spacing_hz * p.total_symbol_duration_s == pytest.approx(1.0)


def test_desk_scale_shares_subcarrier_spacing():
    assert DESK_SCALE.subcarrier_spacing_hz == pytest.approx(FULL_SCALE.subcarrier_spacing_hz)
    assert DESK_SCALE.processing_gain_db == pytest.approx(45.15, abs=0.01)
    assert DESK_SCALE.symbol_ratio == pytest.approx(544 / 512)


@pytest.mark.parametrize("n", [64, 512, 4096])
def test_recommended_c1_gives_odd_chirp_index(n):
    c1 = recommended_c1(n, 2, 4)
    assert 2 * n * c1 == pytest.approx(13)
    assert AfdmParams.recommended(n, 4, 8).chirp_index == 13


def test_default_c2_is_inside_bound():
    p = AfdmParams.recommended(512, 4, 8)
    assert 0 < p.c2 < 1 / (2 * 512)


@pytest.mark.parametrize(
    "changes",
    [
        {"n_cpp": 64},  # N_cp >= N
        {"n_cpp": -1},
        {"n_symbols": 0},
        {"c2": 1 / 128},  # c2 = 1/(2N)
        {"c2": -1e-6},
        {"bandwidth_hz": 0.0},
    ],
)
def test_invalid_params_rejected(changes):
    base = AfdmParams.recommended(64, 4, 8)
    with pytest.raises(ParameterError):
        base.replace(**changes)


def test_velocity_doppler_round_trip():
    p = FULL_SCALE
    assert p.doppler_to_velocity(p.velocity_to_doppler(123.4)) == pytest.approx(123.4)
    # 2 v fc / c with c = 3e8
    assert p.velocity_to_doppler(1.0) == pytest.approx(160.0)
    assert p.delay_bins_to_range(1) == pytest.approx(p.range_resolution_m)
    assert p.range_to_delay_bins(p.delay_bins_to_range(128)) == 128
    assert math.isclose(p.max_unambiguous_doppler_hz, p.alt_spacing_hz / 2)
