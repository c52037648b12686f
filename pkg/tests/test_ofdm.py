import numpy as np
import pytest

from afdm_isac.channel import Scenario, Target, synthesize_echo
from afdm_isac.estimator_time import fccr_rdm
from afdm_isac.metrics import image_pslr_db, image_snr_db
from afdm_isac.ofdm import ofdm_modulate, symbol_division_rdm
from afdm_isac.params import DESK_SCALE, AfdmParams
from afdm_isac.pipeline import run_trial
from afdm_isac.transforms import ShapeError, deframe, modulate_frame, random_grid


def test_matches_zero_chirp_afdm(rng):
    p = AfdmParams(n_subcarriers=128, n_symbols=4, n_cpp=16, c1=0.0, c2=0.0)
    grid = random_grid(rng, p)
    a = ofdm_modulate(grid, p)
    b = modulate_frame(grid, p)
    np.testing.assert_allclose(a.samples, b.samples, atol=1e-12)
    assert a.samples.shape == ((128 + 16) * 4,)


def test_impulse_column_constant_magnitude(small_params):
    x = np.ones((64, 8), dtype=complex)
    x[:, 0] = 0
    x[5, 0] = 1
    frame = ofdm_modulate(x, small_params)
    np.testing.assert_allclose(np.abs(frame.matrix[:, 0]), 1 / 8, atol=1e-12)
    with pytest.raises(ShapeError):
        ofdm_modulate(np.ones((64, 7)), small_params)


def test_zero_symbol_rejected(small_params):
    x = np.ones((64, 8), dtype=complex)
    x[3, 3] = 0
    with pytest.raises(ValueError):
        symbol_division_rdm(np.ones((64, 8)), x, small_params)


def _ofdm_and_fccr(params, targets, seed=0, snr_db=np.inf):
    grid = random_grid(np.random.default_rng(seed), params)
    ofdm = ofdm_modulate(grid, params)
    afdm = modulate_frame(grid, params)
    sc = Scenario(params, targets, snr_db=snr_db, seed=seed)
    r_o = deframe(synthesize_echo(ofdm, sc), params)
    r_a = deframe(synthesize_echo(afdm, sc), params)
    return symbol_division_rdm(r_o, grid, params), fccr_rdm(r_a, afdm.matrix, params)


def test_noiseless_static_target_exact_cancellation():
    p = AfdmParams.recommended(256, 32, 16)
    div, fccr = _ofdm_and_fccr(p, [Target(7, 0.0)])
    assert div.peak() == (7, 16) == fccr.peak()
    # division removes the symbols exactly, so everything off the peak is rounding noise
    assert image_snr_db(div) > 200


def test_noiseless_on_grid_doppler_peak_matches_fccr():
    p = AfdmParams.recommended(256, 32, 16)
    nu = 5 / (32 * p.symbol_ratio)
    div, fccr = _ofdm_and_fccr(p, [Target(7, nu)])
    assert div.peak() == (7, 16 + 5) == fccr.peak()


def test_division_beats_correlation_at_high_snr():
    gains = []
    for seed in range(5):
        div, fccr = _ofdm_and_fccr(DESK_SCALE, [Target(10, 0.1)], seed, snr_db=10)
        gains.append(image_snr_db(div) - image_snr_db(fccr))
    assert np.mean(gains) > 0


def test_noise_enhancement_at_low_snr():
    gp = DESK_SCALE.processing_gain_db
    div_snr, fccr_snr = [], []
    for seed in range(10):
        div, fccr = _ofdm_and_fccr(DESK_SCALE, [Target(10, 0.1)], seed, snr_db=-10)
        div_snr.append(image_snr_db(div))
        fccr_snr.append(image_snr_db(fccr))
    assert np.mean(div_snr) < gp - 10
    assert np.mean(div_snr) < np.mean(fccr_snr)


def test_pslr_degrades_at_large_doppler():
    def mean_pslr(nu):
        return np.mean([
            image_pslr_db(run_trial("ofdm_division", Scenario(DESK_SCALE, [Target(10, nu)], snr_db=10, seed=3), t).image)
            for t in range(5)
        ])

    assert mean_pslr(0.0) - mean_pslr(0.98) > 10
