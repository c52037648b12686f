import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from afdm_isac.imaging import RadarImage
from afdm_isac.metrics import (
    PSLR_CAP_DB,
    image_pslr_db,
    image_snr_db,
    noise_mask,
    normalize,
    peak_profile,
    processing_gain_db,
    pslr_db,
    report,
    to_db,
)
from afdm_isac.params import DESK_SCALE, FULL_SCALE, AfdmParams
from afdm_isac.channel import Scenario, Target
from afdm_isac.pipeline import run_trial


def test_processing_gain_values():
    assert processing_gain_db(FULL_SCALE) == pytest.approx(60.2, abs=0.01)
    assert processing_gain_db(DESK_SCALE) == pytest.approx(45.15, abs=0.01)
    p = AfdmParams(n_subcarriers=1, n_symbols=1, n_cpp=0, c1=0.0, c2=0.0)
    assert processing_gain_db(p) == 0.0


def test_image_snr_closed_form():
    img = np.full((32, 16), 0.1)
    img[4, 9] = 7.0
    assert image_snr_db(img, (4, 9)) == pytest.approx(20 * math.log10(7.0 / 0.1))
    # the default peak is the largest cell
    assert image_snr_db(img) == pytest.approx(20 * math.log10(70))


def test_image_snr_excludes_all_declared_peaks():
    img = np.full((32, 16), 0.1)
    img[4, 9], img[20, 2] = 7.0, 3.0
    assert image_snr_db(img, [(4, 9), (20, 2)]) == pytest.approx(20 * math.log10(70))


def test_guard_covering_image_rejected():
    with pytest.raises(ValueError):
        image_snr_db(np.ones((5, 5)), (2, 2), guard=(2, 2))


def test_daft_images_exclude_leakage_taps():
    mask = noise_mask((20, 8), [(10, 4)], (1, 1), leakage_rows=4)
    assert not mask[6:15, 4].any()
    assert mask[5, 4] and mask[10, 2]


def test_noiseless_fccr_image_snr_near_gain():
    res = run_trial("afdm_time", Scenario(DESK_SCALE, [Target(9, 0.0)]))
    assert image_snr_db(res.image) == pytest.approx(DESK_SCALE.processing_gain_db, abs=2)


def test_pure_noise_fake_peak_order_statistics():
    rng = np.random.default_rng(8)
    cells = 10**5
    img = (rng.standard_normal(cells) + 1j * rng.standard_normal(cells)).reshape(400, 250)
    power = np.abs(img) ** 2
    expected = 10 * math.log10(power.max() / power.mean())
    # largest of n unit exponentials concentrates near ln n
    assert expected == pytest.approx(10 * math.log10(math.log(cells)), abs=3)
    assert image_snr_db(img) == pytest.approx(expected, abs=3)


def test_pslr_edge_cases():
    impulse = np.zeros(16)
    impulse[3] = 1
    assert pslr_db(impulse) == PSLR_CAP_DB
    assert pslr_db(np.ones(16)) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        pslr_db(np.zeros(8))
    with pytest.raises(ValueError):
        pslr_db(np.ones(8), halfwidth=0)


def test_pslr_cyclic_mainlobe():
    prof = np.array([0.9, 0.05, 0.01, 0.2, 0.01, 0.05, 1.0])
    # peak at the last bin; bins 0 and 5 are its cyclic neighbours
    assert pslr_db(prof) == pytest.approx(20 * math.log10(1 / 0.2))


def test_image_pslr_2d():
    img = np.full((10, 10), 0.01)
    img[5, 5] = 1.0
    img[6, 6] = 0.9  # inside the 3 x 3 mainlobe
    img[0, 5] = 0.1
    assert image_pslr_db(img) == pytest.approx(20.0)


@settings(max_examples=50, deadline=None)
@given(scale=st.floats(1e-3, 1e3), seed=st.integers(0, 1000))
def test_normalize_scale_invariant_and_idempotent(scale, seed):
    rng = np.random.default_rng(seed)
    img = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6))
    a = normalize(img)
    np.testing.assert_allclose(normalize(scale * img), a, atol=1e-12)
    np.testing.assert_allclose(normalize(a), a, atol=1e-12)
    assert np.max(to_db(a)) == pytest.approx(0.0, abs=1e-9)
    assert np.argmax(np.abs(a)) == np.argmax(np.abs(img))


def test_normalize_radar_image_flag_and_zero():
    img = RadarImage(np.eye(4, dtype=complex) * 3, DESK_SCALE)
    out = normalize(img)
    assert out.normalized and np.abs(out.data).max() == 1.0
    with pytest.raises(ValueError):
        normalize(np.zeros((3, 3)))


def test_report_sanity_bound():
    snr = 10.0
    res = run_trial("afdm_time", Scenario(DESK_SCALE, [Target(9, 0.1)], snr_db=snr, seed=2))
    rep = report(res.image)
    assert rep.image_snr_db <= rep.processing_gain_db + snr + 3
    assert rep.peak_location[0] == 9
    assert len(peak_profile(res.image, 0)) == DESK_SCALE.n_subcarriers
