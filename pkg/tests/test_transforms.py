import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from afdm_isac.ofdm import ofdm_modulate
from afdm_isac.params import AfdmParams
from afdm_isac.transforms import (
    ShapeError,
    add_cpp,
    daft,
    daft_matrix,
    deframe,
    idaft,
    map_qam,
    modulate_frame,
    qam_constellation,
    random_grid,
)

from conftest import crandn


def idaft_oracle(x, c1, c2):
    """Element-by-element inverse transform sum."""
    n = len(x)
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        for m in range(n):
            out[i] += x[m] * np.exp(2j * np.pi * (c1 * i * i + m * i / n + c2 * m * m))
    return out / np.sqrt(n)


@pytest.mark.parametrize("n", [8, 16])
def test_idaft_matches_explicit_sum(rng, n):
    p = AfdmParams.recommended(n, 1, 2, alpha_max=1, k_v=1)
    x = crandn(rng, n)
    np.testing.assert_allclose(idaft(x, p), idaft_oracle(x, p.c1, p.c2), atol=1e-12)


@pytest.mark.parametrize("n", [8, 64])
def test_daft_matches_dense_matrix(rng, n):
    p = AfdmParams.recommended(n, 1, 4)
    r = crandn(rng, n)
    a = daft_matrix(p)
    np.testing.assert_allclose(daft(r, p), a @ r, atol=1e-10)
    np.testing.assert_allclose(idaft(r, p), a.conj().T @ r, atol=1e-10)


def test_impulse_gives_pure_chirp(small_params):
    n = small_params.n_subcarriers
    x = np.zeros(n, dtype=complex)
    x[0] = 1
    k = np.arange(n)
    expected = np.exp(2j * np.pi * small_params.c1 * k**2) / np.sqrt(n)
    np.testing.assert_allclose(idaft(x, small_params), expected, atol=1e-12)
    np.testing.assert_allclose(daft(expected, small_params), x, atol=1e-12)


def test_zero_chirps_reduce_to_unitary_dft(rng):
    p = AfdmParams(n_subcarriers=32, n_symbols=1, n_cpp=4, c1=0.0, c2=0.0)
    x = crandn(rng, 32)
    np.testing.assert_allclose(idaft(x, p), np.fft.ifft(x) * np.sqrt(32), atol=1e-12)


@pytest.mark.parametrize("n", [8, 64, 512])
def test_unitary_and_inverse(rng, n):
    p = AfdmParams.recommended(n, 2, 4)
    v = crandn(rng, n, 2)
    np.testing.assert_allclose(np.linalg.norm(daft(v, p), axis=0), np.linalg.norm(v, axis=0), rtol=1e-10)
    np.testing.assert_allclose(daft(idaft(v, p), p), v, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    n=st.sampled_from([8, 16, 32, 64]),
    re=hnp.arrays(np.float64, 64, elements=st.floats(-10, 10)),
    im=hnp.arrays(np.float64, 64, elements=st.floats(-10, 10)),
)
def test_daft_preserves_energy_property(n, re, im):
    p = AfdmParams.recommended(n, 1, 2)
    v = (re + 1j * im)[:n]
    assert np.linalg.norm(daft(v, p)) == pytest.approx(np.linalg.norm(v), rel=1e-10, abs=1e-10)
    np.testing.assert_allclose(idaft(daft(v, p), p), v, atol=1e-9)


def test_length_mismatch_raises(small_params):
    with pytest.raises(ShapeError):
        daft(np.zeros(10), small_params)
    with pytest.raises(ShapeError):
        idaft(np.zeros(65), small_params)


def cpp_oracle(s, c1, ncp):
    n = len(s)
    out = []
    for k in range(ncp):
        idx = k - ncp  # negative time index
        out.append(s[n + idx] * np.exp(-2j * np.pi * c1 * (n * n + 2 * n * idx)))
    return np.concatenate([np.array(out, dtype=complex), s])


def test_cpp_matches_loop_oracle(rng):
    # c1 not giving an integer chirp index, so the prefix phase is nontrivial
    p = AfdmParams(n_subcarriers=32, n_symbols=1, n_cpp=6, c1=0.0123, c2=0.001)
    s = crandn(rng, 32)
    np.testing.assert_allclose(add_cpp(s, p), cpp_oracle(s, p.c1, 6), atol=1e-12)


@pytest.mark.parametrize("n,ncp", [(64, 8), (512, 32), (4096, 256)])
def test_cpp_reduces_to_cyclic_prefix_for_odd_chirp_index(rng, n, ncp):
    p = AfdmParams.recommended(n, 1, ncp)
    s = crandn(rng, n)
    out = add_cpp(s, p)
    np.testing.assert_allclose(out[:ncp], s[n - ncp:], atol=1e-12)
    assert out.shape == (n + ncp,)


def test_cpp_empty_prefix(rng):
    p = AfdmParams.recommended(16, 1, 0)
    s = crandn(rng, 16)
    np.testing.assert_array_equal(add_cpp(s, p), s)


def test_frame_round_trip_and_length(rng):
    p = AfdmParams.recommended(16, 4, 4, alpha_max=1, k_v=1)
    grid = random_grid(rng, p)
    frame = modulate_frame(grid, p)
    assert frame.samples.shape == ((16 + 4) * 4,)
    np.testing.assert_array_equal(deframe(frame.samples, p), frame.matrix)
    np.testing.assert_allclose(daft(frame.matrix, p), grid.data, atol=1e-12)


def test_single_symbol_frame_is_prefixed_idaft(rng):
    p = AfdmParams.recommended(32, 1, 4, alpha_max=1, k_v=1)
    x = random_grid(rng, p).data
    np.testing.assert_allclose(modulate_frame(x, p).samples, add_cpp(idaft(x[:, 0], p), p), atol=1e-13)


def test_frame_energy_by_direct_summation(rng):
    p = AfdmParams.recommended(64, 8, 8)
    grid = random_grid(rng, p)
    frame = modulate_frame(grid, p)
    body = np.sum(np.abs(grid.data) ** 2)  # unitary: energy of S equals that of X
    prefix = sum(np.sum(np.abs(frame.matrix[-8:, k]) ** 2) for k in range(8))
    assert np.sum(np.abs(frame.samples) ** 2) == pytest.approx(body + prefix, rel=1e-12)


def test_deframe_matches_index_loop(rng):
    p = AfdmParams.recommended(16, 4, 4, alpha_max=1, k_v=1)
    r = crandn(rng, (16 + 4) * 4)
    expected = np.empty((16, 4), dtype=complex)
    for n in range(16):
        for k in range(4):
            expected[n, k] = r[(16 + 4) * k + 4 + n]
    np.testing.assert_array_equal(deframe(r, p), expected)


def test_deframe_without_prefix_is_reshape(rng):
    p = AfdmParams.recommended(8, 3, 0, alpha_max=1, k_v=1)
    r = crandn(rng, 24)
    np.testing.assert_array_equal(deframe(r, p), r.reshape(3, 8).T)
    with pytest.raises(ShapeError):
        deframe(r[:-1], p)


def test_zero_chirp_chain_equals_ofdm_modulator(rng):
    p = AfdmParams(n_subcarriers=64, n_symbols=4, n_cpp=8, c1=0.0, c2=0.0)
    grid = random_grid(rng, p)
    np.testing.assert_allclose(modulate_frame(grid, p).samples, ofdm_modulate(grid, p).samples, atol=1e-12)
    np.testing.assert_allclose(daft(deframe(ofdm_modulate(grid, p).samples, p), p), grid.data, atol=1e-12)


# -- QAM ---------------------------------------------------------------------

def test_qpsk_zero_bits_upper_right():
    grid = map_qam(np.zeros(2, dtype=int), 4, (1, 1))
    assert grid.data[0, 0] == pytest.approx((1 + 1j) / np.sqrt(2))


@pytest.mark.parametrize("order", [4, 16, 64])
def test_constellation_unit_power_and_size(order):
    pts = qam_constellation(order)
    assert len(np.unique(np.round(pts, 12))) == order
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0)


@pytest.mark.parametrize("order", [16, 64])
def test_gray_neighbours_differ_by_one_bit(order):
    pts = qam_constellation(order)
    d_min = np.min(np.abs(pts[:, None] - pts[None, :])[~np.eye(order, dtype=bool)])
    for a in range(order):
        for b in range(order):
            if a != b and abs(abs(pts[a] - pts[b]) - d_min) < 1e-9:
                assert bin(a ^ b).count("1") == 1


def test_random_grid_power_monte_carlo(rng):
    p = AfdmParams.recommended(512, 16, 32)
    grid = random_grid(rng, p, 16)
    assert np.mean(np.abs(grid.data) ** 2) == pytest.approx(1.0, abs=1e-2)
    assert len(np.unique(np.round(grid.data, 12))) == 16


def test_map_qam_rejects_bad_input():
    with pytest.raises(ValueError):
        map_qam(np.zeros(8, dtype=int), 8, (2, 2))
    with pytest.raises(ValueError):
        map_qam(np.zeros(7, dtype=int), 4, (2, 2))
    with pytest.raises(ValueError):
        map_qam(np.full(8, 2), 4, (2, 2))
