"""AFDM waveform primitives: QAM mapping, DAFT/IDAFT, chirp-periodic prefix, framing.

Both transforms are unitary (``1/sqrt(N)`` each way), so ``daft`` is the exact
inverse of ``idaft``. Matrix form: ``daft(r) = Lambda_c2 F Lambda_c1 r`` with
``Lambda_c = diag(exp(-j 2 pi c n^2))`` and ``F`` the unitary DFT.

Arrays of shape ``(N, N_sym)`` are transformed column by column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import AfdmParams


class ShapeError(ValueError):
    """Input array dimensions do not agree with the parameters."""


def chirp(n: int, c: float) -> np.ndarray:
    """Quadratic phase ``exp(j 2 pi c k^2)`` for ``k = 0..n-1``."""
    k = np.arange(n, dtype=np.float64)
    # reduce c k^2 modulo 1 before exponentiating to keep phase accurate for large k
    return np.exp(2j * np.pi * np.mod(c * k * k, 1.0))


def _check_length(x: np.ndarray, n: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[0] != n:
        raise ShapeError(f"{what}: expected leading dimension {n}, got {x.shape[0]}")
    return x


def _bcast(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    return v if x.ndim == 1 else v[:, None]


def idaft(x: np.ndarray, params: AfdmParams) -> np.ndarray:
    """Inverse DAFT of a length-N vector (or each column of an N x K array)."""
    n = params.n_subcarriers
    x = _check_length(x, n, "idaft")
    pre = _bcast(chirp(n, params.c2), x)
    post = _bcast(chirp(n, params.c1), x)
    return post * np.fft.ifft(pre * x, axis=0, norm="ortho")


def daft(r: np.ndarray, params: AfdmParams) -> np.ndarray:
    """Forward DAFT of a length-N vector (or each column of an N x K array)."""
    n = params.n_subcarriers
    r = _check_length(r, n, "daft")
    pre = _bcast(np.conj(chirp(n, params.c1)), r)
    post = _bcast(np.conj(chirp(n, params.c2)), r)
    return post * np.fft.fft(pre * r, axis=0, norm="ortho")


def daft_matrix(params: AfdmParams) -> np.ndarray:
    """Dense ``Lambda_c2 F Lambda_c1``; O(N^2) memory, for checks on small N."""
    n = params.n_subcarriers
    k = np.arange(n)
    f = np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
    lam1 = np.conj(chirp(n, params.c1))
    lam2 = np.conj(chirp(n, params.c2))
    return lam2[:, None] * f * lam1[None, :]


def cpp_phase(params: AfdmParams) -> np.ndarray:
    """Per-sample factor applied to the copied tail to form the chirp-periodic prefix.

    Entry ``k`` multiplies ``s[N - N_cp + k]``; it equals
    ``exp(-j 2 pi c1 (N^2 + 2 N (k - N_cp)))``.
    """
    n, ncp = params.n_subcarriers, params.n_cpp
    idx = np.arange(-ncp, 0, dtype=np.float64)
    return np.exp(-2j * np.pi * np.mod(params.c1 * (n * n + 2 * n * idx), 1.0))


def add_cpp(s: np.ndarray, params: AfdmParams) -> np.ndarray:
    """Prepend the chirp-periodic prefix to one symbol (or each column)."""
    n, ncp = params.n_subcarriers, params.n_cpp
    if ncp > n:
        raise ShapeError(f"prefix length {ncp} exceeds symbol length {n}")
    s = _check_length(s, n, "add_cpp")
    if ncp == 0:
        return s.copy()
    prefix = s[n - ncp:] * _bcast(cpp_phase(params), s)
    return np.concatenate([prefix, s], axis=0)


@dataclass
class SymbolGrid:
    """``N x N_sym`` block of QAM symbols, one AFDM (or OFDM) symbol per column."""

    data: np.ndarray
    modulation_order: int
    unit_power: bool = True

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


@dataclass
class TimeFrame:
    """Transmitted frame in serialized form plus the prefix-free matrix ``S``."""

    samples: np.ndarray  # length (N + N_cp) * N_sym, prefix included
    matrix: np.ndarray  # N x N_sym, prefix removed

    @property
    def layout(self) -> str:
        return "serialized"


def _grid_data(x_grid) -> np.ndarray:
    return np.asarray(x_grid.data if isinstance(x_grid, SymbolGrid) else x_grid, dtype=np.complex128)


def _check_grid(data: np.ndarray, params: AfdmParams) -> None:
    expected = (params.n_subcarriers, params.n_symbols)
    if data.shape != expected:
        raise ShapeError(f"symbol grid shape {data.shape} != {expected}")


def serialize(matrix_with_prefix: np.ndarray) -> np.ndarray:
    """Column-major flattening: symbol 0 first."""
    return np.asarray(matrix_with_prefix).reshape(-1, order="F")


def modulate_frame(x_grid, params: AfdmParams) -> TimeFrame:
    data = _grid_data(x_grid)
    _check_grid(data, params)
    s = idaft(data, params)
    return TimeFrame(samples=serialize(add_cpp(s, params)), matrix=s)


def deframe(r: np.ndarray, params: AfdmParams) -> np.ndarray:
    """Serial-to-parallel conversion and prefix removal: ``R[n, k] = r[(N+N_cp) k + N_cp + n]``."""
    n, ncp, nsym = params.n_subcarriers, params.n_cpp, params.n_symbols
    r = np.asarray(r, dtype=np.complex128)
    if r.shape != (params.frame_length,):
        raise ShapeError(f"frame length {r.shape} != ({params.frame_length},)")
    return r.reshape(n + ncp, nsym, order="F")[ncp:, :]


# ---------------------------------------------------------------------------
# QAM
# ---------------------------------------------------------------------------

SUPPORTED_ORDERS = (4, 16, 64)


def _gray_levels(bits_per_axis: int) -> np.ndarray:
    """Amplitude level for each Gray-coded axis index, e.g. 00->3, 01->1, 11->-1, 10->-3."""
    m = 1 << bits_per_axis
    levels = np.empty(m)
    for i in range(m):
        levels[i ^ (i >> 1)] = (m - 1) - 2 * i
    return levels


def qam_constellation(order: int) -> np.ndarray:
    """Unit-power square QAM points indexed by their bit label (MSB first).

    The first half of each label selects the in-phase level and the second
    half the quadrature level, each Gray coded. The label of all zeros maps to
    the upper-right corner; for QPSK ``00 -> (1 + 1j)/sqrt(2)``.
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {order}; choose from {SUPPORTED_ORDERS}")
    half = int(np.log2(order)) // 2
    levels = _gray_levels(half)
    m = 1 << half
    labels = np.arange(order)
    points = levels[labels >> half] + 1j * levels[labels & (m - 1)]
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


def map_qam(bits: np.ndarray, order: int, dims: tuple[int, int]) -> SymbolGrid:
    """Gray-map a bit vector to an ``N x N_sym`` unit-power QAM grid (column-major fill)."""
    points = qam_constellation(order)
    k = int(np.log2(order))
    bits = np.asarray(bits).astype(np.int64).ravel()
    n_sym = dims[0] * dims[1]
    if bits.size != n_sym * k:
        raise ValueError(f"need {n_sym * k} bits for {dims} {order}-QAM, got {bits.size}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = bits.reshape(n_sym, k) @ weights
    data = points[labels].reshape(dims, order="F")
    return SymbolGrid(data=data, modulation_order=order)


def random_grid(rng: np.random.Generator, params: AfdmParams, order: int = 16) -> SymbolGrid:
    dims = (params.n_subcarriers, params.n_symbols)
    bits = rng.integers(0, 2, size=dims[0] * dims[1] * int(np.log2(order)), dtype=np.int8)
    return map_qam(bits, order, dims)
