"""QAM constellations and the 256-point OFDM transmultiplexer.

Constellations are unit mean energy with Gray (16/64) or quasi-Gray
(32-cross) labeling.  The OFDM grid follows the usual 256-FFT layout:
200 occupied carriers at logical indices -100..-1, 1..100, of which 8
are BPSK pilots (logical +-13, +-38, +-63, +-88) and 192 carry data;
bin 0 and the band edges are null.  Time samples are scaled by
sqrt(n_fft / n_occupied) after the unitary IFFT, so a symbol whose 200
occupied carriers all hold unit-energy points transmits exactly unit
power per sample; data carriers then account for 192/200 = 0.96 of
that power, the figure the noise bookkeeping charges against.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc

DEMAP_CHUNK = 1 << 14
_TIE_EPS = 1e-12


def _gray_order(n_bits: int) -> np.ndarray:
    """Bit patterns in spatial order; adjacent entries differ in 1 bit."""
    i = np.arange(1 << n_bits)
    return i ^ (i >> 1)


@dataclass(frozen=True)
class Constellation:
    """Labeled complex points, unit mean energy.

    points[v] is the symbol for label v.  Square constellations carry
    the per-axis decomposition used by the exact error integrals; the
    32-cross only supports the pairwise path.
    """

    m: int
    points: np.ndarray                 # (m,) complex128, index = label
    is_square: bool
    axis_levels: np.ndarray | None     # (L,) ascending, scaled
    axis_bits: np.ndarray | None       # (L,) bit pattern at each level

    @property
    def bits_per_point(self) -> int:
        return int(self.m).bit_length() - 1

    def map_labels(self, labels: np.ndarray) -> np.ndarray:
        return self.points[np.asarray(labels)]


@lru_cache(maxsize=8)
def make_constellation(m: int) -> Constellation:
    if m in (16, 64):
        return _square_qam(m)
    if m == 32:
        return _cross_qam32()
    raise ValueError(f"unsupported constellation size {m}")


def _square_qam(m: int) -> Constellation:
    bps = int(m).bit_length() - 1
    half = bps // 2
    n_lv = 1 << half
    levels = np.arange(-(n_lv - 1), n_lv, 2, dtype=np.float64)
    scale = 1.0 / np.sqrt(2.0 * np.mean(levels**2))
    gray = _gray_order(half)
    points = np.empty(m, dtype=np.complex128)
    for ix in range(n_lv):
        for iy in range(n_lv):
            label = (int(gray[ix]) << half) | int(gray[iy])
            points[label] = scale * (levels[ix] + 1j * levels[iy])
    return Constellation(m, points, True, levels * scale, gray.copy())


def _cross_qam32() -> Constellation:
    """4x8 Gray rectangle with the outer columns folded onto the cross.

    Rectangle labels are Gray along both axes; the fold moves the
    |x| = 7 columns to (sign(x)*|y|, sign(y)*5), which keeps each moved
    point adjacent to most of its former neighbours.  Mean energy is
    640/32 = 20 before scaling, so the unit-energy factor is exact.
    """
    gray_x = _gray_order(3)
    gray_y = _gray_order(2)
    scale = 1.0 / np.sqrt(20.0)
    points = np.empty(32, dtype=np.complex128)
    for ix in range(8):
        for iy in range(4):
            label = (int(gray_x[ix]) << 2) | int(gray_y[iy])
            x = 2 * ix - 7
            y = 2 * iy - 3
            if abs(x) == 7:
                x, y = np.sign(x) * abs(y), np.sign(y) * 5
            points[label] = scale * (x + 1j * y)
    return Constellation(32, points, False, None, None)


def qam_map(bits: np.ndarray, const: Constellation) -> np.ndarray:
    """Pack bits MSB-first into labels and map to complex points."""
    bits = np.asarray(bits, dtype=np.uint8)
    bps = const.bits_per_point
    if len(bits) % bps:
        raise ValueError(f"bit count must be a multiple of {bps}")
    groups = bits.reshape(-1, bps)
    labels = groups @ (1 << np.arange(bps - 1, -1, -1, dtype=np.int64))
    return const.points[labels]


def qam_demap(symbols: np.ndarray, const: Constellation) -> np.ndarray:
    """Hard NN decision to labels, unpacked to bits MSB-first.

    Metric ties resolve to the lowest label so the decision is a pure
    function of the input.
    """
    symbols = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    bps = const.bits_per_point
    labels = np.empty(len(symbols), dtype=np.int64)
    pts = const.points[None, :]
    for lo in range(0, len(symbols), DEMAP_CHUNK):
        chunk = symbols[lo:lo + DEMAP_CHUNK, None]
        d2 = np.abs(chunk - pts) ** 2
        dmin = d2.min(axis=1, keepdims=True)
        labels[lo:lo + DEMAP_CHUNK] = np.argmax(d2 <= dmin + _TIE_EPS, axis=1)
    shifts = np.arange(bps - 1, -1, -1, dtype=np.int64)
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)


# ------------------------------------------------- analytic error rates

def _q_func(x: np.ndarray) -> np.ndarray:
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / np.sqrt(2.0))


@lru_cache(maxsize=4)
def _decision_neighbours(m: int) -> np.ndarray:
    """(m, m) bool: labels whose decision regions share a boundary.

    Points sit on the odd-integer lattice (spacing 2 before scaling),
    so orthogonal neighbours always share an edge, and a diagonal pair
    shares one only when a corner of their square is unoccupied (an
    occupied corner's region separates them).  The pairwise error sum
    over these rivals is the adjacent-boundary union bound: exact in
    the exponent, slightly over unity multiplicity at very low SNR.
    """
    const = make_constellation(m)
    # recover integer lattice coordinates: unit = min positive |re|
    scale = np.min(np.abs(const.points.real)[const.points.real != 0])
    xi = np.round(const.points.real / scale).astype(int)
    yi = np.round(const.points.imag / scale).astype(int)
    occupied = {(int(x), int(y)) for x, y in zip(xi, yi)}
    adj = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            dx, dy = abs(xi[i] - xi[j]), abs(yi[i] - yi[j])
            if dx + dy == 2 and dx * dy == 0:
                adj[i, j] = True
            elif dx == 2 and dy == 2:
                corners = ((xi[i], yi[j]) in occupied,
                           (xi[j], yi[i]) in occupied)
                adj[i, j] = not all(corners)
    return adj


def _axis_bit_errors(const: Constellation, sent_idx: np.ndarray,
                     centers: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Exact expected wrong bits on one axis of a square constellation.

    sent_idx: level index transmitted on this axis; centers: noiseless
    received coordinate on this axis; sigma: per-axis noise std, (N, 1)
    or scalar-broadcastable.  The NN decision regions are the intervals
    between midpoints, so each bit's error probability is a sum of
    Gaussian interval masses.
    """
    levels = const.axis_levels
    n_lv = len(levels)
    mids = (levels[:-1] + levels[1:]) / 2.0
    # upper[i], lower[i]: decision interval of level i
    lower = np.concatenate([[-np.inf], mids])
    upper = np.concatenate([mids, [np.inf]])
    c = centers[:, None]
    mass = _q_func((lower[None, :] - c) / sigma) - \
        _q_func((upper[None, :] - c) / sigma)      # (N, n_lv)
    sent_bits = const.axis_bits[sent_idx]          # (N,)
    dh = np.zeros((len(centers), n_lv))
    for i in range(n_lv):
        diff = sent_bits ^ int(const.axis_bits[i])
        dh[:, i] = np.bitwise_count(diff.astype(np.uint64))
    return (mass * dh).sum(axis=1)


def expected_bit_errors(const: Constellation, labels: np.ndarray,
                        centers: np.ndarray, n0) -> np.ndarray:
    """Expected wrong bits per symbol for AWGN of one-sided density n0.

    `centers` are the noiseless observation points (equal to the ideal
    constellation points when the chain is distortion free); n0 may be
    a scalar or a per-symbol array.  Square grids use the exact
    per-axis interval integrals; the 32-cross uses the pairwise union
    bound over all label pairs.
    """
    labels = np.asarray(labels)
    centers = np.asarray(centers, dtype=np.complex128)
    sigma = np.sqrt(np.broadcast_to(
        np.asarray(n0, dtype=np.float64), centers.shape) / 2.0)[:, None]
    if const.is_square:
        half = const.bits_per_point // 2
        pat_to_idx = np.empty(1 << half, dtype=np.int64)
        pat_to_idx[const.axis_bits] = np.arange(len(const.axis_bits))
        ix = pat_to_idx[labels >> half]
        iy = pat_to_idx[labels & ((1 << half) - 1)]
        return (_axis_bit_errors(const, ix, centers.real, sigma)
                + _axis_bit_errors(const, iy, centers.imag, sigma))
    # pairwise: P(closer to s' than to s) over boundary-sharing rivals
    pts = const.points
    rival = pts[None, :]                            # (1, m)
    sent = pts[labels][:, None]                     # (N, 1)
    d = rival - sent
    dist = np.abs(d)
    with np.errstate(invalid="ignore", divide="ignore"):
        shift = ((centers[:, None] - sent) * d.conj()).real / dist
        arg = (dist / 2.0 - shift) / sigma
    lab_arr = np.arange(const.m, dtype=np.uint64)
    dh = np.bitwise_count(labels[:, None].astype(np.uint64) ^ lab_arr[None, :])
    mask = _decision_neighbours(const.m)[labels]
    probs = np.where(mask, _q_func(np.where(mask, arg, 0.0)), 0.0)
    return (probs * dh).sum(axis=1)


def theoretical_ber(m: int, ebn0_db: float) -> float:
    """Uncoded BER of the Gray-labeled constellation over AWGN."""
    const = make_constellation(m)
    bps = const.bits_per_point
    gamma_b = 10.0 ** (np.asarray(ebn0_db, dtype=np.float64) / 10.0)
    n0 = 1.0 / (bps * gamma_b)      # Es = 1
    labels = np.arange(m)
    errs = expected_bit_errors(const, labels, const.points, float(n0))
    return float(errs.mean() / bps)


# --------------------------------------------------------- OFDM grid

N_FFT = 256
N_DATA = 192
PILOT_LOGICAL = (-88, -63, -38, -13, 13, 38, 63, 88)
N_OCCUPIED = 200

PILOT_LFSR_INIT = 0x7FF


@lru_cache(maxsize=2)
def _grid_arrays() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(occupied logical indices, data slots, pilot slots).

    Slots index into the occupied list, which runs in ascending
    logical order -100..-1, 1..100.
    """
    logical = np.array([k for k in range(-100, 101) if k != 0])
    pilot_slots = np.flatnonzero(np.isin(logical, PILOT_LOGICAL))
    data_slots = np.flatnonzero(~np.isin(logical, PILOT_LOGICAL))
    assert len(logical) == N_OCCUPIED and len(data_slots) == N_DATA
    return logical, data_slots, pilot_slots


def occupied_logical() -> np.ndarray:
    return _grid_arrays()[0].copy()


def data_slots() -> np.ndarray:
    return _grid_arrays()[1].copy()


def pilot_slots() -> np.ndarray:
    return _grid_arrays()[2].copy()


def pilot_bits(n: int, state: int = PILOT_LFSR_INIT) -> tuple[np.ndarray, int]:
    """n outputs of the x^11 + x^9 + 1 pilot LFSR, plus the new state."""
    reg = state & 0x7FF
    if reg == 0:
        raise ValueError("pilot LFSR state must be nonzero")
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        bit = ((reg >> 10) ^ (reg >> 8)) & 1
        out[i] = bit
        reg = ((reg << 1) | bit) & 0x7FF
    return out, reg


def insert_pilots(data: np.ndarray, pilot_state: int = PILOT_LFSR_INIT,
                  pilot_amp: float = 1.0) -> tuple[np.ndarray, int]:
    """Merge (n_sym, 192) data points with per-symbol BPSK pilots.

    All eight pilots of symbol k carry the same value (1 - 2 w_k) where
    w_k is the k-th LFSR output; the state threads across calls so a
    burst sees a continuous sequence.  Returns (n_sym, 200) carriers.
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.complex128))
    n_sym = data.shape[0]
    if data.shape[1] != N_DATA:
        raise ValueError(f"expected {N_DATA} data carriers per symbol")
    _, dslots, pslots = _grid_arrays()
    w, state = pilot_bits(n_sym, pilot_state)
    carriers = np.zeros((n_sym, N_OCCUPIED), dtype=np.complex128)
    carriers[:, dslots] = data
    carriers[:, pslots] = (pilot_amp * (1.0 - 2.0 * w.astype(np.float64)))[:, None]
    return carriers, state


def extract_data(carriers: np.ndarray) -> np.ndarray:
    return np.atleast_2d(carriers)[:, _grid_arrays()[1]]


def extract_pilots(carriers: np.ndarray) -> np.ndarray:
    return np.atleast_2d(carriers)[:, _grid_arrays()[2]]


def samples_per_symbol(cp_ratio: float, oversample: int = 1) -> int:
    n_time = N_FFT * oversample
    n_cp = int(round(cp_ratio * n_time))
    return n_time + n_cp


def ofdm_modulate(carriers: np.ndarray, cp_ratio: float = 1 / 8,
                  oversample: int = 1) -> np.ndarray:
    """(n_sym, 200) occupied carriers to (n_sym, n_time + n_cp) samples.

    oversample > 1 interpolates by zero padding the spectrum; the
    sqrt(n_fft * oversample / n_occupied) factor keeps per-sample
    power independent of both the oversampling rate and the FFT size.
    """
    carriers = np.atleast_2d(np.asarray(carriers, dtype=np.complex128))
    if carriers.shape[1] != N_OCCUPIED:
        raise ValueError(f"expected {N_OCCUPIED} occupied carriers")
    logical, _, _ = _grid_arrays()
    n_time = N_FFT * oversample
    spectrum = np.zeros((carriers.shape[0], n_time), dtype=np.complex128)
    spectrum[:, logical % n_time] = carriers
    body = np.fft.ifft(spectrum, axis=1, norm="ortho")
    body *= np.sqrt(n_time / N_OCCUPIED)
    n_cp = int(round(cp_ratio * n_time))
    return np.concatenate([body[:, n_time - n_cp:], body], axis=1)


def ofdm_demodulate(samples: np.ndarray, cp_ratio: float = 1 / 8,
                    oversample: int = 1) -> np.ndarray:
    """Inverse of ofdm_modulate; returns (n_sym, 200) carriers."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.complex128))
    n_time = N_FFT * oversample
    n_cp = int(round(cp_ratio * n_time))
    if samples.shape[1] != n_time + n_cp:
        raise ValueError("sample block has the wrong length for this CP")
    body = samples[:, n_cp:]
    spectrum = np.fft.fft(body, axis=1, norm="ortho")
    spectrum /= np.sqrt(n_time / N_OCCUPIED)
    logical, _, _ = _grid_arrays()
    return spectrum[:, logical % n_time]
