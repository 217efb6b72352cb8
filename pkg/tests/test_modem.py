"""QAM constellations, analytic BER cores, and the OFDM grid."""
import math
from itertools import combinations

import numpy as np
import pytest
from scipy.special import erfc

from secphy import modem


def q_func(x: float) -> float:
    return 0.5 * erfc(x / math.sqrt(2.0))


def min_distance_pairs(points: np.ndarray):
    d = np.abs(points[:, None] - points[None, :])
    dmin = d[d > 1e-12].min()
    m = len(points)
    return [(a, b) for a, b in combinations(range(m), 2)
            if abs(d[a, b] - dmin) < 1e-9]


@pytest.mark.parametrize("m", [16, 32, 64])
def test_constellation_geometry(m):
    c = modem.make_constellation(m)
    assert c.m == m and len(c.points) == m
    assert c.bits_per_point == int(math.log2(m))
    assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)
    # all points distinct
    assert len({complex(p) for p in np.round(c.points, 12)}) == m


def test_square_grids_are_gray():
    for m in (16, 64):
        c = modem.make_constellation(m)
        for a, b in min_distance_pairs(c.points):
            assert bin(a ^ b).count("1") == 1


def test_cross_is_quasi_gray():
    # folding the 4x8 rectangle into the cross leaves 8 seam pairs at
    # hamming distance 2; everything else is proper Gray
    c = modem.make_constellation(32)
    hams = [bin(a ^ b).count("1") for a, b in min_distance_pairs(c.points)]
    assert len(hams) == 52
    assert max(hams) == 2
    assert sum(1 for h in hams if h == 1) == 44


def test_make_constellation_rejects_unknown_order():
    with pytest.raises(ValueError):
        modem.make_constellation(8)


@pytest.mark.parametrize("m", [16, 32, 64])
def test_map_demap_round_trip(m):
    rng = np.random.default_rng(71)
    c = modem.make_constellation(m)
    bits = rng.integers(0, 2, 240 * c.bits_per_point, dtype=np.uint8)
    sym = modem.qam_map(bits, c)
    assert sym.shape == (240,)
    assert np.array_equal(modem.qam_demap(sym, c), bits)
    # msb-first label convention: mapping each label's bits hits points[label]
    bps = c.bits_per_point
    labels = np.arange(m)
    lb = ((labels[:, None] >> np.arange(bps - 1, -1, -1)) & 1).astype(np.uint8)
    assert np.array_equal(modem.qam_map(lb.reshape(-1), c), c.points)
    assert np.array_equal(c.map_labels(labels), c.points)


def test_map_rejects_ragged_bits():
    c = modem.make_constellation(16)
    with pytest.raises(ValueError):
        modem.qam_map(np.zeros(10, dtype=np.uint8), c)


def test_demap_noisy_points_stay_nearest():
    rng = np.random.default_rng(72)
    c = modem.make_constellation(32)
    bits = rng.integers(0, 2, 200 * 5, dtype=np.uint8)
    sym = modem.qam_map(bits, c)
    jit = sym + 0.01 * (rng.standard_normal(200) + 1j * rng.standard_normal(200))
    assert np.array_equal(modem.qam_demap(jit, c), bits)


def test_demap_tie_is_deterministic():
    c = modem.make_constellation(16)
    mid = (c.points[0] + c.points[1]) / 2.0
    a = modem.qam_demap(np.array([mid] * 3), c)
    b = modem.qam_demap(np.array([mid] * 3), c)
    assert np.array_equal(a, b)
    assert np.array_equal(a[:4], a[4:8])


def closed_form_16qam(gamma_b_db: float) -> float:
    # exact Gray-labeled 16-QAM bit error rate over AWGN
    gb = 10.0 ** (gamma_b_db / 10.0)
    a = math.sqrt(4.0 * gb / 5.0)
    return 0.75 * q_func(a) + 0.5 * q_func(3 * a) - 0.25 * q_func(5 * a)


def test_theoretical_16qam_matches_closed_form():
    for g in (0.0, 4.0, 8.0, 10.0, 12.0, 16.0):
        assert modem.theoretical_ber(16, g) == pytest.approx(
            closed_form_16qam(g), rel=1e-12)


def test_theoretical_anchor_values():
    assert modem.theoretical_ber(16, 8.0) == pytest.approx(9.247214e-3, rel=1e-5)
    assert modem.theoretical_ber(16, 10.0) == pytest.approx(1.754151e-3, rel=1e-5)
    assert modem.theoretical_ber(16, 12.0) == pytest.approx(1.386587e-4, rel=1e-5)
    assert modem.theoretical_ber(32, 10.0) == pytest.approx(9.544380e-3, rel=1e-4)
    assert modem.theoretical_ber(64, 14.0) == pytest.approx(2.154004e-3, rel=1e-4)


def test_theoretical_ordering_and_monotonicity():
    sweep = np.arange(0.0, 22.0, 2.0)
    prev = {m: 1.0 for m in (16, 32, 64)}
    for g in sweep:
        bers = {m: modem.theoretical_ber(m, float(g)) for m in (16, 32, 64)}
        assert bers[64] > bers[32] > bers[16]
        for m in bers:
            assert bers[m] < prev[m]
            prev[m] = bers[m]


def test_expected_bit_errors_distortionless():
    # fed the ideal points, the per-symbol expectation averages to the
    # closed-form curve; vanishing noise sends it to zero
    c = modem.make_constellation(16)
    labels = np.tile(np.arange(16), 12)
    centers = c.points[labels]
    gb = 10.0 ** (9.0 / 10.0)
    errs = modem.expected_bit_errors(c, labels, centers, 1.0 / (4 * gb))
    assert errs.mean() / 4 == pytest.approx(modem.theoretical_ber(16, 9.0),
                                            rel=1e-12)
    tiny = modem.expected_bit_errors(c, labels, centers, 1e-12)
    assert tiny.max() < 1e-15


def test_grid_constants():
    logical = modem.occupied_logical()
    assert logical.size == modem.N_OCCUPIED == 200
    assert modem.N_FFT == 256 and modem.N_DATA == 192
    assert 0 not in logical
    assert logical.min() == -100 and logical.max() == 100
    assert modem.data_slots().size == 192
    assert modem.pilot_slots().size == 8
    assert set(logical[modem.pilot_slots()]) == set(modem.PILOT_LOGICAL)


def test_pilot_lfsr():
    w, state = modem.pilot_bits(12)
    assert w.tolist() == [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0]
    assert state == 0x6
    # independent recurrence: fibonacci x^11 + x^9 + 1
    reg = modem.PILOT_LFSR_INIT
    ref = []
    for _ in range(40):
        bit = ((reg >> 10) ^ (reg >> 8)) & 1
        ref.append(bit)
        reg = ((reg << 1) | bit) & 0x7FF
    w40, _ = modem.pilot_bits(40)
    assert w40.tolist() == ref
    # state threads across calls
    w1, s1 = modem.pilot_bits(7)
    w2, s2 = modem.pilot_bits(33, s1)
    assert np.concatenate([w1, w2]).tolist() == ref and s2 == _
    # maximal length sequence: period 2047
    seq, _ = modem.pilot_bits(2 * 2047)
    assert np.array_equal(seq[:2047], seq[2047:])
    assert seq[:2047].sum() == 1024
    with pytest.raises(ValueError):
        modem.pilot_bits(4, 0)


def test_insert_and_extract_pilots():
    rng = np.random.default_rng(73)
    data = (rng.standard_normal((5, 192)) + 1j * rng.standard_normal((5, 192)))
    carriers, state = modem.insert_pilots(data, pilot_amp=0.5)
    assert carriers.shape == (5, 200)
    assert np.array_equal(modem.extract_data(carriers), data)
    pil = modem.extract_pilots(carriers)
    w, state2 = modem.pilot_bits(5)
    assert state == state2
    expect = 0.5 * (1.0 - 2.0 * w.astype(float))
    assert np.allclose(pil, expect[:, None])
    with pytest.raises(ValueError):
        modem.insert_pilots(data[:, :100])


def test_samples_per_symbol():
    assert modem.samples_per_symbol(1 / 4) == 320
    assert modem.samples_per_symbol(1 / 8) == 288
    assert modem.samples_per_symbol(1 / 16) == 272
    assert modem.samples_per_symbol(1 / 32) == 264
    assert modem.samples_per_symbol(1 / 8, oversample=2) == 576


@pytest.mark.parametrize("cp", [1 / 4, 1 / 8, 1 / 32])
def test_ofdm_round_trip(cp):
    rng = np.random.default_rng(74)
    data = (rng.standard_normal((4, 192)) + 1j * rng.standard_normal((4, 192)))
    data /= np.sqrt(2.0)
    carriers, _ = modem.insert_pilots(data)
    tx = modem.ofdm_modulate(carriers, cp_ratio=cp)
    assert tx.shape == (4, modem.samples_per_symbol(cp))
    back = modem.ofdm_demodulate(tx, cp_ratio=cp)
    assert np.allclose(back, carriers, atol=1e-12)
    # the prefix really is the symbol tail
    n_cp = tx.shape[1] - 256
    assert np.allclose(tx[:, :n_cp], tx[:, -n_cp:])


def test_ofdm_unit_power():
    # 200 occupied carriers at unit magnitude give unit mean sample power
    rng = np.random.default_rng(75)
    phases = np.exp(2j * np.pi * rng.random((20, 200)))
    tx = modem.ofdm_modulate(phases, cp_ratio=0.0)
    assert np.mean(np.abs(tx) ** 2) == pytest.approx(1.0, rel=1e-12)
    tx_cp = modem.ofdm_modulate(phases, cp_ratio=1 / 8)
    assert np.mean(np.abs(tx_cp) ** 2) == pytest.approx(1.0, rel=1e-3)


def test_ofdm_oversampling():
    rng = np.random.default_rng(76)
    data = (rng.standard_normal((2, 192)) + 1j * rng.standard_normal((2, 192)))
    carriers, _ = modem.insert_pilots(data)
    tx = modem.ofdm_modulate(carriers, cp_ratio=1 / 8, oversample=2)
    assert tx.shape == (2, 576)
    back = modem.ofdm_demodulate(tx, cp_ratio=1 / 8, oversample=2)
    assert np.allclose(back, carriers, atol=1e-12)
    # Parseval: body power is oversampling-independent (exact without CP,
    # approximate with one, whose samples land between the 1x grid points)
    p1 = np.mean(np.abs(modem.ofdm_modulate(carriers, 0.0)) ** 2)
    p2 = np.mean(np.abs(modem.ofdm_modulate(carriers, 0.0, oversample=2)) ** 2)
    assert p2 == pytest.approx(p1, rel=1e-12)
    assert np.mean(np.abs(tx) ** 2) == pytest.approx(
        np.mean(np.abs(modem.ofdm_modulate(carriers, 1 / 8)) ** 2), rel=1e-3)


def test_all_zero_carriers_silent():
    tx = modem.ofdm_modulate(np.zeros((1, 200)), cp_ratio=1 / 4)
    assert np.abs(tx).max() == 0.0
