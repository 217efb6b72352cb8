"""Alamouti encoding, preamble channel estimation, diversity combining."""
import numpy as np
import pytest

from secphy import channel, modem, stbc


def rand_points(rng, n_sym):
    z = rng.standard_normal((n_sym, 192)) + 1j * rng.standard_normal((n_sym, 192))
    return z / np.sqrt(2.0)


def test_encode_structure_and_power():
    rng = np.random.default_rng(81)
    pts = rand_points(rng, 6)
    ant1, ant2 = stbc.stbc_encode(pts)
    r = np.sqrt(2.0)
    assert np.allclose(ant1[0::2] * r, pts[0::2])
    assert np.allclose(ant1[1::2] * r, -pts[1::2].conj())
    assert np.allclose(ant2[0::2] * r, pts[1::2])
    assert np.allclose(ant2[1::2] * r, pts[0::2].conj())
    # the transmit split preserves total power slot by slot as a pair
    total = np.abs(ant1) ** 2 + np.abs(ant2) ** 2
    pair_power = total[0::2] + total[1::2]
    ref = np.abs(pts[0::2]) ** 2 + np.abs(pts[1::2]) ** 2
    assert np.allclose(pair_power, ref)
    with pytest.raises(ValueError):
        stbc.stbc_encode(pts[:3])


def test_preamble_layout():
    ref = stbc.preamble_reference()
    assert ref.shape == (200,)
    assert set(np.unique(ref)) == {-1.0, 1.0}
    siso, none = stbc.build_preamble(miso=False)
    assert none is None
    assert np.array_equal(siso[0], ref)
    a1, a2 = stbc.build_preamble(miso=True)
    # orthogonal comb at unit amplitude, joint power of a data symbol
    assert (np.abs(a1[0, 0::2]) == 1.0).all() and (a1[0, 1::2] == 0).all()
    assert (np.abs(a2[0, 1::2]) == 1.0).all() and (a2[0, 0::2] == 0).all()
    assert np.abs(a1) ** 2 @ np.ones(200) + np.abs(a2) ** 2 @ np.ones(200) == 200
    assert np.array_equal(a1[0] + a2[0], ref.astype(np.complex128))


def test_estimate_flat_channels_exactly():
    rng = np.random.default_rng(82)
    h1, h2 = 0.8 - 0.3j, -0.2 + 1.1j
    a1, a2 = stbc.build_preamble(miso=True)
    rx = h1 * a1[0] + h2 * a2[0]
    est = stbc.estimate_channel(rx, miso=True, flat=True)
    assert est.miso
    assert np.allclose(est.h1, h1, atol=1e-12)
    assert np.allclose(est.h2, h2, atol=1e-12)
    siso, _ = stbc.build_preamble(miso=False)
    est1 = stbc.estimate_channel(0.7j * siso[0], miso=False, flat=True)
    assert not est1.miso
    assert np.allclose(est1.h1, 0.7j, atol=1e-12)
    with pytest.raises(ValueError):
        stbc.estimate_channel(rx[:100], miso=True)


def test_estimate_dispersive_channel_interpolates():
    prof = channel.make_profile("dispersive")
    rng = channel.derive_rng(9, channel.STREAM_CHANNEL)
    gains = channel.draw_realization(prof, rng, n_links=2)
    bins = modem.occupied_logical() % modem.N_FFT
    h = channel.tap_frequency_response(gains, prof, bins, modem.N_FFT)
    a1, a2 = stbc.build_preamble(miso=True)
    rx = h[0] * a1[0] + h[1] * a2[0]
    est = stbc.estimate_channel(rx, miso=True, flat=False)
    dslots = modem.data_slots()
    # interpolation across the comb tracks the true response closely in
    # the interior; the outermost carriers extrapolate (held edge value)
    err1 = np.abs(est.h1 - h[0][dslots])
    err2 = np.abs(est.h2 - h[1][dslots])
    assert err1[2:-2].max() < 0.05 and err2[2:-2].max() < 0.05
    assert err1.max() < 0.1 and err2.max() < 0.1
    assert np.median(err1) < 0.01 and np.median(err2) < 0.01


def test_combine_burst_inverts_known_channel():
    rng = np.random.default_rng(83)
    pts = rand_points(rng, 8)
    ant1, ant2 = stbc.stbc_encode(pts)
    h1 = (rng.standard_normal(192) + 1j * rng.standard_normal(192)) / np.sqrt(2)
    h2 = (rng.standard_normal(192) + 1j * rng.standard_normal(192)) / np.sqrt(2)
    rx = h1 * ant1 + h2 * ant2
    est = stbc.ChannelEstimate(h1=h1, h2=h2)
    out = stbc.combine_burst(rx, est)
    assert np.allclose(out, pts, atol=1e-10)
    with pytest.raises(ValueError):
        stbc.combine_burst(rx[:3], est)
    with pytest.raises(ValueError):
        stbc.stbc_combine(rx[0], rx[1], stbc.ChannelEstimate(h1=h1, h2=None))


def test_siso_equalize_inverts_known_channel():
    rng = np.random.default_rng(84)
    pts = rand_points(rng, 4)
    h = rng.standard_normal(192) + 1j * rng.standard_normal(192)
    est = stbc.ChannelEstimate(h1=h, h2=None)
    out = stbc.combine_burst(h * pts, est)
    assert np.allclose(out, pts, atol=1e-10)


def test_dead_carriers_erase_not_blow_up():
    rng = np.random.default_rng(85)
    pts = rand_points(rng, 2)
    h1 = np.ones(192, dtype=np.complex128)
    h2 = np.ones(192, dtype=np.complex128)
    h1[[5, 50]] = 0.0
    h2[[5, 50]] = 0.0
    ant1, ant2 = stbc.stbc_encode(pts)
    out = stbc.combine_burst(h1 * ant1 + h2 * ant2, stbc.ChannelEstimate(h1, h2))
    assert np.isfinite(out).all()
    assert (out[:, [5, 50]] == 0).all()
    gain = stbc.combined_noise_gain(stbc.ChannelEstimate(h1, h2))
    assert np.isinf(gain[5]) and np.isinf(gain[50])
    assert gain[0] == pytest.approx(1.0)        # 2 / (1 + 1)


def test_combined_noise_gain_formulas():
    rng = np.random.default_rng(86)
    h1 = rng.standard_normal(192) + 1j * rng.standard_normal(192)
    h2 = rng.standard_normal(192) + 1j * rng.standard_normal(192)
    miso = stbc.combined_noise_gain(stbc.ChannelEstimate(h1, h2))
    assert np.allclose(miso, 2.0 / (np.abs(h1) ** 2 + np.abs(h2) ** 2))
    siso = stbc.combined_noise_gain(stbc.ChannelEstimate(h1, None))
    assert np.allclose(siso, 1.0 / np.abs(h1) ** 2)


def test_combiner_noise_statistics():
    # equalized noise variance tracks combined_noise_gain * n0
    rng = np.random.default_rng(87)
    n_sym = 4000
    pts = np.zeros((n_sym, 192), dtype=np.complex128)
    ant1, ant2 = stbc.stbc_encode(pts)
    h1 = np.full(192, 1.2 + 0.5j)
    h2 = np.full(192, -0.4 + 0.9j)
    n0 = 0.02
    noise = np.sqrt(n0 / 2) * (rng.standard_normal((n_sym, 192))
                               + 1j * rng.standard_normal((n_sym, 192)))
    est = stbc.ChannelEstimate(h1=h1, h2=h2)
    out = stbc.combine_burst(h1 * ant1 + h2 * ant2 + noise, est)
    var = np.mean(np.abs(out) ** 2)
    gain = stbc.combined_noise_gain(est)[0]
    assert var == pytest.approx(n0 * gain, rel=0.05)
