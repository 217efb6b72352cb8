"""2x1 space-time block coding across OFDM symbol pairs.

The transmitter maps symbol pairs (A, B) onto two antennas and two
consecutive OFDM symbols per subcarrier:

    slot 1:  ant1 = A/sqrt(2)      ant2 = B/sqrt(2)
    slot 2:  ant1 = -B*/sqrt(2)    ant2 = A*/sqrt(2)

The 1/sqrt(2) keeps total transmit power equal to the single-antenna
chain.  A known preamble symbol splits the 200 occupied carriers
between the antennas (even list positions on antenna 1, odd on
antenna 2, unit amplitude) so the receiver can estimate both links
from one symbol with the same per-symbol power as the payload.  The
combiner output is normalized so decision points sit on the reference
constellation regardless of the channel gain, with noise scaled by
2/(|h1|^2 + |h2|^2) per carrier.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from secphy import modem

PREAMBLE_SEED = 0x5A5
_DENOM_FLOOR = 1e-12


def stbc_encode(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(n_sym, 192) data symbols -> per-antenna (n_sym, 192) arrays.

    Symbols pair up across consecutive rows; n_sym must be even.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    n_sym = points.shape[0]
    if n_sym % 2:
        raise ValueError("STBC needs an even number of OFDM symbols")
    a = points[0::2]
    b = points[1::2]
    ant1 = np.empty_like(points)
    ant2 = np.empty_like(points)
    ant1[0::2] = a
    ant1[1::2] = -b.conj()
    ant2[0::2] = b
    ant2[1::2] = a.conj()
    return ant1 / np.sqrt(2.0), ant2 / np.sqrt(2.0)


def preamble_reference() -> np.ndarray:
    """Fixed BPSK reference over the 200 occupied carriers."""
    bits, _ = modem.pilot_bits(modem.N_OCCUPIED, PREAMBLE_SEED)
    return 1.0 - 2.0 * bits.astype(np.float64)


def build_preamble(miso: bool) -> tuple[np.ndarray, np.ndarray | None]:
    """Occupied-carrier rows (1, 200) for each antenna.

    MISO: antenna 1 fills the even occupied positions, antenna 2 the
    odd ones, both at unit amplitude, so each antenna radiates half
    the carriers and the summed symbol power matches a data symbol.
    SISO: one antenna, all 200 positions.
    """
    ref = preamble_reference()
    if not miso:
        return ref[None, :].astype(np.complex128), None
    ant1 = np.zeros((1, modem.N_OCCUPIED), dtype=np.complex128)
    ant2 = np.zeros((1, modem.N_OCCUPIED), dtype=np.complex128)
    ant1[0, 0::2] = ref[0::2]
    ant2[0, 1::2] = ref[1::2]
    return ant1, ant2


@dataclass(frozen=True)
class ChannelEstimate:
    """Per-data-carrier link gains; h2 is None on the SISO path."""

    h1: np.ndarray
    h2: np.ndarray | None

    @property
    def miso(self) -> bool:
        return self.h2 is not None


def _interp_occupied(values: np.ndarray, known_slots: np.ndarray) -> np.ndarray:
    """Linearly interpolate carrier estimates to all occupied slots.

    Interpolation runs on the occupied-position index (edge values
    hold beyond the first/last known slot).
    """
    x = np.arange(modem.N_OCCUPIED)
    re = np.interp(x, known_slots, values.real)
    im = np.interp(x, known_slots, values.imag)
    return re + 1j * im


def estimate_channel(rx_preamble: np.ndarray, miso: bool,
                     flat: bool = False) -> ChannelEstimate:
    """Least-squares link estimates from one received preamble symbol.

    flat=True collapses each link to the mean of its carrier
    estimates, which suppresses estimation noise by the carrier count
    when the true response is frequency flat.
    """
    rx = np.asarray(rx_preamble, dtype=np.complex128).reshape(-1)
    if rx.shape[0] != modem.N_OCCUPIED:
        raise ValueError(f"expected {modem.N_OCCUPIED} occupied carriers")
    ref = preamble_reference()
    dslots = modem.data_slots()
    if not miso:
        raw = rx / ref
        if flat:
            h1 = np.full(modem.N_DATA, raw.mean())
        else:
            h1 = _interp_occupied(raw, np.arange(modem.N_OCCUPIED))[dslots]
        return ChannelEstimate(h1=h1, h2=None)
    even = np.arange(0, modem.N_OCCUPIED, 2)
    odd = np.arange(1, modem.N_OCCUPIED, 2)
    raw1 = rx[even] / ref[even]
    raw2 = rx[odd] / ref[odd]
    if flat:
        h1 = np.full(modem.N_DATA, raw1.mean())
        h2 = np.full(modem.N_DATA, raw2.mean())
    else:
        h1 = _interp_occupied(raw1, even)[dslots]
        h2 = _interp_occupied(raw2, odd)[dslots]
    return ChannelEstimate(h1=h1, h2=h2)


def stbc_combine(r1: np.ndarray, r2: np.ndarray,
                 est: ChannelEstimate) -> tuple[np.ndarray, np.ndarray]:
    """Combine one received slot pair into the two symbol estimates.

    s1 = sqrt(2) (h1* r1 + h2 r2*) / (|h1|^2 + |h2|^2), similarly s2;
    the sqrt(2) undoes the transmit power split so outputs land on the
    reference constellation.  Carriers where both link estimates
    vanish produce zeros (a detectable erasure, decided as label 0).
    """
    if not est.miso:
        raise ValueError("stbc_combine needs a two-link estimate")
    h1, h2 = est.h1, est.h2
    den = np.abs(h1) ** 2 + np.abs(h2) ** 2
    safe = np.where(den < _DENOM_FLOOR, 1.0, den)
    s1 = np.sqrt(2.0) * (h1.conj() * r1 + h2 * r2.conj()) / safe
    s2 = np.sqrt(2.0) * (h2.conj() * r1 - h1 * r2.conj()) / safe
    dead = den < _DENOM_FLOOR
    if dead.any():
        s1 = np.where(dead, 0.0, s1)
        s2 = np.where(dead, 0.0, s2)
    return s1, s2


def siso_equalize(r: np.ndarray, est: ChannelEstimate) -> np.ndarray:
    """Single-link zero-forcing: r / h1, erasing dead carriers."""
    h = est.h1
    den = np.abs(h) ** 2
    safe = np.where(den < _DENOM_FLOOR, 1.0, den)
    out = h.conj() * r / safe
    return np.where(den < _DENOM_FLOOR, 0.0, out)


def combine_burst(rx_data: np.ndarray,
                  est: ChannelEstimate) -> np.ndarray:
    """Equalize a whole burst of (n_sym, 192) data-carrier rows.

    MISO rows combine pairwise in transmit order; SISO rows equalize
    independently.  Output rows align with the transmitted symbols.
    """
    rx_data = np.atleast_2d(np.asarray(rx_data, dtype=np.complex128))
    if not est.miso:
        return siso_equalize(rx_data, ChannelEstimate(est.h1[None, :], None))
    if rx_data.shape[0] % 2:
        raise ValueError("MISO burst needs an even number of symbols")
    out = np.empty_like(rx_data)
    for i in range(0, rx_data.shape[0], 2):
        s1, s2 = stbc_combine(rx_data[i], rx_data[i + 1], est)
        out[i] = s1
        out[i + 1] = s2
    return out


def combined_noise_gain(est: ChannelEstimate) -> np.ndarray:
    """Per-carrier noise variance multiplier after equalization.

    The combiner scales carrier noise by 2/(|h1|^2+|h2|^2) (MISO) or
    1/|h1|^2 (SISO); dead carriers report inf.
    """
    if est.miso:
        den = np.abs(est.h1) ** 2 + np.abs(est.h2) ** 2
        num = 2.0
    else:
        den = np.abs(est.h1) ** 2
        num = 1.0
    with np.errstate(divide="ignore"):
        return np.where(den < _DENOM_FLOOR, np.inf, num / den)
