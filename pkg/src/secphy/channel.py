"""MISO fading channels and receiver noise.

Profiles describe per-link tapped delay lines; both links of the 2x1
setup share one profile and draw independent realizations.  Tap mean
powers sum to one so fading preserves average signal power, and noise
levels derive from the quoted Es/N0 against the measured (or nominal)
transmit sample energy.  All randomness flows through explicitly
seeded generators; Gaussian variates come from the Box-Muller map so
the draw count per realization is fixed.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# fixed sub-stream labels for deriving independent generators
STREAM_DATA = 1
STREAM_CHANNEL = 2
STREAM_NOISE = 3
STREAM_IV = 4


@dataclass(frozen=True)
class Tap:
    delay: int            # samples
    power: float          # linear mean power
    kind: str = "rayleigh"

    def __post_init__(self):
        if self.kind not in ("fixed", "rayleigh"):
            raise ValueError(f"unknown tap kind {self.kind!r}")
        if self.delay < 0 or self.power <= 0:
            raise ValueError("taps need delay >= 0 and power > 0")


@dataclass(frozen=True)
class ChannelProfile:
    """Tapped delay line, quasi-static over `coherence` OFDM symbols."""

    name: str
    taps: tuple[Tap, ...]
    coherence: int = 2

    def __post_init__(self):
        total = sum(t.power for t in self.taps)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"tap powers must sum to 1, got {total}")
        if self.coherence < 1:
            raise ValueError("coherence must be at least one symbol")

    @property
    def max_delay(self) -> int:
        return max(t.delay for t in self.taps)

    @property
    def is_static(self) -> bool:
        return all(t.kind == "fixed" for t in self.taps)

    def check_cp(self, cp_samples: int) -> None:
        if self.max_delay >= cp_samples:
            warnings.warn(
                f"channel delay spread {self.max_delay} samples reaches "
                f"beyond the {cp_samples}-sample cyclic prefix; expect "
                "inter-symbol interference", stacklevel=2)


def nonfading() -> ChannelProfile:
    return ChannelProfile("nonfading", (Tap(0, 1.0, "fixed"),), coherence=1)


def flat_rayleigh(coherence: int = 2) -> ChannelProfile:
    return ChannelProfile("flat", (Tap(0, 1.0, "rayleigh"),), coherence)


def dispersive(coherence: int = 2) -> ChannelProfile:
    """Three Rayleigh taps at {0, 2, 5} samples, {0, -3, -6} dB."""
    raw = [(0, 1.0), (2, 10.0 ** -0.3), (5, 10.0 ** -0.6)]
    total = sum(p for _, p in raw)
    taps = tuple(Tap(d, p / total, "rayleigh") for d, p in raw)
    return ChannelProfile("dispersive", taps, coherence)


PROFILE_BUILDERS = {
    "nonfading": nonfading,
    "flat": flat_rayleigh,
    "dispersive": dispersive,
}


def make_profile(name: str) -> ChannelProfile:
    try:
        return PROFILE_BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown channel profile {name!r}") from None


def derive_rng(master_seed: int, *labels: int) -> np.random.Generator:
    """Independent generator for (seed, stream label, indices...)."""
    return np.random.default_rng(
        np.random.SeedSequence((int(master_seed), *map(int, labels))))


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """CN(0, 1) variates via the Box-Muller map (unit total variance)."""
    u1 = rng.random(size)
    u2 = rng.random(size)
    return np.sqrt(-np.log1p(-u1)) * np.exp(2j * np.pi * u2)


def draw_realization(profile: ChannelProfile, rng: np.random.Generator,
                     n_links: int = 1) -> np.ndarray:
    """(n_links, n_taps) complex gains, one quasi-static realization."""
    n_taps = len(profile.taps)
    amps = np.sqrt(np.array([t.power for t in profile.taps]))
    gains = np.empty((n_links, n_taps), dtype=np.complex128)
    fade = complex_normal(rng, (n_links, n_taps))
    for j, tap in enumerate(profile.taps):
        if tap.kind == "fixed":
            gains[:, j] = amps[j]
        else:
            gains[:, j] = amps[j] * fade[:, j]
    return gains


def tap_frequency_response(gains: np.ndarray, profile: ChannelProfile,
                           bins: np.ndarray, n_fft: int) -> np.ndarray:
    """Per-carrier response H[link, carrier] of a drawn realization."""
    gains = np.atleast_2d(gains)
    delays = np.array([t.delay for t in profile.taps])
    phase = np.exp(-2j * np.pi * np.outer(delays, np.asarray(bins) / n_fft))
    return gains @ phase


def apply_realization(streams: np.ndarray, profile: ChannelProfile,
                      gains: np.ndarray) -> np.ndarray:
    """Run (n_links, n) samples through fixed per-link delay lines.

    Output keeps the input length: the convolution tail is dropped,
    matching a receiver that stops sampling with the burst.
    """
    streams = np.atleast_2d(np.asarray(streams, dtype=np.complex128))
    gains = np.atleast_2d(gains)
    if gains.shape[0] != streams.shape[0]:
        raise ValueError("one gain row per antenna stream required")
    n = streams.shape[1]
    out = np.zeros(n, dtype=np.complex128)
    for link in range(streams.shape[0]):
        for j, tap in enumerate(profile.taps):
            g = gains[link, j]
            if tap.delay == 0:
                out += g * streams[link]
            elif tap.delay < n:
                out[tap.delay:] += g * streams[link, :-tap.delay]
    return out


def apply_fading(streams: np.ndarray, profile: ChannelProfile,
                 rng: np.random.Generator,
                 samples_per_symbol: int = 0) -> np.ndarray:
    """Sum of per-link faded streams at the single receiver.

    samples_per_symbol > 0 redraws the realization every
    profile.coherence OFDM symbols (block fading); 0 holds a single
    realization for the whole input.
    """
    streams = np.atleast_2d(np.asarray(streams, dtype=np.complex128))
    if streams.ndim != 2:
        raise ValueError("streams must be (n_links, n_samples)")
    n_links, n = streams.shape
    block = profile.coherence * samples_per_symbol if samples_per_symbol else n
    if block <= 0:
        raise ValueError("samples_per_symbol must be positive")
    out = np.empty(n, dtype=np.complex128)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        gains = draw_realization(profile, rng, n_links)
        seg = np.zeros(hi - lo, dtype=np.complex128)
        for link in range(n_links):
            for j, tap in enumerate(profile.taps):
                g = gains[link, j]
                if hi <= tap.delay:
                    continue
                take = streams[link, max(lo - tap.delay, 0):hi - tap.delay]
                seg[hi - lo - len(take):] += g * take
        out[lo:hi] = seg
    return out


def add_awgn(samples: np.ndarray, esn0_db: float | None,
             rng: np.random.Generator,
             measured_es: float = 1.0) -> np.ndarray:
    """Circular complex Gaussian noise at the quoted Es/N0.

    N0 = measured_es / 10^(esn0/10), split equally across I and Q.
    esn0_db of None or +inf returns the input unchanged.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if esn0_db is None or np.isinf(esn0_db):
        return samples
    n0 = measured_es / 10.0 ** (esn0_db / 10.0)
    return samples + np.sqrt(n0) * complex_normal(rng, samples.shape)


def ebn0_to_esn0(ebn0_db: float, bits_per_point: int, code_rate: float = 1.0,
                 cp_ratio: float = 0.0,
                 charge_cp_overhead: bool = True) -> float:
    """Es/N0 = Eb/N0 + 10 log10(bpp * R * 192/256 * 1/(1+G)).

    Es counts energy per transmitted time sample; the 192/256 factor
    spreads the data-carrier energy over the whole FFT interval and
    1/(1+G) charges the cyclic prefix.  charge_cp_overhead=False drops
    the CP term for bookkeeping that quotes Eb/N0 at the detector.
    """
    factor = bits_per_point * code_rate * (192.0 / 256.0)
    if charge_cp_overhead:
        factor /= 1.0 + cp_ratio
    return float(ebn0_db + 10.0 * np.log10(factor))
