"""BER measurement engines over the secured OFDM chain.

Three engines share one `SimConfig`.  `theoretical` evaluates the
closed-form uncoded QAM expression.  `semianalytic` pushes one
noiseless burst through the real distortion path (mapper, space-time
encoder, OFDM, a frozen channel realization, estimator, combiner) and
integrates the analytic symbol error probability at every received
point for each sweep value.  `montecarlo` counts errors through the
complete transceiver, including the optional encrypted and
authenticated framing, and stops per point on an error or bit budget.

Energy bookkeeping: transmitted samples average unit power (pilots
carry the same per-carrier power as data, split across antennas when
space-time coding is on).  Data occupies 192 of the 200 loaded
carriers, so the AWGN stage is driven with measured_es = 0.96 and the
quoted Eb/N0 refers to detected (post-FFT) energy per modulated bit.
Neither the cyclic prefix (dropped before detection) nor the code rate
is charged against Eb: coded and uncoded curves share one channel
quality axis, and detected-SNR bookkeeping keeps Monte Carlo, the
semianalytic integrals and the closed forms on identical footing.

Reproducibility: every random decision derives from (seed, stream
label, sweep index, worker index) so a config + seed pair yields
byte-identical CSV output.  Splitting a point over workers preserves
the expected totals but reshuffles which frames see which noise, so
worker count is part of the effective configuration.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from secphy import channel, fec, modem, secmac, stbc
from secphy.rs import DecodeFailure

MEASURED_ES = modem.N_DATA / modem.N_OCCUPIED    # data share of sample energy

MODES = ("theoretical", "semianalytic", "montecarlo")

CSV_HEADER = "mode,ebn0_db,bits,bit_errors,ber,frames,frame_errors,auth_failures"


class ConfigError(ValueError):
    """Rejected simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    """One BER experiment: engine, chain shape, sweep, budgets, keys.

    profile selects a coded burst profile by rate_id; None runs the
    uncoded QAM bypass at `modulation`.  The sweep is interpreted per
    snr_mode: "ebn0" (default, converted per point to Es/N0 at the
    detector) or "esn0" (raw, montecarlo only).  max_frames caps the
    frame count regardless of the error/bit budgets, which is how
    fixed-frame-count security runs are expressed.
    """

    mode: str = "montecarlo"
    profile: int | None = None
    modulation: int = 16
    channel: str = "nonfading"
    ebn0_sweep: tuple[float, ...] = (0.0,)
    seed: int = 1
    max_bits: int = 10_000_000
    min_bit_errors: int = 100
    security: bool = False
    enc_key: bytes | None = None
    mac_key: bytes | None = None
    mac_bits: int = secmac.DEFAULT_TAG_BITS
    stbc: bool = False
    cp_ratio: float = 1 / 8
    snr_mode: str = "ebn0"
    tamper: bool = False
    n_symbol_pairs: int = 4
    max_frames: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, not {self.mode!r}")
        sweep = tuple(float(v) for v in self.ebn0_sweep)
        if not sweep:
            raise ConfigError("ebn0_sweep must be nonempty")
        if any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ConfigError("ebn0_sweep must be strictly increasing")
        object.__setattr__(self, "ebn0_sweep", sweep)
        if self.seed < 1:
            raise ConfigError("seed must be a positive integer")
        if self.max_bits < 10_000:
            raise ConfigError("max_bits must be at least 10^4")
        if self.min_bit_errors < 1:
            raise ConfigError("min_bit_errors must be positive")
        if self.profile is not None and self.profile not in fec.PROFILES:
            raise ConfigError(f"unknown profile {self.profile}; "
                              f"valid ids: {sorted(fec.PROFILES)}")
        if self.profile is None and self.modulation not in (16, 32, 64):
            raise ConfigError("modulation must be 16, 32 or 64")
        if self.channel not in channel.PROFILE_BUILDERS:
            raise ConfigError(f"unknown channel {self.channel!r}; valid: "
                              f"{sorted(channel.PROFILE_BUILDERS)}")
        if self.snr_mode not in ("ebn0", "esn0"):
            raise ConfigError("snr_mode must be 'ebn0' or 'esn0'")
        if not 0.0 <= self.cp_ratio < 1.0:
            raise ConfigError("cp_ratio must lie in [0, 1)")
        if self.n_symbol_pairs < 1:
            raise ConfigError("need at least one data symbol pair")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.max_frames is not None and self.max_frames < 1:
            raise ConfigError("max_frames must be positive when set")
        if self.tamper and not self.security:
            raise ConfigError("tamper injection requires security on")
        if self.security:
            if self.profile is None:
                raise ConfigError("security rides the coded chain; "
                                  "select a burst profile")
            for name, key in (("enc_key", self.enc_key),
                              ("mac_key", self.mac_key)):
                if not isinstance(key, bytes) or len(key) != 8:
                    raise ConfigError(f"{name} must be 8 bytes")
            if self.enc_key == self.mac_key:
                raise ConfigError("enc_key and mac_key must differ")
            if not secmac.MIN_TAG_BITS <= self.mac_bits <= secmac.MAX_TAG_BITS:
                raise ConfigError(
                    f"mac_bits must lie in [{secmac.MIN_TAG_BITS}, "
                    f"{secmac.MAX_TAG_BITS}]")

    # -------------------------------------------------- derived shape

    @property
    def coded(self) -> bool:
        return self.profile is not None

    @property
    def burst_profile(self) -> fec.BurstProfile | None:
        return fec.PROFILES[self.profile] if self.coded else None

    @property
    def n_data_symbols(self) -> int:
        return 2 * self.n_symbol_pairs

    def constellation(self) -> modem.Constellation:
        m = self.burst_profile.modulation if self.coded else self.modulation
        return modem.make_constellation(m)

    def frame_info_bits(self) -> int:
        """Information bits counted per burst (pre-seal payload)."""
        if not self.coded:
            return (self.n_data_symbols * modem.N_DATA
                    * self.constellation().bits_per_point)
        capacity = self.burst_profile.capacity_bytes(self.n_data_symbols)
        if self.security:
            return secmac.max_payload_for(capacity) * 8
        return capacity * 8


@dataclass(frozen=True)
class BerPoint:
    """One sweep point; analytic engines report bits = bit_errors = 0."""

    mode: str
    ebn0_db: float
    bits: int
    bit_errors: int
    ber: float
    frames: int = 0
    frame_errors: int = 0
    auth_failures: int = 0
    # diagnostic average sample power; not a CSV field, not identity
    tx_power: float = field(default=1.0, compare=False)

    def __post_init__(self):
        assert 0.0 <= self.ber <= 1.0
        assert self.bit_errors <= self.bits or self.bits == 0
        if self.bits:
            assert self.ber == self.bit_errors / self.bits


def _esn0_for(cfg: SimConfig, gamma_db: float) -> float:
    """Sweep value to the Es/N0 handed to the AWGN stage.

    The Eb/N0 axis quotes detected energy per modulated bit for coded
    and uncoded chains alike (code_rate=1.0): curves for different
    profiles then share one channel-quality axis, and the coded/uncoded
    comparison is made at equal received SNR the way the classic
    Viterbi bench examples plot it.  Callers who want information-bit
    Eb/N0 can pre-shift the sweep by 10*log10(code_rate) themselves.
    """
    if cfg.snr_mode == "esn0":
        return gamma_db
    return channel.ebn0_to_esn0(gamma_db, cfg.constellation().bits_per_point,
                                1.0, cfg.cp_ratio,
                                charge_cp_overhead=False)


def _carrier_n0(esn0_db: float) -> float:
    """Post-FFT noise density per unit-power data carrier."""
    n0_sample = MEASURED_ES / 10.0 ** (esn0_db / 10.0)
    return n0_sample * modem.N_OCCUPIED / modem.N_FFT


# ----------------------------------------------------------- chain halves

def _transmit_points(pts: np.ndarray, cfg: SimConfig) -> np.ndarray:
    """(n_sym, 192) data points to (n_links, n_samples) unit-power air."""
    if cfg.stbc:
        a1, a2 = stbc.stbc_encode(pts)
        amp = 1.0 / math.sqrt(2.0)           # pilots split like the data
        c1, _ = modem.insert_pilots(a1, pilot_amp=amp)
        c2, _ = modem.insert_pilots(a2, pilot_amp=amp)
        p1, p2 = stbc.build_preamble(miso=True)
        occupied = [np.vstack([p1, c1]), np.vstack([p2, c2])]
    else:
        c, _ = modem.insert_pilots(pts, pilot_amp=1.0)
        p1, _ = stbc.build_preamble(miso=False)
        occupied = [np.vstack([p1, c])]
    return np.stack([modem.ofdm_modulate(o, cfg.cp_ratio).reshape(-1)
                     for o in occupied])


def _receive_points(rx: np.ndarray, cfg: SimConfig,
                    flat: bool) -> tuple[np.ndarray, stbc.ChannelEstimate]:
    """Received samples to equalized (n_sym, 192) points + estimate."""
    sps = modem.samples_per_symbol(cfg.cp_ratio)
    occupied = modem.ofdm_demodulate(rx.reshape(-1, sps), cfg.cp_ratio)
    est = stbc.estimate_channel(occupied[0], miso=cfg.stbc, flat=flat)
    eq = stbc.combine_burst(modem.extract_data(occupied[1:]), est)
    return eq, est


def _bit_diff(a: bytes, b: bytes) -> int:
    if len(a) != len(b):
        n = max(len(a), len(b))
        a, b = a.ljust(n, b"\x00"), b.ljust(n, b"\x00")
    av = np.frombuffer(a, dtype=np.uint8)
    bv = np.frombuffer(b, dtype=np.uint8)
    return int(np.bitwise_count(av ^ bv).sum())


# ------------------------------------------------------------ Monte Carlo

def _mc_point(cfg: SimConfig, point_idx: int, gamma_db: float, worker: int,
              max_bits: int, min_errors: int,
              max_frames: int | None) -> tuple[int, int, int, int, int,
                                               float, int]:
    """One (sweep point, worker) share of the Monte Carlo totals.

    Returns (bits, bit_errors, frames, frame_errors, auth_failures,
    tx_energy, tx_samples).  The channel realization is redrawn per
    burst (quasi-static block fading at burst granularity); the
    estimator sees only the preamble, like the real receiver.
    """
    prof = cfg.burst_profile
    const = cfg.constellation()
    chan = channel.make_profile(cfg.channel)
    flat = chan.max_delay == 0
    esn0 = _esn0_for(cfg, gamma_db)
    n_links = 2 if cfg.stbc else 1
    n_sym = cfg.n_data_symbols

    data_rng = channel.derive_rng(cfg.seed, channel.STREAM_DATA,
                                  point_idx, worker)
    chan_rng = channel.derive_rng(cfg.seed, channel.STREAM_CHANNEL,
                                  point_idx, worker)
    noise_rng = channel.derive_rng(cfg.seed, channel.STREAM_NOISE,
                                   point_idx, worker)
    iv_rng = channel.derive_rng(cfg.seed, channel.STREAM_IV,
                                point_idx, worker)

    frame_bits = cfg.frame_info_bits()
    if prof is not None:
        capacity = prof.capacity_bytes(n_sym)
        payload_len = (secmac.max_payload_for(capacity) if cfg.security
                       else capacity)

    bits = errors = frames = frame_errors = auth_failures = 0
    energy = 0.0
    samples = 0
    while True:
        if prof is not None:
            payload = data_rng.bytes(payload_len)
            if cfg.security:
                iv = iv_rng.bytes(secmac.BLOCK_BYTES)
                wire = secmac.seal_frame(payload, cfg.enc_key, cfg.mac_key,
                                         iv, cfg.mac_bits).to_wire()
                if cfg.tamper:
                    tampered = bytearray(wire)
                    tampered[2 + secmac.BLOCK_BYTES] ^= 0x01  # first ct byte
                    wire = bytes(tampered)
                frame_tx = wire
            else:
                frame_tx = payload
            tx_bits = fec.fec_encode(frame_tx, prof, n_sym)
        else:
            payload_bits = data_rng.integers(0, 2, frame_bits, dtype=np.uint8)
            tx_bits = payload_bits
        pts = modem.qam_map(tx_bits, const).reshape(n_sym, modem.N_DATA)

        tx = _transmit_points(pts, cfg)
        energy += float(np.sum(np.abs(tx) ** 2))
        samples += tx.shape[1]

        gains = channel.draw_realization(chan, chan_rng, n_links)
        rx = channel.apply_realization(tx, chan, gains)
        rx = channel.add_awgn(rx, esn0, noise_rng, measured_es=MEASURED_ES)

        eq, _ = _receive_points(rx, cfg, flat)
        hard = modem.qam_demap(eq.reshape(-1), const)

        if prof is not None:
            try:
                frame_rx, _ = fec.fec_decode(hard, prof, n_sym)
            except DecodeFailure as e:
                frame_rx = e.partial
            if cfg.security:
                try:
                    got = secmac.open_frame(
                        secmac.SecuredFrame.from_wire(frame_rx, cfg.mac_bits),
                        cfg.enc_key, cfg.mac_key)
                    n_err = _bit_diff(payload, got)
                except (secmac.AuthFailure, secmac.FrameFormatError,
                        secmac.PaddingError):
                    auth_failures += 1
                    n_err = frame_bits      # frame discarded: total loss
            else:
                n_err = _bit_diff(payload, frame_rx[:payload_len])
        else:
            n_err = int(np.count_nonzero(hard != payload_bits))

        bits += frame_bits
        errors += n_err
        frames += 1
        frame_errors += 1 if n_err else 0
        if max_frames is not None and frames >= max_frames:
            break
        if errors >= min_errors or bits >= max_bits:
            break
    return bits, errors, frames, frame_errors, auth_failures, energy, samples


def _merge_point(cfg: SimConfig, gamma_db: float, shares) -> BerPoint:
    bits = sum(s[0] for s in shares)
    errs = sum(s[1] for s in shares)
    frames = sum(s[2] for s in shares)
    ferr = sum(s[3] for s in shares)
    auth = sum(s[4] for s in shares)
    energy = sum(s[5] for s in shares)
    samples = sum(s[6] for s in shares)
    return BerPoint(mode=cfg.mode, ebn0_db=gamma_db, bits=bits,
                    bit_errors=errs, ber=errs / bits, frames=frames,
                    frame_errors=ferr, auth_failures=auth,
                    tx_power=energy / samples)


def run_montecarlo(config: SimConfig) -> list[BerPoint]:
    """Counted-error BER through the full chain, one point per sweep value."""
    if config.mode != "montecarlo":
        raise ConfigError("run_montecarlo needs mode='montecarlo'")
    w = config.workers

    def share(v, lo=1):
        return max(lo, -(-v // w))

    if w == 1:
        shares_by_point = [[_mc_point(config, i, g, 0, config.max_bits,
                                      config.min_bit_errors,
                                      config.max_frames)]
                           for i, g in enumerate(config.ebn0_sweep)]
    else:
        mf = None if config.max_frames is None else share(config.max_frames)
        with ProcessPoolExecutor(max_workers=w) as pool:
            futures = [[pool.submit(_mc_point, config, i, g, k,
                                    share(config.max_bits, 10_000),
                                    share(config.min_bit_errors),
                                    mf)
                        for k in range(w)]
                       for i, g in enumerate(config.ebn0_sweep)]
            shares_by_point = [[f.result() for f in row] for row in futures]
    return [_merge_point(config, g, shares)
            for g, shares in zip(config.ebn0_sweep, shares_by_point)]


# ------------------------------------------------------- analytic engines

def run_theoretical(config: SimConfig) -> list[BerPoint]:
    """Closed-form uncoded QAM BER over AWGN at each sweep value."""
    if config.mode != "theoretical":
        raise ConfigError("run_theoretical needs mode='theoretical'")
    if config.snr_mode != "ebn0":
        raise ConfigError("theoretical engine sweeps Eb/N0")
    m = (config.burst_profile.modulation if config.coded
         else config.modulation)
    return [BerPoint(mode=config.mode, ebn0_db=g, bits=0, bit_errors=0,
                     ber=modem.theoretical_ber(m, g))
            for g in config.ebn0_sweep]


def run_semianalytic(config: SimConfig) -> list[BerPoint]:
    """Noiseless distortion path + analytic per-point error integration.

    The burst carries an exactly balanced label multiset, so on a
    distortionless chain the average reproduces run_theoretical to
    rounding.  One channel realization is frozen for the whole run;
    post-combiner noise on carrier k is the AWGN density scaled by the
    combiner's per-carrier noise gain.
    """
    if config.mode != "semianalytic":
        raise ConfigError("run_semianalytic needs mode='semianalytic'")
    if config.coded:
        raise ConfigError("semianalytic is uncoded-only: coded chains have "
                          "no analytic post-decision error probability")
    if config.snr_mode != "ebn0":
        raise ConfigError("semianalytic engine sweeps Eb/N0")
    const = config.constellation()
    bps = const.bits_per_point
    n_sym = config.n_data_symbols
    n_points = n_sym * modem.N_DATA
    chan = channel.make_profile(config.channel)
    flat = chan.max_delay == 0
    n_links = 2 if config.stbc else 1

    data_rng = channel.derive_rng(config.seed, channel.STREAM_DATA)
    chan_rng = channel.derive_rng(config.seed, channel.STREAM_CHANNEL)
    reps, extra = divmod(n_points, const.m)
    labels = np.concatenate([np.tile(np.arange(const.m), reps),
                             np.arange(extra)])
    data_rng.shuffle(labels)

    tx = _transmit_points(const.points[labels].reshape(n_sym, modem.N_DATA),
                          config)
    gains = channel.draw_realization(chan, chan_rng, n_links)
    rx = channel.apply_realization(tx, chan, gains)
    centers, est = _receive_points(rx, config, flat)
    noise_gain = np.tile(stbc.combined_noise_gain(est), n_sym)
    tx_power = float(np.sum(np.abs(tx) ** 2)) / tx.shape[1]

    points = []
    for g in config.ebn0_sweep:
        n0 = _carrier_n0(_esn0_for(config, g)) * noise_gain
        errs = modem.expected_bit_errors(const, labels,
                                         centers.reshape(-1), n0)
        # the cross constellation's pairwise bound can top 1 bit/bit
        # at very low SNR; physical BER cannot
        ber = min(float(errs.sum()) / (n_points * bps), 1.0)
        points.append(BerPoint(mode=config.mode, ebn0_db=g, bits=0,
                               bit_errors=0, ber=ber, tx_power=tx_power))
    return points


_ENGINES = {
    "theoretical": run_theoretical,
    "semianalytic": run_semianalytic,
    "montecarlo": run_montecarlo,
}


def run(config: SimConfig) -> list[BerPoint]:
    """Dispatch to the engine named by config.mode."""
    return _ENGINES[config.mode](config)


# ------------------------------------------------------------- CSV output

def format_csv(points: list[BerPoint]) -> str:
    """Header plus one row per point; ber in 6-digit scientific form."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(f"{p.mode},{p.ebn0_db!r},{p.bits},{p.bit_errors},"
                     f"{p.ber:.5e},{p.frames},{p.frame_errors},"
                     f"{p.auth_failures}")
    return "\n".join(lines) + "\n"


def write_csv(points: list[BerPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(points))


def parse_csv(text: str) -> list[BerPoint]:
    """Inverse of format_csv (up to ber rounding), for round-trip checks."""
    lines = text.strip().split("\n")
    if lines[0] != CSV_HEADER:
        raise ValueError("unrecognized CSV header")
    out = []
    for line in lines[1:]:
        mode, g, bits, errs, ber, frames, ferr, auth = line.split(",")
        bits, errs = int(bits), int(errs)
        exact = errs / bits if bits else float(ber)   # undo ber rounding
        out.append(BerPoint(mode=mode, ebn0_db=float(g), bits=bits,
                            bit_errors=errs, ber=exact,
                            frames=int(frames), frame_errors=int(ferr),
                            auth_failures=int(auth)))
    return out


def main(argv=None) -> int:
    """CLI entry point; the flag grammar lives in secphy.cli."""
    from secphy import cli
    return cli.main(argv)
