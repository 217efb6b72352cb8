"""Secured 802.16-style OFDM baseband simulator.

Submodules, bottom of the stack first:

    gf       GF(2^m) arithmetic on exp/log tables
    rs       Reed-Solomon codec (Berlekamp-Massey + Euclid reference)
    fec      randomizer, RS-CC burst chain, puncturing, interleaver
    modem    Gray QAM constellations, analytic BER, OFDM grid
    stbc     2x1 space-time block coding, preambles, estimation
    channel  tapped fading profiles, AWGN, seeded RNG streams
    secmac   CBC link encryption and chained authentication tags
    harness  theoretical / semianalytic / Monte Carlo BER engines

The compiled kernel backend (secphy._kernels) is selected at import
time; `kernel_backend()` reports which one is live.
"""
from secphy import channel, fec, gf, harness, modem, rs, secmac, stbc
from secphy._kernels import BACKEND as _BACKEND
from secphy.fec import PROFILES, BurstProfile, fec_decode, fec_encode
from secphy.gf import GF16, GF256, GFField
from secphy.harness import BerPoint, SimConfig, run, write_csv
from secphy.modem import make_constellation, theoretical_ber
from secphy.rs import RS_255_239, DecodeFailure, RSCode
from secphy.secmac import AuthFailure, SecuredFrame, open_frame, seal_frame
from secphy.stbc import stbc_encode

__version__ = "0.1.0"

__all__ = [
    "AuthFailure", "BerPoint", "BurstProfile", "DecodeFailure", "GF16",
    "GF256", "GFField", "PROFILES", "RSCode", "RS_255_239", "SecuredFrame",
    "SimConfig", "channel", "fec", "fec_decode", "fec_encode", "gf",
    "harness", "kernel_backend", "make_constellation", "modem",
    "open_frame", "rs", "run", "seal_frame", "secmac", "stbc",
    "stbc_encode", "theoretical_ber", "write_csv",
]


def kernel_backend() -> str:
    """Name of the active hot-loop backend: 'cython' or 'python'."""
    return _BACKEND
