"""Kernel backend shootout: compiled extension vs numpy reference.

Times the three hot paths (batch RS decode, Viterbi, DES-CBC) on
workload shapes that match what the simulator actually runs, then
prints a small table with the speedup factor.  Run from the repo root:

    python3 benchmarks/bench_kernels.py [--repeats N]

The pure-Python numbers are the cost of `SECPHY_KERNELS=py`; the
simulator is usable either way, just slower.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from secphy import fec, gf, rs, secmac
from secphy._kernels import _pyref

try:
    from secphy._kernels import _speedups
except ImportError:
    _speedups = None


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_rs(backend, rng) -> tuple[float, str]:
    code = rs.RSCode(gf.GF256, 64, 48)
    msgs = rng.integers(0, 256, (512, 48), dtype=np.uint8)
    cws = code.encode_batch(msgs)
    pos = rng.integers(0, 64, (512, 6))
    vals = rng.integers(1, 256, (512, 6), dtype=np.uint8)
    for r in range(512):
        cws[r, pos[r]] ^= vals[r]
    f = code.field

    def job():
        backend.rs_decode_batch(cws.copy(), f.exp_table, f.log_table,
                                code.npar, f.group_order, code.t)

    blocks = 512 * 64
    return job, f"512 x RS(64,48), {blocks} symbols"


def bench_viterbi(backend, rng) -> tuple[float, str]:
    cc = fec.ConvCode("1/2")
    bits = rng.integers(0, 2, 24_000, dtype=np.uint8)
    coded = fec.conv_encode(bits, cc)
    coded ^= (rng.random(coded.shape) < 0.02).astype(np.uint8)
    full = fec.depuncture(coded, cc, bits.size)
    out_a, out_b = fec._trellis()

    def job():
        backend.viterbi_decode(full, out_a, out_b, True)

    return job, f"K=7 Viterbi, {bits.size} info bits"


def bench_cbc(backend, rng) -> tuple[float, str]:
    ks = secmac.key_schedule(bytes.fromhex("0123456789abcdef"))
    blocks = rng.integers(0, 1 << 63, 4096, dtype=np.uint64)

    def job():
        backend.cbc_encrypt_u64(blocks, ks, 0xA5A5A5A55A5A5A5A)

    return job, f"DES-CBC, {blocks.size * 8} bytes"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if _speedups is None:
        print("compiled extension not built; reinstall without SECPHY_NO_EXT")
        return 1

    rng = np.random.default_rng(2024)
    rows = []
    for bench in (bench_rs, bench_viterbi, bench_cbc):
        job_py, label = bench(_pyref, rng)
        job_c, _ = bench(_speedups, rng)
        t_py = _time(job_py, args.repeats)
        t_c = _time(job_c, args.repeats)
        rows.append((label, t_py, t_c, t_py / t_c))

    w = max(len(r[0]) for r in rows)
    print(f"{'workload':<{w}}  {'python':>10}  {'cython':>10}  {'speedup':>8}")
    for label, t_py, t_c, ratio in rows:
        print(f"{label:<{w}}  {t_py * 1e3:>8.2f}ms  {t_c * 1e3:>8.2f}ms"
              f"  {ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
