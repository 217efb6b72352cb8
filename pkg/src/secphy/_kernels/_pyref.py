"""Pure-Python/numpy implementations of the hot kernels.

Functionally identical to secphy._kernels._speedups (the Cython build);
selected at import time when the extension is unavailable or when
SECPHY_KERNELS=py.  Batch shapes and dtypes are part of the kernel
contract and match the compiled module exactly.
"""
from __future__ import annotations

import numpy as np

from secphy._destables import E_TAB, FP_TAB, IP_TAB, SP

BACKEND_NAME = "python"

_M32 = 0xFFFFFFFF


# ----------------------------------------------------------------- RS

def rs_encode_batch(msgs: np.ndarray, gen_mul: np.ndarray) -> np.ndarray:
    """Systematic parity for a batch of messages.

    msgs    : uint8 (B, k), msgs[:, 0] is the highest-power symbol.
    gen_mul : uint8 (order, npar); gen_mul[v, j] = v * g_(npar-1-j),
              the generator coefficients in descending power order,
              leading coefficient (always 1) omitted.
    returns : uint8 (B, npar) parity in transmit order (descending
              powers), so codeword rows are hstack([msgs, parity]).
    """
    b, k = msgs.shape
    npar = gen_mul.shape[1]
    reg = np.zeros((b, npar), dtype=np.uint8)
    for i in range(k):
        fb = msgs[:, i] ^ reg[:, 0]
        reg[:, :-1] = reg[:, 1:]
        reg[:, -1] = 0
        reg ^= gen_mul[fb]
    return reg


def _gf_mul_vec(a, b, exp, log):
    nz = (a != 0) & (b != 0)
    out = np.zeros_like(a)
    out[nz] = exp[log[a[nz]] + log[b[nz]]]
    return out


def rs_syndromes_batch(cws: np.ndarray, exp: np.ndarray, log: np.ndarray,
                       npar: int, go: int) -> np.ndarray:
    """S_i = r(alpha^i) for i = 1..npar; column i-1 holds S_i.

    cws : uint8 (B, n); cws[:, j] is the coefficient of x^(n-1-j).
    exp : int32 (2*go,) doubled antilog table; log : int32 (order,).
    """
    b, n = cws.shape
    powers = np.arange(n - 1, -1, -1, dtype=np.int64)       # power of x per column
    logs = log[cws].astype(np.int64)
    nz = cws != 0
    synd = np.zeros((b, npar), dtype=np.uint8)
    for i in range(1, npar + 1):
        term = np.zeros((b, n), dtype=np.uint8)
        idx = (logs + i * powers) % go
        term[nz] = exp[idx[nz]]
        synd[:, i - 1] = np.bitwise_xor.reduce(term, axis=1)
    return synd


def _berlekamp_massey(s: list[int], npar: int, exp, log, go: int) -> list[int]:
    """Connection polynomial sigma (ascending coeffs, sigma[0] = 1)."""
    c = [1] + [0] * npar
    b = [1] + [0] * npar
    L, m, bb = 0, 1, 1
    for n in range(npar):
        d = s[n]
        for i in range(1, L + 1):
            if c[i] and s[n - i]:
                d ^= exp[log[c[i]] + log[s[n - i]]]
        if d == 0:
            m += 1
            continue
        coef_log = (log[d] - log[bb] + go) % go
        if 2 * L <= n:
            t = c[:]
            for i in range(npar + 1 - m):
                if b[i]:
                    c[i + m] ^= exp[log[b[i]] + coef_log]
            L = n + 1 - L
            b = t
            bb = d
            m = 1
        else:
            for i in range(npar + 1 - m):
                if b[i]:
                    c[i + m] ^= exp[log[b[i]] + coef_log]
            m += 1
    return c[:L + 1], L


def rs_decode_batch(cws: np.ndarray, exp: np.ndarray, log: np.ndarray,
                    npar: int, go: int, t: int) -> np.ndarray:
    """Correct each row in place; returns per-row corrected count or -1.

    Berlekamp-Massey + Chien + Forney.  A row fails (-1) when the
    locator degree exceeds t, the root count disagrees with the degree,
    a root lands outside the word, a magnitude is zero, or the
    corrected word still has nonzero syndromes.
    """
    b, n = cws.shape
    out = np.zeros(b, dtype=np.int32)
    synd = rs_syndromes_batch(cws, exp, log, npar, go)
    active = np.nonzero(synd.any(axis=1))[0]
    ks = np.arange(n, dtype=np.int64)              # candidate position powers
    xs = exp[(go - ks % go) % go]                  # alpha^(-k)
    exp_l = exp.tolist()
    log_l = log.tolist()
    for row in active:
        s = synd[row].tolist()
        sigma, L = _berlekamp_massey(s, npar, exp_l, log_l, go)
        if L > t or sigma[L] == 0:
            out[row] = -1
            continue
        # omega = S(x) * sigma(x) mod x^npar
        omega = [0] * npar
        for i, sc in enumerate(sigma):
            if sc == 0:
                continue
            for j in range(npar - i):
                if s[j]:
                    omega[i + j] ^= exp_l[log_l[sc] + log_l[s[j]]]
        # Chien scan over in-range positions, vectorized Horner
        acc = np.zeros(n, dtype=np.uint8)
        for c in reversed(sigma):
            acc = _gf_mul_vec(acc, xs, exp, log)
            acc ^= np.uint8(c)
        roots = np.nonzero(acc == 0)[0]            # position powers k
        if len(roots) != L:
            out[row] = -1
            continue
        # Forney: Y = omega(X^-1) / sigma'(X^-1)
        ok = True
        for k in roots:
            x_inv = int(xs[k])
            w = 0
            for c in reversed(omega):
                w = (exp_l[log_l[w] + log_l[x_inv]] if w and x_inv else 0) ^ c
            dp = 0
            for i in range(1, len(sigma), 2):      # formal derivative, char 2
                c = sigma[i]
                if c:
                    term = c
                    for _ in range(i - 1):
                        term = exp_l[log_l[term] + log_l[x_inv]] if x_inv else 0
                    dp ^= term
            if dp == 0 or w == 0:
                ok = False
                break
            y = exp_l[(log_l[w] - log_l[dp] + go) % go]
            cws[row, n - 1 - int(k)] ^= y
        out[row] = L if ok else -1
    # verify: corrected words must be codewords again
    fixed = np.nonzero(out > 0)[0]
    if len(fixed):
        recheck = rs_syndromes_batch(cws[fixed], exp, log, npar, go)
        bad = recheck.any(axis=1)
        out[fixed[bad]] = -1
    return out


# ------------------------------------------------------------ Viterbi

def viterbi_decode(obs: np.ndarray, out_a: np.ndarray, out_b: np.ndarray,
                   force_end_zero: bool) -> np.ndarray:
    """Hard-decision Viterbi over the 64-state K=7 trellis.

    obs   : uint8 (2*n_steps,), values 0/1 or 2 for an erased (punctured)
            position, which contributes no metric.
    out_a : uint8 (64, 2) first encoder output per (state, input bit);
    out_b : uint8 (64, 2) second output.  State packs the six previous
            input bits, newest in bit 5; successor = (u << 5) | (s >> 1).
    """
    n_steps = len(obs) // 2
    pred0 = ((np.arange(64) & 31) << 1).astype(np.int64)
    pred1 = pred0 | 1
    u_of = (np.arange(64) >> 5).astype(np.int64)
    a0 = out_a[pred0, u_of].astype(np.int64)
    a1 = out_a[pred1, u_of].astype(np.int64)
    b0 = out_b[pred0, u_of].astype(np.int64)
    b1 = out_b[pred1, u_of].astype(np.int64)

    big = 1 << 30
    metric = np.full(64, big, dtype=np.int64)
    metric[0] = 0
    preds = np.empty((n_steps, 64), dtype=np.uint8)
    for i in range(n_steps):
        ya = obs[2 * i]
        yb = obs[2 * i + 1]
        cost0 = np.zeros(64, dtype=np.int64)
        cost1 = np.zeros(64, dtype=np.int64)
        if ya != 2:
            cost0 += a0 != ya
            cost1 += a1 != ya
        if yb != 2:
            cost0 += b0 != yb
            cost1 += b1 != yb
        cand0 = metric[pred0] + cost0
        cand1 = metric[pred1] + cost1
        take1 = cand1 < cand0
        metric = np.where(take1, cand1, cand0)
        preds[i] = np.where(take1, pred1, pred0)
    state = 0 if force_end_zero else int(np.argmin(metric))
    bits = np.empty(n_steps, dtype=np.uint8)
    for i in range(n_steps - 1, -1, -1):
        bits[i] = state >> 5
        state = int(preds[i, state])
    return bits


# ---------------------------------------------------------------- DES

def _f(r: int, k48: int) -> int:
    x = (E_TAB[0][(r >> 24) & 0xFF] | E_TAB[1][(r >> 16) & 0xFF]
         | E_TAB[2][(r >> 8) & 0xFF] | E_TAB[3][r & 0xFF]) ^ k48
    return (SP[0][(x >> 42) & 63] | SP[1][(x >> 36) & 63]
            | SP[2][(x >> 30) & 63] | SP[3][(x >> 24) & 63]
            | SP[4][(x >> 18) & 63] | SP[5][(x >> 12) & 63]
            | SP[6][(x >> 6) & 63] | SP[7][x & 63])


def _ip(v: int) -> int:
    return (IP_TAB[0][(v >> 56) & 0xFF] | IP_TAB[1][(v >> 48) & 0xFF]
            | IP_TAB[2][(v >> 40) & 0xFF] | IP_TAB[3][(v >> 32) & 0xFF]
            | IP_TAB[4][(v >> 24) & 0xFF] | IP_TAB[5][(v >> 16) & 0xFF]
            | IP_TAB[6][(v >> 8) & 0xFF] | IP_TAB[7][v & 0xFF])


def _fp(v: int) -> int:
    return (FP_TAB[0][(v >> 56) & 0xFF] | FP_TAB[1][(v >> 48) & 0xFF]
            | FP_TAB[2][(v >> 40) & 0xFF] | FP_TAB[3][(v >> 32) & 0xFF]
            | FP_TAB[4][(v >> 24) & 0xFF] | FP_TAB[5][(v >> 16) & 0xFF]
            | FP_TAB[6][(v >> 8) & 0xFF] | FP_TAB[7][v & 0xFF])


def _des_block(v: int, subkeys, decrypt: bool) -> int:
    x = _ip(v)
    left = (x >> 32) & _M32
    right = x & _M32
    ks = reversed(subkeys) if decrypt else subkeys
    for k in ks:
        left, right = right, left ^ _f(right, k)
    return _fp((right << 32) | left)


def des_encrypt_block(block: int, subkeys) -> int:
    return _des_block(block, subkeys, False)


def des_decrypt_block(block: int, subkeys) -> int:
    return _des_block(block, subkeys, True)


def cbc_encrypt_u64(blocks: np.ndarray, subkeys, iv: int) -> np.ndarray:
    out = np.empty_like(blocks)
    prev = iv
    for i, p in enumerate(blocks.tolist()):
        prev = _des_block(p ^ prev, subkeys, False)
        out[i] = prev
    return out


def cbc_decrypt_u64(blocks: np.ndarray, subkeys, iv: int) -> np.ndarray:
    out = np.empty_like(blocks)
    prev = iv
    for i, c in enumerate(blocks.tolist()):
        out[i] = _des_block(c, subkeys, True) ^ prev
        prev = c
    return out


def cbc_mac_u64(blocks: np.ndarray, subkeys) -> int:
    acc = 0
    for d in blocks.tolist():
        acc = _des_block(d ^ acc, subkeys, False)
    return acc
