# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels.

Same functions, shapes, dtypes and failure semantics as the numpy
reference in secphy._kernels._pyref; that module's docstrings are the
contract.  Anything clever lives there in readable form first.
"""
import numpy as np

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.string cimport memcpy

from secphy._destables import E_TAB, FP_TAB, IP_TAB, SP

BACKEND_NAME = "cython"

cdef uint64_t _M32 = 0xFFFFFFFFu

# DES permutation/S-box tables as flat C-contiguous arrays
cdef uint64_t[:, ::1] _E = np.array(E_TAB, dtype=np.uint64)
cdef uint64_t[:, ::1] _IP = np.array(IP_TAB, dtype=np.uint64)
cdef uint64_t[:, ::1] _FP = np.array(FP_TAB, dtype=np.uint64)
cdef uint64_t[:, ::1] _SP = np.array(SP, dtype=np.uint64)

_MAX_PAR = 256          # RS parity bound (n - k < 2^8 always)


# ----------------------------------------------------------------- RS

def rs_encode_batch(msgs, gen_mul):
    """See _pyref.rs_encode_batch."""
    cdef const uint8_t[:, ::1] m = np.ascontiguousarray(msgs, dtype=np.uint8)
    cdef const uint8_t[:, ::1] g = np.ascontiguousarray(gen_mul,
                                                        dtype=np.uint8)
    cdef Py_ssize_t b = m.shape[0], k = m.shape[1], npar = g.shape[1]
    out = np.zeros((b, npar), dtype=np.uint8)
    cdef uint8_t[:, ::1] reg = out
    cdef Py_ssize_t row, i, j
    cdef uint8_t fb
    for row in range(b):
        for i in range(k):
            fb = m[row, i] ^ reg[row, 0]
            for j in range(npar - 1):
                reg[row, j] = reg[row, j + 1] ^ g[fb, j]
            reg[row, npar - 1] = g[fb, npar - 1]
    return out


cdef inline int _gf_mul(int a, int b, const int32_t[::1] exp,
                        const int32_t[::1] log) nogil:
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


def rs_syndromes_batch(cws, exp, log, int npar, int go):
    """See _pyref.rs_syndromes_batch."""
    cdef const uint8_t[:, ::1] c = np.ascontiguousarray(cws, dtype=np.uint8)
    cdef const int32_t[::1] e = np.ascontiguousarray(exp, dtype=np.int32)
    cdef const int32_t[::1] l = np.ascontiguousarray(log, dtype=np.int32)
    cdef Py_ssize_t b = c.shape[0], n = c.shape[1]
    out = np.zeros((b, npar), dtype=np.uint8)
    cdef uint8_t[:, ::1] s = out
    cdef Py_ssize_t row, j
    cdef int i, acc, power, idx
    with nogil:
        for row in range(b):
            for i in range(1, npar + 1):
                acc = 0
                for j in range(n):
                    if c[row, j]:
                        power = <int>(n - 1 - j)
                        idx = (l[c[row, j]] + i * power) % go
                        acc ^= e[idx]
                s[row, i - 1] = <uint8_t>acc
    return out


cdef int _bm(const uint8_t* s, int npar, const int32_t[::1] exp,
             const int32_t[::1] log, int go, int* sigma) nogil:
    """Berlekamp-Massey; fills sigma (ascending), returns degree L."""
    cdef int c[256]
    cdef int b[256]
    cdef int t[256]
    cdef int L = 0, m = 1, bb = 1
    cdef int n, i, d, coef_log
    for i in range(npar + 1):
        c[i] = 0
        b[i] = 0
    c[0] = 1
    b[0] = 1
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
            for i in range(npar + 1):
                t[i] = c[i]
            for i in range(npar + 1 - m):
                if b[i]:
                    c[i + m] ^= exp[log[b[i]] + coef_log]
            L = n + 1 - L
            for i in range(npar + 1):
                b[i] = t[i]
            bb = d
            m = 1
        else:
            for i in range(npar + 1 - m):
                if b[i]:
                    c[i + m] ^= exp[log[b[i]] + coef_log]
            m += 1
    for i in range(npar + 1):
        sigma[i] = c[i]
    return L


def rs_decode_batch(cws, exp, log, int npar, int go, int t):
    """See _pyref.rs_decode_batch (corrects rows of cws in place)."""
    cdef uint8_t[:, ::1] c = cws        # must alias: in-place contract
    cdef const int32_t[::1] e = np.ascontiguousarray(exp, dtype=np.int32)
    cdef const int32_t[::1] l = np.ascontiguousarray(log, dtype=np.int32)
    cdef Py_ssize_t b = c.shape[0], n = c.shape[1]
    out_arr = np.zeros(b, dtype=np.int32)
    cdef int32_t[::1] out = out_arr
    synd_arr = rs_syndromes_batch(np.asarray(cws), exp, log, npar, go)
    cdef uint8_t[:, ::1] synd = synd_arr
    cdef int sigma[256]
    cdef int omega[256]
    cdef uint8_t s_row[256]
    cdef int roots[256]
    cdef Py_ssize_t row, j
    cdef int i, k, L, n_roots, acc, x, x_inv, w, dp, term, y, cnt, ok
    cdef int any_s, power
    with nogil:
        for row in range(b):
            any_s = 0
            for i in range(npar):
                s_row[i] = synd[row, i]
                if s_row[i]:
                    any_s = 1
            if not any_s:
                continue
            L = _bm(&s_row[0], npar, e, l, go, &sigma[0])
            if L > t or sigma[L] == 0:
                out[row] = -1
                continue
            # omega = S(x) * sigma(x) mod x^npar
            for i in range(npar):
                omega[i] = 0
            for i in range(L + 1):
                if sigma[i] == 0:
                    continue
                for j in range(npar - i):
                    if s_row[j]:
                        omega[i + j] ^= e[l[sigma[i]] + l[s_row[j]]]
            # Chien scan: sigma(alpha^-k) == 0 marks position k
            n_roots = 0
            for k in range(n):
                x = e[(go - k % go) % go]           # alpha^(-k)
                acc = 0
                for i in range(L, -1, -1):
                    acc = _gf_mul(acc, x, e, l) ^ sigma[i]
                if acc == 0:
                    if n_roots < L:
                        roots[n_roots] = k
                    n_roots += 1
            if n_roots != L:
                out[row] = -1
                continue
            # Forney magnitudes at each root
            ok = 1
            for j in range(L):
                k = roots[j]
                x_inv = e[(go - k % go) % go]
                w = 0
                for i in range(npar - 1, -1, -1):
                    w = (_gf_mul(w, x_inv, e, l)) ^ omega[i]
                dp = 0
                for i in range(1, L + 1, 2):
                    if sigma[i]:
                        term = sigma[i]
                        for cnt in range(i - 1):
                            term = _gf_mul(term, x_inv, e, l)
                        dp ^= term
                if dp == 0 or w == 0:
                    ok = 0
                    break
                y = e[(l[w] - l[dp] + go) % go]
                c[row, n - 1 - k] ^= <uint8_t>y
            out[row] = L if ok else -1
    # verify: corrected words must be codewords again
    fixed = np.nonzero(out_arr > 0)[0]
    if len(fixed):
        recheck = rs_syndromes_batch(np.asarray(cws)[fixed], exp, log,
                                     npar, go)
        bad = recheck.any(axis=1)
        out_arr[fixed[bad]] = -1
    return out_arr


# ------------------------------------------------------------ Viterbi

def viterbi_decode(obs, out_a, out_b, bint force_end_zero):
    """See _pyref.viterbi_decode."""
    cdef const uint8_t[::1] y = np.ascontiguousarray(obs, dtype=np.uint8)
    cdef const uint8_t[:, ::1] oa = np.ascontiguousarray(out_a,
                                                         dtype=np.uint8)
    cdef const uint8_t[:, ::1] ob = np.ascontiguousarray(out_b,
                                                         dtype=np.uint8)
    cdef Py_ssize_t n_steps = y.shape[0] // 2
    cdef int p0[64]
    cdef int p1[64]
    cdef uint8_t a0[64]
    cdef uint8_t a1[64]
    cdef uint8_t b0[64]
    cdef uint8_t b1[64]
    cdef int64_t metric[64]
    cdef int64_t fresh[64]
    cdef int st, u
    for st in range(64):
        p0[st] = (st & 31) << 1
        p1[st] = p0[st] | 1
        u = st >> 5
        a0[st] = oa[p0[st], u]
        a1[st] = oa[p1[st], u]
        b0[st] = ob[p0[st], u]
        b1[st] = ob[p1[st], u]
        metric[st] = 1 << 30
    metric[0] = 0
    preds_arr = np.empty((n_steps, 64), dtype=np.uint8)
    cdef uint8_t[:, ::1] preds = preds_arr
    bits_arr = np.empty(n_steps, dtype=np.uint8)
    cdef uint8_t[::1] bits = bits_arr
    cdef Py_ssize_t i
    cdef int ya, yb
    cdef int64_t c0, c1, best
    cdef int state
    with nogil:
        for i in range(n_steps):
            ya = y[2 * i]
            yb = y[2 * i + 1]
            for st in range(64):
                c0 = metric[p0[st]]
                c1 = metric[p1[st]]
                if ya != 2:
                    c0 += a0[st] != ya
                    c1 += a1[st] != ya
                if yb != 2:
                    c0 += b0[st] != yb
                    c1 += b1[st] != yb
                if c1 < c0:
                    fresh[st] = c1
                    preds[i, st] = <uint8_t>p1[st]
                else:
                    fresh[st] = c0
                    preds[i, st] = <uint8_t>p0[st]
            memcpy(&metric[0], &fresh[0], 64 * sizeof(int64_t))
        if force_end_zero:
            state = 0
        else:
            state = 0
            best = metric[0]
            for st in range(1, 64):
                if metric[st] < best:
                    best = metric[st]
                    state = st
        for i in range(n_steps - 1, -1, -1):
            bits[i] = state >> 5
            state = preds[i, state]
    return bits_arr


# ---------------------------------------------------------------- DES

cdef inline uint64_t _f(uint64_t r, uint64_t k48) nogil:
    cdef uint64_t x = (_E[0, (r >> 24) & 0xFF] | _E[1, (r >> 16) & 0xFF]
                       | _E[2, (r >> 8) & 0xFF] | _E[3, r & 0xFF]) ^ k48
    return (_SP[0, (x >> 42) & 63] | _SP[1, (x >> 36) & 63]
            | _SP[2, (x >> 30) & 63] | _SP[3, (x >> 24) & 63]
            | _SP[4, (x >> 18) & 63] | _SP[5, (x >> 12) & 63]
            | _SP[6, (x >> 6) & 63] | _SP[7, x & 63])


cdef inline uint64_t _perm8(uint64_t v, const uint64_t[:, ::1] tab) nogil:
    return (tab[0, (v >> 56) & 0xFF] | tab[1, (v >> 48) & 0xFF]
            | tab[2, (v >> 40) & 0xFF] | tab[3, (v >> 32) & 0xFF]
            | tab[4, (v >> 24) & 0xFF] | tab[5, (v >> 16) & 0xFF]
            | tab[6, (v >> 8) & 0xFF] | tab[7, v & 0xFF])


cdef uint64_t _des_block(uint64_t v, const uint64_t* ks, int n_rounds,
                         bint decrypt) nogil:
    cdef uint64_t x = _perm8(v, _IP)
    cdef uint64_t left = (x >> 32) & _M32
    cdef uint64_t right = x & _M32
    cdef uint64_t tmp
    cdef int i
    for i in range(n_rounds):
        tmp = right
        right = left ^ _f(right, ks[n_rounds - 1 - i] if decrypt else ks[i])
        left = tmp
    return _perm8((right << 32) | left, _FP)


cdef int _load_keys(object subkeys, uint64_t* ks) except -1:
    cdef int n = len(subkeys)
    if n > 32:
        raise ValueError("too many round keys")
    cdef int i
    for i in range(n):
        ks[i] = <uint64_t>subkeys[i]
    return n


def des_encrypt_block(block, subkeys):
    cdef uint64_t ks[32]
    cdef int n = _load_keys(subkeys, &ks[0])
    return int(_des_block(<uint64_t>block, &ks[0], n, False))


def des_decrypt_block(block, subkeys):
    cdef uint64_t ks[32]
    cdef int n = _load_keys(subkeys, &ks[0])
    return int(_des_block(<uint64_t>block, &ks[0], n, True))


def cbc_encrypt_u64(blocks, subkeys, iv):
    cdef uint64_t[::1] src = np.ascontiguousarray(blocks, dtype=np.uint64)
    out_arr = np.empty(src.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef uint64_t ks[32]
    cdef int n = _load_keys(subkeys, &ks[0])
    cdef uint64_t prev = <uint64_t>iv
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            prev = _des_block(src[i] ^ prev, &ks[0], n, False)
            out[i] = prev
    return out_arr


def cbc_decrypt_u64(blocks, subkeys, iv):
    cdef uint64_t[::1] src = np.ascontiguousarray(blocks, dtype=np.uint64)
    out_arr = np.empty(src.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] out = out_arr
    cdef uint64_t ks[32]
    cdef int n = _load_keys(subkeys, &ks[0])
    cdef uint64_t prev = <uint64_t>iv
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            out[i] = _des_block(src[i], &ks[0], n, True) ^ prev
            prev = src[i]
    return out_arr


def cbc_mac_u64(blocks, subkeys):
    cdef uint64_t[::1] src = np.ascontiguousarray(blocks, dtype=np.uint64)
    cdef uint64_t ks[32]
    cdef int n = _load_keys(subkeys, &ks[0])
    cdef uint64_t acc = 0
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            acc = _des_block(src[i] ^ acc, &ks[0], n, False)
    return int(acc)
