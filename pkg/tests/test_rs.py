"""Reed-Solomon codec: oracles, both decode routes, weight sweeps."""
import numpy as np
import pytest

from secphy import gf, rs
from secphy.rs import RS_255_239, DecodeFailure, RSCode

RS15 = RSCode(gf.GF16, 15, 11)


def poly_parity(code: RSCode, msg) -> list[int]:
    """Independent route: long division by the generator polynomial.

    Systematic codeword c(x) = m(x) x^(n-k) + (m(x) x^(n-k) mod g(x)),
    with word[0] holding the x^(n-1) coefficient.
    """
    f = code.field
    g = gf.poly_from_roots(f, [f.alpha_pow(i) for i in range(1, code.npar + 1)])
    mp = gf.GFPoly(f, [0] * code.npar + list(reversed(list(msg))))
    rem = mp % g
    return [rem.coeff(i) for i in range(code.npar - 1, -1, -1)]


def test_encode_frozen_vector():
    msg = [7, 0, 12, 3, 9, 15, 1, 8, 4, 2, 11]
    assert RS15.encode(msg) == msg + [0, 0, 13, 9]


def test_encode_matches_polynomial_division():
    rng = np.random.default_rng(21)
    for code in (RS15, RSCode(gf.GF256, 255, 239), RSCode(gf.GF256, 64, 48)):
        for _ in range(10):
            msg = rng.integers(0, code.field.order, code.k).tolist()
            assert code.encode(msg) == msg + poly_parity(code, msg)


def test_codeword_syndromes_zero():
    rng = np.random.default_rng(22)
    for code in (RS15, RS_255_239):
        msg = rng.integers(0, code.field.order, code.k).tolist()
        cw = code.encode(msg)
        assert all(int(s) == 0 for s in code.syndromes(cw))
        cw[0] ^= 1
        assert any(int(s) != 0 for s in code.syndromes(cw))


def test_batch_agrees_with_scalar():
    rng = np.random.default_rng(23)
    msgs = rng.integers(0, 16, (32, 11), dtype=np.uint8)
    cws = RS15.encode_batch(msgs)
    for row in range(32):
        assert cws[row].tolist() == RS15.encode(msgs[row].tolist())


def test_decode_routes_agree():
    """Berlekamp-Massey kernel vs extended-Euclid reference."""
    rng = np.random.default_rng(24)
    for code in (RS15, RSCode(gf.GF256, 40, 36), RS_255_239):
        for trial in range(60):
            msg = rng.integers(0, code.field.order, code.k).tolist()
            cw = code.encode(msg)
            n_err = rng.integers(0, code.t + 2)      # sometimes beyond t
            pos = rng.choice(code.n, n_err, replace=False)
            bad = list(cw)
            for p in pos:
                bad[p] ^= int(rng.integers(1, code.field.order))
            try:
                out_bm, cnt_bm = code.decode(bad)
                bm_failed = False
            except DecodeFailure:
                bm_failed = True
            try:
                out_eu, cnt_eu = code.decode_reference(bad)
                eu_failed = False
            except DecodeFailure:
                eu_failed = True
            assert bm_failed == eu_failed
            if not bm_failed:
                assert out_bm == out_eu
                assert cnt_bm == cnt_eu
            if n_err <= code.t and not bm_failed:
                assert out_bm == msg and cnt_bm == n_err


def test_rs15_weight_sweep():
    rng = np.random.default_rng(25)
    msg = rng.integers(0, 16, 11).tolist()
    cw = RS15.encode(msg)
    # every single-symbol error corrects
    for pos in range(15):
        for val in range(1, 16):
            bad = list(cw)
            bad[pos] ^= val
            out, cnt = RS15.decode(bad)
            assert out == msg and cnt == 1
    # random double errors correct
    for _ in range(500):
        p1, p2 = rng.choice(15, 2, replace=False)
        bad = list(cw)
        bad[p1] ^= int(rng.integers(1, 16))
        bad[p2] ^= int(rng.integers(1, 16))
        out, cnt = RS15.decode(bad)
        assert out == msg and cnt == 2
    # triple errors: either failure or an honest miscorrection, never
    # the original message with a corrected count below 3
    for _ in range(500):
        pos = rng.choice(15, 3, replace=False)
        bad = list(cw)
        for p in pos:
            bad[p] ^= int(rng.integers(1, 16))
        try:
            out, cnt = RS15.decode(bad)
        except DecodeFailure:
            continue
        assert not (out == msg and cnt < 3)
        # whatever it produced must re-encode to a valid codeword
        assert all(int(s) == 0 for s in RS15.syndromes(RS15.encode(out)))


def test_rs255_full_load():
    rng = np.random.default_rng(26)
    msgs = rng.integers(0, 256, (64, 239), dtype=np.uint8)
    cws = RS_255_239.encode_batch(msgs)
    for row in range(64):
        n_err = rng.integers(1, 9)
        pos = rng.choice(255, n_err, replace=False)
        cws[row, pos] ^= rng.integers(1, 256, n_err, dtype=np.uint8)
    out, counts = RS_255_239.decode_batch(cws)
    assert np.array_equal(out, msgs)
    assert (counts >= 1).all() and (counts <= 8).all()


def test_decode_failure_raises_with_scalar_api():
    rng = np.random.default_rng(27)
    msg = rng.integers(0, 16, 11).tolist()
    cw = RS15.encode(msg)
    bad = list(cw)
    for p in range(7):                    # way past t=2
        bad[p] ^= int(rng.integers(1, 16))
    with pytest.raises(DecodeFailure):
        RS15.decode(bad)


def test_shortened_codes():
    short = RS_255_239.shortened(215)     # (40, 24), t stays 8
    assert (short.n, short.k, short.t) == (40, 24, 8)
    assert rs.rs_shorten(RS_255_239, 215).n == 40
    rng = np.random.default_rng(28)
    msg = rng.integers(0, 256, short.k).tolist()
    cw = short.encode(msg)
    bad = list(cw)
    for p in rng.choice(short.n, 8, replace=False):
        bad[p] ^= int(rng.integers(1, 256))
    out, cnt = short.decode(bad)
    assert out == msg and cnt == 8
    # direct t=2 member used by the frame layer examples
    small = RSCode(gf.GF256, 40, 36)
    assert small.t == 2
    msg = rng.integers(0, 256, 36).tolist()
    bad = small.encode(msg)
    bad[0] ^= 77
    bad[39] ^= 1
    assert small.decode(bad) == (msg, 2)


def test_code_parameter_validation():
    with pytest.raises(ValueError):
        RSCode(gf.GF16, 16, 11)           # n > field order - 1
    with pytest.raises(ValueError):
        RSCode(gf.GF16, 11, 11)           # no parity
    with pytest.raises(ValueError):
        RSCode(gf.GF16, 11, 12)
