"""Field arithmetic: exhaustive axioms on GF(16), spot checks on GF(256)."""
import numpy as np
import pytest

from secphy import gf

F16 = gf.GF16
F256 = gf.GF256


def test_tables_consistent():
    for f in (F16, F256):
        order = f.group_order
        # alpha is primitive: powers hit every nonzero element once
        seen = {f.alpha_pow(i) for i in range(order)}
        assert seen == set(range(1, order + 1))
        assert f.alpha_pow(order) == 1
        for v in range(1, order + 1):
            assert f.alpha_pow(f.log_table[v]) == v
        # doubled antilog table lets products index without a reduction
        assert len(f.exp_table) >= 2 * order
        assert all(f.exp_table[i] == f.exp_table[i + order]
                   for i in range(order))


def test_gf16_axioms_exhaustive():
    m = 16
    add = np.empty((m, m), dtype=np.int64)
    mul = np.empty((m, m), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            add[a, b] = F16.add(a, b)
            mul[a, b] = F16.mul(a, b)
    assert np.array_equal(add, add.T)
    assert np.array_equal(mul, mul.T)
    assert np.array_equal(add[0], np.arange(m))
    assert np.array_equal(mul[1], np.arange(m))
    assert np.array_equal(mul[0], np.zeros(m, dtype=np.int64))
    # every nonzero element has an inverse, and div round-trips
    for a in range(1, m):
        inv = F16.inv(a)
        assert mul[a, inv] == 1
        for b in range(1, m):
            assert F16.mul(F16.div(a, b), b) == a
    # associativity and distributivity over all 4096 triples
    for a in range(m):
        for b in range(m):
            for c in range(m):
                assert add[add[a, b], c] == add[a, add[b, c]]
                assert mul[mul[a, b], c] == mul[a, mul[b, c]]
                assert mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]


def test_gf256_spot_values():
    # alpha^8 reduces by the primitive polynomial x^8+x^4+x^3+x^2+1
    assert F256.alpha_pow(8) == 0b00011101
    assert F256.log_table[2] == 1
    assert F256.mul(0x53, 0xCA) == F256.mul(0xCA, 0x53)
    assert F256.pow(3, 255) == 1
    with pytest.raises(ZeroDivisionError):
        F256.inv(0)
    with pytest.raises(ZeroDivisionError):
        F256.div(5, 0)


def test_validate_rejects_out_of_range():
    with pytest.raises(ValueError):
        F16.validate(16)
    with pytest.raises(ValueError):
        F16.validate(-1)
    assert F16.validate(15) == 15


def test_element_wrapper_arithmetic():
    a = F16.element(7)
    b = F16.element(9)
    assert int(a + b) == F16.add(7, 9)
    assert int(a * b) == F16.mul(7, 9)
    assert int(a / b) == F16.div(7, 9)
    assert int(a ** 3) == F16.pow(7, 3)
    assert int(b.inverse() * b) == 1
    assert a + a == F16.element(0)
    assert not F16.element(0)
    with pytest.raises(ValueError):
        a + gf.GF256.element(7)       # fields must match


def test_poly_divmod_property():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = gf.GFPoly(F16, rng.integers(0, 16, rng.integers(1, 12)).tolist())
        b = gf.GFPoly(F16, rng.integers(0, 16, rng.integers(1, 6)).tolist())
        if b.is_zero:
            continue
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.is_zero or r.degree < b.degree
        assert a // b == q and a % b == r


def test_poly_eval_matches_horner():
    rng = np.random.default_rng(12)
    coeffs = rng.integers(0, 256, 9).tolist()
    p = gf.GFPoly(F256, coeffs)
    for x in rng.integers(0, 256, 20).tolist():
        acc = 0
        for c in reversed(coeffs):
            acc = F256.add(F256.mul(acc, x), c)
        assert p.eval(x) == acc


def test_poly_formal_derivative():
    # characteristic 2: even-power terms vanish, odd powers drop one
    p = gf.GFPoly(F16, [5, 7, 3, 1, 9])      # 5 + 7x + 3x^2 + x^3 + 9x^4
    d = p.formal_derivative()
    assert d == gf.GFPoly(F16, [7, 0, 1])


def test_poly_from_roots():
    roots = [1, 2, 4, 8]
    p = gf.poly_from_roots(F16, roots)
    assert p.degree == 4
    for r in roots:
        assert p.eval(r) == 0
    for x in range(16):
        if x not in roots:
            assert p.eval(x) != 0
