"""systematic Reed-Solomon codes over GF(2^m).

Narrow-sense codes: the generator has roots alpha^1 .. alpha^2t.  A
codeword lists symbols in transmit order, message first; symbol j is
the coefficient of x^(n-1-j), so parity is the remainder of
x^2t * m(x) modulo the generator and occupies the low powers.

Any n <= 2^m - 1 is accepted; n below the field bound is the shortened
code of the (2^m - 1, 2^m - 1 - 2t) mother code (the dropped leading
message symbols are implicit zeros), which is how the per-burst-profile
codes derive from the byte-field mother code.  `shortened` / rs_shorten
shorten further.

Decoding runs twice in this package, on purpose:

* `decode` is the production path, batch array code in the kernel
  backend (Berlekamp-Massey key-equation solver).
* `syndromes` / `solve_key_equation` / `find_errors` /
  `decode_reference` compose the extended-Euclid route on GFPoly
  objects.  The tests hold the two routes to identical answers.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from secphy import _kernels
from secphy.gf import GF256, GFElement, GFField, GFPoly, poly_from_roots


class DecodeFailure(Exception):
    """More errors than the code can correct (or an inconsistent word)."""


class ErrorLocator(NamedTuple):
    sigma: GFPoly      # error locator, sigma(0) = 1 when solvable
    omega: GFPoly      # error evaluator, deg < deg sigma


class ErrorPattern(NamedTuple):
    locations: list[int]    # position powers k; symbol index is n-1-k
    magnitudes: list[int]


class RSCode:
    """RS(n, k) over the given field; t = (n - k) // 2."""

    def __init__(self, field: GFField, n: int, k: int):
        if not 0 < k < n <= field.group_order:
            raise ValueError(f"invalid RS parameters n={n}, k={k} "
                             f"over GF(2^{field.m})")
        if (n - k) % 2:
            raise ValueError("n - k must be even (2t parity symbols)")
        self.field = field
        self.n = n
        self.k = k
        self.t = (n - k) // 2
        self.npar = n - k
        self.generator = poly_from_roots(
            field, [field.alpha_pow(i) for i in range(1, self.npar + 1)])
        # gen_mul[v][j] = v * g_(npar-1-j): the synthetic-division row
        gen_desc = [self.generator.coeff(self.npar - 1 - j)
                    for j in range(self.npar)]
        tab = np.zeros((field.order, self.npar), dtype=np.uint8)
        for v in range(1, field.order):
            tab[v] = [field.mul(v, g) for g in gen_desc]
        self._gen_mul = tab

    # ------------------------------------------------------ fast path

    def encode_batch(self, msgs: np.ndarray) -> np.ndarray:
        """Encode rows of uint8 symbols; returns full codeword rows."""
        msgs = np.ascontiguousarray(msgs, dtype=np.uint8)
        if msgs.ndim != 2 or msgs.shape[1] != self.k:
            raise ValueError(f"expected (B, {self.k}) message rows")
        parity = _kernels.rs_encode_batch(msgs, self._gen_mul)
        return np.hstack([msgs, parity])

    def decode_batch(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Correct codeword rows in place.

        Returns (message rows, per-row corrected count with -1 marking
        an uncorrectable row).  No exception: callers that want one use
        `decode`.
        """
        words = np.ascontiguousarray(words, dtype=np.uint8)
        if words.ndim != 2 or words.shape[1] != self.n:
            raise ValueError(f"expected (B, {self.n}) codeword rows")
        counts = _kernels.rs_decode_batch(
            words, self.field.exp_table, self.field.log_table,
            self.npar, self.field.group_order, self.t)
        return words[:, :self.k], counts

    def encode(self, msg: Sequence[int]) -> list[int]:
        """Systematic codeword: message symbols then 2t parity."""
        if len(msg) != self.k:
            raise ValueError(f"message must have {self.k} symbols")
        row = np.array([msg], dtype=np.uint8)
        return self.encode_batch(row)[0].tolist()

    def decode(self, word: Sequence[int]) -> tuple[list[int], int]:
        """Corrected message and the number of symbols fixed.

        Raises DecodeFailure when more than t symbols are wrong (or the
        pattern is inconsistent); miscorrection to a different codeword
        within distance t is undetectable, as for any bounded-distance
        decoder.
        """
        if len(word) != self.n:
            raise ValueError(f"word must have {self.n} symbols")
        rows = np.array([word], dtype=np.uint8)
        msgs, counts = self.decode_batch(rows)
        if counts[0] < 0:
            raise DecodeFailure(f"more than t={self.t} symbol errors")
        return msgs[0].tolist(), int(counts[0])

    # ------------------------------------------------- reference path

    def _word_poly(self, word: Sequence[int]) -> GFPoly:
        return GFPoly(self.field, list(reversed(list(word))))

    def syndromes(self, word: Sequence[int]) -> list[GFElement]:
        """S_i = r(alpha^i) for i = 1..2t."""
        r = self._word_poly(word)
        f = self.field
        return [f.element(r.eval(f.alpha_pow(i)))
                for i in range(1, self.npar + 1)]

    def solve_key_equation(self, synd: Sequence[GFElement | int]) -> ErrorLocator:
        """Extended Euclid on (x^2t, S(x)), stopped when deg r < t.

        S(x) = S_1 + S_2 x + ... + S_2t x^(2t-1); the returned pair is
        normalized so sigma(0) = 1 whenever the constant term allows it
        (find_errors rejects the rest).
        """
        f = self.field
        s_poly = GFPoly(f, [int(s) for s in synd])
        if s_poly.is_zero:
            return ErrorLocator(GFPoly(f, [1]), GFPoly(f))
        r_prev = GFPoly(f, [0] * self.npar + [1])     # x^2t
        r_cur = s_poly
        v_prev, v_cur = GFPoly(f), GFPoly(f, [1])
        while r_cur.degree >= self.t:
            q, r_next = divmod(r_prev, r_cur)
            v_prev, v_cur = v_cur, v_prev + q * v_cur
            r_prev, r_cur = r_cur, r_next
        c = v_cur.coeff(0)
        if c != 0:
            inv = f.inv(c)
            v_cur = v_cur.scale(inv)
            r_cur = r_cur.scale(inv)
        return ErrorLocator(v_cur, r_cur)

    def find_errors(self, locator: ErrorLocator) -> ErrorPattern:
        """Chien scan for locations, Forney formula for magnitudes."""
        f = self.field
        sigma, omega = locator
        if sigma.coeff(0) != 1:
            raise DecodeFailure("degenerate locator (sigma(0) != 1)")
        n_err = sigma.degree
        if n_err > self.t:
            raise DecodeFailure(f"locator degree {n_err} exceeds t={self.t}")
        sigma_d = sigma.formal_derivative()
        locations: list[int] = []
        magnitudes: list[int] = []
        for k in range(f.group_order):
            x_inv = f.alpha_pow(-k)
            if sigma.eval(x_inv) != 0:
                continue
            if k >= self.n:
                raise DecodeFailure(f"error location alpha^{k} outside word")
            denom = sigma_d.eval(x_inv)
            if denom == 0:
                raise DecodeFailure("repeated locator root")
            y = f.div(omega.eval(x_inv), denom)
            if y == 0:
                raise DecodeFailure("zero error magnitude")
            locations.append(k)
            magnitudes.append(y)
        if len(locations) != n_err:
            raise DecodeFailure("locator root count does not match degree")
        return ErrorPattern(locations, magnitudes)

    def decode_reference(self, word: Sequence[int]) -> tuple[list[int], int]:
        """Euclid-route decoder; same contract as `decode`."""
        synd = self.syndromes(word)
        if not any(int(s) for s in synd):
            return list(word)[:self.k], 0
        pattern = self.find_errors(self.solve_key_equation(synd))
        fixed = list(word)
        for k, y in zip(pattern.locations, pattern.magnitudes):
            fixed[self.n - 1 - k] ^= y
        if any(int(s) for s in self.syndromes(fixed)):
            raise DecodeFailure("residual syndromes after correction")
        return fixed[:self.k], len(pattern.locations)

    # ------------------------------------------------------ shortening

    def shortened(self, drop: int) -> "RSCode":
        """Drop leading message symbols (implicit zeros on the wire)."""
        if not 0 <= drop < self.k:
            raise ValueError(f"drop must be in [0, {self.k})")
        return RSCode(self.field, self.n - drop, self.k - drop)

    def __repr__(self) -> str:
        return f"RS({self.n},{self.k}) t={self.t} over GF(2^{self.field.m})"


def rs_shorten(code: RSCode, drop: int) -> RSCode:
    return code.shortened(drop)


RS_255_239 = RSCode(GF256, 255, 239)
