"""Arithmetic over GF(2^m) and polynomials over it.

Field elements are integers in [0, 2^m) whose bits are the coefficients
of a binary polynomial; the field is the quotient by a primitive
polynomial of degree m.  Multiplication, division and inversion run on
precomputed exp/log tables over the multiplicative group of order
2^m - 1 (the exp table is doubled so products of two logs never need a
modulo).

Two fields cover every code in this package:

    GF16  = GFField(4, 0b10011)      # x^4 + x + 1
    GF256 = GFField(8, 0b100011101)  # x^8 + x^4 + x^3 + x^2 + 1

The zero polynomial is the empty coefficient list and reports degree
-inf, so ``p.degree < q.degree`` comparisons in the Euclid loop need no
special casing.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

NEG_INF = float("-inf")


class GFField:
    """GF(2^m) with table-driven arithmetic on plain ints.

    Parameters
    ----------
    m : field degree, 2 <= m <= 16.
    primitive_poly : degree-m binary polynomial given as a bit mask
        (bit i = coefficient of x^i).  Must be primitive: x must
        generate the full multiplicative group.  Raises ValueError
        otherwise.
    """

    def __init__(self, m: int, primitive_poly: int):
        if not 2 <= m <= 16:
            raise ValueError(f"unsupported field degree m={m}")
        if primitive_poly >> m != 1:
            raise ValueError(
                f"primitive_poly 0x{primitive_poly:x} does not have degree {m}")
        self.m = m
        self.primitive_poly = primitive_poly
        self.order = 1 << m          # number of elements, incl. 0
        self.group_order = self.order - 1

        exp = [0] * (2 * self.group_order)
        log = [0] * self.order
        val = 1
        for i in range(self.group_order):
            if i > 0 and val == 1:
                # cycled back to 1 early: x is not a generator
                raise ValueError(
                    f"0x{primitive_poly:x} is not primitive over GF(2^{m})")
            exp[i] = val
            log[val] = i
            val <<= 1
            if val & self.order:
                val ^= primitive_poly
        if val != 1:
            raise ValueError(
                f"0x{primitive_poly:x} is not primitive over GF(2^{m})")
        # second copy so exp[log a + log b] needs no reduction
        exp[self.group_order:] = exp[:self.group_order]
        self._exp = exp
        self._log = log
        # table views for the array kernels
        self.exp_table = np.array(exp, dtype=np.int32)
        self.log_table = np.array(log, dtype=np.int32)

    # -- scalar ops on raw ints ------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by the zero element")
        if a == 0:
            return 0
        return self._exp[self._log[a] - self._log[b] + self.group_order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("the zero element has no inverse")
        return self._exp[self.group_order - self._log[a]]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 ** negative")
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % self.group_order]

    def alpha_pow(self, e: int) -> int:
        """alpha^e for the generator alpha = x (any integer exponent)."""
        return self._exp[e % self.group_order]

    def element(self, value: int) -> "GFElement":
        return GFElement(self, value)

    def validate(self, value: int) -> int:
        if not 0 <= value < self.order:
            raise ValueError(f"{value} is not an element of GF(2^{self.m})")
        return value

    def __repr__(self) -> str:
        return f"GFField(2^{self.m}, poly=0x{self.primitive_poly:x})"


class GFElement:
    """A field element with operator sugar; wraps (field, int value)."""

    __slots__ = ("field", "value")

    def __init__(self, field: GFField, value: int):
        self.field = field
        self.value = field.validate(value)

    def _coerce(self, other) -> int:
        if isinstance(other, GFElement):
            if other.field is not self.field:
                raise ValueError("elements from different fields")
            return other.value
        return self.field.validate(int(other))

    def __add__(self, other):
        return GFElement(self.field, self.value ^ self._coerce(other))

    __radd__ = __add__
    __sub__ = __add__          # characteristic 2
    __rsub__ = __add__

    def __mul__(self, other):
        return GFElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GFElement(self.field, self.field.div(self.value, self._coerce(other)))

    def __pow__(self, e: int):
        return GFElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "GFElement":
        return GFElement(self.field, self.field.inv(self.value))

    def __eq__(self, other) -> bool:
        if isinstance(other, GFElement):
            return self.field is other.field and self.value == other.value
        return self.value == other

    def __hash__(self) -> int:
        return hash((id(self.field), self.value))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"GF(2^{self.field.m}):{self.value:#x}"


class GFPoly:
    """Polynomial over GF(2^m); coeffs[i] is the coefficient of x^i.

    Stored in canonical form: no trailing zero coefficients, and the
    zero polynomial is the empty tuple with degree -inf.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: GFField, coeffs: Iterable[int] = ()):
        cs = [field.validate(int(c)) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "GFPoly") -> "GFPoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return GFPoly(self.field,
                      [self.coeff(i) ^ other.coeff(i) for i in range(n)])

    __sub__ = __add__

    def __mul__(self, other: "GFPoly") -> "GFPoly":
        self._check(other)
        if self.is_zero or other.is_zero:
            return GFPoly(self.field)
        f = self.field
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] ^= f.mul(a, b)
        return GFPoly(f, out)

    def scale(self, c: int) -> "GFPoly":
        f = self.field
        return GFPoly(f, [f.mul(c, a) for a in self.coeffs])

    def shift(self, k: int) -> "GFPoly":
        """Multiply by x^k."""
        if self.is_zero:
            return self
        return GFPoly(self.field, (0,) * k + self.coeffs)

    def __divmod__(self, other: "GFPoly") -> tuple["GFPoly", "GFPoly"]:
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return GFPoly(f), self
        quot = [0] * (dq + 1)
        lead_inv = f.inv(other.coeffs[-1])
        for i in range(dq, -1, -1):
            c = rem[i + len(other.coeffs) - 1]
            if c == 0:
                continue
            q = f.mul(c, lead_inv)
            quot[i] = q
            for j, b in enumerate(other.coeffs):
                rem[i + j] ^= f.mul(q, b)
        return GFPoly(f, quot), GFPoly(f, rem)

    def __floordiv__(self, other: "GFPoly") -> "GFPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "GFPoly") -> "GFPoly":
        return divmod(self, other)[1]

    def eval(self, x: int) -> int:
        """Horner evaluation at the element x."""
        f = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.mul(acc, x) ^ c
        return acc

    def formal_derivative(self) -> "GFPoly":
        # char 2: even-power terms die, d/dx x^(2i+1) = x^(2i)
        return GFPoly(self.field,
                      [c if i % 2 == 1 else 0
                       for i, c in enumerate(self.coeffs)][1:] or ())

    def monic(self) -> "GFPoly":
        if self.is_zero:
            return self
        return self.scale(self.field.inv(self.coeffs[-1]))

    def _check(self, other: "GFPoly") -> None:
        if other.field is not self.field:
            raise ValueError("polynomials over different fields")

    def __eq__(self, other) -> bool:
        return (isinstance(other, GFPoly) and other.field is self.field
                and other.coeffs == self.coeffs)

    def __hash__(self) -> int:
        return hash((id(self.field), self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero:
            return "GFPoly(0)"
        terms = [f"{c:#x}*x^{i}" if i else f"{c:#x}"
                 for i, c in enumerate(self.coeffs) if c]
        return "GFPoly(" + " + ".join(terms) + ")"


def poly_from_roots(field: GFField, roots: Sequence[int]) -> GFPoly:
    """prod (x - r) over the given roots (minus is plus in char 2)."""
    p = GFPoly(field, [1])
    for r in roots:
        p = p * GFPoly(field, [r, 1])
    return p


GF16 = GFField(4, 0b10011)
GF256 = GFField(8, 0b100011101)
