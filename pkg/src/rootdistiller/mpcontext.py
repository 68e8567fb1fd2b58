"""Fixed-precision real arithmetic on top of MPFR (via gmpy2).

Every operation on an :class:`MPReal` is rounded (to nearest, ties to even)
to the binary precision of its :class:`PrecContext`. Contexts never touch
gmpy2's global context; each thread gets its own private gmpy2 context
object per precision, so there is no shared mutable rounding state.
"""

from __future__ import annotations

import re
import threading
from fractions import Fraction
from dataclasses import dataclass
from typing import Union

import gmpy2
from gmpy2 import mpfr

GUARD_BITS = 8

_DECIMAL_RE = re.compile(r"^\s*[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\s*$")
_local = threading.local()


def _digits_to_bits(prec_digits: int) -> int:
    # exact ceil(prec_digits * log2(10)); 10**d is never a power of two for d >= 1
    return (10**prec_digits - 1).bit_length()


@dataclass(frozen=True)
class PrecContext:
    prec_digits: int
    prec_bits: int

    @property
    def gmp(self) -> gmpy2.context:
        """Thread-local gmpy2 context at this precision (round-to-nearest)."""
        cache = getattr(_local, "contexts", None)
        if cache is None:
            cache = _local.contexts = {}
        c = cache.get(self.prec_bits)
        if c is None:
            c = gmpy2.context(
                precision=self.prec_bits,
                round=gmpy2.RoundToNearest,
                allow_release_gil=True,
            )
            cache[self.prec_bits] = c
        return c

    def real(self, value: "Number") -> "MPReal":
        """Round an int, decimal string, mpfr or MPReal into this context."""
        if isinstance(value, MPReal):
            value = value.value
        if isinstance(value, str):
            return parse_decimal(value, self)
        if isinstance(value, float):
            raise TypeError("binary floats are not accepted; pass a decimal string")
        if isinstance(value, gmpy2.mpfr):
            return MPReal(self.gmp.plus(value), self)
        return MPReal(mpfr(value, self.prec_bits, context=self.gmp), self)

    def pow10(self, n: int) -> "MPReal":
        """10**n rounded to this context."""
        return parse_decimal(f"1e{n}", self)

    @property
    def zero(self) -> "MPReal":
        return MPReal(mpfr(0, self.prec_bits), self)


Number = Union["MPReal", int, str, "gmpy2.mpz", "gmpy2.mpfr"]


def make_context(prec_digits: int) -> PrecContext:
    if not isinstance(prec_digits, int) or prec_digits < 1:
        raise ValueError(f"prec_digits must be a positive integer, got {prec_digits!r}")
    return PrecContext(prec_digits, _digits_to_bits(prec_digits) + GUARD_BITS)


class MPReal:
    """Immutable arbitrary-precision real bound to a :class:`PrecContext`."""

    __slots__ = ("value", "ctx")

    def __init__(self, value: gmpy2.mpfr, ctx: PrecContext):
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "ctx", ctx)

    def __setattr__(self, name, value):
        raise AttributeError("MPReal is immutable")

    def _raw(self, other):
        if isinstance(other, MPReal):
            return other.value
        if isinstance(other, (int, gmpy2.mpz, gmpy2.mpfr)):
            return other
        return NotImplemented

    def _wrap(self, v) -> MPReal:
        return MPReal(v, self.ctx)

    def __add__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.gmp.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.gmp.sub(self.value, o))

    def __rsub__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.gmp.sub(o, self.value))

    def __mul__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.gmp.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.gmp.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._raw(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.gmp.div(o, self.value))

    def __neg__(self):
        return self._wrap(self.ctx.gmp.minus(self.value))

    def __abs__(self):
        return self._wrap(self.ctx.gmp.abs(self.value))

    def _cmp_operand(self, other):
        o = self._raw(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare MPReal with {type(other).__name__}")
        return o

    def __lt__(self, other):
        return self.value < self._cmp_operand(other)

    def __le__(self, other):
        return self.value <= self._cmp_operand(other)

    def __gt__(self, other):
        return self.value > self._cmp_operand(other)

    def __ge__(self, other):
        return self.value >= self._cmp_operand(other)

    def __eq__(self, other):
        o = self._raw(other)
        if o is NotImplemented:
            return NotImplemented
        return self.value == o

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"MPReal({to_decimal(self)!r}, prec_digits={self.ctx.prec_digits})"

    def __str__(self):
        return to_decimal(self)

    def sign(self) -> int:
        return gmpy2.sign(self.value)

    def same_bits(self, other: MPReal) -> bool:
        """Bitwise identity: equal value, same precision (NaN matches NaN)."""
        a, b = self.value, other.value
        if gmpy2.is_nan(a) or gmpy2.is_nan(b):
            return gmpy2.is_nan(a) and gmpy2.is_nan(b)
        return a == b and a.precision == b.precision and gmpy2.is_signed(a) == gmpy2.is_signed(b)


def parse_decimal(s: str, ctx: PrecContext) -> MPReal:
    """Nearest representable value to the decimal literal ``s``."""
    if not isinstance(s, str) or not _DECIMAL_RE.match(s):
        raise ValueError(f"malformed decimal literal: {s!r}")
    return MPReal(mpfr(s.strip(), ctx.prec_bits, context=ctx.gmp), ctx)


def is_numeric(v: MPReal) -> bool:
    return gmpy2.is_finite(v.value)


def to_decimal(v: MPReal, digits: int | None = None) -> str:
    """Decimal string with ``digits`` significant digits (default: context digits).

    Fixed notation for decimal exponents in [-6, 6), scientific otherwise,
    e.g. ``-800.00000`` and ``5.4975581e11`` at 8 digits.
    """
    x = v.value
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "-inf" if x < 0 else "inf"
    n = digits if digits is not None else v.ctx.prec_digits
    if x == 0:
        return "0"
    mant, exp = _digits(x, n)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    e = exp - 1  # value = d.ddd * 10**e
    if -6 <= e < 6:
        if e >= 0:
            mant = mant.ljust(e + 1, "0")
            head, tail = mant[: e + 1], mant[e + 1:]
            body = head + ("." + tail if tail else "")
        else:
            body = "0." + "0" * (-e - 1) + mant
    else:
        body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "") + f"e{e}"
    return sign + body


def _digits(x: gmpy2.mpfr, n: int) -> tuple[str, int]:
    """Signed mantissa string of ``n`` digits and exponent: x ~ 0.mant * 10**exp."""
    if n >= 2:
        mant, exp, _ = x.digits(10, n)
        return mant, exp
    # MPFR needs n >= 2; round the exact rational instead (ties to even)
    q = Fraction(*(int(t) for t in x.as_integer_ratio()))
    sign = "-" if q < 0 else ""
    q = abs(q)
    exp = len(str(q.numerator // q.denominator)) if q >= 1 else 1 - len(str(q.denominator // q.numerator))
    while Fraction(10) ** (exp - 1) > q:
        exp -= 1
    while Fraction(10) ** exp <= q:
        exp += 1
    d = round(q / Fraction(10) ** (exp - 1))
    if d == 10:
        d, exp = 1, exp + 1
    return sign + str(d), exp


def abbreviate(s: str, keep: int = 100) -> str:
    """First and last ``keep`` characters of a long decimal string."""
    if len(s) <= 2 * keep + 5:
        return s
    return f"{s[:keep]}...{s[-keep:]}"
