"""Sign + log2-magnitude arithmetic on top of mpmath.

The certificate's constants span ranges no fixed-width float can touch: the
Hoelder exponent alpha is ~2^(-c4) with c4 >= 1e36, so log2(c1) itself has
magnitude ~2^(c4).  A :class:`LogValue` stores the sign and log2 of the
magnitude as an mpf, whose bignum exponent absorbs that second level of
growth.  Multiplication, division and powers are exact up to mpf rounding at
the ambient precision; addition of same-signed values uses log-sum-exp and is
correct to ~2^(-prec) relative (far below the 2^-100 contract), with a guard
that skips the exp when the smaller term cannot move the result.

All operations honour the *current* mpmath precision; callers that need a
specific precision wrap their computation in ``mpmath.workprec(bits)``.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp, mpf
import mpmath

from .errors import PrecisionExhaustedError

_LN2 = None
_LN2_PREC = 0

# largest |log2| we are willing to exponentiate: the resulting mpf exponent
# is an integer of that magnitude, so keep its bit size comfortably bounded
_EXP_GUARD_BITS = 1 << 20


def _ln2():
    global _LN2, _LN2_PREC
    if _LN2 is None or _LN2_PREC < mp.prec:
        _LN2 = mpmath.ln(mpf(2))
        _LN2_PREC = mp.prec
    return _LN2


class LogValue:
    """A real number represented as (sign, log2 of magnitude)."""

    __slots__ = ("sign", "log2")

    def __init__(self, sign, log2):
        if sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {sign!r}")
        self.sign = sign
        self.log2 = mpf("-inf") if sign == 0 else mpf(log2)

    # ------------------------------------------------------------------
    # constructors
    @classmethod
    def zero(cls):
        return cls(0, 0)

    @classmethod
    def one(cls):
        return cls(1, mpf(0))

    @classmethod
    def from_real(cls, value):
        """Lift a float/int/Fraction/mpf into log domain (exact log2 at prec)."""
        if isinstance(value, LogValue):
            return value
        if isinstance(value, Fraction):
            if value == 0:
                return cls.zero()
            sign = 1 if value > 0 else -1
            mag = mpf(abs(value.numerator)) / mpf(value.denominator)
            return cls(sign, mpmath.log(mag, 2))
        value = mpf(value)
        if value == 0:
            return cls.zero()
        sign = 1 if value > 0 else -1
        return cls(sign, mpmath.log(abs(value), 2))

    @classmethod
    def exp2(cls, log2_value, sign=1):
        """The number sign * 2**log2_value."""
        return cls(sign, mpf(log2_value))

    # ------------------------------------------------------------------
    # predicates and accessors
    @property
    def is_zero(self):
        return self.sign == 0

    @property
    def is_positive(self):
        return self.sign > 0

    def is_finite(self):
        return self.sign == 0 or mpmath.isfinite(self.log2)

    def ln(self):
        """Natural log of the magnitude, as mpf."""
        return self.log2 * _ln2()

    def log10(self):
        """log10 of the magnitude, as mpf."""
        return self.log2 * _ln2() / mpmath.ln(mpf(10))

    def to_mpf(self):
        """The represented value as an mpf; guarded against absurd exponents."""
        if self.sign == 0:
            return mpf(0)
        if abs(self.log2) > mpf(2) ** _EXP_GUARD_BITS:
            raise PrecisionExhaustedError(
                "to_mpf", f"log2 magnitude ~2^{_EXP_GUARD_BITS} exceeds the exponent guard"
            )
        return self.sign * mpf(2) ** self.log2

    def to_float(self):
        """Round to double; collapses to 0.0 or +-inf outside double range."""
        if self.sign == 0:
            return 0.0
        if self.log2 > 1100:
            return float("inf") * self.sign
        if self.log2 < -1120:
            return 0.0 * self.sign
        return float(self.sign * mpf(2) ** self.log2)

    # ------------------------------------------------------------------
    # arithmetic
    def __mul__(self, other):
        other = LogValue.from_real(other)
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        return LogValue(self.sign * other.sign, self.log2 + other.log2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = LogValue.from_real(other)
        if other.sign == 0:
            raise ZeroDivisionError("log-domain division by zero")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.sign * other.sign, self.log2 - other.log2)

    def __rtruediv__(self, other):
        return LogValue.from_real(other) / self

    def __pow__(self, exponent):
        if isinstance(exponent, LogValue):
            exponent = exponent.to_mpf()
        if isinstance(exponent, Fraction):
            exponent = mpf(exponent.numerator) / exponent.denominator
        exponent = mpf(exponent)
        if self.sign == 0:
            if exponent > 0:
                return LogValue.zero()
            raise ZeroDivisionError("0 raised to a nonpositive power")
        if self.sign < 0:
            if exponent != mpmath.floor(exponent):
                raise ValueError("negative base needs an integer exponent")
            sign = 1 if mpf(exponent) % 2 == 0 else -1
            return LogValue(sign, self.log2 * exponent)
        return LogValue(1, self.log2 * exponent)

    def __add__(self, other):
        other = LogValue.from_real(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.sign != other.sign:
            raise ValueError(
                "mixed-sign log-domain addition is not supported; "
                "the certificate chain only ever adds terms of one sign"
            )
        hi, lo = (self, other) if self.log2 >= other.log2 else (other, self)
        delta = lo.log2 - hi.log2
        if delta < -(mp.prec + 64):
            return LogValue(hi.sign, hi.log2)
        return LogValue(hi.sign, hi.log2 + mpmath.log(1 + mpf(2) ** delta, 2))

    __radd__ = __add__

    def __neg__(self):
        return LogValue(-self.sign, self.log2)

    # ------------------------------------------------------------------
    # total order on the represented reals
    def _cmp(self, other):
        other = LogValue.from_real(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        if self.log2 == other.log2:
            return 0
        mag = -1 if self.log2 < other.log2 else 1
        return mag * self.sign

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (LogValue, int, float, mpf)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash((self.sign, self.log2))

    def __repr__(self):
        if self.sign == 0:
            return "LogValue(0)"
        s = "-" if self.sign < 0 else ""
        return f"LogValue({s}2^{mpmath.nstr(self.log2, 12)})"


def log_min(*values):
    out = values[0]
    for v in values[1:]:
        if v < out:
            out = v
    return out


def log_max(*values):
    out = values[0]
    for v in values[1:]:
        if v > out:
            out = v
    return out


def log_sum(terms):
    """Sum of an iterable of same-signed LogValues."""
    total = LogValue.zero()
    for t in terms:
        total = total + t
    return total
