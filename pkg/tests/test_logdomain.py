import math

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf
import mpmath

from gapcert.errors import PrecisionExhaustedError
from gapcert.logdomain import LogValue, log_max, log_min


finite_positive = st.floats(min_value=1e-300, max_value=1e300,
                            allow_nan=False, allow_infinity=False)


def test_roundtrip():
    with mp.workprec(192):
        for x in (1.0, 2.0, 0.5, 3.75, 1e-200, 1e250):
            assert LogValue.from_real(x).to_float() == pytest.approx(x, rel=1e-15)
        assert LogValue.from_real(-2.5).to_float() == pytest.approx(-2.5)
        assert LogValue.zero().to_float() == 0.0


@given(finite_positive, finite_positive)
@settings(max_examples=60, deadline=None)
def test_mul_matches_logs(a, b):
    with mp.workprec(192):
        prod = LogValue.from_real(a) * LogValue.from_real(b)
        assert prod.log2 == pytest.approx(math.log2(a) + math.log2(b), rel=1e-12, abs=1e-12)


@given(finite_positive, finite_positive)
@settings(max_examples=60, deadline=None)
def test_add_matches_sum(a, b):
    with mp.workprec(192):
        s = LogValue.from_real(a) + LogValue.from_real(b)
        expected = mpmath.log(mpf(a) + mpf(b), 2)
        assert abs(s.log2 - expected) <= 2 ** -100 * max(abs(expected), 1)


@given(finite_positive, st.floats(min_value=-40, max_value=40,
                                  allow_nan=False, allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_pow(a, t):
    with mp.workprec(192):
        p = LogValue.from_real(a) ** t
        assert p.log2 == pytest.approx(t * math.log2(a), rel=1e-12, abs=1e-9)


@given(st.floats(min_value=-1e300, max_value=1e300, allow_nan=False),
       st.floats(min_value=-1e300, max_value=1e300, allow_nan=False))
@settings(max_examples=80, deadline=None)
def test_comparisons_match_reals(a, b):
    la, lb = LogValue.from_real(a), LogValue.from_real(b)
    assert (la < lb) == (a < b)
    assert (la >= lb) == (a >= b)


def test_huge_exponents():
    # values like 2^(2^120) round-trip through multiplication and powers
    with mp.workprec(192):
        big = LogValue.exp2(mpf(2) ** 120)
        prod = big * big
        assert prod.log2 == mpf(2) ** 121
        root = prod ** 0.5
        assert root.log2 == mpf(2) ** 120
        # adding something astronomically smaller is the identity
        assert (big + LogValue.one()).log2 == big.log2


def test_add_mixed_sign_rejected():
    with pytest.raises(ValueError):
        LogValue.from_real(1.0) + LogValue.from_real(-1.0)


def test_zero_power_rules():
    assert (LogValue.zero() ** 2.5).is_zero
    with pytest.raises(ZeroDivisionError):
        LogValue.zero() ** -1.0


def test_negative_base_integer_powers():
    v = LogValue.from_real(-2.0)
    assert (v ** 2).to_float() == pytest.approx(4.0)
    assert (v ** 3).to_float() == pytest.approx(-8.0)
    with pytest.raises(ValueError):
        v ** 0.5


def test_to_mpf_guard():
    with mp.workprec(64):
        # log2 magnitude 2^(2^21) would need a two-megabit exponent integer
        monster = LogValue.exp2(mpf(2) ** (2**21))
        with pytest.raises(PrecisionExhaustedError):
            monster.to_mpf()


def test_min_max_helpers():
    vals = [LogValue.from_real(x) for x in (3.0, -5.0, 0.25)]
    assert log_min(*vals).to_float() == pytest.approx(-5.0)
    assert log_max(*vals).to_float() == pytest.approx(3.0)


def test_determinism():
    with mp.workprec(192):
        a = (LogValue.from_real(3.7) ** 2.5 + LogValue.from_real(0.1)) / 7
        b = (LogValue.from_real(3.7) ** 2.5 + LogValue.from_real(0.1)) / 7
        assert a.log2 == b.log2 and a.sign == b.sign
