from fractions import Fraction

import pytest

from sl3jones.arith import (
    M1,
    M2,
    Q,
    QLaurent,
    RatFuncQMM,
    UnluckyPrimeError,
    content_split,
    eval_mod,
    qmm,
    ratfunc_canonical,
    rational_mod,
)


def q_(e, c=1):
    return QLaurent.q_power(e, c)


def test_eval_mod_examples():
    x = q_(1) + q_(-1)
    # 64 = 1 mod 7, so q + 1/q -> 2
    assert eval_mod(x, 2, 7).residue == 2
    assert eval_mod(x, 2, 7).residue == (64 + pow(64, -1, 7)) % 7
    assert eval_mod(QLaurent.zero(), 2, 2147483647).residue == 0
    assert eval_mod(QLaurent.v_power(3), 2, 2147483647).residue == 8


def test_eval_mod_rational_and_unlucky():
    x = QLaurent.constant(Fraction(1, 3))
    assert eval_mod(x, 2, 11).residue == pow(3, -1, 11)
    with pytest.raises(UnluckyPrimeError):
        eval_mod(QLaurent.constant(Fraction(1, 7)), 2, 7)
    with pytest.raises(ValueError):
        eval_mod(x, 7, 7)


def test_laurent_basics():
    x = QLaurent.from_dict({-3: 2, 6: 1})
    assert [e for e, _ in x.terms()] == [-3, 6]
    assert not x.is_integral_in_q()
    assert q_(2, 3).is_integral_in_q()
    assert not QLaurent.constant(Fraction(1, 2)).is_integral_in_q()
    assert (x - x).is_zero()
    assert str(q_(1) + 1 + q_(-1)) == "q + 1 + q^-1"
    assert str(QLaurent.v_power(3) + QLaurent.v_power(-3)) == "v^3 + v^-3"
    y = (q_(1) - 1) * (q_(1) + 1)
    assert y.exact_div(q_(1) - 1) == q_(1) + 1


def test_content_split_examples():
    c, f = content_split(2 * Q * M1 + 2 * Q * M2)
    assert c == 2 and f == Q * M1 + Q * M2
    c, f = content_split(-M1)
    assert c == -1 and f == M1
    c, f = content_split(qmm({(0, 1, 1): Fraction(3, 2)}))
    assert c == Fraction(3, 2) and f == M1 * M2
    with pytest.raises(ValueError):
        content_split(qmm(0))


def test_ratfunc_canonical_examples():
    r = ratfunc_canonical(Q * M1 - Q, M1 - 1)
    assert r.num == Q and r.den.is_one()
    r = ratfunc_canonical(M1, -M2)
    assert r.num == -M1 and r.den == M2
    r = ratfunc_canonical(qmm(0), M1)
    assert r.is_zero() and r.den.is_one()
    with pytest.raises(ZeroDivisionError):
        ratfunc_canonical(M1, qmm(0))


def test_ratfunc_field_ops():
    a = RatFuncQMM(M1, M1 - 1)
    b = RatFuncQMM(1, Q * M2 + 1)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a * a.inverse() == RatFuncQMM(1)
    assert a.shift(1, 0) == RatFuncQMM(Q * M1, Q * M1 - 1)
    assert a.swap() == RatFuncQMM(M2, M2 - 1)
    assert RatFuncQMM(M1 * M2, Q * M1).eval_qpowers(2, 3) == q_(2)


def test_rational_mod():
    assert rational_mod(Fraction(-1, 2), 7) == 3
