import math
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from core.errors import DomainError
from core.points import ExactPoint, mpf_to_fraction
from expansion.maps import ZeroInputError, b_digit, branch_index, gauss_renyi, magnitude, step_K, step_R


@pytest.mark.parametrize('x, bit, epsilon, d, following', [
    (Fraction(1, 2), 0, 1, 2, Fraction(0)),
    (Fraction(1, 2), 1, 1, 3, Fraction(-1)),
    (Fraction(-2, 3), 1, -1, 2, Fraction(-1, 2)),
    (Fraction(1), 0, 1, 1, Fraction(0)),
    (Fraction(1, 3), 0, 1, 3, Fraction(0)),
])
def test_step_K_rational(x, bit, epsilon, d, following) -> None:
    digit, point = step_K(ExactPoint(x), bit)
    assert (digit.epsilon, digit.d) == (epsilon, d)
    assert point.value == following


def test_step_K_fixed_point() -> None:
    x = ExactPoint.parse('surd:-1:2:1')
    digit, point = step_K(x, 0)
    assert (digit.epsilon, digit.d) == (1, 2)
    with mp.workprec(256):
        assert abs(point.value - x.value) < mpf(2) ** -250


def test_negative_real_step_keeps_precision() -> None:
    # 4 - sqrt(17) = -1/(4 + sqrt(17)), so one Gauss step returns |x|
    x = ExactPoint.parse('surd:-4:17:-1')
    size = magnitude(x)
    digit, point = step_K(x, 0)
    assert (digit.epsilon, digit.d) == (-1, 8)
    with mp.workprec(256):
        assert abs(size + x.value) == 0
        assert abs(point.value - size) < mpf(2) ** -250


def test_step_K_errors() -> None:
    with pytest.raises(ZeroInputError):
        step_K(ExactPoint.rational(0), 0)
    with pytest.raises(DomainError):
        step_K(ExactPoint.rational(1, 2), 2)


def test_branch_intervals_are_left_open_right_closed() -> None:
    assert branch_index(Fraction(1, 3)) == 3
    assert branch_index(Fraction(1, 3) + Fraction(1, 10 ** 12)) == 2
    assert branch_index(Fraction(1, 3) - Fraction(1, 10 ** 12)) == 3
    assert branch_index(Fraction(1)) == 1


def test_branch_index_classifies_reals_exactly() -> None:
    with mp.workprec(256):
        third = mpf(1) / 3
    expected = 3 if mpf_to_fraction(third) <= Fraction(1, 3) else 2
    assert branch_index(third) == expected


def test_step_R() -> None:
    assert step_R(0, ExactPoint.rational(0, 1, 'R')).value == 0
    assert step_R(1, ExactPoint.rational(0, 1, 'R')).value == 0
    assert step_R(1, ExactPoint.rational(1, 1, 'R')).value == 0
    assert step_R(0, ExactPoint.rational(2, 5, 'R')).value == Fraction(1, 2)
    assert step_R(1, ExactPoint.rational(2, 5, 'R')).value == Fraction(2, 3)
    with pytest.raises(DomainError):
        step_R(0, ExactPoint.rational(-1, 2))


def test_gauss_renyi_real() -> None:
    with mp.workprec(128):
        value = gauss_renyi(0, mpf('0.4'), 128)
        assert abs(value - mpf('0.5')) < mpf(2) ** -120


@pytest.mark.parametrize('bit1, bit2, x, expected', [
    (0, 0, Fraction(1, 2), 2),
    (1, 0, Fraction(1, 2), 2),
    (1, 1, Fraction(3, 4), 5),
    (0, 1, Fraction(1, 5), 6),
])
def test_b_digit(bit1, bit2, x, expected) -> None:
    assert b_digit(bit1, bit2, ExactPoint(x, 'R')) == expected


def test_b_digit_infinite_at_zero() -> None:
    assert b_digit(0, 0, ExactPoint.rational(0, 1, 'R')) == math.inf
    assert b_digit(1, 0, ExactPoint.rational(1, 1, 'R')) == math.inf
