# expansion/maps.py
import math
from fractions import Fraction
from typing import Tuple

from mpmath import mp

from core.digits import INFINITE_DIGIT, DigitValue, SignedDigit
from core.errors import DomainError, RandomCFError
from core.points import ExactPoint, Number, mpf_to_fraction

# Custom Exceptions for this module
class ZeroInputError(RandomCFError):
    """Raised when the continued fraction map is applied at x = 0."""
    pass


def branch_index(value: Number) -> int:
    """The unique k with value in (1/(k+1), 1/k], for 0 < value <= 1.

    Real values are classified through their exact binary rational, so a
    point within rounding distance of an endpoint 1/k still lands on the
    correct side.
    """
    exact = value if isinstance(value, Fraction) else mpf_to_fraction(value)
    if not 0 < exact <= 1:
        raise DomainError(f"branch index needs a value in (0,1], got {value}")
    return math.floor(1 / exact)


def magnitude(x: ExactPoint) -> Number:
    """|x| at the precision the point carries."""
    if x.is_rational:
        return abs(x.value)
    with mp.workprec(x.precision):
        return abs(x.value)


def _zero_like(value: Number) -> Number:
    return Fraction(0) if isinstance(value, Fraction) else value - value


def step_K(x: ExactPoint, omega_bit: int) -> Tuple[SignedDigit, ExactPoint]:
    """One application of K: returns the digit (sign(x), k + omega_bit) and
    the next point |1/x| - d."""
    if omega_bit not in (0, 1):
        raise DomainError(f"omega bit must be 0 or 1, got {omega_bit}")
    if x.is_zero:
        raise ZeroInputError("step_K is undefined at x = 0; the expansion has terminated")
    if not -1 <= x.value <= 1:
        raise DomainError(f"step_K needs |x| <= 1, got {x}")

    size = magnitude(x)
    k = branch_index(size)
    d = k + omega_bit
    digit = SignedDigit(epsilon=1 if x.value > 0 else -1, d=d)

    if x.is_rational:
        following = 1 / size - d
    else:
        with mp.workprec(x.precision):
            following = 1 / size - d
    return digit, ExactPoint(following, 'K', x.precision)


def gauss_renyi(bit: int, value: Number, precision=None) -> Number:
    """T_0 (bit 0) or T_1 (bit 1) on [0,1]."""
    if (bit == 0 and value == 0) or (bit == 1 and value == 1):
        return _zero_like(value)
    if isinstance(value, Fraction):
        r = 1 / value if bit == 0 else 1 / (1 - value)
        return r - math.floor(r)
    with mp.workprec(precision or mp.prec):
        r = 1 / value if bit == 0 else 1 / (1 - value)
        return mp.frac(r)


def step_R(bit: int, x: ExactPoint) -> ExactPoint:
    """The fibre map of R: T_bit x."""
    if bit not in (0, 1):
        raise DomainError(f"omega bit must be 0 or 1, got {bit}")
    if not 0 <= x.value <= 1:
        raise DomainError(f"step_R needs x in [0,1], got {x}")
    return ExactPoint(gauss_renyi(bit, x.value, x.precision), 'R', x.precision)


def b_digit(bit1: int, bit2: int, x: ExactPoint) -> DigitValue:
    """b(omega, x): k + omega_2 where omega_1 + (-1)^omega_1 x lies in (1/(k+1), 1/k]."""
    if bit1 == 0:
        y = x.value
    elif x.is_rational:
        y = 1 - x.value
    else:
        with mp.workprec(x.precision):
            y = 1 - x.value
    if y == 0:
        return INFINITE_DIGIT
    return branch_index(y) + bit2
