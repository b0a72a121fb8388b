import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from core.errors import DomainError

INFINITE_DIGIT = math.inf

DigitValue = Union[int, float]


@dataclass(frozen=True)
class SignedDigit:
    """One expansion term (epsilon, d)."""

    epsilon: int
    d: DigitValue

    def __post_init__(self):
        if self.epsilon not in (-1, 1):
            raise DomainError(f"epsilon must be -1 or +1, got {self.epsilon}")
        if self.d != INFINITE_DIGIT and (int(self.d) != self.d or self.d < 1):
            raise DomainError(f"Digit must be a positive integer or infinite, got {self.d}")

    @property
    def is_infinite(self) -> bool:
        return self.d == INFINITE_DIGIT

    def __str__(self) -> str:
        sign = '+' if self.epsilon > 0 else '-'
        return f"({sign},{'inf' if self.is_infinite else self.d})"


@dataclass(frozen=True)
class ConvergentState:
    """Exact (p_{n-1}, p_n, q_{n-1}, q_n) together with the running sign parity
    (-1)^(omega_0 + ... + omega_{n-1})."""

    p_prev: int = 1
    p_cur: int = 0
    q_prev: int = 0
    q_cur: int = 1
    n: int = 0
    sign_parity: int = 1

    @classmethod
    def initial(cls) -> 'ConvergentState':
        return cls()

    @property
    def determinant(self) -> int:
        return self.p_prev * self.q_cur - self.p_cur * self.q_prev

    @property
    def expected_determinant(self) -> int:
        return (-1) ** self.n * self.sign_parity

    @property
    def convergent(self) -> Fraction:
        return Fraction(self.p_cur, self.q_cur)
