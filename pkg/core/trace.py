from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Tuple

from core.digits import SignedDigit
from core.points import ExactPoint


@dataclass(frozen=True)
class TraceStep:
    digit: SignedDigit
    omega: int
    point: ExactPoint


@dataclass
class ExpansionTrace:
    """Full record of one run of K from ``start``.

    ``steps[n-1]`` holds d_n, the bit omega_n consumed with it and the point
    pi(K^n(omega, x)). ``convergents[n-1]`` is the raw pair (p_n, q_n).
    """

    start: ExactPoint
    omega0: int
    steps: List[TraceStep] = field(default_factory=list)
    terminated: bool = False
    convergents: List[Tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def digits(self) -> List[int]:
        return [step.digit.d for step in self.steps]

    @property
    def signs(self) -> List[int]:
        return [step.digit.epsilon for step in self.steps]

    @property
    def omega_bits(self) -> List[int]:
        """omega_1 ... omega_n (omega_0 is the sign bit of the start)."""
        return [step.omega for step in self.steps]

    @property
    def points(self) -> List[ExactPoint]:
        return [step.point for step in self.steps]

    def q_sequence(self) -> List[int]:
        return [q for _, q in self.convergents]

    def convergent(self, n: int) -> Fraction:
        p, q = self.convergents[n - 1]
        return Fraction(p, q)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'start': str(self.start),
            'omega_bits': ''.join(str(b) for b in self.omega_bits),
            'digits': self.digits,
            'signs': self.signs,
            'convergents': [f"{p}/{q}" for p, q in self.convergents],
            'terminated': self.terminated,
        }
