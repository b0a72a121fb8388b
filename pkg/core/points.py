from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from mpmath import mp, mpf

from core.errors import DomainError

DEFAULT_PRECISION = 256

Number = Union[Fraction, mpf]

DOMAINS = {
    'K': (-1, 1),
    'R': (0, 1),
}


def mpf_to_fraction(value: mpf) -> Fraction:
    """Exact rational value of a binary float."""
    sign, man, exp, _ = value._mpf_
    man = -int(man) if sign else int(man)
    exp = int(exp)
    if exp >= 0:
        return Fraction(man * 2 ** exp)
    return Fraction(man, 2 ** -exp)


@dataclass(frozen=True)
class ExactPoint:
    """A point of [-1,1] (K-domain) or [0,1] (R-domain).

    The value is either an exact :class:`fractions.Fraction` (rational mode,
    ``precision`` is None) or an mpmath binary float carrying ``precision``
    bits (real mode). Fractions are always in lowest terms with a positive
    denominator.
    """

    value: Number
    domain: str = 'K'
    precision: Optional[int] = None

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise DomainError(f"Unknown domain tag '{self.domain}'")
        value = self.value
        if isinstance(value, int):
            value = Fraction(value)
        if isinstance(value, Fraction):
            if self.precision is not None:
                object.__setattr__(self, 'precision', None)
        elif isinstance(value, mpf):
            if self.precision is None:
                object.__setattr__(self, 'precision', DEFAULT_PRECISION)
        else:
            raise DomainError(f"Unsupported point value type {type(value).__name__}")
        object.__setattr__(self, 'value', value)

        low, high = DOMAINS[self.domain]
        if not low <= value <= high:
            raise DomainError(f"{self} lies outside the {self.domain}-domain [{low},{high}]")

    @classmethod
    def rational(cls, numerator: int, denominator: int = 1, domain: str = 'K') -> 'ExactPoint':
        if denominator == 0:
            raise DomainError("Zero denominator")
        return cls(Fraction(numerator, denominator), domain)

    @classmethod
    def real(cls, value: Union[str, float, int, mpf], precision: int = DEFAULT_PRECISION,
             domain: str = 'K') -> 'ExactPoint':
        with mp.workprec(precision):
            converted = mpf(value)
        return cls(converted, domain, precision)

    @classmethod
    def quadratic_surd(cls, a: int, n: int, b: int, precision: int = DEFAULT_PRECISION,
                       domain: str = 'K') -> 'ExactPoint':
        """The point (a + sqrt(n)) / b."""
        if n < 0 or b == 0:
            raise DomainError(f"Invalid surd ({a} + sqrt({n}))/{b}")
        with mp.workprec(precision):
            converted = (a + mp.sqrt(n)) / b
        return cls(converted, domain, precision)

    @classmethod
    def parse(cls, text: str, precision: int = DEFAULT_PRECISION, domain: str = 'K') -> 'ExactPoint':
        """Parse ``a/b`` or an integer as a rational, ``surd:a:n:b`` as (a+sqrt n)/b
        and anything else as a decimal real at ``precision`` bits."""
        text = text.strip()
        try:
            if text.startswith('surd:'):
                _, a, n, b = text.split(':')
                return cls.quadratic_surd(int(a), int(n), int(b), precision, domain)
            if '/' in text:
                numerator, denominator = text.split('/')
                return cls.rational(int(numerator), int(denominator), domain)
            if text.lstrip('+-').isdigit():
                return cls.rational(int(text), 1, domain)
            return cls.real(text, precision, domain)
        except DomainError:
            raise
        except (ValueError, TypeError) as e:
            raise DomainError(f"Cannot parse point '{text}': {e}") from e

    @property
    def is_rational(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def sign_bit(self) -> int:
        """omega_0 of the point: 0 if x >= 0, 1 otherwise."""
        return 0 if self.value >= 0 else 1

    def with_value(self, value: Number, domain: Optional[str] = None) -> 'ExactPoint':
        return ExactPoint(value, domain or self.domain, self.precision)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        if self.is_rational:
            return f"{self.value.numerator}/{self.value.denominator}"
        digits = max(17, int(self.precision * 0.30103))
        return mp.nstr(self.value, digits, strip_zeros=False)
