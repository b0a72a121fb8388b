# expansion/steering.py
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, List, Optional, Union

from mpmath import mp, mpf

from core.errors import DomainError
from core.points import DEFAULT_PRECISION, ExactPoint, Number, mpf_to_fraction
from core.trace import ExpansionTrace
from expansion.expander import expand_by
from expansion.maps import branch_index, magnitude

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AllowedDigits:
    """A set of admissible digits: explicit, or all odd / all even integers."""

    name: str
    values: FrozenSet[int] = frozenset()

    def __contains__(self, d) -> bool:
        if self.name == 'odd':
            return d % 2 == 1
        if self.name == 'even':
            return d % 2 == 0
        return d in self.values

    @classmethod
    def of(cls, values) -> 'AllowedDigits':
        values = frozenset(int(v) for v in values)
        if not values or min(values) < 1:
            raise DomainError(f"Allowed digits must be positive integers, got {sorted(values)}")
        return cls('set', values)

    @classmethod
    def parse(cls, text: str) -> 'AllowedDigits':
        """``odd``, ``even`` or ``set:a,b,...``."""
        text = text.strip()
        if text in ('odd', 'even'):
            return cls(text)
        if text.startswith('set:'):
            try:
                return cls.of(v for v in text[4:].split(',') if v.strip())
            except ValueError as e:
                raise DomainError(f"Invalid digit set '{text}': {e}") from e
        raise DomainError(f"Expected odd, even or set:a,b,..., got '{text}'")

    def __str__(self) -> str:
        if self.name == 'set':
            return 'set:' + ','.join(str(v) for v in sorted(self.values))
        return self.name


@dataclass
class SteeringResult:
    """Trace built by steer_digits. ``failed_at`` is the 1-based step at which
    neither candidate digit was allowed, or None on success."""

    trace: ExpansionTrace
    failed_at: Optional[int] = None

    @property
    def succeeded(self) -> bool:
        return self.failed_at is None


def _legal_count(point: ExactPoint, allowed: AllowedDigits) -> float:
    if point.is_zero:
        return float('inf')
    k = branch_index(magnitude(point))
    return sum(1 for d in (k, k + 1) if d in allowed)


def _successor(point: ExactPoint, d: int) -> ExactPoint:
    size = magnitude(point)
    if point.is_rational:
        return point.with_value(1 / size - d)
    with mp.workprec(point.precision):
        return point.with_value(1 / size - d)


def steer_digits(x: ExactPoint, allowed: Union[AllowedDigits, set], n_max: int) -> SteeringResult:
    """Choose omega bits so that every digit lies in ``allowed``.

    When both bits give an allowed digit, the bit whose successor point still
    offers more allowed digits wins (a terminated successor counts as
    unlimited); remaining ties go to bit 0.
    """
    if x.is_zero:
        raise DomainError("steer_digits needs x != 0")
    if not isinstance(allowed, AllowedDigits):
        allowed = AllowedDigits.of(allowed)

    failure: List[int] = []

    def choose(point: ExactPoint) -> Optional[int]:
        k = branch_index(magnitude(point))
        legal = [bit for bit in (0, 1) if k + bit in allowed]
        if not legal:
            failure.append(k)
            return None
        if len(legal) == 1:
            return legal[0]
        scores = [_legal_count(_successor(point, k + bit), allowed) for bit in legal]
        return 1 if scores[1] > scores[0] else 0

    trace = expand_by(x, choose, n_max)
    stray = next((n for n, d in enumerate(trace.digits, start=1) if d not in allowed), None)
    if stray is not None:
        logger.warning(f"Steering {x} emitted digit {trace.digits[stray - 1]} outside {allowed} "
                       f"at step {stray}")
        return SteeringResult(trace, failed_at=stray)

    result = SteeringResult(trace, failed_at=len(trace) + 1 if failure else None)
    if failure:
        logger.info(f"Steering {x} into {allowed} failed at step {result.failed_at} "
                    f"(candidates {failure[0]}, {failure[0] + 1})")
    return result


@dataclass
class AlphaSteering:
    """K-orbit steered onto the alpha-continued fraction orbit of x."""

    alpha: mpf
    trace: ExpansionTrace
    reference: List[mpf] = field(default_factory=list)
    max_discrepancy: mpf = mpf(0)

    @property
    def bits(self) -> List[int]:
        return self.trace.omega_bits

    @property
    def orbit(self) -> List[ExactPoint]:
        return self.trace.points


def _as_mpf(value) -> mpf:
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    return mpf(value)


def alpha_map(z: Number, alpha: Number) -> Number:
    """T_alpha z = |1/z| - floor(|1/z| - (alpha - 1)).

    Exact for a Fraction ``z`` (``alpha`` then has to be a Fraction too),
    otherwise at the ambient mpmath precision.
    """
    inverse = 1 / abs(z)
    if isinstance(z, Fraction):
        return inverse - math.floor(inverse - (alpha - 1))
    return inverse - mp.floor(inverse - (alpha - 1))


def steer_alpha(x: ExactPoint, alpha: Union[str, float, mpf], n_max: int) -> AlphaSteering:
    """Pick omega so that pi(K^n(omega, x)) = T_alpha^n x.

    Bit 1 is chosen exactly when frac(1/|y|) >= alpha, i.e. when the Gauss
    image leaves [alpha-1, alpha). Rational points are classified exactly.
    The result carries a reference orbit from direct T_alpha iteration (exact
    for a rational start, otherwise at the same precision) and the largest
    distance between the two.
    """
    precision = x.precision or DEFAULT_PRECISION
    with mp.workprec(precision):
        alpha = mpf(alpha)
        if not 0 < alpha <= 1:
            raise DomainError(f"alpha must lie in (0,1], got {alpha}")
        if not alpha - 1 <= _as_mpf(x.value) < alpha:
            raise DomainError(f"x = {x} lies outside [alpha-1, alpha)")
    alpha_exact = mpf_to_fraction(alpha)

    def choose(point: ExactPoint) -> int:
        if point.is_rational:
            inverse = 1 / magnitude(point)
            return 1 if inverse - math.floor(inverse) >= alpha_exact else 0
        with mp.workprec(precision):
            image = mp.frac(1 / magnitude(point))
            return 1 if image >= alpha else 0

    trace = expand_by(x, choose, n_max)

    reference = []
    discrepancy = mpf(0)
    with mp.workprec(precision):
        z = x.value
        for point in trace.points:
            z = alpha_map(z, alpha_exact if x.is_rational else alpha)
            reference.append(_as_mpf(z))
            discrepancy = max(discrepancy, abs(_as_mpf(point.value - z)))
            if z == 0:
                break

    logger.debug(f"alpha={alpha}: {len(trace)} steps, max discrepancy {mp.nstr(discrepancy, 5)}")
    return AlphaSteering(alpha=alpha, trace=trace, reference=reference, max_discrepancy=discrepancy)


@dataclass(frozen=True)
class EndingClass:
    """Shape of the tail of a finite expansion.

    ``kind`` is ``direct`` (..., k), ``twos_then_one`` (..., k+1, 2 x twos, 1),
    ``twos`` (..., k+1, 2, 2, ... up to the end of the trace) or ``none`` when
    the trace never reaches a point +-1/k. ``n`` is the index N of that point.
    """

    kind: str
    n: Optional[int] = None
    k: Optional[int] = None
    twos: int = 0


def _unit_fraction(point: ExactPoint) -> Optional[int]:
    value = abs(point.value)
    if value != 0 and value.numerator == 1:
        return value.denominator
    return None


def classify_ending(trace: ExpansionTrace) -> EndingClass:
    if not trace.start.is_rational:
        return EndingClass('none')

    points = [trace.start] + trace.points
    for n, point in enumerate(points):
        k = _unit_fraction(point)
        if k is not None:
            break
    else:
        return EndingClass('none')

    tail = trace.steps[n:]
    if not tail:
        return EndingClass('none', n, k)
    if tail[0].omega == 0:
        return EndingClass('direct', n, k)

    twos = 0
    for step in tail[1:]:
        if step.omega == 0:
            return EndingClass('twos_then_one', n, k, twos)
        twos += 1
    return EndingClass('twos', n, k, twos)
