# expansion/expander.py
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Union

from mpmath import mp, mpf

from core.digits import ConvergentState, SignedDigit
from core.errors import DomainError, InvariantViolationError, RandomCFError
from core.omega import OmegaWord
from core.points import ExactPoint, mpf_to_fraction
from core.trace import ExpansionTrace, TraceStep
from expansion.maps import step_K

logger = logging.getLogger(__name__)

# Custom Exceptions for this module
class ConvergentIndexError(RandomCFError, IndexError):
    """Raised when a convergent index lies outside the trace."""
    pass


@dataclass(frozen=True)
class ApproximationError:
    """|x - p_n/q_n| next to the bound 1/(q_n |q_n - q_{n-1}|)."""

    actual: Union[Fraction, mpf]
    bound: Fraction

    @property
    def within_bound(self) -> bool:
        actual = self.actual if isinstance(self.actual, Fraction) else mpf_to_fraction(self.actual)
        return actual <= self.bound

    def as_floats(self):
        return float(self.actual), float(self.bound)


def convergent_push(state: ConvergentState, digit: SignedDigit, omega_prev_bit: int) -> ConvergentState:
    """Apply p_n = d_n p_{n-1} + (-1)^omega_{n-1} p_{n-2} (and the same for q)."""
    if digit.is_infinite:
        raise DomainError("Cannot push the terminal (infinite) digit")
    sign = -1 if omega_prev_bit else 1
    if digit.epsilon != sign:
        raise InvariantViolationError(
            f"Digit sign {digit.epsilon} disagrees with omega_{state.n} = {omega_prev_bit}"
        )

    d = int(digit.d)
    pushed = ConvergentState(
        p_prev=state.p_cur,
        p_cur=d * state.p_cur + sign * state.p_prev,
        q_prev=state.q_cur,
        q_cur=d * state.q_cur + sign * state.q_prev,
        n=state.n + 1,
        sign_parity=state.sign_parity * sign,
    )

    if pushed.determinant != pushed.expected_determinant:
        raise InvariantViolationError(
            f"Determinant identity failed at n={pushed.n}: "
            f"{pushed.determinant} != {pushed.expected_determinant}"
        )
    if pushed.n >= 2 and pushed.q_cur <= 0:
        raise InvariantViolationError(f"q_{pushed.n} = {pushed.q_cur} is not positive")
    return pushed


BitChooser = Callable[[ExactPoint], Optional[int]]


def expand_by(x: ExactPoint, choose: BitChooser, n_max: int) -> ExpansionTrace:
    """Iterate K from x, asking ``choose`` for omega_n given the current point.

    Stops after ``n_max`` digits, when the orbit reaches 0 (the trace is then
    marked terminated and ends with the last finite digit) or when ``choose``
    returns None.
    """
    if not -1 <= x.value <= 1:
        raise DomainError(f"expand needs x in [-1,1], got {x}")

    trace = ExpansionTrace(start=x, omega0=x.sign_bit)
    state = ConvergentState.initial()
    point = x
    previous_bit = trace.omega0

    while len(trace) < n_max and not point.is_zero:
        bit = choose(point)
        if bit is None:
            break
        digit, point = step_K(point, bit)
        state = convergent_push(state, digit, previous_bit)
        trace.steps.append(TraceStep(digit=digit, omega=bit, point=point))
        trace.convergents.append((state.p_cur, state.q_cur))
        previous_bit = bit

    trace.terminated = point.is_zero
    return trace


def expand(x: ExactPoint, word: OmegaWord, n_max: int) -> ExpansionTrace:
    """Iterate K from x, reading omega_1, omega_2, ... from ``word``."""
    trace = expand_by(x, lambda _: word.next(), n_max)
    logger.debug(f"Expanded {x} with {word}: {len(trace)} digits, terminated={trace.terminated}")
    return trace


def state_at(trace: ExpansionTrace, n: int) -> ConvergentState:
    """Rebuild the convergent state after n digits from a trace."""
    if not 0 <= n <= len(trace):
        raise ConvergentIndexError(f"n={n} outside 0..{len(trace)}")
    pairs = [(1, 0), (0, 1)] + list(trace.convergents)
    (p_prev, q_prev), (p_cur, q_cur) = pairs[n], pairs[n + 1]
    bits = [trace.omega0] + trace.omega_bits
    parity = (-1) ** sum(bits[:n])
    return ConvergentState(p_prev, p_cur, q_prev, q_cur, n, parity)


def iter_states(trace: ExpansionTrace) -> Iterator[ConvergentState]:
    for n in range(1, len(trace) + 1):
        yield state_at(trace, n)


def reconstruct(trace: ExpansionTrace, n: int) -> Fraction:
    """The n-th convergent p_n/q_n of the trace as an exact rational."""
    if not 1 <= n <= len(trace):
        raise ConvergentIndexError(f"Convergent {n} requested from a trace of length {len(trace)}")
    return trace.convergent(n)


def approximation_error(state: ConvergentState, x: ExactPoint) -> ApproximationError:
    """Compare |x - p_n/q_n| against 1/(q_n |q_n - q_{n-1}|).

    The gap q_n - q_{n-1} is zero only at n = 1 with d_1 = 1; the bound then
    falls back to 1/q_n.
    """
    if state.n < 1:
        raise ConvergentIndexError("approximation_error needs n >= 1")
    gap = max(1, abs(state.q_cur - state.q_prev))
    bound = Fraction(1, state.q_cur * gap)
    if x.is_rational:
        actual = abs(x.value - state.convergent)
    else:
        with mp.workprec(x.precision):
            actual = abs(x.value - mpf(state.p_cur) / state.q_cur)
    return ApproximationError(actual=actual, bound=bound)
