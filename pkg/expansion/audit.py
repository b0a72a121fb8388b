# expansion/audit.py
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from mpmath import mp, mpf

from core.points import ExactPoint
from core.trace import ExpansionTrace
from expansion.maps import b_digit, magnitude, step_R

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LemmaViolation:
    """All conditions that failed at one index n of a trace."""

    n: int
    failures: Tuple[str, ...]

    def __str__(self) -> str:
        return f"n={self.n}: {', '.join(self.failures)}"


class _TraceView:
    """1-based access to q_n, d_n and omega_n, with q_{-1} = 0 and q_0 = 1."""

    def __init__(self, trace: ExpansionTrace):
        self.q_values = [0, 1] + trace.q_sequence()
        self.digit_values = [None] + trace.digits
        self.omega_values = [trace.omega0] + trace.omega_bits
        self.length = len(trace)

    def q(self, n: int) -> int:
        return self.q_values[n + 1]

    def d(self, n: int):
        return self.digit_values[n]

    def omega(self, n: int) -> int:
        return self.omega_values[n]

    def is_minus_two(self, k: int) -> bool:
        return self.omega(k) == 1 and self.d(k) == 2


def _last_break(view: _TraceView, n: int) -> Optional[int]:
    """Largest k in [1, n-2] with (omega_k, d_k) != (1, 2)."""
    for k in range(n - 2, 0, -1):
        if not view.is_minus_two(k):
            return k
    return None


def lemma_case(trace: ExpansionTrace, n: int) -> Optional[str]:
    """Which case of the q-decrease estimate applies at n ('i', 'ii' or 'iii'),
    or None when q_n >= q_{n-1}."""
    view = _TraceView(trace)
    return _case(view, n)


def _case(view: _TraceView, n: int) -> Optional[str]:
    if n < 2 or view.q(n) >= view.q(n - 1):
        return None
    if view.d(n - 1) > 2:
        return 'i'
    if view.d(n - 1) == 2:
        return 'iii' if _last_break(view, n) is not None else 'ii'
    return None


def lemma_audit(trace: ExpansionTrace) -> List[LemmaViolation]:
    """Check the positivity, non-repetition and lower-bound lemmas for q_n on
    every index of the trace. Returns an empty list when all hold."""
    view = _TraceView(trace)
    violations = []

    for n in range(2, view.length + 1):
        failures = []
        q_n, q_prev = view.q(n), view.q(n - 1)

        if q_n <= 0:
            failures.append('qnsmall:positive')

        if q_n <= q_prev:
            if not (view.omega(n - 1) == 1 and view.d(n) == 1 and view.omega(n) == 0):
                failures.append('qnsmall:pattern')
            if not view.q(n - 2) < q_prev:
                failures.append('bigger:left')
            if n + 1 <= view.length and not q_prev < view.q(n + 1):
                failures.append('bigger:right')
            if q_n == q_prev:
                failures.append('bigger:distinct')

        if q_n < q_prev:
            case = _case(view, n)
            if case is None:
                failures.append('estimates:d_prev')
            elif case == 'i' and not q_n > view.q(n - 2):
                failures.append('estimates:i')
            elif case == 'ii' and not (q_n == 1 and q_prev == n):
                failures.append('estimates:ii')
            elif case == 'iii' and not q_n > view.q(_last_break(view, n) - 1):
                failures.append('estimates:iii')

        if failures:
            violations.append(LemmaViolation(n=n, failures=tuple(failures)))

    if violations:
        logger.warning(f"Lemma audit of {trace.start}: {len(violations)} violation(s)")
    return violations


def b_digit_crosscheck(trace: ExpansionTrace) -> List[int]:
    """Indices n where d_n(omega, x) differs from b(R^{n-1}(0 omega, |x|))."""
    start = trace.start
    point = ExactPoint(magnitude(start), 'R', start.precision)
    shifted = [0] + trace.omega_bits
    mismatches = []
    for n, digit in enumerate(trace.digits, start=1):
        if b_digit(shifted[n - 1], shifted[n], point) != digit:
            mismatches.append(n)
        point = step_R(shifted[n - 1], point)
    return mismatches


def reconstruction_residual(trace: ExpansionTrace, n: int) -> Union[Fraction, mpf]:
    """|x - (p_n + p_{n-1} t)/(q_n + q_{n-1} t)| with t = pi(K^n(omega, x))."""
    pairs = [(1, 0), (0, 1)] + list(trace.convergents)
    (p_prev, q_prev), (p_cur, q_cur) = pairs[n], pairs[n + 1]
    t = trace.steps[n - 1].point.value
    x = trace.start.value
    if trace.start.is_rational:
        return abs(x - (p_cur + p_prev * t) / (q_cur + q_prev * t))
    with mp.workprec(trace.start.precision):
        return abs(x - (p_cur + p_prev * t) / (q_cur + q_prev * t))
