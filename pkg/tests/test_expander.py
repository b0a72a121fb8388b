from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp, mpf

from core.digits import ConvergentState, SignedDigit
from core.errors import DomainError, InvariantViolationError
from core.omega import OmegaExhaustedError, OmegaWord
from core.points import ExactPoint
from expansion.audit import reconstruction_residual
from expansion.expander import (ConvergentIndexError, approximation_error, convergent_push, expand,
                                iter_states, reconstruct, state_at)


def test_half_under_all_ones(all_ones) -> None:
    trace = expand(ExactPoint.rational(1, 2), all_ones, 5)
    assert trace.digits == [3, 2, 2, 2, 2]
    assert trace.signs == [1, -1, -1, -1, -1]
    assert not trace.terminated


def test_half_terminates() -> None:
    trace = expand(ExactPoint.rational(1, 2), OmegaWord.explicit([0]), 10)
    assert trace.digits == [2]
    assert trace.terminated


def test_golden_ratio(golden) -> None:
    trace = expand(golden, OmegaWord.periodic([0]), 6)
    assert trace.digits == [1] * 6
    assert trace.signs == [1] * 6
    assert trace.q_sequence() == [1, 2, 3, 5, 8, 13]


def test_explicit_word_exhaustion_propagates() -> None:
    with pytest.raises(OmegaExhaustedError):
        expand(ExactPoint.rational(3, 7), OmegaWord.explicit([1]), 10)


def test_convergent_push() -> None:
    state = convergent_push(ConvergentState.initial(), SignedDigit(1, 2), 0)
    assert (state.p_cur, state.q_cur) == (1, 2)
    state = convergent_push(state, SignedDigit(-1, 2), 1)
    assert (state.p_cur, state.q_cur) == (2, 3)
    assert state.determinant == state.expected_determinant


def test_convergent_push_rejects() -> None:
    with pytest.raises(DomainError):
        convergent_push(ConvergentState.initial(), SignedDigit(1, float('inf')), 0)
    with pytest.raises(InvariantViolationError):
        convergent_push(ConvergentState.initial(), SignedDigit(-1, 2), 0)


def test_reconstruct() -> None:
    trace = expand(ExactPoint.rational(1, 2), OmegaWord.explicit([1, 1, 1, 0]), 10)
    assert trace.digits == [3, 2, 2, 1]
    assert trace.terminated
    assert reconstruct(trace, 4) == Fraction(1, 2)

    one_digit = expand(ExactPoint.rational(-1, 3), OmegaWord.explicit([0]), 1)
    assert one_digit.steps[0].digit == SignedDigit(-1, 3)
    assert reconstruct(one_digit, 1) == Fraction(-1, 3)


def test_reconstruct_golden(golden) -> None:
    trace = expand(golden, OmegaWord.periodic([0]), 6)
    assert reconstruct(trace, 5) == Fraction(5, 8)
    with pytest.raises(ConvergentIndexError):
        reconstruct(trace, 7)
    with pytest.raises(ConvergentIndexError):
        reconstruct(trace, 0)


def test_state_at_matches_pushes(golden) -> None:
    trace = expand(golden, OmegaWord.parse('0110...'), 12)
    states = list(iter_states(trace))
    assert [(s.p_cur, s.q_cur) for s in states] == trace.convergents
    assert all(s.determinant == s.expected_determinant for s in states)
    assert state_at(trace, 0) == ConvergentState.initial()


def test_approximation_error_golden(golden) -> None:
    trace = expand(golden, OmegaWord.periodic([0]), 6)
    error = approximation_error(state_at(trace, 5), golden)
    actual, bound = error.as_floats()
    assert actual == pytest.approx(0.0069660113, abs=1e-9)
    assert error.bound == Fraction(1, 24)
    assert error.within_bound


def test_approximation_error_terminated() -> None:
    x = ExactPoint.rational(5, 13)
    trace = expand(x, OmegaWord.periodic([0]), 20)
    assert trace.terminated
    error = approximation_error(state_at(trace, len(trace)), x)
    assert error.actual == 0


def test_approximation_error_case_ii_bound() -> None:
    n = 10
    x = ExactPoint.rational(1)
    trace = expand(x, OmegaWord.explicit([1] * (n - 1) + [0]), n)
    state = state_at(trace, n)
    assert (state.q_cur, state.q_prev) == (1, n)
    error = approximation_error(state, x)
    assert error.bound == Fraction(1, n - 1)
    assert error.within_bound


def test_approximation_error_needs_a_digit(golden) -> None:
    with pytest.raises(ConvergentIndexError):
        approximation_error(ConvergentState.initial(), golden)


def test_random_rationals_terminate_within_denominator() -> None:
    rng = np.random.default_rng(2024)
    for _ in range(300):
        denominator = int(rng.integers(1, 2000))
        numerator = int(rng.integers(1, denominator + 1)) * (1 if rng.random() < 0.5 else -1)
        x = ExactPoint.rational(numerator, denominator)
        block = rng.integers(0, 2, int(rng.integers(1, 30))).tolist() + [0]
        trace = expand(x, OmegaWord.periodic(block), x.value.denominator + len(block) + 1)
        assert trace.terminated
        assert reconstruct(trace, len(trace)) == x.value
        points = [x] + trace.points
        away_from_unit = sum(1 for point in points[:len(trace)] if abs(point.value) != 1)
        assert away_from_unit <= x.value.denominator


def test_bounds_hold_on_real_traces(random_real) -> None:
    rng = np.random.default_rng(11)
    starts = [random_real(rng) for _ in range(16)]
    starts += [ExactPoint.parse(text) for text in ('surd:-1:2:1', 'surd:-4:17:-1', 'surd:-5:31:3', 'surd:-9:90:1')]
    for seed, x in enumerate(starts):
        trace = expand(x, OmegaWord.bernoulli(0.5, seed), 50)
        assert len(trace) == 50
        for state in iter_states(trace):
            error = approximation_error(state, x)
            assert error.within_bound, (str(x), state.n)
            assert error.bound <= Fraction(1, state.q_cur)
        assert float(approximation_error(state_at(trace, 50), x).actual) < 1e-6


def test_real_steps_keep_full_precision(golden) -> None:
    trace = expand(golden, OmegaWord.periodic([0]), 30)
    with mp.workprec(256):
        drift = max(abs(point.value - golden.value) for point in trace.points)
    assert drift < mpf(2) ** -200


def test_reconstruction_identity(golden) -> None:
    trace = expand(golden, OmegaWord.parse('bernoulli:0.5:3'), 40)
    with mp.workprec(256):
        limit = mpf(2) ** -128
    for n in range(1, len(trace) + 1):
        assert reconstruction_residual(trace, n) < limit

    exact = expand(ExactPoint.rational(-17, 40), OmegaWord.parse('0111...'), 30)
    assert all(reconstruction_residual(exact, n) == 0 for n in range(1, len(exact) + 1))


def test_trace_serialisation(all_ones) -> None:
    trace = expand(ExactPoint.rational(1, 2), all_ones, 3)
    assert trace.to_dict() == {
        'start': '1/2',
        'omega_bits': '111',
        'digits': [3, 2, 2],
        'signs': [1, -1, -1],
        'convergents': ['1/3', '2/5', '3/7'],
        'terminated': False,
    }
    assert replace(trace, terminated=True).terminated
