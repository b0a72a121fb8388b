import pytest

from core.errors import DomainError, InvariantViolationError
from core.omega import OmegaExhaustedError
from transfer.config import OperatorConfig
from transfer.perron_frobenius import NonConvergenceError
from utils.error_handler import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, handle_errors


@handle_errors
def _command(error=None) -> int:
    if error is not None:
        raise error
    return EXIT_OK


@handle_errors
def _bad_config() -> int:
    OperatorConfig(p=2)
    return EXIT_OK


@pytest.mark.parametrize('error, code', [
    (None, EXIT_OK),
    (DomainError('outside'), EXIT_USAGE),
    (OmegaExhaustedError('exhausted'), EXIT_USAGE),
    (ValueError('bad literal'), EXIT_USAGE),
    (InvariantViolationError('determinant'), EXIT_FAILURE),
    (NonConvergenceError('residual'), EXIT_FAILURE),
    (RuntimeError('boom'), EXIT_FAILURE),
])
def test_exit_codes(error, code) -> None:
    assert _command(error) == code


def test_validation_errors_are_usage_errors() -> None:
    assert _bad_config() == EXIT_USAGE


def test_wrapper_keeps_the_name() -> None:
    assert _command.__name__ == '_command'
