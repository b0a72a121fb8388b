import logging
from functools import wraps
from typing import Callable

from pydantic import ValidationError

from core.errors import InvariantViolationError, RandomCFError
from transfer.perron_frobenius import NonConvergenceError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

logger = logging.getLogger(__name__)


def handle_errors(func: Callable[..., int]) -> Callable[..., int]:
    """Decorator turning exceptions raised by a CLI command into exit codes"""
    @wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)
        except ValidationError as e:
            for error in e.errors():
                field = '.'.join(str(part) for part in error['loc']) or 'value'
                logger.error(f"Invalid setting {field}: {error['msg']}")
            return EXIT_USAGE
        except InvariantViolationError as e:
            logger.error(f"Invariant violated: {e}")
            return EXIT_FAILURE
        except NonConvergenceError as e:
            logger.error(f"Solver did not converge: {e}")
            return EXIT_FAILURE
        except (RandomCFError, ValueError) as e:
            # Bad literals, points outside their domain, exhausted words
            logger.error(f"Input Error: {e}")
            return EXIT_USAGE
        except Exception as e:
            logger.error(f"Unexpected error in {func.__name__}: {e}", exc_info=True)
            return EXIT_FAILURE

    return wrapper
