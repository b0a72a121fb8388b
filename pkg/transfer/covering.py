import logging
import math
from fractions import Fraction
from typing import Optional, Tuple

from core.errors import DomainError
from core.omega import OmegaWord

logger = logging.getLogger(__name__)


def _gauss_image(a: Fraction, b: Fraction) -> Optional[Tuple[Fraction, Fraction]]:
    """T_0 (a, b) when (a, b) lies in the closure of one branch (1/(k+1), 1/k];
    None when an end point 1/k sits strictly inside."""
    if a == 0:
        return None
    k = math.floor(1 / b)
    if a < Fraction(1, k + 1):
        return None
    return 1 / b - k, 1 / a - k


def covering_time(a, b, word: OmegaWord, max_steps: int = 1000) -> Optional[int]:
    """Number of maps T_{omega_n} ... T_{omega_1} after which the image of the
    interval (a, b) is all of [0, 1).

    The image is tracked exactly while it stays inside one branch of the
    next map. Once it contains an end point of that map's partition, the
    next image contains [0, c) and (1 - c, 1), and one more map covers
    [0, 1). Returns None if that does not happen within ``max_steps``.
    """
    a, b = Fraction(a), Fraction(b)
    if not 0 <= a < b <= 1:
        raise DomainError(f"covering_time needs 0 <= a < b <= 1, got ({a}, {b})")

    for m in range(max_steps):
        bit = word.next()
        if bit == 0:
            image = _gauss_image(a, b)
        else:
            image = _gauss_image(1 - b, 1 - a)
        if image is None:
            logger.debug(f"Interval straddles a branch end point of T_{bit} after {m} maps")
            return m + 2
        a, b = image
    return None
