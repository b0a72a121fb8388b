from dataclasses import asdict, dataclass
from typing import Any, Dict, List

import numpy as np

from core.errors import DomainError
from core.grid import DEFAULT_GRID


@dataclass(frozen=True)
class InoueReport:
    """Grid evaluation of g(0,x) = p x^2 and g(1,x) = (1-p)(1-x)^2.

    ``piecewise_monotone`` (I1) holds by construction of the branch
    partitions; ``expanding_on_average`` (I2) is sup(g0 + g1) < 1 and
    ``bounded_variation`` (I3) is finiteness of both grid variations.
    """

    p: float
    sup: float
    argmax: List[float]
    variation_g0: float
    variation_g1: float
    piecewise_monotone: bool
    expanding_on_average: bool
    bounded_variation: bool

    @property
    def passed(self) -> bool:
        return self.piecewise_monotone and self.expanding_on_average and self.bounded_variation

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['passed'] = self.passed
        return data


def inoue_check(p: float, n: int = DEFAULT_GRID) -> InoueReport:
    if not 0 < p < 1:
        raise DomainError(f"inoue_check needs 0 < p < 1, got {p}")
    x = np.linspace(0.0, 1.0, n + 1)
    g0 = p * x ** 2
    g1 = (1.0 - p) * (1.0 - x) ** 2
    total = g0 + g1
    sup = float(total.max())
    argmax = [float(v) for v in x[total >= sup - 1e-15]]
    variation_g0 = float(np.sum(np.abs(np.diff(g0))))
    variation_g1 = float(np.sum(np.abs(np.diff(g1))))
    return InoueReport(
        p=p,
        sup=sup,
        argmax=argmax,
        variation_g0=variation_g0,
        variation_g1=variation_g1,
        piecewise_monotone=True,
        expanding_on_average=sup < 1.0,
        bounded_variation=bool(np.isfinite(variation_g0) and np.isfinite(variation_g1)),
    )
