from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from core.errors import DomainError

DEFAULT_GRID = 4096
DENSITY_TOLERANCE = 1e-12


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Piecewise-linear function on the uniform grid x_i = i/N, i = 0..N.

    Values are non-negative. A function built with ``density=True`` is
    checked to have trapezoid integral 1.
    """

    values: np.ndarray
    density: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DomainError("A grid function needs at least two node values")
        n = values.size - 1
        if not is_power_of_two(n):
            raise DomainError(f"Grid resolution must be a power of two, got N={n}")
        if not np.all(np.isfinite(values)):
            raise DomainError("Grid function values must be finite")
        if np.any(values < 0):
            raise DomainError(f"Grid function values must be non-negative (min {values.min()})")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        if self.density and abs(self.integral() - 1.0) > DENSITY_TOLERANCE:
            raise DomainError(f"Density integrates to {self.integral()!r}, not 1")

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], n: int = DEFAULT_GRID,
                      density: bool = False) -> 'GridFunction':
        nodes = np.linspace(0.0, 1.0, n + 1)
        values = np.asarray(func(nodes), dtype=float) * np.ones_like(nodes)
        grid = cls(values)
        return grid.normalized() if density else grid

    @classmethod
    def constant(cls, c: float = 1.0, n: int = DEFAULT_GRID) -> 'GridFunction':
        return cls(np.full(n + 1, float(c)))

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return np.interp(x, self.nodes, self.values)

    def integral(self) -> float:
        return float(trapezoid(self.values, dx=1.0 / self.n))

    @cached_property
    def _cumulative(self) -> np.ndarray:
        return cumulative_trapezoid(self.values, dx=1.0 / self.n, initial=0.0)

    def antiderivative(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Exact integral of the interpolant over [0, x]."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        scaled = x * self.n
        i = np.minimum(np.floor(scaled).astype(int), self.n - 1)
        t = scaled - i
        v0 = self.values[i]
        v1 = self.values[i + 1]
        h = 1.0 / self.n
        result = self._cumulative[i] + h * (v0 * t + 0.5 * (v1 - v0) * t * t)
        return float(result) if result.ndim == 0 else result

    def integrate(self, a: Union[float, np.ndarray], b: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Exact integral of the interpolant over [a, b]."""
        return self.antiderivative(b) - self.antiderivative(a)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min(self) -> float:
        return float(np.min(self.values))

    def max(self) -> float:
        return float(np.max(self.values))

    def variation(self) -> float:
        return float(np.sum(np.abs(np.diff(self.values))))

    def slope(self, at_right: bool = False) -> float:
        """Slope of the first (or last) grid cell."""
        if at_right:
            return float((self.values[-1] - self.values[-2]) * self.n)
        return float((self.values[1] - self.values[0]) * self.n)

    def normalized(self) -> 'GridFunction':
        total = self.integral()
        if total <= 0:
            raise DomainError("Cannot normalise a grid function with zero integral")
        return GridFunction(self.values / total, density=True)

    def distance(self, other: Union['GridFunction', Callable[[np.ndarray], np.ndarray]],
                 norm: str = 'L1') -> float:
        """L1 or sup distance to another grid function or a vectorised callable,
        evaluated on the finer of the two grids."""
        n = self.n
        if isinstance(other, GridFunction):
            n = max(n, other.n)
        nodes = np.linspace(0.0, 1.0, n + 1)
        diff = np.abs(self(nodes) - np.asarray(other(nodes), dtype=float))
        if norm == 'sup':
            return float(np.max(diff))
        return float(trapezoid(diff, dx=1.0 / n))
