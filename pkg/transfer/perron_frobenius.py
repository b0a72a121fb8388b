# transfer/perron_frobenius.py
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.integrate import trapezoid
from scipy.special import digamma, polygamma

from core.errors import DomainError, RandomCFError
from core.grid import DEFAULT_GRID, GridFunction
from transfer.config import OperatorConfig
from utils.cache import global_cache

logger = logging.getLogger(__name__)

CONTRACTION_SLACK = 1.01
CONTRACTION_GRACE = 10
_K_CHUNK = 64

# Custom Exceptions for this module
class NonConvergenceError(RandomCFError):
    """Raised when the density iteration stops with residual above 100*tol."""
    pass


def _mirror(n: int) -> sparse.csr_matrix:
    """Permutation J with (A @ J)[:, j] = A[:, n - j]."""
    idx = np.arange(n + 1)
    return sparse.csr_matrix((np.ones(n + 1), (idx, n - idx)), shape=(n + 1, n + 1))


@global_cache.cached_function(key_prefix='transfer.')
def branch_matrices(n: int, k_max: int, asymptotic_tail: bool) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Sparse node-to-node matrices of the Gauss and Renyi parts of L_p.

    Row i of the Gauss matrix holds sum_{k<=k_max} (k+x_i)^-2 times the
    linear interpolation weights of the point 1/(k+x_i); the Renyi matrix is
    the same with columns mirrored (point 1 - 1/(k+x_i)). With
    ``asymptotic_tail`` the terms k > k_max are added at leading order as
    f(0) * psi_1(k_max + 1 + x_i).
    """
    nodes = np.linspace(0.0, 1.0, n + 1)
    rows = np.arange(n + 1)
    gauss = sparse.csr_matrix((n + 1, n + 1))

    for start in range(1, k_max + 1, _K_CHUNK):
        ks = np.arange(start, min(start + _K_CHUNK, k_max + 1), dtype=float)
        shifted = ks[None, :] + nodes[:, None]
        y = 1.0 / shifted
        weight = y * y
        position = y * n
        j = np.minimum(np.floor(position).astype(np.int64), n - 1)
        t = position - j
        i = np.broadcast_to(rows[:, None], shifted.shape).ravel()
        chunk = sparse.coo_matrix(
            (np.concatenate([(weight * (1.0 - t)).ravel(), (weight * t).ravel()]),
             (np.concatenate([i, i]), np.concatenate([j.ravel(), (j + 1).ravel()]))),
            shape=(n + 1, n + 1),
        )
        gauss = gauss + chunk.tocsr()

    if asymptotic_tail:
        tail = polygamma(1, k_max + 1.0 + nodes)
        gauss = gauss + sparse.csr_matrix((tail, (rows, np.zeros(n + 1, dtype=np.int64))),
                                          shape=(n + 1, n + 1))

    renyi = (gauss @ _mirror(n)).tocsr()
    logger.debug(f"Built branch matrices N={n}, K_max={k_max}: nnz={gauss.nnz}")
    return gauss.tocsr(), renyi


@dataclass(frozen=True)
class DensityDiagnostics:
    p: float
    N: int
    K_max: int
    iters: int
    residual_L1: float
    h_min: float
    h_max: float
    variation: float
    tail_bound: Optional[float]
    tail_mode: str
    mass_defect: float
    contraction_violations: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class TransferOperator:
    """L_p = p * A_0 + (1 - p) * A_1 on the uniform grid of ``config``."""

    def __init__(self, config: OperatorConfig):
        self.config = config
        self.logger = logging.getLogger(__name__)
        gauss, renyi = branch_matrices(config.grid, config.k_max, config.tail_mode == 'asymptotic')
        if config.p == 1:
            self.matrix = gauss
        else:
            self.matrix = (config.p * gauss + (1.0 - config.p) * renyi).tocsr()

    @property
    def n(self) -> int:
        return self.config.grid

    def _on_grid(self, f: GridFunction) -> np.ndarray:
        if f.n == self.n:
            return f.values
        return np.asarray(f(np.linspace(0.0, 1.0, self.n + 1)))

    def apply(self, f: GridFunction) -> GridFunction:
        return GridFunction(self.matrix @ self._on_grid(f))

    def tail_bound(self, f: GridFunction) -> Optional[float]:
        """sup|f| * sum_{k>K_max} (k+x)^-2 <= sup|f| / K_max, or None in drop mode."""
        if self.config.tail_mode == 'drop':
            return None
        return f.sup() / self.config.k_max

    def solve(self) -> Tuple[GridFunction, DensityDiagnostics]:
        cfg = self.config
        dx = 1.0 / self.n
        f = np.ones(self.n + 1)
        residual = math.inf
        previous = None
        violations = 0
        iters = 0

        for iters in range(1, cfg.max_iter + 1):
            g = self.matrix @ f
            g /= trapezoid(g, dx=dx)
            residual = float(trapezoid(np.abs(g - f), dx=dx))
            f = g
            if previous is not None and iters > CONTRACTION_GRACE and residual > previous * CONTRACTION_SLACK:
                violations += 1
                self.logger.debug(f"p={cfg.p}: residual rose at iteration {iters} ({previous:.3e} -> {residual:.3e})")
            previous = residual
            if residual < cfg.tol:
                break

        if residual >= cfg.tol:
            if residual > 100 * cfg.tol:
                raise NonConvergenceError(
                    f"Density iteration for p={cfg.p} stopped after {iters} iterations "
                    f"with residual {residual:.3e} (tol {cfg.tol:.1e})"
                )
            self.logger.warning(f"p={cfg.p}: residual {residual:.3e} above tol after {iters} iterations")
        if violations:
            self.logger.warning(f"p={cfg.p}: residual was not monotone in {violations} iteration(s)")

        h = GridFunction(f, density=True)
        diagnostics = DensityDiagnostics(
            p=cfg.p,
            N=self.n,
            K_max=cfg.k_max,
            iters=iters,
            residual_L1=residual,
            h_min=h.min(),
            h_max=h.max(),
            variation=h.variation(),
            tail_bound=self.tail_bound(h),
            tail_mode=cfg.tail_mode,
            mass_defect=1.0 - float(trapezoid(self.matrix @ h.values, dx=dx)),
            contraction_violations=violations,
        )
        self.logger.info(f"Solved density p={cfg.p} in {iters} iterations "
                         f"(residual {residual:.3e}, min {diagnostics.h_min:.6f}, max {diagnostics.h_max:.6f})")
        return h, diagnostics


def apply_Lp(f: GridFunction, cfg: OperatorConfig) -> GridFunction:
    return TransferOperator(cfg).apply(f)


@global_cache.cached_function(key_prefix='transfer.')
def solve_density(cfg: OperatorConfig) -> Tuple[GridFunction, DensityDiagnostics]:
    """Fixed point h_p of L_p by normalised iteration from f = 1."""
    return TransferOperator(cfg).solve()


def sweep_densities(ps: Iterable[float], base: OperatorConfig) -> Dict[float, Tuple[GridFunction, DensityDiagnostics]]:
    """Solve h_p for each p with the remaining settings of ``base``."""
    results = {}
    for p in ps:
        cfg = OperatorConfig(**{**base.model_dump(), 'p': float(p)})
        results[cfg.p] = solve_density(cfg)
    return results


def gauss_density(n: int = DEFAULT_GRID) -> GridFunction:
    """1/((1+x) log 2) on the grid, normalised."""
    return GridFunction.from_function(lambda x: 1.0 / ((1.0 + x) * math.log(2.0)), n, density=True)


def _preimage_mass(h: GridFunction, a: float, b: float, k_max: int, branch: int) -> float:
    k = np.arange(1, k_max + 1, dtype=float)
    upper = 1.0 / (k + a)
    lower = 1.0 / (k + b)
    if branch == 0:
        mass = float(np.sum(h.integrate(lower, upper)))
    else:
        mass = float(np.sum(h.integrate(1.0 - upper, 1.0 - lower)))

    # k > k_max: first-order expansion of h at the end point the pieces accumulate on
    k_next = k_max + 1.0
    first = digamma(k_next + b) - digamma(k_next + a)
    second = polygamma(1, k_next + a) - polygamma(1, k_next + b)
    if branch == 0:
        mass += h(0.0) * first + 0.5 * h.slope() * second
    else:
        mass += h(1.0) * first - 0.5 * h.slope(at_right=True) * second
    return mass


def invariance_residual(h: GridFunction, p: float, a: float, b: float, k_max: int = 1000) -> float:
    """|mu(A) - p mu(T_0^-1 A) - (1-p) mu(T_1^-1 A)| for A = (a, b), mu = h dx."""
    if not 0 <= a < b <= 1:
        raise DomainError(f"Need 0 <= a < b <= 1, got ({a}, {b})")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0,1], got {p}")
    measure = h.integrate(a, b)
    pulled = p * _preimage_mass(h, a, b, k_max, 0)
    if p < 1:
        pulled += (1.0 - p) * _preimage_mass(h, a, b, k_max, 1)
    return abs(measure - pulled)
