# ergodic/statistics.py
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid

from core.errors import DomainError
from core.grid import GridFunction
from ergodic.orbits import NEAR_ZERO, Observable, simulate_ensemble, simulate_orbit

logger = logging.getLogger(__name__)

DEGENERATE_VARIANCE = 1e-8

# Custom Warnings for this module
class DegenerateVarianceWarning(UserWarning):
    """Raised through warnings.warn when S_n / sqrt(n) has (near) zero variance."""
    pass


def indicator(a: float, b: float, mean: float = 0.0) -> Observable:
    """1_{(a, b]} - mean as a vectorised observable."""
    def observable(x):
        x = np.asarray(x, dtype=float)
        return ((x > a) & (x <= b)).astype(float) - mean
    observable.__name__ = f"indicator({a},{b}]"
    return observable


def constant(c: float) -> Observable:
    return lambda x: np.full(np.shape(x), float(c))


@dataclass
class Histogram:
    edges: np.ndarray
    masses: np.ndarray
    l1_distance: Optional[float] = None

    @property
    def bins(self) -> int:
        return len(self.masses)

    def mass(self, a: float, b: float) -> float:
        """Total mass of the bins lying inside [a, b]."""
        inside = (self.edges[:-1] >= a) & (self.edges[1:] <= b)
        return float(self.masses[inside].sum())


def empirical_density(samples: np.ndarray, bins: int = 64,
                      reference: Optional[GridFunction] = None) -> Histogram:
    """Normalised histogram of orbit samples on [0, 1].

    With ``reference`` the L1 distance between the histogram density and the
    reference density is measured on 32 midpoints per bin.
    """
    if bins < 16:
        raise DomainError(f"Need at least 16 bins, got {bins}")
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DomainError("No samples")
    counts, edges = np.histogram(samples, bins=bins, range=(0.0, 1.0))
    masses = counts / counts.sum()

    distance = None
    if reference is not None:
        width = 1.0 / bins
        sub = 32
        offsets = (np.arange(sub) + 0.5) / sub * width
        points = (edges[:-1, None] + offsets[None, :])
        heights = (masses / width)[:, None]
        distance = float(np.sum(np.abs(heights - reference(points))) * width / sub)
    return Histogram(edges=edges, masses=masses, l1_distance=distance)


def interval_mass(samples: np.ndarray, a: float, b: float) -> float:
    samples = np.asarray(samples)
    return float(np.mean((samples >= a) & (samples < b)))


def log_digit_integral(h: GridFunction, p: float, k_max: int = 10 ** 6) -> float:
    """Integral of log b against m_p x mu_p.

    The branch k of T_0 is taken with mass mu(I_{0,k}) and of T_1 with
    mu(I_{1,k}); the following bit adds 1 with probability 1 - p. Terms past
    ``k_max`` use h(0) and h(1) with sum_{k>K} log k/(k(k+1)) ~ (1 + log K)/K.
    """
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0,1], got {p}")
    k = np.arange(1, k_max + 1, dtype=float)
    gauss = h.integrate(1.0 / (k + 1.0), 1.0 / k)
    renyi = h.integrate((k - 1.0) / k, k / (k + 1.0))
    weights = p * np.log(k) + (1.0 - p) * np.log(k + 1.0)
    body = float(np.sum(weights * (p * gauss + (1.0 - p) * renyi)))
    tail_mass = p * h(0.0) + (1.0 - p) * h(1.0)
    tail = tail_mass * (1.0 + math.log(k_max)) / k_max
    return body + float(tail)


@dataclass
class DigitMeanStats:
    p: float
    n: int
    trials: int
    log_geo_mean: float
    stderr: float
    checkpoints: np.ndarray
    curves: np.ndarray
    guard_events: int = 0

    @property
    def geo_mean(self) -> float:
        return math.exp(self.log_geo_mean)

    @property
    def median_curve(self) -> np.ndarray:
        return np.median(self.curves, axis=0)

    @property
    def increasing_fraction(self) -> float:
        """Share of trials whose running mean rises between the last two checkpoints."""
        return float(np.mean(self.curves[:, -1] > self.curves[:, -2]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'n': self.n,
            'trials': self.trials,
            'log_geo_mean': self.log_geo_mean,
            'stderr': self.stderr,
            'geo_mean': self.geo_mean,
            'checkpoints': [int(c) for c in self.checkpoints],
            'median_arithmetic_mean': [float(v) for v in self.median_curve],
            'increasing_fraction': self.increasing_fraction,
            'guard_events': self.guard_events,
        }


def digit_mean_stats(p: float, n: int, trials: int, seed: int = 0, burn_in: int = 1000,
                     near_zero: float = NEAR_ZERO) -> DigitMeanStats:
    """Birkhoff averages of log d_i and running arithmetic digit means."""
    result = simulate_ensemble(p, n, trials, seed, burn_in, near_zero=near_zero)
    per_trial = result.log_digit_sums / n
    stderr = float(np.std(per_trial, ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    digit_stats = DigitMeanStats(
        p=p, n=n, trials=trials,
        log_geo_mean=float(np.mean(per_trial)),
        stderr=stderr,
        checkpoints=result.checkpoints,
        curves=result.digit_means,
        guard_events=result.guard_events,
    )
    logger.info(f"p={p}: geometric digit mean {digit_stats.geo_mean:.6f} "
                f"(log {digit_stats.log_geo_mean:.6f} +- {stderr:.2e}) over {trials} x {n}")
    return digit_stats


def correlation_sequence(f: Observable, g: Observable, p: float, n_max: int, samples: int,
                         seed: int = 0, burn_in: int = 1000) -> np.ndarray:
    """c(n) = |E[f(x_0) g(x_n)] - E f E g| for n = 0..n_max, from time averages
    along one stationary orbit."""
    x0 = float(np.random.default_rng([seed, 3]).random())
    orbit = simulate_orbit(p, x0, samples + n_max, burn_in=burn_in, seed=seed)
    values_f = np.asarray(f(orbit.samples), dtype=float)
    values_g = np.asarray(g(orbit.samples), dtype=float)
    head = values_f[:samples]
    mean_f = head.mean()
    c = np.empty(n_max + 1)
    for lag in range(n_max + 1):
        lagged = values_g[lag:lag + samples]
        c[lag] = abs(np.mean(head * lagged) - mean_f * lagged.mean())
    return c


@dataclass
class CLTResult:
    p: float
    n: int
    trials: int
    sigma2: float
    ks_statistic: Optional[float]
    ks_pvalue: Optional[float]
    ldp_epsilon: Optional[float] = None
    ldp_rate: Optional[float] = None
    degenerate: bool = False
    values: np.ndarray = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'n': self.n,
            'trials': self.trials,
            'sigma2': self.sigma2,
            'ks_statistic': self.ks_statistic,
            'ks_pvalue': self.ks_pvalue,
            'ldp_epsilon': self.ldp_epsilon,
            'ldp_rate': self.ldp_rate,
            'degenerate': self.degenerate,
        }


def clt_experiment(observable: Observable, p: float, n: int, trials: int, seed: int = 0,
                   burn_in: int = 1000, epsilon: Optional[float] = None) -> CLTResult:
    """Distribution of S_n / sqrt(n) over independent chains.

    The observable should already be centred. Returns the sample variance,
    the Kolmogorov-Smirnov distance of the standardised values to N(0, 1)
    and -(1/n) log P(S_n > n epsilon) for one epsilon (by default two
    standard deviations of S_n / n).
    """
    result = simulate_ensemble(p, n, trials, seed, burn_in, observable=observable)
    values = result.sums / math.sqrt(n)
    sigma2 = float(np.var(values, ddof=1)) if trials > 1 else 0.0

    if sigma2 < DEGENERATE_VARIANCE:
        message = f"S_n/sqrt(n) has variance {sigma2:.3e} < {DEGENERATE_VARIANCE:g}; no normality test"
        warnings.warn(message, DegenerateVarianceWarning, stacklevel=2)
        logger.warning(message)
        return CLTResult(p, n, trials, sigma2, None, None, degenerate=True, values=values)

    standardized = (values - values.mean()) / math.sqrt(sigma2)
    ks = stats.kstest(standardized, 'norm')

    if epsilon is None:
        epsilon = 2.0 * math.sqrt(sigma2 / n)
    exceed = float(np.mean(result.sums > n * epsilon))
    rate = -math.log(exceed) / n if exceed > 0 else None

    logger.info(f"CLT p={p}: sigma2={sigma2:.6f}, KS={ks.statistic:.4f} over {trials} trials")
    return CLTResult(p, n, trials, sigma2, float(ks.statistic), float(ks.pvalue),
                     ldp_epsilon=epsilon, ldp_rate=rate, values=values)


def stationary_mean(observable: Callable[[np.ndarray], np.ndarray], h: GridFunction) -> float:
    """Integral of observable * h on the grid of h."""
    nodes = h.nodes
    return float(trapezoid(np.asarray(observable(nodes)) * h.values, dx=1.0 / h.n))
