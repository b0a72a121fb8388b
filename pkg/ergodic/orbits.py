# ergodic/orbits.py
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from mpmath import mp, mpf

from core.errors import DomainError
from expansion.maps import gauss_renyi

logger = logging.getLogger(__name__)

NEAR_ZERO = 2.0 ** -40
_BLOCK = 1024

Observable = Callable[[np.ndarray], np.ndarray]


def bit_stream(p: float, seed: int, size: int) -> np.ndarray:
    """omega bits with P(0) = p; the same stream as OmegaWord.bernoulli(p, seed)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return (rng.random(size) >= p).astype(np.int8)


def _check(p: float, x0: float):
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0,1], got {p}")
    if not 0 <= x0 <= 1:
        raise DomainError(f"x0 must lie in [0,1], got {x0}")


@dataclass
class OrbitSamples:
    """n points of one R-orbit after burn-in, with the bits applied to reach
    them and the number of near-zero resamples."""

    p: float
    seed: int
    samples: np.ndarray
    bits: np.ndarray
    guard_events: int = 0

    def __len__(self) -> int:
        return len(self.samples)


def simulate_orbit(p: float, x0, n: int, burn_in: int = 1000, seed: int = 0,
                   near_zero: float = NEAR_ZERO, precision: Optional[int] = None) -> OrbitSamples:
    """Iterate x <- T_{omega_i} x with iid bits, P(omega_i = 0) = p.

    Double precision by default. A start at exactly 0 stays at 0; any other
    point falling below ``near_zero`` is replaced by a uniform draw and
    counted. With ``precision`` the orbit runs in mpmath at that many bits
    and no guard is applied.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    total = burn_in + n
    bits = bit_stream(p, seed, total)

    if precision is not None:
        return _simulate_precise(p, x0, n, burn_in, seed, bits, precision)

    x = float(x0)
    _check(p, x)
    samples = np.zeros(n)
    if x == 0.0:
        return OrbitSamples(p, seed, samples, bits[burn_in:], 0)

    guard = np.random.default_rng([seed, 1])
    events = 0
    bit_list = bits.tolist()
    for i in range(total):
        if bit_list[i] == 0:
            r = 1.0 / x
        elif x < 1.0:
            r = 1.0 / (1.0 - x)
        else:
            r = 1.0
        x = r - math.floor(r)
        if x < near_zero:
            x = guard.random()
            events += 1
        if i >= burn_in:
            samples[i - burn_in] = x

    if events:
        logger.warning(f"Near-zero guard resampled {events} point(s) (p={p}, seed={seed})")
    return OrbitSamples(p, seed, samples, bits[burn_in:], events)


def _simulate_precise(p, x0, n, burn_in, seed, bits, precision) -> OrbitSamples:
    with mp.workprec(precision):
        x = mpf(x0)
        _check(p, x)
        samples = np.zeros(n)
        for i, bit in enumerate(bits.tolist()):
            x = gauss_renyi(bit, x, precision)
            if i >= burn_in:
                samples[i - burn_in] = float(x)
    return OrbitSamples(p, seed, samples, bits[burn_in:], 0)


@dataclass
class EnsembleResult:
    """Per-trial accumulations over n post-burn-in steps of independent chains."""

    n: int
    sums: np.ndarray
    log_digit_sums: np.ndarray
    checkpoints: np.ndarray
    digit_means: np.ndarray
    guard_events: int = 0


def _trial_generators(seed: int, trials: int):
    children = np.random.SeedSequence(seed).spawn(trials)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def simulate_ensemble(p: float, n: int, trials: int, seed: int = 0, burn_in: int = 1000,
                      observable: Optional[Observable] = None, n_checkpoints: int = 10,
                      near_zero: float = NEAR_ZERO) -> EnsembleResult:
    """Run ``trials`` independent chains side by side.

    Trial t draws its start point and bits from PCG64 fed by the t-th child
    of SeedSequence(seed), so different seeds give unrelated chains. Along each
    chain the sum of ``observable`` and of log d_i is accumulated, where
    d_i = k_i + omega_{i+1} and k_i is the branch index of the map applied at
    step i. Running digit means are recorded at n/n_checkpoints, ..., n.
    """
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0,1], got {p}")
    if n < n_checkpoints or trials < 1:
        raise DomainError(f"Need n >= {n_checkpoints} and trials >= 1, got n={n}, trials={trials}")

    generators = _trial_generators(seed, trials)
    guard = np.random.default_rng([seed, 2])
    x = np.array([g.random() for g in generators])
    x[x < near_zero] = 0.5

    checkpoints = np.linspace(n // n_checkpoints, n, n_checkpoints).astype(int)
    checkpoints[-1] = n
    sums = np.zeros(trials)
    log_sums = np.zeros(trials)
    digit_sums = np.zeros(trials)
    digit_means = np.zeros((trials, n_checkpoints))
    events = 0

    total = burn_in + n + 1
    block = np.empty((trials, 0), dtype=np.int8)
    cursor = 0
    next_checkpoint = 0

    def bits_at(step):
        nonlocal block, cursor
        if step - cursor >= block.shape[1]:
            cursor = step
            width = min(_BLOCK, total - step)
            block = np.stack([(g.random(width) >= p).astype(np.int8) for g in generators])
        return block[:, step - cursor]

    current = bits_at(0)
    for step in range(burn_in + n):
        following = bits_at(step + 1)
        y = np.where(current == 0, x, 1.0 - x)
        inverse = 1.0 / y
        k = np.floor(inverse)
        recording = step >= burn_in
        if recording:
            if observable is not None:
                sums += observable(x)
            digits = k + following
            log_sums += np.log(digits)
            digit_sums += digits
        x = inverse - k
        low = x < near_zero
        if low.any():
            x[low] = guard.random(int(low.sum()))
            events += int(low.sum())
        if recording:
            done = step - burn_in + 1
            if next_checkpoint < n_checkpoints and done == checkpoints[next_checkpoint]:
                digit_means[:, next_checkpoint] = digit_sums / done
                next_checkpoint += 1
        current = following

    if events:
        logger.warning(f"Near-zero guard resampled {events} point(s) across {trials} chains")
    return EnsembleResult(n=n, sums=sums, log_digit_sums=log_sums, checkpoints=checkpoints,
                          digit_means=digit_means, guard_events=events)

