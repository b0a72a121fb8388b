# processors/verification.py
import logging
import math
from fractions import Fraction
from typing import Any, Dict, List

import numpy as np
from mpmath import mp, mpf

from core.omega import OmegaWord
from core.points import DEFAULT_PRECISION, ExactPoint
from core.trace import ExpansionTrace
from expansion.audit import b_digit_crosscheck, lemma_audit, lemma_case, reconstruction_residual
from expansion.expander import approximation_error, expand, iter_states
from expansion.steering import AllowedDigits, steer_alpha, steer_digits
from transfer.config import OperatorConfig
from transfer.covering import covering_time
from transfer.inoue import inoue_check
from transfer.perron_frobenius import invariance_residual, solve_density

GAUSS_P = 1.0
MIXED_PS = (0.3, 0.5, 0.9)
SUP_TOLERANCE = 5e-3
L1_TOLERANCE = 1e-3
INVARIANCE_TOLERANCE = 1e-3
MIN_DENSITY = 0.05
CONVERGENCE_STEPS = 50
FINAL_ERROR = 1e-6
STEERING_STEPS = 100
ALPHA_STEPS = 25
ALPHA_TOLERANCE = 1e-9
CASE_II_MAX = 100


def _gauss(x):
    return 1.0 / ((1.0 + x) * math.log(2.0))


class VerificationProcessor:
    """Runs the invariant suite and collects one report section per check family.

    Every section is ``{'data': rows, 'summary': {...}}``; rows list the
    failures (or per-parameter measurements) and the summary carries
    ``passed``, ``checks`` and ``failures``. Randomness comes from
    ``default_rng([seed, section])`` so a report depends only on its settings.
    """

    def __init__(self, runs: int = 100, seed: int = 0, precision: int = DEFAULT_PRECISION,
                 grid: int = 4096, k_max: int = 1000):
        self.runs = runs
        self.seed = seed
        self.precision = precision
        self.grid = grid
        self.k_max = k_max
        self.processed_data: Dict[str, Any] = {}
        self.logger = logging.getLogger(__name__)
        self._rational_traces: List[ExpansionTrace] = []
        self._real_traces: List[ExpansionTrace] = []

    @property
    def irrational_runs(self) -> int:
        return max(1, self.runs // 10)

    def _rng(self, section: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, section])

    def process_all_data(self) -> Dict[str, Any]:
        """Run every section in a fixed order"""
        sections = [
            ('exact_identities', self._process_exact_identities),
            ('convergence_bound', self._process_convergence_bound),
            ('lemma_audit', self._process_lemma_audit),
            ('b_digit', self._process_b_digit),
            ('reconstruction', self._process_reconstruction),
            ('density_oracle', self._process_density_oracle),
            ('invariance', self._process_invariance),
            ('positivity', self._process_positivity),
            ('inoue', self._process_inoue),
            ('covering', self._process_covering),
            ('steering', self._process_steering),
            ('alpha_embedding', self._process_alpha),
        ]
        for name, process in sections:
            self.processed_data[name] = process()
            summary = self.processed_data[name]['summary']
            status = 'passed' if summary['passed'] else 'FAILED'
            self.logger.info(f"{name}: {status} ({summary['checks']} checks, {summary['failures']} failures)")
        return self.processed_data

    @property
    def passed(self) -> bool:
        return bool(self.processed_data) and all(
            section['summary']['passed'] for section in self.processed_data.values()
        )

    @staticmethod
    def _section(rows: List[Dict[str, Any]], checks: int, failures: int, **extra) -> Dict[str, Any]:
        return {
            'data': rows,
            'summary': {'passed': failures == 0, 'checks': checks, 'failures': failures, **extra},
        }

    # Trace families shared by several sections

    def _random_rational(self, rng: np.random.Generator) -> ExactPoint:
        denominator = int(rng.integers(1, 10_001))
        numerator = 0
        while numerator == 0:
            numerator = int(rng.integers(-denominator, denominator + 1))
        return ExactPoint.rational(numerator, denominator)

    def rational_traces(self) -> List[ExpansionTrace]:
        """Random rationals with denominator <= 10^4 under random periodic words.

        Each block ends in a 0 bit, so every expansion reaches 0.
        """
        if self._rational_traces:
            return self._rational_traces
        rng = self._rng(1)
        for _ in range(self.runs):
            x = self._random_rational(rng)
            length = int(rng.integers(1, 61))
            block = rng.integers(0, 2, length).tolist()
            block[-1] = 0
            n_max = x.value.denominator + length + 1
            self._rational_traces.append(expand(x, OmegaWord.periodic(block), n_max))
        return self._rational_traces

    def _random_real(self, rng: np.random.Generator, index: int) -> ExactPoint:
        sign = -1 if rng.integers(0, 2) else 1
        if index % 2 == 0:
            # (a + sqrt(m)) / b with a = -floor(sqrt(m)), so the value lies in (0, 1/b)
            m = int(rng.integers(2, 1000))
            while math.isqrt(m) ** 2 == m:
                m += 1
            b = sign * int(rng.integers(1, 10))
            return ExactPoint.quadratic_surd(-math.isqrt(m), m, b, self.precision)
        with mp.workprec(self.precision):
            value = sign * self._uniform(rng)
        return ExactPoint(value, 'K', self.precision)

    def _uniform(self, rng: np.random.Generator) -> mpf:
        """A uniform point of [0,1) carrying ``precision`` random bits."""
        mantissa = int.from_bytes(rng.bytes(self.precision // 8 + 1), 'big')
        with mp.workprec(self.precision):
            return mpf(mantissa % 2 ** self.precision) / mpf(2) ** self.precision

    def real_traces(self) -> List[ExpansionTrace]:
        """Quadratic surds and random reals at the run precision, Bernoulli(1/2) words."""
        if self._real_traces:
            return self._real_traces
        rng = self._rng(2)
        for index in range(self.irrational_runs):
            x = self._random_real(rng, index)
            word = OmegaWord.bernoulli(0.5, int(rng.integers(0, 2 ** 63)))
            self._real_traces.append(expand(x, word, CONVERGENCE_STEPS))
        return self._real_traces

    # Sections

    def _process_exact_identities(self) -> Dict[str, Any]:
        rows = []
        traces = self.rational_traces()

        longest = 0
        for run, trace in enumerate(traces):
            x = trace.start
            points = [x] + trace.points
            away_from_unit = sum(1 for point in points[:len(trace)] if abs(point.value) != 1)
            longest = max(longest, len(trace))
            if not trace.terminated:
                rows.append({'run': run, 'x': str(x), 'check': 'terminates',
                             'detail': f"{len(trace)} digits without reaching 0"})
            elif away_from_unit > x.value.denominator:
                rows.append({'run': run, 'x': str(x), 'check': 'termination_length',
                             'detail': f"{away_from_unit} steps > denominator {x.value.denominator}"})
            elif trace.convergent(len(trace)) != x.value:
                rows.append({'run': run, 'x': str(x), 'check': 'final_convergent',
                             'detail': f"{trace.convergent(len(trace))} != {x}"})
            for state in iter_states(trace):
                if state.determinant != state.expected_determinant:
                    rows.append({'run': run, 'x': str(x), 'check': 'determinant', 'detail': f"n={state.n}"})
                    break
        return self._section(rows, len(traces), len(rows), longest_expansion=longest)

    def _process_convergence_bound(self) -> Dict[str, Any]:
        rows = []
        checks = 0
        worst_final = 0.0
        for run, trace in enumerate(self.real_traces()):
            states = list(iter_states(trace))
            for state in states:
                checks += 1
                error = approximation_error(state, trace.start)
                if not error.within_bound:
                    actual, bound = error.as_floats()
                    rows.append({'run': run, 'x': str(trace.start)[:24], 'check': 'bound',
                                 'detail': f"n={state.n}: {actual:.3e} > {bound:.3e}"})
            if states:
                final = float(approximation_error(states[-1], trace.start).actual)
                worst_final = max(worst_final, final)
                if len(trace) == CONVERGENCE_STEPS and final >= FINAL_ERROR:
                    rows.append({'run': run, 'x': str(trace.start)[:24], 'check': 'final_error',
                                 'detail': f"{final:.3e} at n={CONVERGENCE_STEPS}"})
        return self._section(rows, checks, len(rows), worst_final_error=worst_final)

    def _case_ii_trace(self, n: int) -> ExpansionTrace:
        """x = 1 under 1^(n-1) 0: digits 2, ..., 2, 1 with q_n = 1 and q_{n-1} = n."""
        return expand(ExactPoint.rational(1), OmegaWord.explicit([1] * (n - 1) + [0]), n)

    def _process_lemma_audit(self) -> Dict[str, Any]:
        rows = []
        checks = 0
        for family, traces in (('rational', self.rational_traces()), ('real', self.real_traces())):
            for run, trace in enumerate(traces):
                checks += 1
                for violation in lemma_audit(trace):
                    rows.append({'family': family, 'run': run, 'x': str(trace.start)[:24],
                                 'check': 'lemma', 'detail': str(violation)})

        for n in range(2, CASE_II_MAX + 1):
            checks += 1
            trace = self._case_ii_trace(n)
            q = trace.q_sequence()
            if lemma_case(trace, n) != 'ii' or q[n - 1] != 1 or q[n - 2] != n or lemma_audit(trace):
                rows.append({'family': 'case_ii', 'run': n, 'x': '1', 'check': 'case_ii',
                             'detail': f"q_n={q[n - 1]}, q_(n-1)={q[n - 2]}"})
        return self._section(rows, checks, len(rows))

    def _process_b_digit(self) -> Dict[str, Any]:
        rows = []
        traces = self.rational_traces() + self.real_traces()
        for run, trace in enumerate(traces):
            mismatches = b_digit_crosscheck(trace)
            if mismatches:
                rows.append({'run': run, 'x': str(trace.start)[:24], 'check': 'b_digit',
                             'detail': f"indices {mismatches[:10]}"})
        return self._section(rows, len(traces), len(rows))

    def _process_reconstruction(self) -> Dict[str, Any]:
        rows = []
        checks = 0
        with mp.workprec(self.precision):
            limit = mpf(2) ** -128
        for family, traces in (('rational', self.rational_traces()), ('real', self.real_traces())):
            for run, trace in enumerate(traces):
                for n in range(1, len(trace) + 1):
                    checks += 1
                    residual = reconstruction_residual(trace, n)
                    exact = isinstance(residual, Fraction)
                    if (exact and residual != 0) or (not exact and residual >= limit):
                        rows.append({'family': family, 'run': run, 'x': str(trace.start)[:24],
                                     'check': 'reconstruction',
                                     'detail': f"n={n}: residual {float(residual):.3e}"})
                        break
        return self._section(rows, checks, len(rows))

    def _operator_config(self, p: float) -> OperatorConfig:
        return OperatorConfig(p=p, grid=self.grid, k_max=self.k_max)

    def _process_density_oracle(self) -> Dict[str, Any]:
        h, diagnostics = solve_density(self._operator_config(GAUSS_P))
        sup_error = h.distance(_gauss, norm='sup')
        l1_error = h.distance(_gauss)
        row = {'p': GAUSS_P, 'sup_error': sup_error, 'l1_error': l1_error,
               'iters': diagnostics.iters, 'residual_L1': diagnostics.residual_L1}
        failures = int(sup_error >= SUP_TOLERANCE) + int(l1_error >= L1_TOLERANCE)
        return self._section([row], 2, failures)

    def _process_invariance(self) -> Dict[str, Any]:
        rng = self._rng(7)
        rows = []
        failures = 0
        for p in MIXED_PS:
            h, _ = solve_density(self._operator_config(p))
            ends = np.sort(rng.random((100, 2)), axis=1)
            residuals = [invariance_residual(h, p, float(a), float(b), self.k_max)
                         for a, b in ends if a < b]
            worst = max(residuals)
            failed = sum(1 for r in residuals if r >= INVARIANCE_TOLERANCE)
            failures += failed
            rows.append({'p': p, 'intervals': len(residuals), 'max_residual': worst, 'failures': failed})
        return self._section(rows, sum(row['intervals'] for row in rows), failures)

    def _process_positivity(self) -> Dict[str, Any]:
        rows = []
        failures = 0
        for p in MIXED_PS:
            _, diagnostics = solve_density(self._operator_config(p))
            ok = diagnostics.h_min > MIN_DENSITY and math.isfinite(diagnostics.variation)
            failures += int(not ok)
            rows.append({'p': p, 'h_min': diagnostics.h_min, 'h_max': diagnostics.h_max,
                         'variation': diagnostics.variation, 'passed': ok})
        return self._section(rows, len(rows), failures)

    def _process_inoue(self) -> Dict[str, Any]:
        rows = []
        failures = 0
        for p in MIXED_PS:
            report = inoue_check(p, self.grid)
            ok = (report.passed and abs(report.sup - max(p, 1.0 - p)) < 1e-12
                  and abs(report.variation_g0 - p) < 1e-12)
            failures += int(not ok)
            rows.append({'p': p, 'sup': report.sup, 'variation_g0': report.variation_g0,
                         'variation_g1': report.variation_g1, 'passed': ok})
        return self._section(rows, len(rows), failures)

    def _process_covering(self) -> Dict[str, Any]:
        rng = self._rng(10)
        rows = []
        count = self.irrational_runs
        longest = 0
        for run in range(count):
            a = Fraction(int(rng.integers(0, 999)), 1000)
            b = a + Fraction(1, 1000)
            word = OmegaWord.bernoulli(0.5, int(rng.integers(0, 2 ** 63)))
            steps = covering_time(a, b, word)
            if steps is None:
                rows.append({'run': run, 'interval': f"({a}, {b})", 'check': 'covering',
                             'detail': 'not covered within 1000 maps'})
            else:
                longest = max(longest, steps)
        return self._section(rows, count, len(rows), longest_covering_time=longest)

    def _process_steering(self) -> Dict[str, Any]:
        rng = self._rng(11)
        rows = []
        checks = 0
        count = self.irrational_runs
        one_two = AllowedDigits.of({1, 2})

        def real(low: float, high: float) -> ExactPoint:
            with mp.workprec(self.precision):
                value = mpf(low) + (mpf(high) - mpf(low)) * self._uniform(rng)
            return ExactPoint(value, 'K', self.precision)

        cases = []
        for _ in range(count):
            cases.append(('set:1,2 on (1/2,1]', real(0.5, 1.0), one_two, True))
            cases.append(('set:1,2 on (0,1/3)', real(0.0, 1.0 / 3.0), one_two, False))
            for name in ('odd', 'even'):
                x = real(-1.0, 1.0)
                cases.append((f"{name} on [-1,1]", x, AllowedDigits.parse(name), True))

        for label, x, allowed, should_succeed in cases:
            if x.is_zero or x.value == mpf(0.5):
                continue
            checks += 1
            result = steer_digits(x, allowed, STEERING_STEPS)
            if should_succeed and not result.succeeded:
                rows.append({'case': label, 'x': str(x)[:24], 'detail': f"failed at step {result.failed_at}"})
            elif not should_succeed and result.failed_at != 1:
                rows.append({'case': label, 'x': str(x)[:24], 'detail': f"failed_at={result.failed_at}"})
        return self._section(rows, checks, len(rows))

    def _process_alpha(self) -> Dict[str, Any]:
        rng = self._rng(12)
        rows = []
        count = min(100, self.runs)
        worst = 0.0
        for run in range(count):
            with mp.workprec(self.precision):
                alpha = 1 - self._uniform(rng)
                value = alpha - 1 + self._uniform(rng)
            x = ExactPoint(value, 'K', self.precision)
            steering = steer_alpha(x, alpha, ALPHA_STEPS)
            discrepancy = float(steering.max_discrepancy)
            worst = max(worst, discrepancy)
            if discrepancy >= ALPHA_TOLERANCE:
                rows.append({'run': run, 'alpha': float(alpha), 'x': float(x),
                             'detail': f"max discrepancy {discrepancy:.3e}"})
        return self._section(rows, count, len(rows), max_discrepancy=worst)

