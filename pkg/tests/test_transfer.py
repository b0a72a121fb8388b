import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.special import polygamma

from core.grid import GridFunction
from transfer.config import OperatorConfig
from transfer.perron_frobenius import (TransferOperator, apply_Lp, gauss_density, invariance_residual,
                                       solve_density, sweep_densities)


def _config(p: float, **overrides) -> OperatorConfig:
    return OperatorConfig(**{'p': p, 'grid': 256, 'k_max': 200, **overrides})


def test_constant_at_zero(fresh_cache) -> None:
    ones = GridFunction.constant(1.0, 256)
    asymptotic = apply_Lp(ones, _config(1.0))
    assert asymptotic(0.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-12)

    dropped = apply_Lp(ones, _config(1.0, tail_mode='drop'))
    partial = sum(1.0 / k ** 2 for k in range(1, 201))
    assert dropped(0.0) == pytest.approx(partial, rel=1e-12)


@pytest.mark.parametrize('p', [1.0, 0.5, 0.2])
def test_constant_maps_to_trigamma(p, fresh_cache) -> None:
    image = apply_Lp(GridFunction.constant(1.0, 256), _config(p))
    nodes = np.linspace(0.0, 1.0, 257)
    np.testing.assert_allclose(image.values, polygamma(1, 1.0 + nodes), rtol=1e-10)


def test_zero_and_positivity(fresh_cache) -> None:
    cfg = _config(0.5)
    assert apply_Lp(GridFunction.constant(0.0, 256), cfg).sup() == 0.0

    bump = GridFunction.from_function(lambda x: np.exp(-50 * (x - 0.7) ** 2), 256)
    image = apply_Lp(bump, cfg)
    assert image.min() > 0


def test_mass_is_preserved(fresh_cache) -> None:
    h = gauss_density(1024)
    for p in (1.0, 0.5):
        image = apply_Lp(h, OperatorConfig(p=p, grid=1024, k_max=1000))
        assert abs(image.integral() - 1.0) < 1e-5


def test_operator_resamples_coarser_input(fresh_cache) -> None:
    operator = TransferOperator(_config(0.5))
    coarse = GridFunction.constant(1.0, 64)
    assert operator.apply(coarse).n == 256


def test_gauss_density_is_invariant() -> None:
    h = gauss_density(4096)
    assert invariance_residual(h, 1.0, 0.0, 0.5) < 1e-3
    assert invariance_residual(h, 1.0, 0.0, 1.0) < 1e-6
    assert invariance_residual(h, 1.0, 0.2, 0.9) < 1e-3


def test_operator_config_validation() -> None:
    with pytest.raises(ValidationError):
        OperatorConfig(p=0)
    with pytest.raises(ValidationError):
        OperatorConfig(p=2)
    with pytest.raises(ValidationError):
        OperatorConfig(p=0.5, grid=3000)
    with pytest.raises(ValidationError):
        OperatorConfig(p=0.5, tail_mode='exact')


def test_solve_small_grid(fresh_cache) -> None:
    h, diagnostics = solve_density(_config(1.0))
    assert h.density
    assert diagnostics.residual_L1 < 1e-10
    assert diagnostics.iters < 200
    assert diagnostics.contraction_violations == 0
    assert h.distance(gauss_density(256), norm='sup') < 5e-3
    again, _ = solve_density(_config(1.0))
    assert again is h


@pytest.mark.slow
def test_gauss_fixed_point(fresh_cache) -> None:
    h, diagnostics = solve_density(OperatorConfig(p=1.0))
    reference = gauss_density(4096)
    assert h.distance(reference, norm='sup') < 5e-3
    assert h.distance(reference) < 1e-3
    assert diagnostics.tail_bound == pytest.approx(h.sup() / 1000)


@pytest.mark.slow
def test_mixed_densities(fresh_cache) -> None:
    results = sweep_densities([0.5, 0.9], OperatorConfig(p=1.0, grid=1024))
    for p, (h, diagnostics) in results.items():
        assert diagnostics.h_min > 0
        assert diagnostics.contraction_violations == 0
        assert np.isfinite(diagnostics.variation)
        rng = np.random.default_rng(int(p * 10))
        for _ in range(20):
            a, b = np.sort(rng.random(2))
            assert invariance_residual(h, p, float(a), float(b)) < 1e-3


@pytest.mark.slow
def test_low_p_density_at_full_resolution(fresh_cache) -> None:
    h, diagnostics = solve_density(OperatorConfig(p=0.3, grid=4096))
    assert diagnostics.contraction_violations == 0
    assert diagnostics.h_min > 0.05
    rng = np.random.default_rng(30)
    for _ in range(50):
        a, b = np.sort(rng.random(2))
        assert invariance_residual(h, 0.3, float(a), float(b)) < 1e-3


def test_gauss_density_is_a_fixed_point(fresh_cache) -> None:
    h = gauss_density(1024)
    image = apply_Lp(h, OperatorConfig(p=1.0, grid=1024, k_max=1000))
    assert image.distance(h, norm='sup') < 1e-3
