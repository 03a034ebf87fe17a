import math

import numpy as np
import pytest

from superhet import specfun
from superhet.errors import DomainError

GIBBS = 1.8519370519824663  # Si(pi), Maclaurin series to machine convergence


def test_si_at_zero():
    assert specfun.sine_integral(0.0) == 0.0


def test_si_at_pi_matches_series_oracle():
    assert specfun.sine_integral(math.pi) == pytest.approx(GIBBS, abs=1e-12)
    assert specfun.sine_integral_series(math.pi) == pytest.approx(GIBBS, abs=1e-14)


def test_si_large_argument_limit():
    assert abs(specfun.sine_integral(1e6) - math.pi / 2) < 1e-6


def test_ci_at_one():
    # gamma + ln(phi) + alternating series, summed to machine convergence
    assert specfun.cosine_integral(1.0) == pytest.approx(0.3374039229009681, abs=1e-12)


def test_ci_at_ten():
    assert specfun.cosine_integral(10.0) == pytest.approx(-0.04545643300445537, abs=1e-12)


def test_ci_small_argument_logarithmic_form():
    phi = 1e-4
    approx = specfun.EULER_GAMMA + math.log(phi)
    assert abs(specfun.cosine_integral(phi) - approx) < 1e-8


def test_domain_errors():
    with pytest.raises(DomainError):
        specfun.sine_integral(-1.0)
    with pytest.raises(DomainError):
        specfun.sine_integral(float("nan"))
    with pytest.raises(DomainError):
        specfun.sine_integral(float("inf"))
    with pytest.raises(DomainError):
        specfun.cosine_integral(0.0)
    with pytest.raises(DomainError):
        specfun.cosine_integral(-2.0)


def test_si_monotone_on_first_arch():
    grid = np.linspace(0.0, math.pi, 400)
    values = specfun.sine_integral(grid)
    assert np.all(np.diff(values) > 0)


def test_si_global_bound():
    grid = np.geomspace(1e-6, 1e6, 4000)
    values = specfun.sine_integral(grid)
    assert np.all(values <= math.pi / 2 + 0.282)


def test_ci_asymptotic_envelope():
    grid = np.geomspace(10.0, 1e6, 2000)
    values = np.abs(specfun.cosine_integral(grid))
    assert np.all(values <= 1.2 / grid)


def test_strategy_overlap_window():
    # series vs auxiliary-function strategies agree on [5, 50]
    for phi in np.geomspace(5.0, 50.0, 31):
        si_s = specfun.sine_integral_series(phi)
        ci_s = specfun.cosine_integral_series(phi)
        si_a = specfun.sine_integral_asymptotic(phi)
        ci_a = specfun.cosine_integral_asymptotic(phi)
        assert abs(si_s - si_a) <= 1e-10
        assert abs(ci_s - ci_a) <= 1e-10


def test_production_matches_frozen_reference(sici_reference):
    phi, si_ref, ci_ref = sici_reference
    si = specfun.sine_integral(phi)
    ci = specfun.cosine_integral(phi)
    assert np.max(np.abs(si - si_ref)) <= 1e-10
    assert np.max(np.abs(ci - ci_ref)) <= 1e-10


def test_series_strategy_matches_frozen_reference(sici_reference):
    phi, si_ref, ci_ref = sici_reference
    sample = phi[:: 6]
    for p, s, c in zip(sample, si_ref[::6], ci_ref[::6]):
        assert abs(specfun.sine_integral_series(p) - s) <= 1e-12
        assert abs(specfun.cosine_integral_series(p) - c) <= 2e-12


def test_aux_g_positive():
    grid = np.geomspace(1e-3, 1e6, 500)
    _, g = specfun.aux_fg(grid)
    assert np.all(g > 0)


def test_asymptotic_strategy_domain():
    with pytest.raises(DomainError):
        specfun.sine_integral_asymptotic(0.5)


def test_grid_table_shapes():
    phi, si, ci = specfun.grid_table(0.1, 10.0, 25)
    assert phi.shape == si.shape == ci.shape == (25,)
    with pytest.raises(DomainError):
        specfun.grid_table(0.1, 10.0, 1)
    with pytest.raises(DomainError):
        specfun.grid_table(0.0, 10.0, 5)


def test_array_and_scalar_agree():
    grid = np.array([0.3, 3.0, 30.0, 300.0])
    si = specfun.sine_integral(grid)
    ci = specfun.cosine_integral(grid)
    for i, p in enumerate(grid):
        assert specfun.sine_integral(float(p)) == si[i]
        assert specfun.cosine_integral(float(p)) == ci[i]
