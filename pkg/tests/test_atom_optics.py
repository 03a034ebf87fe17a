import math

import numpy as np
import pytest

from superhet import atom_optics as ao
from superhet.config import DEFAULT_CONFIG
from superhet.errors import CalibrationError, DomainError, ExtractionError

TWO_PI = 2 * math.pi
GRID = np.linspace(-25e6, 25e6, 2501)
LENGTHS = DEFAULT_CONFIG.lengths_mm


def ladder(l_mm=11.78, **kw):
    return DEFAULT_CONFIG.ladder_for(l_mm, **kw)


class TestEIT:
    def test_two_level_limit(self):
        from dataclasses import replace
        cfg = replace(ladder(10.0), omega_c=0.0)
        spec = ao.eit_transmission(np.array([-1e6, 0.0, 1e6]), cfg)
        on_resonance = spec.transmission[1]
        assert on_resonance == pytest.approx(math.exp(-cfg.od_per_mm * cfg.l_mm),
                                             rel=1e-12)

    def test_fwhm_constant_at_paper_value(self):
        widths = []
        for l_mm in LENGTHS:
            spec = ao.eit_transmission(GRID, ladder(l_mm))
            widths.append(spec.fwhm)
            assert spec.fwhm == pytest.approx(7.5e6, rel=0.02)
        med = np.median(widths)
        assert max(abs(w - med) for w in widths) / med <= 0.02

    def test_amplitude_linear_in_length(self):
        amps = np.array([ao.eit_transmission(GRID, ladder(l)).a_eit
                         for l in LENGTHS])
        x = np.asarray(LENGTHS)
        design = np.column_stack([x, np.ones_like(x)])
        coef, res, _, _ = np.linalg.lstsq(design, amps, rcond=None)
        ss_tot = float(np.sum((amps - amps.mean()) ** 2))
        r2 = 1 - float(res[0]) / ss_tot
        assert r2 >= 0.999
        assert abs(coef[1]) <= 0.02 * amps[-1]

    def test_empty_grid_rejected(self):
        with pytest.raises(DomainError):
            ao.eit_transmission(np.array([]), ladder())

    def test_non_monotone_grid_rejected(self):
        with pytest.raises(DomainError):
            ao.eit_transmission(np.array([0.0, -1e6, 1e6]), ladder())


class TestExtraction:
    def test_synthetic_lorentzian_width_recovered(self):
        width = 4e6
        base = 0.62
        grid = np.linspace(-30e6, 30e6, 3001)
        contrast = 0.05 / (1 + (2 * grid / width) ** 2)
        spec = ao.EITSpectrum(grid, base * (1 + contrast), base)
        a_eit, fwhm = ao.extract_amplitude_fwhm(spec)
        step = grid[1] - grid[0]
        assert abs(fwhm - width) <= step
        assert a_eit == pytest.approx(0.05, rel=1e-6)

    def test_flat_spectrum_rejected(self):
        grid = np.linspace(-1e6, 1e6, 101)
        spec = ao.EITSpectrum(grid, np.full(101, 0.4), 0.4)
        with pytest.raises(ExtractionError):
            ao.extract_amplitude_fwhm(spec)

    def test_default_config_width(self):
        spec = ao.eit_transmission(GRID, ladder(11.78))
        a_eit, fwhm = ao.extract_amplitude_fwhm(spec)
        assert fwhm == pytest.approx(7.5e6, rel=0.02)


class TestATSplitting:
    def test_paper_drive_value(self):
        cfg = ladder(10.0, omega_mw=TWO_PI * 7.75e6)
        split = ao.at_splitting(cfg)
        assert split == pytest.approx(7.75e6, rel=0.02)

    def test_doubling_drive_doubles_splitting(self):
        s1 = ao.at_splitting(ladder(10.0, omega_mw=TWO_PI * 7.75e6))
        s2 = ao.at_splitting(ladder(10.0, omega_mw=TWO_PI * 15.5e6))
        assert s2 == pytest.approx(2 * s1, rel=0.02)

    def test_linearity_over_strong_dressing_range(self):
        omegas = TWO_PI * np.linspace(5e6, 15e6, 6)
        splits = [ao.at_splitting(ladder(10.0, omega_mw=o)) for o in omegas]
        slope = np.polyfit(omegas, splits, 1)[0]
        assert slope == pytest.approx(1 / TWO_PI, rel=0.02)

    def test_unresolved_doublet_rejected(self):
        with pytest.raises(CalibrationError):
            ao.at_splitting(ladder(10.0, omega_mw=TWO_PI * 1.0e6))

    def test_dressing_off_rejected(self):
        with pytest.raises(CalibrationError):
            ao.at_splitting(ladder(10.0))


class TestFieldProfile:
    def geometry(self, r=0.3):
        from dataclasses import replace
        return replace(DEFAULT_CONFIG.cell_geometry(), reflection_r=r)

    def test_no_reflection_uniform(self):
        g = self.geometry(r=0.0)
        z = np.linspace(0, 0.02, 50)
        assert np.allclose(ao.mw_field_profile(z, g, 2.5), 2.5)

    def test_full_reflection_node(self):
        g = self.geometry(r=0.999999999)
        z_node = g.lambda_mw / 4  # exp(i pi) = -1
        assert ao.mw_field_profile(z_node, g, 1.0) == pytest.approx(0.0, abs=1e-8)

    def test_path_integral_growth_slows_past_quarter_wave(self):
        # with the path starting at a node, the cumulative field integral
        # accelerates up to lambda/4 and decelerates beyond it
        from dataclasses import replace
        g = replace(self.geometry(), z0=self.geometry().lambda_mw / 4)
        quarter = g.lambda_mw / 4
        lengths = np.linspace(0.1 * quarter, 1.9 * quarter, 37)
        growth = np.array([ao.mw_field_profile(g.z0 + l, g, 1.0) for l in lengths])
        before = lengths < 0.95 * quarter
        after = lengths > 1.05 * quarter
        assert np.all(np.diff(growth[before]) > 0)
        assert np.all(np.diff(growth[after]) < 0)

    def test_correction_reference_zero(self):
        g = self.geometry()
        assert ao.calibration_correction(g.l, g) == pytest.approx(0.0, abs=1e-12)

    def test_correction_zero_without_reflection(self):
        g = self.geometry(r=0.0)
        for l_mm in LENGTHS:
            assert ao.calibration_correction(l_mm * 1e-3, g) == pytest.approx(0.0, abs=1e-12)

    def test_correction_monotone_and_small(self):
        g = self.geometry()
        corr = [ao.calibration_correction(l * 1e-3, g) for l in LENGTHS]
        assert all(abs(c) < 3.0 for c in corr)
        diffs = np.diff(corr)
        assert np.all(diffs < 0) or np.all(diffs > 0)

    def test_correction_idempotence(self):
        from superhet.receiver import apply_power_correction
        g = self.geometry()
        averages = []
        for l_mm in LENGTHS:
            e0 = apply_power_correction(1.0, l_mm * 1e-3, g)
            averages.append(ao.path_average_field(l_mm * 1e-3, g, e0))
        spread = (max(averages) - min(averages)) / np.mean(averages)
        assert spread <= 1e-3

    def test_heterodyne_factor_unity_without_reflection(self):
        g = self.geometry(r=0.0)
        assert ao.heterodyne_path_factor(0.01, g) == 1.0


class TestConversionGain:
    def test_linear_in_amplitude(self):
        k1 = ao.conversion_gain(0.004, 7.5e6, 2.0)
        k2 = ao.conversion_gain(0.008, 7.5e6, 2.0)
        assert k2 == pytest.approx(2 * k1, rel=1e-14)

    def test_doubling_length_doubles_gain(self):
        s1 = ao.eit_transmission(GRID, ladder(7.28))
        s2 = ao.eit_transmission(GRID, ladder(14.56))
        k1 = ao.conversion_gain(s1.a_eit, s1.fwhm, 1.0)
        k2 = ao.conversion_gain(s2.a_eit, s2.fwhm, 1.0)
        assert k2 == pytest.approx(2 * k1, rel=0.02)

    def test_zero_amplitude_zero_gain(self):
        assert ao.conversion_gain(0.0, 7.5e6, 2.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            ao.conversion_gain(0.01, 0.0, 1.0)
