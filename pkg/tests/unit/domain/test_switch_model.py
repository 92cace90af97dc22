"""
Unit tests for switch equivalent-circuit models.
Tests impedances, cutoff frequency and series insertion loss / isolation.
"""

import math

import numpy as np
import pytest

from risynth.internal.domain.entities import Frequency
from risynth.internal.domain.errors import DomainError
from risynth.internal.domain.switch_model import (
    CMOS_RF_SOI_45NM,
    SwitchCircuit,
    SwitchState,
    cutoff_frequency,
    impedance,
    impedance_sweep,
    insertion_loss_isolation,
    insertion_loss_isolation_sweep,
    ron_coff_product,
    series_network,
    switch_network,
)


def parallel_rc(r: float, c: float, f_hz: float) -> complex:
    return r / (1 + 1j * 2 * math.pi * f_hz * r * c)


class TestImpedance:
    """Tests for the parallel-RC state impedances."""

    def test_on_state_at_140_ghz(self):
        """Test |Z_on| of the RF-SOI switch at 140 GHz."""
        z = impedance(CMOS_RF_SOI_45NM, SwitchState.ON, Frequency.from_ghz(140.0))
        assert z.magnitude == pytest.approx(6.0997, rel=0.005)

    def test_off_state_at_140_ghz(self):
        """Test |Z_off| is dominated by C_off at 140 GHz."""
        z = impedance(CMOS_RF_SOI_45NM, SwitchState.OFF, Frequency.from_ghz(140.0))
        assert z.magnitude == pytest.approx(59.83, rel=0.005)
        assert z.phase_deg < -80.0

    def test_matches_closed_form(self):
        """Test the complex value, not just its magnitude."""
        f = Frequency.from_ghz(125.0)
        z = impedance(CMOS_RF_SOI_45NM, SwitchState.OFF, f).to_complex()
        assert z == pytest.approx(parallel_rc(4300.0, 19.0e-15, f.value), rel=1e-12)

    def test_off_impedance_falls_with_frequency(self):
        """Test |Z_off| decreases monotonically across the D band."""
        freqs = np.linspace(110e9, 170e9, 61)
        z = np.abs(impedance_sweep(CMOS_RF_SOI_45NM, SwitchState.OFF, freqs))
        assert np.all(np.diff(z) < 0)

    def test_sweep_rejects_non_positive(self):
        with pytest.raises(DomainError):
            impedance_sweep(CMOS_RF_SOI_45NM, SwitchState.ON, np.array([140e9, 0.0]))

    @pytest.mark.parametrize("f_ghz", [1.0, 110.0, 140.0, 170.0, 1000.0])
    def test_magnitude_bounded_by_its_branches(self, f_ghz):
        """Test a parallel RC never exceeds its resistor or its capacitor reactance."""
        f = Frequency.from_ghz(f_ghz)
        circ = CMOS_RF_SOI_45NM
        z_on = impedance(circ, SwitchState.ON, f).magnitude
        z_off = impedance(circ, SwitchState.OFF, f).magnitude
        x_off = 1.0 / (2 * math.pi * f.value * circ.c_off)
        assert z_on <= circ.r_on * (1 + 1e-12)
        assert z_off <= min(circ.r_off, x_off) * (1 + 1e-12)


class TestFiguresOfMerit:
    """Tests for cutoff frequency and R_on*C_off."""

    def test_cutoff_frequency(self):
        """Test f_c = 1/(2*pi*R_on*C_off) = 1.3665 THz."""
        assert cutoff_frequency(CMOS_RF_SOI_45NM).value / 1e12 == pytest.approx(1.3665, rel=0.001)

    def test_ron_coff_product(self):
        assert ron_coff_product(CMOS_RF_SOI_45NM) == pytest.approx(116.47, rel=1e-4)

    def test_insertion_loss_and_isolation(self):
        """Test both figures against the series-S21 closed form."""
        f = Frequency.from_ghz(140.0)
        il, iso = insertion_loss_isolation(CMOS_RF_SOI_45NM, f)
        z_on = parallel_rc(6.13, 18.5e-15, f.value)
        z_off = parallel_rc(4300.0, 19.0e-15, f.value)
        assert il == pytest.approx(-20 * math.log10(abs(100 / (100 + z_on))), rel=1e-9)
        assert iso == pytest.approx(-20 * math.log10(abs(100 / (100 + z_off))), rel=1e-9)
        assert il == pytest.approx(0.51, abs=0.02)
        assert iso == pytest.approx(1.38, abs=0.02)
        assert iso > il

    def test_cutoff_ignores_on_capacitance(self):
        """Test f_c depends on R_on and C_off only."""
        other = SwitchCircuit(r_on=6.13, c_on=180e-15, r_off=4300.0, c_off=19.0e-15)
        assert cutoff_frequency(other).value == cutoff_frequency(CMOS_RF_SOI_45NM).value


class TestSeriesNetwork:
    """Tests for the scikit-rf two-port of a series-mounted switch."""

    def test_short_passes_everything(self):
        net = series_network(np.zeros(1), np.array([140e9]))
        assert net.s[0, 1, 0] == pytest.approx(1.0)
        assert net.s[0, 0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_matches_series_closed_form(self):
        """Test S21 = 2*z0 / (2*z0 + Z) for a complex impedance."""
        z = np.array([30.0 - 45.0j, 5.0 + 2.0j])
        net = series_network(z, np.array([120e9, 160e9]), z0=75.0)
        assert net.s[:, 1, 0] == pytest.approx(150.0 / (150.0 + z), rel=1e-12)
        assert net.s[:, 0, 1] == pytest.approx(net.s[:, 1, 0], rel=1e-12)

    def test_network_carries_frequency_and_reference(self):
        freqs = np.linspace(110e9, 170e9, 7)
        net = switch_network(CMOS_RF_SOI_45NM, SwitchState.OFF, freqs)
        assert net.f == pytest.approx(freqs)
        assert np.all(net.z0 == 50.0)
        assert net.nports == 2

    def test_sweep_agrees_with_single_point(self):
        freqs = np.array([110e9, 140e9, 170e9])
        il, iso = insertion_loss_isolation_sweep(CMOS_RF_SOI_45NM, freqs)
        il_140, iso_140 = insertion_loss_isolation(CMOS_RF_SOI_45NM, Frequency.from_ghz(140.0))
        assert il[1] == pytest.approx(il_140, rel=1e-12)
        assert iso[1] == pytest.approx(iso_140, rel=1e-12)
        assert np.all(iso > il)

    def test_rejects_bad_reference(self):
        with pytest.raises(DomainError):
            series_network(np.ones(1), np.array([140e9]), z0=0.0)

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(DomainError):
            series_network(np.ones(2), np.array([140e9]))


class TestSwitchCircuitValidation:
    """Tests for circuit parameter checks."""

    @pytest.mark.parametrize("field", ["r_on", "c_on", "r_off", "c_off"])
    def test_rejects_non_positive(self, field):
        """Test every element value must be positive."""
        values = {"r_on": 6.13, "c_on": 18.5e-15, "r_off": 4300.0, "c_off": 19e-15}
        values[field] = 0.0
        with pytest.raises(DomainError):
            SwitchCircuit(**values)

    def test_off_must_be_more_resistive(self):
        with pytest.raises(DomainError):
            SwitchCircuit(r_on=100.0, c_on=1e-15, r_off=10.0, c_off=1e-15)
