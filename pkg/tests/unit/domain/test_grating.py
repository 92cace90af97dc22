"""
Unit tests for the liquid-metal strip-grating splitter.
Tests Floquet mode counting, split angles, period design and splitter patterns.
"""

import math

import numpy as np
import pytest

from risynth.internal.domain.entities import MM, Frequency
from risynth.internal.domain.errors import DomainError
from risynth.internal.domain.farfield import lobe_directions
from risynth.internal.domain.grating import (
    GratingConfig,
    period_for_split,
    propagating_count,
    propagating_modes,
    splitter_pattern,
    strip_positions,
    sweep_modes,
)

F150 = Frequency.from_ghz(150.0)


def grating(period_mm: float, f: Frequency = F150, incidence_deg: float = 0.0) -> GratingConfig:
    return GratingConfig.with_period(period_mm * MM, f, math.radians(incidence_deg))


class TestGratingConfig:
    """Tests for channel spacing and fill-pattern periods."""

    def test_alternate_fill_doubles_period(self):
        cfg = GratingConfig(2.0 * MM, (True, False), 0.0, F150)
        assert cfg.repeat_length == 2
        assert cfg.effective_period == pytest.approx(4.0 * MM)

    def test_repeated_pattern_reduces_to_minimal_repeat(self):
        """Test (1,0,1,0) has the same period as (1,0)."""
        cfg = GratingConfig(2.0 * MM, (True, False, True, False), 0.0, F150)
        assert cfg.effective_period == pytest.approx(4.0 * MM)

    def test_fully_filled(self):
        assert GratingConfig(2.0 * MM, (True, True), 0.0, F150).period == pytest.approx(2.0 * MM)

    @pytest.mark.parametrize("pattern", [(), (False, False)])
    def test_empty_or_unfilled_pattern(self, pattern):
        with pytest.raises(DomainError):
            GratingConfig(2.0 * MM, pattern, 0.0, F150)

    def test_grazing_incidence_rejected(self):
        with pytest.raises(DomainError):
            GratingConfig(2.0 * MM, (True,), math.pi / 2, F150)

    def test_spacing_must_be_positive(self):
        with pytest.raises(DomainError):
            GratingConfig(0.0, (True,), 0.0, F150)


class TestPropagatingModes:
    """Tests for Floquet order classification at 150 GHz."""

    @pytest.mark.parametrize("period_mm,count", [(2.0, 1), (4.0, 3), (6.0, 5)])
    def test_mode_counts(self, period_mm, count):
        """Test 1, 3 and 5 propagating orders for 2, 4 and 6 mm periods."""
        assert propagating_count(grating(period_mm)) == count

    def test_four_mm_angles(self):
        """Test the first orders of a 4 mm grating leave at +-29.98 degrees."""
        modes = [m for m in propagating_modes(grating(4.0)) if m.propagating]
        assert [m.order for m in modes] == [-1, 0, 1]
        assert modes[2].theta_deg == pytest.approx(29.98, abs=0.05)
        assert modes[0].theta_deg == pytest.approx(-29.98, abs=0.05)

    def test_six_mm_angles(self):
        modes = {m.order: m for m in propagating_modes(grating(6.0)) if m.propagating}
        assert modes[1].theta_deg == pytest.approx(19.46, abs=0.05)
        assert modes[2].theta_deg == pytest.approx(41.76, abs=0.05)
        assert modes[-2].theta_deg == pytest.approx(-41.76, abs=0.05)

    def test_near_grazing_orders_are_listed_but_not_propagating(self):
        """Test the +-2 orders of a 4 mm grating sit inside the grazing margin."""
        modes = {m.order: m for m in propagating_modes(grating(4.0))}
        assert not modes[2].propagating
        assert not modes[-2].propagating
        assert modes[2].to_dict()["n"] == 2

    def test_zero_tolerance_counts_grazing_orders(self):
        assert propagating_count(grating(4.0), grazing_tolerance=0.0) == 5

    def test_count_is_odd_at_normal_incidence(self):
        for period_mm in np.arange(1.0, 12.0, 0.37):
            assert propagating_count(grating(float(period_mm))) % 2 == 1

    def test_oblique_incidence_shifts_orders(self):
        """Test 10 degree incidence moves every order by sin(10 deg)."""
        modes = {m.order: m for m in propagating_modes(grating(4.0, incidence_deg=10.0))}
        ratio = F150.wavelength / (4.0 * MM)
        assert modes[0].sin_theta == pytest.approx(math.sin(math.radians(10.0)))
        assert modes[-2].sin_theta == pytest.approx(math.sin(math.radians(10.0)) - 2 * ratio)
        assert 2 not in modes

    def test_count_never_falls_with_frequency(self):
        """Test mode count is non-decreasing from 110 to 170 GHz."""
        freqs = [Frequency.from_ghz(g) for g in range(110, 171, 5)]
        counts = [sum(m.propagating for m in at_f) for _, at_f in sweep_modes(grating(4.0), freqs)]
        assert counts == sorted(counts)
        assert counts[0] < counts[-1]

    def test_negative_tolerance_rejected(self):
        with pytest.raises(DomainError):
            propagating_modes(grating(4.0), grazing_tolerance=-0.1)


class TestPeriodForSplit:
    """Tests for the design inverse."""

    def test_thirty_degree_split(self):
        assert period_for_split(F150, math.radians(30.0)) / MM == pytest.approx(3.997, abs=0.001)

    def test_round_trip(self):
        """Test the designed period puts the first order back at the requested angle."""
        for angle_deg in (15.0, 25.0, 40.0, 60.0):
            period = period_for_split(F150, math.radians(angle_deg))
            cfg = GratingConfig.with_period(period, F150)
            first = next(m for m in propagating_modes(cfg) if m.order == 1)
            assert first.theta_deg == pytest.approx(angle_deg, abs=1e-9)

    def test_specular_split_rejected(self):
        with pytest.raises(DomainError):
            period_for_split(F150, 0.0)

    def test_oblique_design(self):
        period = period_for_split(F150, math.radians(40.0), math.radians(10.0))
        cfg = GratingConfig.with_period(period, F150, math.radians(10.0))
        first = next(m for m in propagating_modes(cfg) if m.order == 1)
        assert first.theta_deg == pytest.approx(40.0, abs=1e-9)


class TestSplitterPattern:
    """Tests for the strip-array far field."""

    def test_strip_positions(self):
        """Test alternate filling over a 24 mm aperture keeps every other channel."""
        cfg = GratingConfig(2.0 * MM, (True, False), 0.0, F150)
        x = strip_positions(cfg, 24.0 * MM)
        assert np.allclose(x / MM, [-11.0, -7.0, -3.0, 1.0, 5.0, 9.0])

    def test_aperture_narrower_than_period(self):
        with pytest.raises(DomainError):
            strip_positions(grating(4.0), 3.0 * MM)

    @pytest.mark.parametrize(
        "period_mm,incidence_deg,aperture_mm,expected",
        [
            (2.0, 0.0, 24.0, [0.0]),
            (4.0, 0.0, 24.0, [-29.98, 0.0, 29.98]),
            (6.0, 0.0, 24.0, [-41.76, -19.46, 0.0, 19.46, 41.76]),
            (4.0, 10.0, 48.0, [-55.66, -19.03, 10.0, 42.32]),
        ],
    )
    def test_lobes_match_propagating_orders(self, period_mm, incidence_deg, aperture_mm, expected):
        """Test pattern lobes within 6 dB of the peak sit within 0.5 degrees of the mode angles."""
        cfg = grating(period_mm, incidence_deg=incidence_deg)
        pattern = splitter_pattern(cfg, aperture_mm * MM)
        lobes = lobe_directions(pattern, -6.0)
        modes = [m.theta_deg for m in propagating_modes(cfg) if m.propagating]
        assert len(lobes) == len(expected) == len(modes)
        for lobe, angle, mode in zip(lobes, expected, modes):
            assert lobe == pytest.approx(angle, abs=0.5)
            assert lobe == pytest.approx(mode, abs=0.5)

    def test_oblique_specular_order_follows_incidence(self):
        """Test a sub-wavelength grating lit at 15 degrees keeps a single lobe at +15 degrees."""
        pattern = splitter_pattern(grating(1.5, incidence_deg=15.0), 48.0 * MM)
        assert lobe_directions(pattern, -3.0) == [pytest.approx(15.0, abs=0.3)]

    def test_pattern_is_peak_normalized(self):
        pattern = splitter_pattern(grating(4.0), 24.0 * MM)
        assert pattern.value_db.max() == pytest.approx(0.0, abs=1e-12)
        assert pattern.cut_phi == 0.0
