"""
Unit tests for phase synthesis and quantization.
Tests steering and collimation profiles, nearest-state quantization and feeds.
"""

import math

import numpy as np
import pytest

from risynth.internal.domain.entities import MM, Direction, Frequency, make_grid_layout, wrap_phase
from risynth.internal.domain.errors import DomainError, UnknownStateError
from risynth.internal.domain.synthesis import (
    FeedSpec,
    PhaseProfile,
    StateMap,
    collimation_profile,
    max_residual_bound,
    quantize,
    realized_profile,
    single_state_map,
    steering_profile,
)


class TestSteeringProfile:
    """Tests for the linear steering gradient."""

    def test_column_step_at_150_ghz(self, steering_layout, f150):
        """Test adjacent columns differ by -90.06 degrees for a 30 degree target at 1 mm pitch."""
        profile = steering_profile(steering_layout, f150, Direction.from_degrees(30.0))
        step = math.degrees(wrap_phase(profile.ideal_phase[1] - profile.ideal_phase[0]))
        assert step == pytest.approx(-90.06, abs=0.01)

    def test_rows_are_identical_in_phi_zero_plane(self, steering_layout, f150):
        profile = steering_profile(steering_layout, f150, Direction.from_degrees(30.0))
        grid = profile.ideal_phase.reshape(20, 20)
        assert np.allclose(grid, grid[0][None, :])

    def test_broadside_is_uniform(self, steering_layout, f140):
        """Test a broadside target needs no gradient."""
        profile = steering_profile(steering_layout, f140, Direction.broadside())
        assert np.allclose(profile.ideal_phase, 0.0)

    def test_mirrored_target_conjugates(self, steering_layout, f140):
        """Test +30 and -30 degree profiles are complex conjugates."""
        plus = steering_profile(steering_layout, f140, Direction.in_cut(math.radians(30.0)))
        minus = steering_profile(steering_layout, f140, Direction.in_cut(-math.radians(30.0)))
        assert np.allclose(np.exp(1j * plus.ideal_phase), np.conj(np.exp(1j * minus.ideal_phase)))

    def test_oblique_incidence_is_cancelled(self, steering_layout, f140):
        """Test incidence equal to the target direction's mirror gives a uniform profile."""
        target = Direction.from_degrees(20.0, 0.0)
        incidence = Direction.from_degrees(20.0, 180.0)
        profile = steering_profile(steering_layout, f140, target, incidence)
        assert np.allclose(np.exp(1j * profile.ideal_phase), 1.0)

    def test_phases_are_canonical(self, steering_layout, f140):
        profile = steering_profile(steering_layout, f140, Direction.from_degrees(60.0))
        assert np.all(profile.ideal_phase > -math.pi)
        assert np.all(profile.ideal_phase <= math.pi)


class TestCollimationProfile:
    """Tests for transmitarray collimation."""

    def test_cancels_spherical_wavefront(self, half_wave_layout, f140):
        """Test phase_i = k0 * (r_i - r_0) for a broadside target."""
        feed = FeedSpec.for_aperture(half_wave_layout)
        profile = collimation_profile(half_wave_layout, f140, feed, Direction.broadside())
        expected = f140.wavenumber * (feed.distances(half_wave_layout) - feed.focal_distance)
        assert np.allclose(np.exp(1j * profile.ideal_phase), np.exp(1j * expected))

    def test_corner_leads_center(self, f140):
        """Test the corner element's path excess shows up as positive phase."""
        layout = make_grid_layout(3, 3, 0.5 * MM)
        feed = FeedSpec((0.0, 0.0, 20.0 * MM))
        profile = collimation_profile(layout, f140, feed, Direction.broadside())
        assert profile.ideal_phase[4] == pytest.approx(0.0, abs=1e-12)
        assert 0.0 < profile.ideal_phase[0] < math.pi

    def test_reference_phase_shifts_everything(self, half_wave_layout, f140):
        feed = FeedSpec.for_aperture(half_wave_layout)
        base = collimation_profile(half_wave_layout, f140, feed, Direction.broadside())
        shifted = collimation_profile(half_wave_layout, f140, feed, Direction.broadside(), reference_phase=0.7)
        assert np.allclose(np.exp(1j * shifted.ideal_phase), np.exp(1j * (base.ideal_phase + 0.7)))


class TestFeedSpec:
    """Tests for feed placement and taper."""

    def test_for_aperture_hits_edge_taper(self, half_wave_layout):
        """Test q_f is chosen so the edge illumination is -10 dB."""
        feed = FeedSpec.for_aperture(half_wave_layout, f_over_d=0.7, edge_taper_db=-10.0)
        assert feed.focal_distance == pytest.approx(0.7 * half_wave_layout.max_side)
        assert feed.edge_taper_db(half_wave_layout) == pytest.approx(-10.0)
        assert feed.q_f == pytest.approx(4.58, abs=0.02)

    def test_zero_taper_gives_isotropic_feed(self, half_wave_layout):
        feed = FeedSpec.for_aperture(half_wave_layout, edge_taper_db=0.0)
        assert feed.q_f == 0.0

    def test_feed_in_array_plane_rejected(self):
        with pytest.raises(DomainError):
            FeedSpec((0.0, 0.0, 0.0))

    @pytest.mark.parametrize("kwargs", [{"f_over_d": 0.0}, {"edge_taper_db": 3.0}])
    def test_invalid_aperture_feed(self, half_wave_layout, kwargs):
        with pytest.raises(DomainError):
            FeedSpec.for_aperture(half_wave_layout, **kwargs)


class TestQuantize:
    """Tests for nearest-state quantization."""

    def test_nearest_state_with_tie(self, ideal_reflective, f140):
        """Test nearest-phase choice; a quarter-turn tie goes to the smallest state name."""
        layout = make_grid_layout(5, 1, 1.0 * MM)
        profile = PhaseProfile(layout, np.array([0.1, 2.0, -2.0, math.pi / 2, -math.pi / 2]))
        statemap = quantize(profile, ideal_reflective, f140)
        assert statemap.states == ("000", "180", "180", "000", "000")
        assert statemap.residual_error[0] == pytest.approx(0.1)
        assert statemap.residual_error[1] == pytest.approx(2.0 - math.pi)
        assert statemap.residual_error[3] == pytest.approx(math.pi / 2)

    def test_residual_within_bound(self, steering_layout, ideal_reflective, f140):
        """Test no element misses its ideal phase by more than half the widest state gap."""
        profile = steering_profile(steering_layout, f140, Direction.from_degrees(37.0, 20.0))
        statemap = quantize(profile, ideal_reflective, f140)
        bound = max_residual_bound(ideal_reflective, f140)
        assert bound == pytest.approx(math.pi / 2)
        assert np.max(np.abs(statemap.residual_error)) <= bound + 1e-12

    def test_quantize_is_idempotent(self, steering_layout, ideal_reflective, f140):
        """Test re-quantizing the realized profile reproduces the same states."""
        profile = steering_profile(steering_layout, f140, Direction.from_degrees(30.0))
        first = quantize(profile, ideal_reflective, f140)
        second = quantize(realized_profile(first, ideal_reflective, f140), ideal_reflective, f140)
        assert second.states == first.states
        assert np.allclose(second.residual_error, 0.0, atol=1e-12)

    def test_broadside_uses_one_state(self, steering_layout, ideal_reflective, f140):
        statemap = quantize(steering_profile(steering_layout, f140, Direction.broadside()), ideal_reflective, f140)
        assert set(statemap.states) == {"000"}

    def test_measured_table(self, half_wave_layout, pcm_table, f140):
        """Test quantization against a lossy table with arbitrary state phases."""
        profile = PhaseProfile(half_wave_layout, np.full(half_wave_layout.size, math.radians(-55.0)))
        statemap = quantize(profile, pcm_table, f140)
        assert set(statemap.states) == {"000"}
        assert np.allclose(np.degrees(statemap.residual_error), 5.0)

    def test_half_turn_shift_swaps_one_bit_states(self, steering_layout, ideal_reflective, f140):
        """Test adding pi to the profile flips every element of a 0/180 map."""
        profile = steering_profile(steering_layout, f140, Direction.from_degrees(25.0, 40.0))
        # keep clear of the quarter-turn ties
        profile = profile.shifted(0.123)
        base = quantize(profile, ideal_reflective, f140)
        flipped = quantize(profile.shifted(math.pi), ideal_reflective, f140)
        swap = {"000": "180", "180": "000"}
        assert flipped.states == tuple(swap[s] for s in base.states)


class TestStateMap:
    """Tests for the StateMap container."""

    def test_unknown_state_detected(self, ideal_reflective):
        layout = make_grid_layout(2, 1, 1.0 * MM)
        statemap = single_state_map(layout, "X")
        with pytest.raises(UnknownStateError):
            statemap.check_bound(ideal_reflective)

    def test_coefficients(self, ideal_reflective, f140):
        layout = make_grid_layout(2, 1, 1.0 * MM)
        statemap = StateMap(layout, ("000", "180"), np.zeros(2), np.zeros(2))
        assert np.allclose(statemap.coefficients(ideal_reflective, f140), [1.0, -1.0])

    def test_state_grid_shape(self):
        layout = make_grid_layout(3, 2, 1.0 * MM)
        grid = single_state_map(layout, "000").state_grid()
        assert grid.shape == (2, 3)

    def test_wrong_length_rejected(self):
        layout = make_grid_layout(3, 2, 1.0 * MM)
        with pytest.raises(DomainError):
            StateMap(layout, ("000",) * 5, np.zeros(6), np.zeros(6))

    def test_profile_length_checked(self):
        with pytest.raises(DomainError):
            PhaseProfile(make_grid_layout(3, 2, 1.0 * MM), np.zeros(4))
