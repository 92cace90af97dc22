"""
Unit tests for threaded angle evaluation.
Tests chunk ordering and bit-identical results across worker counts.
"""

import numpy as np
import pytest

from risynth.internal.domain.entities import Direction
from risynth.internal.domain.farfield import SerialAngleMapper, scattered_pattern, sphere_pattern, ElementModel
from risynth.internal.domain.synthesis import quantize, steering_profile
from risynth.internal.infra.config import ComputeSettings
from risynth.internal.infra.executor import ThreadedAngleMapper, mapper_from_settings


class TestThreadedAngleMapper:
    """Tests for the thread-pool mapper."""

    def test_chunks_come_back_in_order(self):
        mapper = ThreadedAngleMapper(max_threads=4, chunk_size=7)
        result = mapper.map_chunks(lambda sl: np.arange(sl.start, sl.stop, dtype=float), 100)
        assert np.array_equal(result, np.arange(100, dtype=float))

    def test_empty_range(self):
        assert ThreadedAngleMapper(2).map_chunks(lambda sl: np.ones(sl.stop - sl.start), 0).size == 0

    @pytest.mark.parametrize("threads,chunk", [(0, 256), (2, 0)])
    def test_invalid_arguments(self, threads, chunk):
        with pytest.raises(ValueError):
            ThreadedAngleMapper(threads, chunk)

    def test_pattern_identical_across_thread_counts(self, steering_layout, ideal_reflective, f140):
        """Test 1, 2 and 8 workers give bit-identical scattered patterns."""
        statemap = quantize(
            steering_profile(steering_layout, f140, Direction.from_degrees(30.0)), ideal_reflective, f140
        )
        reference = scattered_pattern(steering_layout, statemap, ideal_reflective, f140, mapper=SerialAngleMapper())
        for threads in (2, 8):
            pattern = scattered_pattern(
                steering_layout, statemap, ideal_reflective, f140, mapper=ThreadedAngleMapper(threads)
            )
            assert np.array_equal(pattern.field, reference.field)

    def test_sphere_identical_across_thread_counts(self, f140):
        from risynth.internal.domain.entities import make_grid_layout

        layout = make_grid_layout(4, 4, f140.wavelength / 2.0)
        weights = np.exp(1j * np.linspace(0.0, 3.0, layout.size))
        serial = sphere_pattern(layout, weights, f140, ElementModel(), 2.0, 4.0, SerialAngleMapper())
        threaded = sphere_pattern(layout, weights, f140, ElementModel(), 2.0, 4.0, ThreadedAngleMapper(3))
        assert np.array_equal(serial.field, threaded.field)


class TestMapperFromSettings:
    """Tests for mapper selection."""

    def test_single_thread_is_serial(self):
        mapper = mapper_from_settings(ComputeSettings(max_threads=1, chunk_size=64))
        assert isinstance(mapper, SerialAngleMapper)
        assert mapper.chunk_size == 64

    def test_many_threads(self):
        mapper = mapper_from_settings(ComputeSettings(max_threads=4, chunk_size=256))
        assert isinstance(mapper, ThreadedAngleMapper)
        assert mapper.max_threads == 4
