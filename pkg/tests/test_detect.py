"""Detection chain: trigger statistics, event sampling, intensifier
rendering, deterministic seeding, the deposition backends, and video ramp
planning."""

import numpy as np
import pytest

from conftest import HERALD_RATE, TRIGGER_RATE
from heraldlab.analysis import Profile
from heraldlab.detect import (
    KIND_CATHODE,
    KIND_DARK,
    KIND_SIGNAL,
    DetectorParams,
    concat_events,
    gaussian_stamp,
    intensify,
    pixel_pmf,
    plan_video_ramp,
    sample_events,
    timeline_stats,
)
from heraldlab.errors import ConstraintError
from heraldlab.experiments import ProbabilityMap
from heraldlab.kernels import COMPILED_AVAILABLE, deposit


def _uniform_pmap(extent: float = 8e-3, n: int = 257) -> ProbabilityMap:
    coords = (np.arange(n) - n // 2) * (extent * 1.25 / n)
    values = np.full(n, 1.0)
    profile = Profile(coords, values).normalized()
    return ProbabilityMap(x=profile, y=profile, herald_probability=0.1)


def _peaked_pmap(extent: float = 8e-3, n: int = 257) -> ProbabilityMap:
    coords = (np.arange(n) - n // 2) * (extent * 1.25 / n)
    values = np.exp(-(coords**2) / (2 * (0.8e-3) ** 2))
    profile = Profile(coords, values).normalized()
    return ProbabilityMap(x=profile, y=profile, herald_probability=0.1)


class TestTimelineStats:
    def test_rates_exact(self):
        stats = timeline_stats(DetectorParams())
        assert stats.herald_rate == HERALD_RATE
        assert stats.trigger_rate == TRIGGER_RATE

    def test_true_coincidence_probability(self):
        stats = timeline_stats(DetectorParams())
        assert stats.true_coincidence_prob == (HERALD_RATE / TRIGGER_RATE) * 0.5 * 0.2

    def test_accidental_means(self):
        stats = timeline_stats(DetectorParams())
        np.testing.assert_allclose(stats.dark_mean, 5e-5, rtol=1e-12)
        np.testing.assert_allclose(stats.cathode_mean, 2.5e-7, rtol=1e-12)
        np.testing.assert_allclose(stats.accidental_mean, 5.025e-5, rtol=1e-12)

    def test_probabilities_sum_to_one(self):
        stats = timeline_stats(DetectorParams())
        total = (
            stats.true_coincidence_prob
            + stats.dark_mean
            + stats.cathode_mean
            + stats.blank_prob
        )
        np.testing.assert_allclose(total, 1.0, atol=1e-15)

    def test_parameter_validation(self):
        with pytest.raises(ConstraintError):
            DetectorParams(spad_qe=0.0)
        with pytest.raises(ConstraintError):
            DetectorParams(camera_qe=1.2)
        with pytest.raises(ConstraintError):
            DetectorParams(spad_dark_rate=-1.0)
        with pytest.raises(ConstraintError):
            DetectorParams(gate=0.0)
        with pytest.raises(ConstraintError):
            DetectorParams(pixels_x=0)


N_TRIGGERS = 100_000


@pytest.fixture(scope="module")
def events():
    return sample_events(_uniform_pmap(), DetectorParams(), N_TRIGGERS, seed=7)


class TestEventSampling:
    N_TRIGGERS = N_TRIGGERS

    def test_kind_fractions_within_three_sigma(self, events):
        stats = timeline_stats(DetectorParams())
        counts = events.counts_by_kind()

        n_signal = counts["Signal"]
        p = stats.true_coincidence_prob
        sigma_signal = np.sqrt(self.N_TRIGGERS * p * (1 - p))
        assert abs(n_signal - self.N_TRIGGERS * p) <= 3 * sigma_signal

        n_dark = counts["Dark"]
        mean_dark = self.N_TRIGGERS * stats.dark_mean
        assert abs(n_dark - mean_dark) <= 3 * np.sqrt(mean_dark)

        # Cathode mean is 0.025 events in 1e5 triggers; more than a couple
        # would be wildly improbable.
        assert counts["CathodeNoise"] <= 3

    def test_counts_by_kind_partitions_stream(self, events):
        assert sum(events.counts_by_kind().values()) == len(events)
        assert events.n_triggers == self.N_TRIGGERS

    def test_pixels_in_range(self, events):
        assert events.ix.min() >= 0 and events.ix.max() < 512
        assert events.iy.min() >= 0 and events.iy.max() < 512

    def test_signal_follows_density(self):
        events = sample_events(
            _peaked_pmap(), DetectorParams(), self.N_TRIGGERS, seed=11
        )
        sig = events.kind == KIND_SIGNAL
        # 0.8 mm spatial sigma on an 8 mm / 512 px window = 51.2 px around
        # the center pixel 256.
        assert abs(events.ix[sig].mean() - 255.5) < 5.0
        assert abs(events.ix[sig].std() - 51.2) < 5.0

    def test_negative_triggers_rejected(self):
        with pytest.raises(ValueError):
            sample_events(_uniform_pmap(), DetectorParams(), -1, seed=0)


class TestPixelPmf:
    def test_uniform_density_gives_equal_masses(self):
        n = 1000
        coords = (np.arange(n) - n // 2) * (10e-3 / n)
        profile = Profile(coords, np.full(n, 1.0)).normalized()
        pmf = pixel_pmf(profile, 16, 8e-3)
        np.testing.assert_allclose(pmf, 1.0 / 16, rtol=1e-12)

    def test_single_hot_cell_lands_in_one_pixel(self):
        n = 64
        coords = (np.arange(n) - n // 2) * (8e-3 / n)
        values = np.zeros(n)
        values[42] = 1.0  # cell spans [1.1875, 1.3125] mm -> pixel 5 of 8
        profile = Profile(coords, values).normalized()
        pmf = pixel_pmf(profile, 8, 8e-3)
        assert pmf[5] == pytest.approx(1.0)
        assert pmf.sum() == pytest.approx(1.0)

    def test_normalized_and_nonnegative(self):
        rng = np.random.default_rng(3)
        n = 200
        coords = (np.arange(n) - n // 2) * (9e-3 / n)
        profile = Profile(coords, rng.random(n))
        pmf = pixel_pmf(profile, 37, 8e-3)
        assert np.all(pmf >= 0)
        np.testing.assert_allclose(pmf.sum(), 1.0, rtol=1e-12)

    def test_profile_outside_window_rejected(self):
        coords = np.linspace(10e-3, 12e-3, 50)
        profile = Profile(coords, np.full(50, 1.0))
        with pytest.raises(ValueError):
            pixel_pmf(profile, 16, 8e-3)

    def test_bad_pixel_count_rejected(self):
        coords = np.linspace(-1e-3, 1e-3, 50)
        with pytest.raises(ValueError):
            pixel_pmf(Profile(coords, np.full(50, 1.0)), 0, 8e-3)


class TestDeterminism:
    def test_same_seed_reproduces_events(self):
        pmap = _uniform_pmap()
        a = sample_events(pmap, DetectorParams(), 5000, seed=42, frame=2)
        b = sample_events(pmap, DetectorParams(), 5000, seed=42, frame=2)
        np.testing.assert_array_equal(a.ix, b.ix)
        np.testing.assert_array_equal(a.iy, b.iy)
        np.testing.assert_array_equal(a.kind, b.kind)
        np.testing.assert_array_equal(a.frame, b.frame)

    def test_different_seed_differs(self):
        pmap = _uniform_pmap()
        a = sample_events(pmap, DetectorParams(), 5000, seed=42)
        b = sample_events(pmap, DetectorParams(), 5000, seed=43)
        assert len(a) != len(b) or not np.array_equal(a.ix, b.ix)

    def test_different_frame_differs(self):
        pmap = _uniform_pmap()
        a = sample_events(pmap, DetectorParams(), 5000, seed=42, frame=0)
        b = sample_events(pmap, DetectorParams(), 5000, seed=42, frame=1)
        assert len(a) != len(b) or not np.array_equal(a.ix, b.ix)

    def test_intensify_reproducible(self):
        pmap = _uniform_pmap()
        events = sample_events(pmap, DetectorParams(), 2000, seed=5)
        params = DetectorParams()
        frames_a = intensify(events, params, seed=99)
        frames_b = intensify(events, params, seed=99)
        np.testing.assert_array_equal(frames_a.counts, frames_b.counts)
        assert np.any(frames_a.counts > 0)


class TestIntensify:
    def test_mean_gain_per_event(self):
        n_events = 4000
        rng = np.random.default_rng(0)
        events_params = DetectorParams()
        from heraldlab.detect import EventStream

        events = EventStream(
            frame=np.zeros(n_events, dtype=np.int64),
            iy=rng.integers(100, 400, n_events),
            ix=rng.integers(100, 400, n_events),
            kind=np.zeros(n_events, dtype=np.int8),
            n_triggers=n_events,
        )
        frames = intensify(events, events_params, seed=1)
        total = float(frames.cumulative().sum())
        np.testing.assert_allclose(
            total / n_events, events_params.gain_scale, rtol=0.1
        )

    def test_corner_event_is_clipped_not_fatal(self):
        from heraldlab.detect import EventStream

        events = EventStream(
            frame=np.array([0, 0]),
            iy=np.array([0, 511]),
            ix=np.array([0, 511]),
            kind=np.array([0, 0], dtype=np.int8),
            n_triggers=2,
        )
        frames = intensify(events, DetectorParams(), seed=2)
        assert frames.counts.shape == (1, 512, 512)
        assert frames.cumulative().sum() > 0

    def test_frame_bounds_checked(self):
        from heraldlab.detect import EventStream

        events = EventStream(
            frame=np.array([5]),
            iy=np.array([10]),
            ix=np.array([10]),
            kind=np.array([0], dtype=np.int8),
            n_triggers=1,
        )
        with pytest.raises(ValueError):
            intensify(events, DetectorParams(), seed=0, n_frames=3)
        events_neg = EventStream(
            frame=np.array([-1]),
            iy=np.array([10]),
            ix=np.array([10]),
            kind=np.array([0], dtype=np.int8),
            n_triggers=1,
        )
        with pytest.raises(ValueError):
            intensify(events_neg, DetectorParams(), seed=0, n_frames=3)

    def test_cumulative_matches_sum(self):
        events = sample_events(_uniform_pmap(), DetectorParams(), 3000, seed=8)
        frames = intensify(events, DetectorParams(), seed=8, n_frames=1)
        np.testing.assert_array_equal(
            frames.cumulative(), frames.counts.sum(axis=0, dtype=np.uint64)
        )

    def test_stamp_properties(self):
        stamp = gaussian_stamp(1.5)
        assert stamp.shape == (11, 11)  # radius ceil(4.5) = 5
        np.testing.assert_allclose(stamp.sum(), 1.0, rtol=1e-12)
        assert stamp[5, 5] == stamp.max()
        with pytest.raises(ValueError):
            gaussian_stamp(0.0)


class TestDepositBackends:
    def _case(self, seed: int, n_events: int = 500, size: int = 64):
        rng = np.random.default_rng(seed)
        stamp = gaussian_stamp(1.5)
        k = stamp.shape[0]
        # Deliberately include positions whose stamps overhang every border.
        iy = rng.integers(-3, size + 3, n_events)
        ix = rng.integers(-3, size + 3, n_events)
        amplitudes = rng.exponential(1.0, n_events) * 200.0
        uniforms = rng.random((n_events, k, k))
        return iy, ix, amplitudes, stamp, uniforms, size

    @pytest.mark.skipif(not COMPILED_AVAILABLE, reason="compiled backend absent")
    def test_backends_bitwise_identical(self):
        iy, ix, amplitudes, stamp, uniforms, size = self._case(17)
        counts_c = np.zeros((size, size), dtype=np.uint32)
        counts_py = np.zeros((size, size), dtype=np.uint32)
        deposit(counts_c, iy, ix, amplitudes, stamp, uniforms, backend="compiled")
        deposit(counts_py, iy, ix, amplitudes, stamp, uniforms, backend="python")
        np.testing.assert_array_equal(counts_c, counts_py)
        assert counts_py.sum() > 0

    def test_python_backend_drops_out_of_frame_cells(self):
        stamp = gaussian_stamp(1.0)
        k = stamp.shape[0]
        counts = np.zeros((16, 16), dtype=np.uint32)
        uniforms = np.zeros((1, k, k))  # rounding always rounds up
        deposit(
            counts,
            np.array([-100]),
            np.array([-100]),
            np.array([50.0]),
            stamp,
            uniforms,
            backend="python",
        )
        assert counts.sum() == 0

    def test_contiguity_enforced(self):
        stamp = gaussian_stamp(1.0)
        k = stamp.shape[0]
        counts = np.zeros((32, 64), dtype=np.uint32)[:, ::2]
        with pytest.raises(ValueError):
            deposit(
                counts,
                np.array([5]),
                np.array([5]),
                np.array([10.0]),
                stamp,
                np.zeros((1, k, k)),
            )
        with pytest.raises(ValueError):
            deposit(
                np.zeros((32, 32), dtype=np.float64),  # wrong dtype
                np.array([5]),
                np.array([5]),
                np.array([10.0]),
                stamp,
                np.zeros((1, k, k)),
            )

    def test_unknown_backend_rejected(self):
        stamp = gaussian_stamp(1.0)
        k = stamp.shape[0]
        with pytest.raises(ValueError):
            deposit(
                np.zeros((8, 8), dtype=np.uint32),
                np.array([1]),
                np.array([1]),
                np.array([1.0]),
                stamp,
                np.zeros((1, k, k)),
                backend="fortran",
            )


class TestEventStreamPlumbing:
    def test_concat_preserves_totals(self):
        pmap = _uniform_pmap()
        parts = [
            sample_events(pmap, DetectorParams(), 1000, seed=1, frame=f)
            for f in range(3)
        ]
        merged = concat_events(parts)
        assert merged.n_triggers == 3000
        assert len(merged) == sum(len(p) for p in parts)
        np.testing.assert_array_equal(np.unique(merged.frame), [0, 1, 2])

    def test_concat_empty_rejected(self):
        with pytest.raises(ValueError):
            concat_events([])

    def test_mismatched_columns_rejected(self):
        from heraldlab.detect import EventStream

        with pytest.raises(ValueError):
            EventStream(
                frame=np.array([0, 0]),
                iy=np.array([1]),
                ix=np.array([1, 2]),
                kind=np.array([0, 0], dtype=np.int8),
                n_triggers=2,
            )


class TestPlanVideoRamp:
    def test_budget_invariants(self):
        budgets = plan_video_ramp(100_000, 60, 1.15)
        assert budgets.sum() == 100_000
        assert budgets.min() >= 1
        assert np.all(np.diff(budgets) >= 0)

    def test_ratio_respected_mid_ramp(self):
        budgets = plan_video_ramp(1_000_000, 40, 1.2).astype(float)
        ratios = budgets[25:35] / budgets[24:34]
        np.testing.assert_allclose(ratios, 1.2, rtol=0.01)

    def test_sparsity_bound_passes_for_video_defaults(self):
        budgets = plan_video_ramp(100_000, 60, 1.15, n_pixels=512 * 512)
        assert budgets.max() / (512 * 512) < 0.1

    def test_infeasible_at_any_frame_count(self):
        with pytest.raises(ConstraintError, match="no frame count satisfies"):
            plan_video_ramp(1_000_000, 60, 1.15, n_pixels=512 * 512)

    def test_suggests_smallest_feasible_frame_count(self):
        with pytest.raises(ConstraintError, match="use at least 5 frames"):
            plan_video_ramp(100_000, 4, 1.15, n_pixels=512 * 512)
        # The suggestion itself must be feasible.
        plan_video_ramp(100_000, 5, 1.15, n_pixels=512 * 512)

    def test_flat_ramp_puts_remainder_last(self):
        budgets = plan_video_ramp(103, 10, 1.0)
        np.testing.assert_array_equal(budgets[:9], np.full(9, 10))
        assert budgets[-1] == 13

    def test_single_frame(self):
        np.testing.assert_array_equal(plan_video_ramp(500, 1, 2.0), [500])

    def test_invalid_inputs(self):
        with pytest.raises(ConstraintError):
            plan_video_ramp(5, 10, 1.15)
        with pytest.raises(ConstraintError):
            plan_video_ramp(100, 10, 0.9)
        with pytest.raises(ConstraintError):
            plan_video_ramp(100, 0, 1.15)
