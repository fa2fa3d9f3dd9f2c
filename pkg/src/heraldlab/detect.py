"""Photon-counting detection chain: herald triggers, camera event sampling,
intensifier response, and video frame planning.

Rate bookkeeping (per second / per trigger):

* herald rate = ``pair_rate * bs_split * spad_qe`` (pairs that put the herald
  photon on the SPAD side and get detected);
* trigger rate = herald rate + ``spad_dark_rate`` (dark triggers gate the
  camera just like real heralds);
* true-coincidence probability per trigger = (herald rate / trigger rate)
  * ``bs_split`` (signal photon must take the camera side) * ``camera_qe``;
* accidental camera events per trigger are Poisson within the coincidence
  gate, split into uncorrelated in-gate light
  (``gate * pair_rate * bs_split * camera_qe``, kind ``Dark``) and intensifier
  cathode noise (``gate * cathode_noise_rate``, kind ``CathodeNoise``), both
  sampled uniformly over the sensor;
* the blank fraction is the remainder (to first order in the small
  accidental means).

Determinism contract: every stochastic quantity derives from
``numpy.random.SeedSequence(seed, spawn_key=(stream, frame))`` with stream 0
for event sampling and stream 1 for the intensifier, and the draw order
inside each stream is fixed (documented in :func:`sample_events` /
:func:`intensify`).  Identical inputs therefore produce identical event
tables and frame stacks, bit for bit, on any platform and either deposition
backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .analysis import Profile
from .errors import ConstraintError
from .experiments import ProbabilityMap
from .kernels import deposit

__all__ = [
    "KIND_SIGNAL",
    "KIND_DARK",
    "KIND_CATHODE",
    "KIND_NAMES",
    "DetectorParams",
    "TriggerStats",
    "EventStream",
    "FrameStack",
    "timeline_stats",
    "pixel_pmf",
    "sample_events",
    "concat_events",
    "gaussian_stamp",
    "intensify",
    "plan_video_ramp",
]

KIND_SIGNAL = 0
KIND_DARK = 1
KIND_CATHODE = 2
KIND_NAMES = ("Signal", "Dark", "CathodeNoise")


@dataclass(frozen=True)
class DetectorParams:
    """Detection-chain parameters (SI units; rates in Hz, gate in seconds)."""

    pixels_x: int = 512
    pixels_y: int = 512
    camera_extent_x: float = 8e-3
    camera_extent_y: float = 8e-3
    psf_sigma_px: float = 1.5
    gain_scale: float = 200.0
    pair_rate: float = 1e5
    bs_split: float = 0.5
    spad_qe: float = 0.65
    camera_qe: float = 0.2
    spad_dark_rate: float = 100.0
    cathode_noise_rate: float = 50.0
    gate: float = 5e-9

    def __post_init__(self) -> None:
        if self.pixels_x < 1 or self.pixels_y < 1:
            raise ConstraintError("pixel counts must be >= 1")
        for name in ("camera_extent_x", "camera_extent_y", "psf_sigma_px",
                     "gain_scale", "pair_rate", "gate"):
            if getattr(self, name) <= 0:
                raise ConstraintError(f"{name} must be positive")
        for name in ("bs_split", "spad_qe", "camera_qe"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ConstraintError(f"{name} must lie in (0, 1], got {v}")
        for name in ("spad_dark_rate", "cathode_noise_rate"):
            if getattr(self, name) < 0:
                raise ConstraintError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class TriggerStats:
    """Analytic per-second and per-trigger detection statistics."""

    herald_rate: float
    trigger_rate: float
    true_coincidence_prob: float
    dark_mean: float
    cathode_mean: float
    blank_prob: float

    @property
    def accidental_mean(self) -> float:
        return self.dark_mean + self.cathode_mean


def timeline_stats(params: DetectorParams) -> TriggerStats:
    """Exact rate arithmetic for the detection chain (see module docstring)."""
    herald_rate = params.pair_rate * params.bs_split * params.spad_qe
    trigger_rate = herald_rate + params.spad_dark_rate
    true_prob = (herald_rate / trigger_rate) * params.bs_split * params.camera_qe
    dark_mean = params.gate * params.pair_rate * params.bs_split * params.camera_qe
    cathode_mean = params.gate * params.cathode_noise_rate
    blank = 1.0 - true_prob - dark_mean - cathode_mean
    return TriggerStats(
        herald_rate=herald_rate,
        trigger_rate=trigger_rate,
        true_coincidence_prob=true_prob,
        dark_mean=dark_mean,
        cathode_mean=cathode_mean,
        blank_prob=blank,
    )


@dataclass
class EventStream:
    """Flat table of camera events: frame index, pixel indices, and kind."""

    frame: np.ndarray
    iy: np.ndarray
    ix: np.ndarray
    kind: np.ndarray
    n_triggers: int

    def __post_init__(self) -> None:
        self.frame = np.asarray(self.frame, dtype=np.int64)
        self.iy = np.asarray(self.iy, dtype=np.int64)
        self.ix = np.asarray(self.ix, dtype=np.int64)
        self.kind = np.asarray(self.kind, dtype=np.int8)
        n = self.frame.size
        if not (self.iy.size == self.ix.size == self.kind.size == n):
            raise ValueError("event columns must have equal length")

    def __len__(self) -> int:
        return int(self.frame.size)

    def counts_by_kind(self) -> dict[str, int]:
        return {
            name: int(np.count_nonzero(self.kind == code))
            for code, name in enumerate(KIND_NAMES)
        }


def concat_events(streams: list[EventStream]) -> EventStream:
    if not streams:
        raise ValueError("need at least one event stream")
    return EventStream(
        frame=np.concatenate([s.frame for s in streams]),
        iy=np.concatenate([s.iy for s in streams]),
        ix=np.concatenate([s.ix for s in streams]),
        kind=np.concatenate([s.kind for s in streams]),
        n_triggers=sum(s.n_triggers for s in streams),
    )


def pixel_pmf(profile: Profile, n_pixels: int, extent: float) -> np.ndarray:
    """Integrate a density profile over camera pixel cells.

    Pixels are ``n_pixels`` equal cells spanning ``[-extent/2, +extent/2]``.
    The profile is treated as piecewise constant on its own cells; the result
    is clipped to be nonnegative and normalized to sum to 1.
    """
    if n_pixels < 1:
        raise ValueError("n_pixels must be >= 1")
    pitch = profile.pitch
    cell_edges = np.concatenate(
        [profile.coords - pitch / 2.0, [profile.coords[-1] + pitch / 2.0]]
    )
    cdf = np.concatenate([[0.0], np.cumsum(profile.values) * pitch])
    pixel_edges = np.linspace(-extent / 2.0, extent / 2.0, n_pixels + 1)
    at_edges = np.interp(pixel_edges, cell_edges, cdf, left=0.0, right=cdf[-1])
    masses = np.clip(np.diff(at_edges), 0.0, None)
    total = masses.sum()
    if total <= 0:
        raise ValueError("profile has no weight inside the camera extent")
    return masses / total


def _rng_for(seed: int, stream: int, frame: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, frame)))
    )


def sample_events(
    pmap: ProbabilityMap,
    params: DetectorParams,
    n_triggers: int,
    seed: int,
    frame: int = 0,
) -> EventStream:
    """Monte Carlo camera events for ``n_triggers`` herald triggers.

    Fixed draw order from the frame's event stream (stream 0): one uniform
    per trigger against the true-coincidence probability; one uniform per
    signal event for x then one for y (inverse-CDF through the pixel pmf);
    Poisson counts per trigger for ``Dark`` then uniform pixel indices
    (x then y); the same for ``CathodeNoise``.  Events are concatenated in
    kind order (signal, dark, cathode).
    """
    if n_triggers < 0:
        raise ValueError("n_triggers must be nonnegative")
    stats = timeline_stats(params)
    rng = _rng_for(seed, 0, frame)

    pmf_x = pixel_pmf(pmap.x, params.pixels_x, params.camera_extent_x)
    pmf_y = pixel_pmf(pmap.y, params.pixels_y, params.camera_extent_y)
    cmf_x = np.cumsum(pmf_x)
    cmf_y = np.cumsum(pmf_y)

    u_signal = rng.random(n_triggers)
    n_signal = int(np.count_nonzero(u_signal < stats.true_coincidence_prob))
    sig_ix = np.searchsorted(cmf_x, rng.random(n_signal), side="right")
    sig_iy = np.searchsorted(cmf_y, rng.random(n_signal), side="right")
    sig_ix = np.minimum(sig_ix, params.pixels_x - 1)
    sig_iy = np.minimum(sig_iy, params.pixels_y - 1)

    def _uniform_burst(mean: float) -> tuple[np.ndarray, np.ndarray]:
        per_trigger = rng.poisson(mean, n_triggers)
        count = int(per_trigger.sum())
        bx = rng.integers(0, params.pixels_x, count)
        by = rng.integers(0, params.pixels_y, count)
        return bx, by

    dark_ix, dark_iy = _uniform_burst(stats.dark_mean)
    cath_ix, cath_iy = _uniform_burst(stats.cathode_mean)

    ix = np.concatenate([sig_ix, dark_ix, cath_ix])
    iy = np.concatenate([sig_iy, dark_iy, cath_iy])
    kind = np.concatenate(
        [
            np.full(n_signal, KIND_SIGNAL, dtype=np.int8),
            np.full(dark_ix.size, KIND_DARK, dtype=np.int8),
            np.full(cath_ix.size, KIND_CATHODE, dtype=np.int8),
        ]
    )
    return EventStream(
        frame=np.full(ix.size, frame, dtype=np.int64),
        iy=iy,
        ix=ix,
        kind=kind,
        n_triggers=n_triggers,
    )


@dataclass
class FrameStack:
    """Stack of intensified count frames plus per-frame planning metadata."""

    counts: np.ndarray
    budgets: np.ndarray | None = None
    meta: dict = dataclass_field(default_factory=dict)

    def __post_init__(self) -> None:
        c = np.asarray(self.counts)
        if c.ndim != 3:
            raise ValueError("frame stack must be (n_frames, height, width)")
        self.counts = c

    @property
    def n_frames(self) -> int:
        return int(self.counts.shape[0])

    def cumulative(self) -> np.ndarray:
        return self.counts.sum(axis=0, dtype=np.uint64)


def gaussian_stamp(sigma_px: float) -> np.ndarray:
    """Unit-sum Gaussian splat covering +/-3 sigma (odd square size)."""
    if sigma_px <= 0:
        raise ValueError("sigma_px must be positive")
    radius = max(1, int(math.ceil(3.0 * sigma_px)))
    r = np.arange(-radius, radius + 1)
    g = np.exp(-(r**2) / (2.0 * sigma_px**2))
    stamp = np.outer(g, g)
    return stamp / stamp.sum()


def intensify(
    events: EventStream,
    params: DetectorParams,
    seed: int,
    n_frames: int | None = None,
    budgets: np.ndarray | None = None,
) -> FrameStack:
    """Render events into integer count frames through the intensifier model.

    Each event receives an exponential gain (mean ``gain_scale`` counts) and
    deposits a Gaussian stamp (``psf_sigma_px``) with stochastic rounding.
    Fixed draw order per frame from stream 1: one exponential per event, then
    one uniform per stamp cell per event.
    """
    if n_frames is None:
        n_frames = int(events.frame.max()) + 1 if len(events) else 1
    if len(events) and int(events.frame.max()) >= n_frames:
        raise ValueError("event frame index exceeds n_frames")
    if len(events) and int(events.frame.min()) < 0:
        raise ValueError("negative event frame index")

    stamp = gaussian_stamp(params.psf_sigma_px)
    k = stamp.shape[0]
    counts = np.zeros((n_frames, params.pixels_y, params.pixels_x), dtype=np.uint32)
    for f in range(n_frames):
        in_frame = events.frame == f
        ne = int(np.count_nonzero(in_frame))
        if ne == 0:
            continue
        rng = _rng_for(seed, 1, f)
        amplitudes = rng.exponential(1.0, ne) * params.gain_scale
        uniforms = rng.random((ne, k, k))
        deposit(
            counts[f],
            events.iy[in_frame],
            events.ix[in_frame],
            amplitudes,
            stamp,
            uniforms,
        )
    return FrameStack(counts=counts, budgets=budgets)


def plan_video_ramp(
    total_photons: int,
    n_frames: int,
    ratio: float,
    n_pixels: int | None = None,
    max_per_pixel: float = 0.1,
) -> np.ndarray:
    """Split a photon total into geometrically ramped per-frame budgets.

    Budget ``i`` is proportional to ``ratio**i``; budgets are integers, each
    at least 1, nondecreasing for ``ratio >= 1``, and sum exactly to
    ``total_photons`` (rounding remainders land in the last frame).  When
    ``n_pixels`` is given, enforces the sparsity bound
    ``max(budget)/n_pixels < max_per_pixel`` and, on failure, suggests the
    smallest feasible frame count (or says none exists).
    """
    if n_frames < 1:
        raise ConstraintError("n_frames must be >= 1")
    if total_photons < n_frames:
        raise ConstraintError(
            f"total_photons ({total_photons}) must be at least n_frames ({n_frames})"
        )
    if ratio < 1.0:
        raise ConstraintError(f"ratio must be >= 1, got {ratio}")

    weights = ratio ** np.arange(n_frames, dtype=np.float64)
    ideal = total_photons * weights / weights.sum()
    budgets = np.maximum(np.rint(ideal).astype(np.int64), 1)
    budgets[-1] += total_photons - int(budgets.sum())
    if budgets[-1] < (budgets[-2] if n_frames > 1 else 1):
        raise ConstraintError(
            "budget rounding broke monotonicity; use a larger total_photons "
            "or fewer frames"
        )

    if n_pixels is not None:
        peak = int(budgets.max())
        if peak / n_pixels >= max_per_pixel:
            limit = max_per_pixel * n_pixels
            if ratio > 1.0:
                # Largest budget tends to total*(1 - 1/ratio) as frames grow.
                asymptotic = total_photons * (1.0 - 1.0 / ratio)
                if asymptotic >= limit:
                    suggestion = (
                        "no frame count satisfies the bound at this ratio; "
                        "reduce total_photons or the ramp ratio"
                    )
                else:
                    need = -math.log1p(-asymptotic / limit) / math.log(ratio)
                    suggestion = f"use at least {int(math.ceil(need))} frames"
            else:
                suggestion = f"use at least {int(math.ceil(total_photons / limit))} frames"
            raise ConstraintError(
                f"peak frame budget {peak} exceeds {max_per_pixel} expected "
                f"photons/pixel on {n_pixels} pixels; {suggestion}"
            )
    return budgets
