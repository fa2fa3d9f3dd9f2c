"""Fast internal consistency checks, runnable from the CLI.

Each check exercises an exact invariant of the numerical core (unitarity,
inverses, rate arithmetic, kernel equivalence) on small grids; the whole
battery runs in a few seconds with no file output.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .biphoton import double_gaussian, schmidt_decompose
from .detect import DetectorParams, plan_video_ramp, timeline_stats
from .field import Axis, ComplexField, ft_centered, gaussian_field, ift_centered
from .optics import (
    FourierLens,
    FreeSpace,
    ThinLens,
    adjoint_system,
    apply_system,
)

__all__ = ["run_selftest"]


def _random_field(axis: Axis, seed: int) -> ComplexField:
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(axis.n) + 1j * rng.standard_normal(axis.n)
    return ComplexField(axis, values).normalized()


def _check_transform_unitarity() -> tuple[bool, str]:
    axis = Axis(1024, 10e-3)
    f = _random_field(axis, 1)
    spectrum = ft_centered(f.values, axis.pitch)
    power_x = np.sum(np.abs(f.values) ** 2) * axis.pitch
    power_nu = np.sum(np.abs(spectrum) ** 2) / axis.extent
    parseval = abs(power_x - power_nu)
    back = ift_centered(spectrum, axis.pitch)
    round_trip = float(np.max(np.abs(back - f.values)))
    ok = parseval <= 1e-12 and round_trip <= 1e-12
    return ok, f"parseval_err={parseval:.2e} round_trip_err={round_trip:.2e}"


def _check_propagation_inverse() -> tuple[bool, str]:
    axis = Axis(1024, 10e-3)
    f = _random_field(axis, 2)
    system = [FreeSpace(0.02), ThinLens(0.3), FourierLens(0.2)]
    there = apply_system(system, f, 710e-9)
    back = apply_system(adjoint_system(system), there, 710e-9)
    err = float(np.max(np.abs(back.values - f.values)))
    norm_err = abs(there.norm_sq() - 1.0)
    ok = err <= 1e-10 and norm_err <= 1e-12
    return ok, f"adjoint_round_trip={err:.2e} norm_drift={norm_err:.2e}"


def _check_lens_chain() -> tuple[bool, str]:
    # Self-conjugate grid (extent^2 = n * wavelength * focal) so the scaled
    # transform returns the input axis and the chain compares directly.
    wavelength, focal, n = 710e-9, 0.1, 2048
    extent = float(np.sqrt(n * wavelength * focal))
    axis = Axis(n, extent)
    beam = gaussian_field(axis, extent / 12)
    chain = apply_system(
        [FreeSpace(focal), ThinLens(focal), FreeSpace(focal)], beam, wavelength
    )
    direct = apply_system([FourierLens(focal)], beam, wavelength)
    # The chain carries an extra constant (Gouy-like) phase; compare
    # intensities and the norm.
    diff = np.abs(chain.values) - np.abs(direct.values)
    err = float(np.sqrt(np.sum(diff**2) / np.sum(np.abs(direct.values) ** 2)))
    ok = err <= 1e-6 and abs(chain.norm_sq() - 1.0) <= 1e-9
    return ok, f"chain_vs_direct_rel_l2={err:.2e}"


def _check_trigger_arithmetic() -> tuple[bool, str]:
    stats = timeline_stats(DetectorParams())
    ok = (
        stats.herald_rate == 32500.0
        and stats.trigger_rate == 32600.0
        and abs(stats.true_coincidence_prob - (32500.0 / 32600.0) * 0.1) <= 1e-15
        and abs(stats.dark_mean - 5e-5) <= 1e-18
        and abs(stats.cathode_mean - 2.5e-7) <= 1e-20
    )
    return ok, (
        f"trigger_rate={stats.trigger_rate:.1f}/s "
        f"true_prob={stats.true_coincidence_prob:.6f}"
    )


def _check_schmidt_separable() -> tuple[bool, str]:
    axis = Axis(256, 4e-3)
    state = double_gaussian(axis, 200e-6, 200e-6)
    _, schmidt_number = schmidt_decompose(state)
    err = abs(schmidt_number - 1.0)
    return err <= 1e-9, f"K_separable={schmidt_number:.12f}"


def _check_deposit_backends() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    n_events, k, side = 500, 11, 64
    iy = rng.integers(-2, side + 2, n_events)
    ix = rng.integers(-2, side + 2, n_events)
    amplitudes = rng.exponential(200.0, n_events)
    stamp = np.exp(
        -((np.arange(k) - k // 2) ** 2)[:, None]
        - ((np.arange(k) - k // 2) ** 2)[None, :]
    )
    stamp /= stamp.sum()
    uniforms = rng.random((n_events, k, k))
    reference = np.zeros((side, side), dtype=np.uint32)
    kernels.deposit(reference, iy, ix, amplitudes, stamp, uniforms, backend="python")
    if not kernels.COMPILED_AVAILABLE:
        return True, "compiled backend absent; python backend exercised"
    compiled = np.zeros((side, side), dtype=np.uint32)
    kernels.deposit(compiled, iy, ix, amplitudes, stamp, uniforms, backend="compiled")
    ok = bool(np.array_equal(reference, compiled))
    return ok, f"backends_equal={ok} total_counts={int(reference.sum())}"


def _check_video_ramp() -> tuple[bool, str]:
    budgets = plan_video_ramp(100000, 60, 1.15, n_pixels=512 * 512)
    ok = (
        int(budgets.sum()) == 100000
        and bool(np.all(np.diff(budgets) >= 0))
        and budgets.max() / (512 * 512) < 0.1
    )
    return ok, f"first={budgets[0]} last={budgets[-1]} sum={int(budgets.sum())}"


def run_selftest() -> list[tuple[str, bool, str]]:
    """Run every check; returns (name, passed, detail) triples."""
    checks = [
        ("centered_transform_unitarity", _check_transform_unitarity),
        ("system_adjoint_inverse", _check_propagation_inverse),
        ("lens_chain_equals_fourier_lens", _check_lens_chain),
        ("trigger_rate_arithmetic", _check_trigger_arithmetic),
        ("schmidt_number_separable", _check_schmidt_separable),
        ("deposition_backends_agree", _check_deposit_backends),
        ("video_ramp_budgets", _check_video_ramp),
    ]
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # surface the failure, keep the battery going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
