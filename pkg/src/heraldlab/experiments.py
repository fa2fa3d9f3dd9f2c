"""End-to-end heralded/ghost imaging and diffraction experiments.

Geometry (per transverse axis, signal and herald arms):

* ``heralded_image`` / ``heralded_diffraction``: the double slit and the
  measurement optics (imaging relay or Fourier lens) sit in the *camera* arm;
  the herald arm couples directly into the collection fiber.
* ``ghost_image`` / ``ghost_diffraction``: the double slit sits in the
  *herald* arm in front of the fiber; the camera arm carries only the
  measurement optics and never touches the slits.

The transverse problem factorizes: x (where the slits act) and y are solved
as independent 1-D problems and the camera-plane detection density is their
outer product.  Heralding through a fiber supporting N modes per transverse
axis is an incoherent mixture over per-mode conditionals; because the 2-D
mode family is a product family, the mixture factorizes as well.

The herald arm is folded into the detection mode: a fiber mode ``g`` behind a
herald-arm system ``S`` heralds exactly like the effective mode
``adjoint(S) g`` at the source plane.  For ghost configurations the masked
effective modes are no longer orthonormal, so each is renormalized and its
click probability rescaled by the squared norm (``|t| <= 1`` keeps this a
valid measurement); genuinely orthonormal fiber families go through the same
code path unchanged.

:func:`advanced_wave_predict` computes the classical backward-wave check for
ghost configurations: run the fiber mode backwards through the herald arm,
multiply by the source correlation kernel ``exp(-x^2 / (2 sigma_sum^2))``
(the exact ``sigma_diff -> 0`` limit of the heralded projection), and
propagate forward through the camera arm.  :func:`unheralded_far_field` is
the control computation with the herald discarded: the signal-arm far field
carries no fringes.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Sequence

import numpy as np

from .analysis import Profile
from .biphoton import (
    JointAmplitude,
    double_gaussian,
    gaussian_mode,
    herald_project,
    hermite_gauss_modes,
    validate_energy,
)
from .errors import ConstraintError, PhysicsError
from .field import Axis, ComplexField, ft_centered, resample_field
from .optics import (
    Element,
    FourierLens,
    Imaging4f,
    Mask,
    adjoint_system,
    apply_system,
    double_slit,
)

__all__ = [
    "MODES",
    "FIBERS",
    "ExperimentConfig",
    "ProbabilityMap",
    "run_experiment",
    "advanced_wave_predict",
    "unheralded_far_field",
    "fringe_period_theory",
]

MODES = ("heralded_image", "heralded_diffraction", "ghost_image", "ghost_diffraction")
FIBERS = ("single", "multi")

# Effective herald modes with squared norm below this carry no click
# probability worth tracking (e.g. odd fiber modes fully blocked by a mask).
_MODE_NORM_FLOOR = 1e-15


@dataclass
class ExperimentConfig:
    """Physical and numerical parameters of one experiment (SI units)."""

    mode: str = "heralded_diffraction"
    fiber: str = "single"
    n_fiber_modes: int = 10
    fiber_waist: float = 700e-6
    wavelength_pump: float = 355e-9
    wavelength_signal: float = 710e-9
    wavelength_herald: float = 710e-9
    sigma_sum: float = 500e-6
    sigma_diff: float = 20e-6
    slit_width: float = 100e-6
    slit_separation: float = 500e-6
    focal_fourier: float = 0.5
    focal_image_in: float = 0.25
    focal_image_out: float = 0.25
    grid_n: int = 4096
    grid_extent: float = 16e-3
    joint_n: int = 1024
    joint_extent: float = 8e-3
    camera_extent: float = 8e-3
    supersample: int = 8

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConstraintError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.fiber not in FIBERS:
            raise ConstraintError(f"fiber must be one of {FIBERS}, got {self.fiber!r}")
        if self.n_fiber_modes < 1:
            raise ConstraintError("n_fiber_modes must be >= 1")
        positive = {
            "fiber_waist": self.fiber_waist,
            "sigma_sum": self.sigma_sum,
            "sigma_diff": self.sigma_diff,
            "slit_width": self.slit_width,
            "slit_separation": self.slit_separation,
            "focal_fourier": self.focal_fourier,
            "focal_image_in": self.focal_image_in,
            "focal_image_out": self.focal_image_out,
            "grid_extent": self.grid_extent,
            "joint_extent": self.joint_extent,
            "camera_extent": self.camera_extent,
        }
        for name, value in positive.items():
            if not np.isfinite(value) or value <= 0:
                raise ConstraintError(f"{name} must be positive, got {value}")
        if self.slit_width >= self.slit_separation:
            raise ConstraintError(
                f"slit_width ({self.slit_width}) must be smaller than "
                f"slit_separation ({self.slit_separation}); the slits overlap"
            )
        for name, n in (("grid_n", self.grid_n), ("joint_n", self.joint_n)):
            if n < 64 or n % 2:
                raise ConstraintError(f"{name} must be an even integer >= 64, got {n}")
        if self.sigma_diff < self.joint_extent / self.joint_n:
            raise ConstraintError(
                f"difference-coordinate width sigma_diff ({self.sigma_diff:g} m) is "
                f"below one joint-grid pixel ({self.joint_extent / self.joint_n:g} m); "
                "increase joint_n or reduce joint_extent"
            )
        if self.supersample < 1:
            raise ConstraintError("supersample must be >= 1")
        validate_energy(
            self.wavelength_pump, self.wavelength_signal, self.wavelength_herald
        )

    @property
    def is_ghost(self) -> bool:
        return self.mode.startswith("ghost")

    @property
    def is_diffraction(self) -> bool:
        return self.mode.endswith("diffraction")

    def fine_axis(self) -> Axis:
        return Axis(self.grid_n, self.grid_extent)

    def joint_axis(self) -> Axis:
        return Axis(self.joint_n, self.joint_extent)


@dataclass
class ProbabilityMap:
    """Camera-plane detection density, separable as ``density = outer(y, x)``.

    ``x`` and ``y`` are unit-integral profiles restricted to the camera
    window; ``herald_probability`` is the herald click probability per
    generated pair (both transverse axes included).
    """

    x: Profile
    y: Profile
    herald_probability: float
    meta: dict = dataclass_field(default_factory=dict)

    def density(self) -> np.ndarray:
        return np.outer(self.y.values, self.x.values)


def _measurement_element(cfg: ExperimentConfig) -> Element:
    if cfg.is_diffraction:
        return FourierLens(cfg.focal_fourier)
    return Imaging4f(cfg.focal_image_in, cfg.focal_image_out)


def _slit_mask(cfg: ExperimentConfig, axis: Axis) -> Mask:
    return Mask(double_slit(axis, cfg.slit_width, cfg.slit_separation, cfg.supersample))


def herald_arm(cfg: ExperimentConfig, axis: Axis, slit_axis: bool = True) -> list[Element]:
    """Herald-arm optical system on the source plane's grid."""
    if cfg.is_ghost and slit_axis:
        return [_slit_mask(cfg, axis)]
    return []


def camera_arm(cfg: ExperimentConfig, axis: Axis, slit_axis: bool = True) -> list[Element]:
    """Camera-arm optical system on the source plane's grid."""
    elements: list[Element] = []
    if not cfg.is_ghost and slit_axis:
        elements.append(_slit_mask(cfg, axis))
    elements.append(_measurement_element(cfg))
    return elements


def _fiber_modes(cfg: ExperimentConfig, axis: Axis) -> np.ndarray:
    if cfg.fiber == "single":
        return hermite_gauss_modes(axis, cfg.fiber_waist, 1)
    return hermite_gauss_modes(axis, cfg.fiber_waist, cfg.n_fiber_modes)


def _window_profile(coords: np.ndarray, values: np.ndarray, extent: float) -> tuple[Profile, float]:
    """Restrict a density to ``|coord| <= extent/2`` and normalize.

    Returns the windowed unit-integral profile and the fraction of the total
    weight that fell inside the window.
    """
    span = coords[-1] - coords[0]
    if extent > span * (1 + 1e-9):
        raise ConstraintError(
            f"camera extent {extent:g} m exceeds the computed plane's span {span:g} m; "
            "reduce camera_extent or enlarge the grid"
        )
    keep = np.abs(coords) <= extent / 2.0
    total = float(values.sum())
    inside = float(values[keep].sum())
    if inside <= 0:
        raise PhysicsError("no detection probability inside the camera window")
    return Profile(coords[keep], values[keep]).normalized(), inside / max(total, 1e-300)


def _arm_profile(
    cfg: ExperimentConfig, state: JointAmplitude, slit_axis: bool
) -> tuple[Profile, float, dict]:
    """Solve one transverse axis: herald every fiber mode, propagate each
    conditional through the camera arm, and mix."""
    jaxis = state.axis_herald
    fine = cfg.fine_axis()
    modes = _fiber_modes(cfg, jaxis)
    collect_back = adjoint_system(herald_arm(cfg, jaxis, slit_axis))
    camera = camera_arm(cfg, fine, slit_axis)

    probabilities: list[float] = []
    intensities: list[np.ndarray] = []
    out_axis: Axis | None = None
    for g in modes:
        heff = apply_system(
            collect_back, ComplexField(jaxis, g), cfg.wavelength_herald
        ).values
        qn = float(np.sum(np.abs(heff) ** 2) * jaxis.pitch)
        if qn < _MODE_NORM_FLOOR:
            probabilities.append(0.0)
            intensities.append(None)  # type: ignore[arg-type]
            continue
        conditional, p_hat = herald_project(state, heff / np.sqrt(qn))
        probabilities.append(qn * p_hat)
        propagated = apply_system(
            camera, resample_field(conditional, fine).normalized(), cfg.wavelength_signal
        )
        out_axis = propagated.axis
        intensities.append(propagated.intensity())

    probs = np.asarray(probabilities)
    total_p = float(probs.sum())
    if total_p < 1e-12 or out_axis is None:
        raise PhysicsError(
            "herald click probability vanished on one transverse axis; the "
            "heralded beam does not reach the collection fiber"
        )
    mixture = np.zeros(out_axis.n)
    for p, intensity in zip(probs, intensities):
        if intensity is not None and p > 0:
            mixture += (p / total_p) * intensity
    profile, in_window = _window_profile(out_axis.coords, mixture, cfg.camera_extent)
    meta = {
        "mode_probabilities": probs,
        "in_window": in_window,
        "plane_pitch": out_axis.pitch,
    }
    return profile, total_p, meta


def run_experiment(cfg: ExperimentConfig) -> ProbabilityMap:
    """Compute the camera-plane detection density for a heralded experiment."""
    state = double_gaussian(cfg.joint_axis(), cfg.sigma_sum, cfg.sigma_diff)
    profile_x, p_x, meta_x = _arm_profile(cfg, state, slit_axis=True)
    profile_y, p_y, meta_y = _arm_profile(cfg, state, slit_axis=False)
    return ProbabilityMap(
        x=profile_x,
        y=profile_y,
        herald_probability=p_x * p_y,
        meta={
            "mode": cfg.mode,
            "fiber": cfg.fiber,
            "x": meta_x,
            "y": meta_y,
        },
    )


def advanced_wave_predict(cfg: ExperimentConfig) -> Profile:
    """Classical backward-wave prediction of a ghost measurement's x profile.

    Valid for ghost configurations with a single-mode fiber: the fiber mode
    is propagated backwards through the herald arm to the source plane,
    multiplied by the position-correlation kernel
    ``exp(-x^2 / (2 sigma_sum^2))`` (the sharp-correlation limit of the
    heralded projection), and sent forward through the camera arm.  As
    ``sigma_diff -> 0`` the full two-photon computation converges to this
    prediction.
    """
    if not cfg.is_ghost:
        raise PhysicsError(
            "the backward-wave prediction applies to ghost configurations only"
        )
    if cfg.fiber != "single":
        raise PhysicsError(
            "the backward-wave prediction requires a single-mode collection fiber"
        )
    fine = cfg.fine_axis()
    g = gaussian_mode(fine, cfg.fiber_waist)
    back = apply_system(
        adjoint_system(herald_arm(cfg, fine)), ComplexField(fine, g), cfg.wavelength_herald
    ).values
    kernel = np.exp(-(fine.coords**2) / (2.0 * cfg.sigma_sum**2))
    source = ComplexField(fine, np.conj(back) * kernel)
    if source.norm_sq() < 1e-20:
        raise PhysicsError("backward wave does not overlap the source")
    out = apply_system(
        camera_arm(cfg, fine), source.normalized(), cfg.wavelength_signal
    )
    profile, _ = _window_profile(out.axis.coords, out.intensity(), cfg.camera_extent)
    return profile


def unheralded_far_field(cfg: ExperimentConfig) -> Profile:
    """Signal-arm far-field profile with the herald discarded (traced out).

    Supported for diffraction configurations; the unconditioned signal beam
    is propagated through the camera arm column by column and the herald
    coordinate is summed over.  In a heralded-diffraction geometry the result
    shows the slit envelope with no interference fringes.
    """
    if not cfg.is_diffraction:
        raise PhysicsError(
            "the unheralded control is computed for diffraction configurations"
        )
    jaxis = cfg.joint_axis()
    state = double_gaussian(jaxis, cfg.sigma_sum, cfg.sigma_diff)
    values = state.values
    if not cfg.is_ghost:
        values = values * double_slit(
            jaxis, cfg.slit_width, cfg.slit_separation, cfg.supersample
        )[:, None]
    # Far field along the signal coordinate for every herald column at once.
    scale = cfg.wavelength_signal * cfg.focal_fourier
    spectra = ft_centered(values, jaxis.pitch, axis=0) / np.sqrt(scale)
    out_axis = Axis(jaxis.n, scale / jaxis.pitch)
    intensity = np.sum(np.abs(spectra) ** 2, axis=1) * jaxis.pitch
    profile, _ = _window_profile(out_axis.coords, intensity, cfg.camera_extent)
    return profile


def fringe_period_theory(cfg: ExperimentConfig) -> float:
    """Ideal double-slit fringe period at the Fourier plane:
    ``wavelength * focal / separation``."""
    return cfg.wavelength_signal * cfg.focal_fourier / cfg.slit_separation
