"""Two-photon transverse joint amplitudes, heralded projections, and
Schmidt-mode analysis.

The joint amplitude ``psi(x1, x2)`` lives on a square centered grid
(axis 0 = signal ``x1``, axis 1 = herald ``x2``) and is stored unit-normalized:
``sum |psi|^2 dx1 dx2 = 1``.

The built-in source model is the correlated double Gaussian

    psi(x1, x2) ~ exp(-(x1+x2)^2 / (8 sigma_sum^2))
                * exp(-(x1-x2)^2 / (8 sigma_diff^2))

with near-field position correlation for ``sigma_sum >> sigma_diff`` and
anticorrelation in momentum.  Its position correlation coefficient is
``(sigma_sum^2 - sigma_diff^2) / (sigma_sum^2 + sigma_diff^2)`` and its
Schmidt number is ``(r + 1/r)/2`` with ``r = sigma_sum/sigma_diff``; both are
used as analytic oracles in the test suite.

Heralding on a detection mode ``g(x2)`` projects the herald coordinate out:
``phi(x1) = integral psi(x1, x2) conj(g(x2)) dx2`` with click probability
``p = integral |phi|^2 dx1``; multimode fibers yield an incoherent mixture of
such conditionals weighted by their click probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import ConstraintError, PhysicsError
from .field import Axis, ComplexField, ft_centered

__all__ = [
    "JointAmplitude",
    "MixedEnsemble",
    "double_gaussian",
    "momentum_joint",
    "position_correlation",
    "schmidt_decompose",
    "gaussian_mode",
    "hermite_gauss_modes",
    "herald_project",
    "herald_multimode",
    "validate_energy",
]

# Herald probabilities below this are treated as "the heralded beam never
# reaches this detection mode" — conditioning on them is meaningless.
HERALD_PROBABILITY_FLOOR = 1e-12


@dataclass
class JointAmplitude:
    """Unit-normalized two-photon amplitude on a pair of centered axes."""

    axis_signal: Axis
    axis_herald: Axis
    values: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.axis_signal.n, self.axis_herald.n):
            raise ValueError(
                f"joint amplitude shape {v.shape} does not match axes "
                f"({self.axis_signal.n}, {self.axis_herald.n})"
            )
        self.values = v

    def norm_sq(self) -> float:
        return float(
            np.sum(np.abs(self.values) ** 2)
            * self.axis_signal.pitch
            * self.axis_herald.pitch
        )

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass
class MixedEnsemble:
    """Incoherent mixture of conditional signal fields from heralding.

    ``weights`` are normalized to sum to 1; ``probabilities`` are the raw
    per-mode herald click probabilities whose sum ``total_probability`` is the
    overall herald click probability per generated pair.
    """

    fields: list[ComplexField]
    weights: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        p = np.asarray(self.probabilities, dtype=np.float64)
        if len(self.fields) != w.size or w.size != p.size or w.size == 0:
            raise ValueError("ensemble fields, weights and probabilities must align")
        self.weights = w
        self.probabilities = p

    @property
    def total_probability(self) -> float:
        return float(self.probabilities.sum())


def double_gaussian(axis: Axis, sigma_sum: float, sigma_diff: float) -> JointAmplitude:
    """Correlated double-Gaussian joint amplitude on a square grid."""
    if sigma_sum <= 0 or sigma_diff <= 0:
        raise ConstraintError("sigma_sum and sigma_diff must be positive")
    if sigma_diff < axis.pitch:
        raise ConstraintError(
            f"difference-coordinate width {sigma_diff:g} m is below one joint-grid "
            f"pixel ({axis.pitch:g} m); increase the joint grid resolution"
        )
    x = axis.coords
    x1 = x[:, None]
    x2 = x[None, :]
    psi = np.exp(
        -((x1 + x2) ** 2) / (8.0 * sigma_sum**2)
        - ((x1 - x2) ** 2) / (8.0 * sigma_diff**2)
    )
    norm = np.sqrt(np.sum(psi**2) * axis.pitch**2)
    return JointAmplitude(axis, axis, (psi / norm).astype(np.complex128))


def momentum_joint(state: JointAmplitude) -> JointAmplitude:
    """Joint amplitude in transverse spatial frequency (2-D centered FFT)."""
    v = ft_centered(state.values, state.axis_herald.pitch, axis=1)
    v = ft_centered(v, state.axis_signal.pitch, axis=0)
    return JointAmplitude(
        state.axis_signal.conjugate(), state.axis_herald.conjugate(), v
    )


def position_correlation(state: JointAmplitude) -> float:
    """Pearson correlation of (x1, x2) under the joint density |psi|^2."""
    rho = state.density()
    total = rho.sum()
    if total <= 0:
        raise PhysicsError("joint density has zero total weight")
    rho = rho / total
    x1 = state.axis_signal.coords
    x2 = state.axis_herald.coords
    p1 = rho.sum(axis=1)
    p2 = rho.sum(axis=0)
    m1 = float(p1 @ x1)
    m2 = float(p2 @ x2)
    var1 = float(p1 @ (x1 - m1) ** 2)
    var2 = float(p2 @ (x2 - m2) ** 2)
    if var1 <= 0 or var2 <= 0:
        raise PhysicsError("joint density is degenerate along one coordinate")
    cov = float((x1 - m1) @ rho @ (x2 - m2))
    return cov / np.sqrt(var1 * var2)


def schmidt_decompose(state: JointAmplitude) -> tuple[np.ndarray, float]:
    """Schmidt coefficients (descending, ``sum c_k^2 = 1``) and Schmidt
    number ``K = 1 / sum c_k^4`` of the joint amplitude."""
    scale = np.sqrt(state.axis_signal.pitch * state.axis_herald.pitch)
    coeffs = np.linalg.svd(state.values * scale, compute_uv=False)
    s2 = float(np.sum(coeffs**2))
    s4 = float(np.sum(coeffs**4))
    if s4 <= 0:
        raise PhysicsError("joint amplitude is numerically zero")
    return coeffs, s2**2 / s4


def gaussian_mode(axis: Axis, waist: float) -> np.ndarray:
    """Unit-norm fundamental Gaussian detection mode (1/e^2 intensity radius
    ``waist``)."""
    return hermite_gauss_modes(axis, waist, 1)[0]


def hermite_gauss_modes(axis: Axis, waist: float, count: int) -> np.ndarray:
    """First ``count`` orthonormal Hermite-Gauss modes, shape ``(count, n)``.

    Uses the numerically stable orthonormal three-term recurrence (no
    factorials).  The fundamental mode matches :func:`gaussian_mode`'s
    convention: intensity 1/e^2 radius ``waist``.  Raises if the highest
    requested mode is not safely contained in (or resolved by) the grid.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if waist <= 0:
        raise ValueError("waist must be positive")
    if waist < 4 * axis.pitch:
        raise ConstraintError(
            f"mode waist {waist:g} m spans fewer than 4 grid pixels "
            f"({axis.pitch:g} m each)"
        )
    # Classical turning point of mode count-1 is waist*sqrt(2*count-1)/sqrt(2);
    # require it plus a two-waist Gaussian tail inside the half extent.
    reach = waist * (np.sqrt(2.0 * count - 1.0) / np.sqrt(2.0) + 2.0)
    if reach > axis.extent / 2.0:
        raise ConstraintError(
            f"Hermite-Gauss mode {count - 1} extends to ~{reach:g} m, beyond the "
            f"half extent {axis.extent / 2.0:g} m; enlarge the grid or reduce count"
        )
    u = np.sqrt(2.0) * axis.coords / waist
    h0 = np.pi**-0.25 * np.exp(-(u**2) / 2.0)
    modes = [h0]
    if count > 1:
        modes.append(np.sqrt(2.0) * u * h0)
    for n in range(1, count - 1):
        modes.append(
            np.sqrt(2.0 / (n + 1)) * u * modes[n] - np.sqrt(n / (n + 1)) * modes[n - 1]
        )
    return np.sqrt(np.sqrt(2.0) / waist) * np.asarray(modes[:count])


def herald_project(
    state: JointAmplitude, mode: np.ndarray
) -> tuple[ComplexField, float]:
    """Project the herald coordinate onto a unit-norm detection mode.

    Returns the *normalized* conditional signal field and the herald click
    probability.  Raises :class:`PhysicsError` when the click probability is
    below :data:`HERALD_PROBABILITY_FLOOR`.
    """
    g = np.asarray(mode, dtype=np.complex128)
    if g.shape != (state.axis_herald.n,):
        raise ValueError(
            f"mode of {g.shape[0] if g.ndim == 1 else g.shape} samples does not "
            f"match the herald axis ({state.axis_herald.n} samples)"
        )
    dxh = state.axis_herald.pitch
    mode_norm = float(np.sum(np.abs(g) ** 2) * dxh)
    if abs(mode_norm - 1.0) > 1e-6:
        raise ValueError(f"detection mode must be unit-norm, got |g|^2 = {mode_norm:g}")
    phi = state.values @ np.conj(g) * dxh
    p = float(np.sum(np.abs(phi) ** 2) * state.axis_signal.pitch)
    if p < HERALD_PROBABILITY_FLOOR:
        raise PhysicsError(
            f"herald click probability {p:.3g} is below the floor "
            f"{HERALD_PROBABILITY_FLOOR:g}; the heralded beam does not reach "
            "this detection mode"
        )
    return ComplexField(state.axis_signal, phi / np.sqrt(p)), p


def herald_multimode(state: JointAmplitude, modes: np.ndarray) -> MixedEnsemble:
    """Herald through a multimode collector supporting an orthonormal mode set.

    ``modes`` has shape ``(count, n)`` and must be orthonormal on the herald
    grid (validated).  Returns the incoherent mixture of per-mode conditional
    fields; weights are the per-mode click probabilities normalized to 1.
    """
    g = np.asarray(modes, dtype=np.complex128)
    if g.ndim != 2 or g.shape[1] != state.axis_herald.n:
        raise ValueError(
            f"modes must have shape (count, {state.axis_herald.n}), got {g.shape}"
        )
    gram = g @ np.conj(g.T) * state.axis_herald.pitch
    err = float(np.max(np.abs(gram - np.eye(g.shape[0]))))
    if err > 1e-8:
        raise ValueError(
            f"detection modes are not orthonormal on this grid (max deviation {err:.3g})"
        )
    fields: list[ComplexField] = []
    probs: list[float] = []
    for row in g:
        f, p = herald_project(state, row)
        fields.append(f)
        probs.append(p)
    probabilities = np.asarray(probs)
    total = probabilities.sum()
    if total <= 0:
        raise PhysicsError("no detection mode received any herald probability")
    return MixedEnsemble(fields, probabilities / total, probabilities)


def validate_energy(
    wavelength_pump: float,
    wavelength_signal: float,
    wavelength_herald: float,
    rtol: float = 1e-6,
) -> None:
    """Check pair-generation energy conservation
    ``1/pump == 1/signal + 1/herald`` within ``rtol`` (relative to ``1/pump``);
    raises :class:`ConstraintError` on violation."""
    for name, w in (
        ("pump", wavelength_pump),
        ("signal", wavelength_signal),
        ("herald", wavelength_herald),
    ):
        if w <= 0 or not np.isfinite(w):
            raise ConstraintError(f"{name} wavelength must be positive, got {w}")
    lhs = 1.0 / wavelength_pump
    rhs = 1.0 / wavelength_signal + 1.0 / wavelength_herald
    if abs(lhs - rhs) > rtol * lhs:
        raise ConstraintError(
            "energy conservation violated: 1/pump != 1/signal + 1/herald "
            f"(relative mismatch {abs(lhs - rhs) / lhs:.3g}, tolerance {rtol:g})"
        )
