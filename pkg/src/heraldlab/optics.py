"""Optical elements and systems acting on 1-D sampled fields.

An optical system is an ordered list of elements applied left to right.
Every element is norm-preserving except :class:`Mask` (which can only lose
power, ``|t| <= 1``), so ``apply_system`` conserves ``norm_sq`` for mask-free
systems to machine precision.

Sign conventions match :mod:`heraldlab.field`: with the forward kernel
``exp(-i 2 pi nu x)`` and the Fresnel transfer function
``exp(-i pi wavelength z nu^2)``, a *converging* lens of focal length
``f > 0`` multiplies by ``exp(-i pi x^2 / (wavelength f))``; the chain
``[FreeSpace(f), ThinLens(f), FreeSpace(f)]`` then reproduces
:class:`FourierLens(f)` up to a constant phase.

``adjoint_system`` returns the Hermitian adjoint (= inverse for mask-free
systems): element order is reversed and each element is replaced by its
adjoint — ``FreeSpace(z) -> FreeSpace(-z)``, ``ThinLens(f) -> ThinLens(-f)``,
``FourierLens(f) -> FourierLens(-f)`` (a negative focal length denotes the
inverse scaled transform), ``Imaging4f(f1, f2) -> Imaging4f(f2, f1)``, and
``Mask(t) -> Mask(conj(t))``.  For any mask-free system ``S`` and field ``v``,
``apply_system(adjoint_system(S), apply_system(S, v)) == v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .field import Axis, ComplexField, fresnel_propagate, ft_centered, ift_centered

__all__ = [
    "FreeSpace",
    "ThinLens",
    "Mask",
    "FourierLens",
    "Imaging4f",
    "Element",
    "apply_element",
    "apply_system",
    "adjoint_system",
    "double_slit",
]


@dataclass(frozen=True)
class FreeSpace:
    """Fresnel propagation over a signed ``distance`` (meters)."""

    distance: float


@dataclass(frozen=True)
class ThinLens:
    """Thin-lens quadratic phase; ``focal > 0`` converges."""

    focal: float

    def __post_init__(self) -> None:
        if self.focal == 0:
            raise ValueError("thin lens focal length must be nonzero")


@dataclass(frozen=True)
class Mask:
    """Amplitude transmission mask sampled on the field grid (``|t| <= 1``)."""

    transmission: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.transmission, dtype=np.complex128)
        if t.ndim != 1:
            raise ValueError("mask transmission must be a 1-D array")
        if np.max(np.abs(t)) > 1.0 + 1e-9:
            raise ValueError("mask transmission magnitude exceeds 1")
        object.__setattr__(self, "transmission", t)


@dataclass(frozen=True)
class FourierLens:
    """Exact focal-plane transform of a 2f system.

    Maps a field on ``Axis(n, extent)`` to the rescaled centered Fourier
    transform on ``Axis(n, wavelength*|focal|/pitch)`` (output coordinate
    ``x' = wavelength * focal * nu``), scaled so the squared norm is
    preserved.  ``focal < 0`` applies the inverse transform, so
    ``FourierLens(-f)`` undoes ``FourierLens(f)`` exactly.
    """

    focal: float

    def __post_init__(self) -> None:
        if self.focal == 0:
            raise ValueError("Fourier lens focal length must be nonzero")


@dataclass(frozen=True)
class Imaging4f:
    """Two-lens relay imaging system with magnification ``m = f2/f1``.

    Acts exactly on the sample grid: the image is the coordinate-inverted
    input on a rescaled axis (``extent' = m * extent``), with amplitude scale
    ``1/sqrt(m)`` so the squared norm is preserved.  No interpolation is
    performed; index 0 of an even grid has no mirror partner and wraps to
    itself.
    """

    focal_in: float
    focal_out: float

    def __post_init__(self) -> None:
        if self.focal_in <= 0 or self.focal_out <= 0:
            raise ValueError("imaging relay focal lengths must be positive")

    @property
    def magnification(self) -> float:
        return self.focal_out / self.focal_in


Element = Union[FreeSpace, ThinLens, Mask, FourierLens, Imaging4f]


def apply_element(element: Element, field: ComplexField, wavelength: float) -> ComplexField:
    """Apply one element to a field at the given wavelength."""
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    ax = field.axis

    if isinstance(element, FreeSpace):
        return fresnel_propagate(field, element.distance, wavelength)

    if isinstance(element, ThinLens):
        x = ax.coords
        phase = np.exp(-1j * np.pi * x**2 / (wavelength * element.focal))
        return ComplexField(ax, field.values * phase)

    if isinstance(element, Mask):
        if element.transmission.shape != (ax.n,):
            raise ValueError(
                f"mask of {element.transmission.shape[0]} samples applied to "
                f"a field of {ax.n} samples"
            )
        return ComplexField(ax, field.values * element.transmission)

    if isinstance(element, FourierLens):
        scale = wavelength * abs(element.focal)
        out_axis = Axis(ax.n, scale / ax.pitch)
        if element.focal > 0:
            out = ft_centered(field.values, ax.pitch) / np.sqrt(scale)
        else:
            out = ift_centered(field.values * np.sqrt(scale), out_axis.pitch)
        return ComplexField(out_axis, out)

    if isinstance(element, Imaging4f):
        m = element.magnification
        out_axis = Axis(ax.n, m * ax.extent)
        idx = (-np.arange(ax.n)) % ax.n
        return ComplexField(out_axis, field.values[idx] / np.sqrt(m))

    raise TypeError(f"unknown optical element {element!r}")


def apply_system(
    system: Sequence[Element], field: ComplexField, wavelength: float
) -> ComplexField:
    """Apply an ordered list of elements left to right."""
    out = field
    for element in system:
        out = apply_element(element, out, wavelength)
    return out


def adjoint_system(system: Sequence[Element]) -> list[Element]:
    """Hermitian adjoint of a system (its inverse when mask-free)."""
    out: list[Element] = []
    for element in reversed(list(system)):
        if isinstance(element, FreeSpace):
            out.append(FreeSpace(-element.distance))
        elif isinstance(element, ThinLens):
            out.append(ThinLens(-element.focal))
        elif isinstance(element, Mask):
            out.append(Mask(np.conj(element.transmission)))
        elif isinstance(element, FourierLens):
            out.append(FourierLens(-element.focal))
        elif isinstance(element, Imaging4f):
            out.append(Imaging4f(element.focal_out, element.focal_in))
        else:
            raise TypeError(f"unknown optical element {element!r}")
    return out


def double_slit(
    axis: Axis, width: float, separation: float, supersample: int = 1
) -> np.ndarray:
    """Binary double-slit transmission: openings of ``width`` centered at
    ``+/- separation/2``.

    With ``supersample == 1`` each pixel is set by strict pixel-center
    membership ``|x -+ separation/2| < width/2``.  With ``supersample = s > 1``
    each pixel stores the mean of ``s`` uniformly spaced sub-samples across
    the pixel, i.e. the cell-averaged (gray-edge) mask appropriate for
    quadrature-grade comparisons between grids of different pitch.
    """
    if width <= 0 or separation <= 0:
        raise ValueError("slit width and separation must be positive")
    if width >= separation:
        raise ValueError(
            f"slits overlap: width {width} must be smaller than separation {separation}"
        )
    if supersample < 1:
        raise ValueError("supersample must be >= 1")

    def openings(x: np.ndarray) -> np.ndarray:
        half = separation / 2.0
        return (
            (np.abs(x - half) < width / 2.0) | (np.abs(x + half) < width / 2.0)
        ).astype(np.float64)

    x = axis.coords
    if supersample == 1:
        return openings(x)
    offsets = ((np.arange(supersample) + 0.5) / supersample - 0.5) * axis.pitch
    return openings(x[:, None] + offsets[None, :]).mean(axis=1)
