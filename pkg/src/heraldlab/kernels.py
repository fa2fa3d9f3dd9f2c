"""Backend selection for the hot event-deposition kernel.

At import time the compiled Cython extension (``heraldlab._deposit``) is
preferred; the pure-numpy implementation (``heraldlab._deposit_py``) is used
when the extension is unavailable or when the environment variable
``HERALDLAB_PURE_PYTHON`` is set to a non-empty value other than ``0``.

Both backends are bit-for-bit identical by construction (all randomness is
drawn by the caller; deposits are integer with stochastic rounding), which a
test asserts whenever the compiled backend is present.
"""

from __future__ import annotations

import os

import numpy as np

from . import _deposit_py

__all__ = ["deposit", "BACKEND", "COMPILED_AVAILABLE"]

_forced_pure = os.environ.get("HERALDLAB_PURE_PYTHON", "0") not in ("", "0")

try:
    from . import _deposit as _compiled  # type: ignore[attr-defined]

    COMPILED_AVAILABLE = True
except ImportError:
    _compiled = None
    COMPILED_AVAILABLE = False

if COMPILED_AVAILABLE and not _forced_pure:
    BACKEND = "compiled"
else:
    BACKEND = "python"


def deposit(
    counts: np.ndarray,
    iy: np.ndarray,
    ix: np.ndarray,
    amplitudes: np.ndarray,
    stamp: np.ndarray,
    uniforms: np.ndarray,
    backend: str | None = None,
) -> None:
    """Splat photon events into ``counts`` (uint32, modified in place).

    Each event ``e`` deposits ``amplitudes[e] * stamp`` centered at
    ``(iy[e], ix[e])`` with stochastic rounding driven by ``uniforms[e]``;
    out-of-frame stamp cells are dropped.  ``backend`` overrides the
    module-level selection ("compiled" or "python").
    """
    chosen = BACKEND if backend is None else backend
    if counts.dtype != np.uint32 or not counts.flags.c_contiguous:
        raise ValueError("counts must be a C-contiguous uint32 array")
    args = (
        counts,
        np.ascontiguousarray(iy, dtype=np.int64),
        np.ascontiguousarray(ix, dtype=np.int64),
        np.ascontiguousarray(amplitudes, dtype=np.float64),
        np.ascontiguousarray(stamp, dtype=np.float64),
        np.ascontiguousarray(uniforms, dtype=np.float64),
    )
    if chosen == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled deposition backend is not available")
        _compiled.deposit(*args)
    elif chosen == "python":
        _deposit_py.deposit(*args)
    else:
        raise ValueError(f"unknown deposition backend {chosen!r}")
