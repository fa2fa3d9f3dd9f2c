"""Pure-numpy event-deposition kernel, bit-for-bit equivalent to the
compiled version in ``_deposit.pyx``.

Equivalence holds because both paths compute the same IEEE-754 products
``amplitudes[e] * stamp[a, b]``, the same ``floor`` and comparison, and then
accumulate *integers* — so vectorized accumulation order cannot change the
result.
"""

from __future__ import annotations

import numpy as np


def deposit(
    counts: np.ndarray,
    iy: np.ndarray,
    ix: np.ndarray,
    amplitudes: np.ndarray,
    stamp: np.ndarray,
    uniforms: np.ndarray,
) -> None:
    n_events = iy.shape[0]
    k = stamp.shape[0]
    if ix.shape[0] != n_events or amplitudes.shape[0] != n_events:
        raise ValueError("event arrays must have equal length")
    if stamp.shape != (k, k) or k % 2 == 0:
        raise ValueError("stamp must be square with odd size")
    if uniforms.shape != (n_events, k, k):
        raise ValueError("uniforms must have shape (n_events, k, k)")
    if n_events == 0:
        return
    radius = (k - 1) // 2
    height, width = counts.shape

    v = amplitudes[:, None, None] * stamp[None, :, :]
    base = np.floor(v)
    q = base.astype(np.int64) + (uniforms < v - base)

    offsets = np.arange(k) - radius
    ty = np.broadcast_to(iy[:, None, None] + offsets[None, :, None], q.shape)
    tx = np.broadcast_to(ix[:, None, None] + offsets[None, None, :], q.shape)
    valid = (ty >= 0) & (ty < height) & (tx >= 0) & (tx < width) & (q > 0)
    np.add.at(counts, (ty[valid], tx[valid]), q[valid].astype(np.uint32))
