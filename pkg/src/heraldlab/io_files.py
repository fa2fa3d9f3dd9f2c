"""File formats: 16-bit binary PGM images, event tables, and profile CSVs.

PGM frames are written as binary ``P5`` with ``maxval 65535`` and big-endian
16-bit samples (values above 65535 are clipped).  The writer is free of any
timestamps or environment-dependent content so identical data always
produces identical bytes.
"""

from __future__ import annotations

import csv
import io
import os
from typing import Mapping

import numpy as np

from .analysis import Profile
from .detect import KIND_NAMES, EventStream

__all__ = [
    "write_pgm16",
    "read_pgm16",
    "write_events_csv",
    "read_events_csv",
    "write_profile_csv",
    "read_profile_csv",
    "format_summary",
    "write_summary",
]

PGM_MAXVAL = 65535


def write_pgm16(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write a 2-D count image as binary 16-bit PGM (clipped at 65535)."""
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError(f"PGM image must be 2-D, got shape {img.shape}")
    if np.issubdtype(img.dtype, np.floating):
        img = np.rint(img)
    clipped = np.clip(img, 0, PGM_MAXVAL).astype(">u2")
    height, width = clipped.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii"))
        fh.write(clipped.tobytes())


def read_pgm16(path: str | os.PathLike) -> np.ndarray:
    """Read a binary PGM written by :func:`write_pgm16` (or compatible)."""
    with open(path, "rb") as fh:
        data = fh.read()
    # Header: magic, width, height, maxval, separated by whitespace, with
    # optional '#' comment lines; a single whitespace byte precedes the raster.
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"truncated PGM header in {path}")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    magic, width, height, maxval = tokens
    if magic != b"P5":
        raise ValueError(f"not a binary PGM file: {path}")
    w, h, mv = int(width), int(height), int(maxval)
    if mv <= 255 or mv > PGM_MAXVAL:
        raise ValueError(f"expected a 16-bit PGM (maxval in 256..65535), got {mv}")
    raster = np.frombuffer(data, dtype=">u2", count=w * h, offset=pos)
    return raster.reshape(h, w).astype(np.uint16)


def write_events_csv(path: str | os.PathLike, events: EventStream) -> None:
    """Write ``frame,ix,iy,kind`` rows with symbolic kind names."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "ix", "iy", "kind"])
        names = np.asarray(KIND_NAMES)
        for f, x, y, k in zip(events.frame, events.ix, events.iy, names[events.kind]):
            writer.writerow([int(f), int(x), int(y), k])


def read_events_csv(path: str | os.PathLike) -> EventStream:
    """Read an event table written by :func:`write_events_csv`.

    The trigger count is not stored in the CSV; the returned stream reports
    ``n_triggers = 0``.
    """
    name_to_code = {name: code for code, name in enumerate(KIND_NAMES)}
    frames: list[int] = []
    xs: list[int] = []
    ys: list[int] = []
    kinds: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["frame", "ix", "iy", "kind"]:
            raise ValueError(f"unexpected event CSV header {header} in {path}")
        for row in reader:
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"malformed event row {row} in {path}")
            f, x, y, k = row
            if k not in name_to_code:
                raise ValueError(f"unknown event kind {k!r} in {path}")
            frames.append(int(f))
            xs.append(int(x))
            ys.append(int(y))
            kinds.append(name_to_code[k])
    return EventStream(
        frame=np.asarray(frames, dtype=np.int64),
        iy=np.asarray(ys, dtype=np.int64),
        ix=np.asarray(xs, dtype=np.int64),
        kind=np.asarray(kinds, dtype=np.int8),
        n_triggers=0,
    )


def write_profile_csv(path: str | os.PathLike, profile: Profile, coord_name: str = "coord_m") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([coord_name, "density"])
        for c, v in zip(profile.coords, profile.values):
            writer.writerow([f"{c:.9e}", f"{v:.9e}"])


def read_profile_csv(path: str | os.PathLike) -> Profile:
    coords: list[float] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) != 2:
            raise ValueError(f"unexpected profile CSV header {header} in {path}")
        for row in reader:
            if not row:
                continue
            coords.append(float(row[0]))
            values.append(float(row[1]))
    return Profile(np.asarray(coords), np.asarray(values))


def format_summary(entries: Mapping[str, object]) -> str:
    """Render a flat mapping as deterministic ``key = value`` lines."""
    out = io.StringIO()
    for key, value in entries.items():
        if isinstance(value, float):
            out.write(f"{key} = {value:.9g}\n")
        else:
            out.write(f"{key} = {value}\n")
    return out.getvalue()


def write_summary(path: str | os.PathLike, entries: Mapping[str, object]) -> None:
    with open(path, "w") as fh:
        fh.write(format_summary(entries))
