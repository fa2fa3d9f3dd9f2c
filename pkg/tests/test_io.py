"""File formats: PGM images, event tables, profile CSVs, summaries."""

import numpy as np
import pytest

from heraldlab.analysis import Profile
from heraldlab.detect import EventStream
from heraldlab.io_files import (
    format_summary,
    read_events_csv,
    read_pgm16,
    read_profile_csv,
    write_events_csv,
    write_pgm16,
    write_profile_csv,
    write_summary,
)


class TestPgm:
    def test_round_trip_uint(self, tmp_path):
        rng = np.random.default_rng(0)
        image = rng.integers(0, 65536, (48, 64), dtype=np.uint32)
        path = tmp_path / "img.pgm"
        write_pgm16(path, image)
        back = read_pgm16(path)
        assert back.dtype == np.uint16
        np.testing.assert_array_equal(back, image.astype(np.uint16))

    def test_extremes_preserved(self, tmp_path):
        image = np.array([[0, 65535], [1, 65534]], dtype=np.uint16)
        path = tmp_path / "img.pgm"
        write_pgm16(path, image)
        np.testing.assert_array_equal(read_pgm16(path), image)

    def test_clipping_above_maxval(self, tmp_path):
        image = np.array([[70000, 65535], [0, 123]], dtype=np.uint32)
        path = tmp_path / "img.pgm"
        write_pgm16(path, image)
        np.testing.assert_array_equal(
            read_pgm16(path), [[65535, 65535], [0, 123]]
        )

    def test_floats_are_rounded(self, tmp_path):
        image = np.array([[0.4, 0.6], [1.5, 2.5]])
        path = tmp_path / "img.pgm"
        write_pgm16(path, image)
        # Round-half-to-even.
        np.testing.assert_array_equal(read_pgm16(path), [[0, 1], [2, 2]])

    def test_header_bytes_exact(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm16(path, np.zeros((3, 5), dtype=np.uint16))
        data = path.read_bytes()
        header = b"P5\n5 3\n65535\n"
        assert data.startswith(header)
        assert len(data) == len(header) + 3 * 5 * 2

    def test_big_endian_samples(self, tmp_path):
        path = tmp_path / "img.pgm"
        write_pgm16(path, np.array([[0x0102]], dtype=np.uint16))
        assert path.read_bytes().endswith(b"\x01\x02")

    def test_rewrite_is_byte_identical(self, tmp_path):
        rng = np.random.default_rng(5)
        image = rng.integers(0, 65536, (32, 32), dtype=np.uint32)
        a = tmp_path / "a.pgm"
        b = tmp_path / "b.pgm"
        write_pgm16(a, image)
        write_pgm16(b, image)
        assert a.read_bytes() == b.read_bytes()

    def test_comment_tolerant_reader(self, tmp_path):
        path = tmp_path / "img.pgm"
        raster = np.array([[1, 2], [3, 4]], dtype=">u2").tobytes()
        path.write_bytes(b"P5\n# a comment line\n2 2\n# another\n65535\n" + raster)
        np.testing.assert_array_equal(read_pgm16(path), [[1, 2], [3, 4]])

    def test_rejects_non_pgm(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
        with pytest.raises(ValueError):
            read_pgm16(path)

    def test_rejects_8_bit_maxval(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes(4))
        with pytest.raises(ValueError):
            read_pgm16(path)

    def test_rejects_non_2d(self, tmp_path):
        with pytest.raises(ValueError):
            write_pgm16(tmp_path / "img.pgm", np.zeros((2, 2, 2)))


class TestEventsCsv:
    def _stream(self) -> EventStream:
        return EventStream(
            frame=np.array([0, 0, 1, 2]),
            iy=np.array([10, 20, 30, 40]),
            ix=np.array([1, 2, 3, 4]),
            kind=np.array([0, 1, 2, 0], dtype=np.int8),
            n_triggers=100,
        )

    def test_round_trip(self, tmp_path):
        path = tmp_path / "events.csv"
        events = self._stream()
        write_events_csv(path, events)
        back = read_events_csv(path)
        np.testing.assert_array_equal(back.frame, events.frame)
        np.testing.assert_array_equal(back.iy, events.iy)
        np.testing.assert_array_equal(back.ix, events.ix)
        np.testing.assert_array_equal(back.kind, events.kind)
        assert back.n_triggers == 0  # not stored in the CSV

    def test_symbolic_kind_names_on_disk(self, tmp_path):
        path = tmp_path / "events.csv"
        write_events_csv(path, self._stream())
        text = path.read_text()
        assert text.splitlines()[0] == "frame,ix,iy,kind"
        assert "Signal" in text and "Dark" in text and "CathodeNoise" in text
        assert ",0\n" not in text.replace("\r", "")[len("frame,ix,iy,kind") :]

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("frame,ix,iy,kind\n0,1,2,Gamma\n")
        with pytest.raises(ValueError):
            read_events_csv(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("frame,x,y,kind\n0,1,2,Signal\n")
        with pytest.raises(ValueError):
            read_events_csv(path)

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("frame,ix,iy,kind\n0,1,Signal\n")
        with pytest.raises(ValueError):
            read_events_csv(path)


class TestProfileCsv:
    def test_round_trip(self, tmp_path):
        coords = (np.arange(50) - 25) * 1e-5
        values = np.exp(-(coords**2) / 2e-8)
        path = tmp_path / "profile.csv"
        write_profile_csv(path, Profile(coords, values))
        back = read_profile_csv(path)
        np.testing.assert_allclose(back.coords, coords, rtol=1e-8)
        np.testing.assert_allclose(back.values, values, rtol=1e-8, atol=1e-12)

    def test_header_names_coordinate(self, tmp_path):
        coords = np.linspace(-1.0, 1.0, 10)
        path = tmp_path / "profile.csv"
        write_profile_csv(path, Profile(coords, np.ones(10)), coord_name="x_m")
        assert path.read_text().splitlines()[0] == "x_m,density"

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "profile.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            read_profile_csv(path)


class TestSummary:
    def test_floats_formatted_compactly(self):
        text = format_summary({"a": 0.1 + 0.2, "b": 3, "c": "word"})
        assert text == "a = 0.3\nb = 3\nc = word\n"

    def test_write_and_order_preserved(self, tmp_path):
        path = tmp_path / "summary.txt"
        write_summary(path, {"z_first": 1, "a_second": 2})
        assert path.read_text() == "z_first = 1\na_second = 2\n"
