"""Tests for bit-exact snapshot and diagnostics CSV round trips."""
import numpy as np
import pytest

from fdvs.io import (CSV_HEADER, SNAPSHOT_MAGIC, format_float, read_snapshot,
                     read_diagnostics_csv, write_diagnostics_csv,
                     write_snapshot)
from fdvs.norms import SeriesRecord


def test_snapshot_round_trip_bit_exact(tmp_path, small_state):
    p = tmp_path / "state.fdvs"
    write_snapshot(p, small_state)
    back = read_snapshot(p)
    assert back.grid == small_state.grid
    assert back.t == small_state.t
    for a, b in zip(back.arrays(), small_state.arrays()):
        assert np.array_equal(a, b)      # bitwise, no tolerance
    # a second write of the reread state is byte-identical
    p2 = tmp_path / "again.fdvs"
    write_snapshot(p2, back)
    assert p.read_bytes() == p2.read_bytes()


def test_snapshot_header_starts_with_magic(tmp_path, small_state):
    p = tmp_path / "state.fdvs"
    write_snapshot(p, small_state)
    assert p.read_bytes()[:4] == SNAPSHOT_MAGIC == b"FDVS"


def test_snapshot_rejects_tampering(tmp_path, small_state):
    p = tmp_path / "state.fdvs"
    write_snapshot(p, small_state)
    raw = bytearray(p.read_bytes())

    bad_magic = tmp_path / "magic.fdvs"
    bad_magic.write_bytes(b"XDVS" + bytes(raw[4:]))
    with pytest.raises(ValueError, match="magic"):
        read_snapshot(bad_magic)

    bad_version = tmp_path / "version.fdvs"
    tweaked = bytearray(raw)
    tweaked[4] = 99
    bad_version.write_bytes(bytes(tweaked))
    with pytest.raises(ValueError, match="version"):
        read_snapshot(bad_version)

    truncated = tmp_path / "short.fdvs"
    truncated.write_bytes(bytes(raw[:-16]))
    with pytest.raises(ValueError, match="truncated"):
        read_snapshot(truncated)

    padded = tmp_path / "long.fdvs"
    padded.write_bytes(bytes(raw) + b"\x00")
    with pytest.raises(ValueError, match="trailing"):
        read_snapshot(padded)


def test_format_float_shortest_round_trip():
    for x in (0.1, 1.0 / 3.0, 1e-300, -2.5, 0.0):
        assert float(format_float(x)) == x
    assert format_float(0.1) == "0.1"


def _series():
    return [SeriesRecord(t=0.0, values={"a": 1.0 / 3.0, "b": 1e-17}),
            SeriesRecord(t=0.125, values={"a": -2.0, "b": 3.5})]


def test_csv_round_trip_lossless_and_deterministic(tmp_path):
    p1 = tmp_path / "one.csv"
    p2 = tmp_path / "two.csv"
    cols = ("t", "a", "b")
    write_diagnostics_csv(p1, _series(), cols)
    write_diagnostics_csv(p2, _series(), cols)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().splitlines()[0] == CSV_HEADER

    columns, back = read_diagnostics_csv(p1)
    assert columns == list(cols)
    for orig, rec in zip(_series(), back):
        assert rec.t == orig.t
        assert rec.values == orig.values  # repr floats reparse exactly

    p3 = tmp_path / "three.csv"
    write_diagnostics_csv(p3, back, cols)
    assert p3.read_bytes() == p1.read_bytes()


def test_csv_rejects_foreign_files(tmp_path):
    alien = tmp_path / "alien.csv"
    alien.write_text("t,a\n0.0,1.0\n")
    with pytest.raises(ValueError, match="header"):
        read_diagnostics_csv(alien)

    ragged = tmp_path / "ragged.csv"
    ragged.write_text(CSV_HEADER + "\nt,a\n0.0,1.0,7.0\n")
    with pytest.raises(ValueError, match="width"):
        read_diagnostics_csv(ragged)

    wrong_first = tmp_path / "first.csv"
    wrong_first.write_text(CSV_HEADER + "\na,t\n1.0,0.0\n")
    with pytest.raises(ValueError, match="must be t"):
        read_diagnostics_csv(wrong_first)
