"""Bit-exact artifact I/O: .fdvs snapshots and versioned diagnostics CSV.

Snapshot layout (little-endian): magic b"FDVS", u32 version = 1, u32 nx,
f64 L, f64 t, then four row-major float64 arrays n1, n2, m1, m2.  Floats
in CSV are written with repr (shortest round-trip decimal), which makes
repeated runs byte-identical and parsing lossless.
"""
import struct

import numpy as np

from .chart import FieldState
from .grid import Grid2D, ScalarField
from .norms import SeriesRecord

__all__ = ["SNAPSHOT_MAGIC", "SNAPSHOT_VERSION", "CSV_HEADER",
           "write_snapshot", "read_snapshot", "format_float",
           "write_diagnostics_csv", "read_diagnostics_csv"]

SNAPSHOT_MAGIC = b"FDVS"
SNAPSHOT_VERSION = 1
CSV_HEADER = "# fdvs-csv v1"


def write_snapshot(path, state: FieldState) -> None:
    g = state.grid
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<II", SNAPSHOT_VERSION, g.nx))
        fh.write(struct.pack("<dd", g.L, state.t))
        for arr in state.arrays():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path) -> FieldState:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"not an fdvs snapshot: magic {magic!r}")
        version, nx = struct.unpack("<II", fh.read(8))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        L, t = struct.unpack("<dd", fh.read(16))
        grid = Grid2D(nx=nx, L=L)
        count = nx * nx
        fields = []
        for _ in range(4):
            buf = fh.read(8 * count)
            if len(buf) != 8 * count:
                raise ValueError("truncated snapshot")
            vals = np.frombuffer(buf, dtype="<f8").reshape(nx, nx)
            fields.append(ScalarField(grid, vals.astype(float)))
        if fh.read(1):
            raise ValueError("trailing bytes after snapshot payload")
    return FieldState(grid, *fields, t=t)


def format_float(x) -> str:
    return repr(float(x))


def write_diagnostics_csv(path, series, columns) -> None:
    """Write SeriesRecords with the fixed, versioned header."""
    lines = [CSV_HEADER, ",".join(columns)]
    for rec in series:
        row = [format_float(rec.t)]
        row += [format_float(rec.values[c]) for c in columns if c != "t"]
        lines.append(",".join(row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_diagnostics_csv(path):
    """Parse a diagnostics CSV back into SeriesRecords."""
    with open(path, "r") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"unsupported CSV header {header!r}")
        columns = fh.readline().rstrip("\n").split(",")
        if columns[0] != "t":
            raise ValueError("first CSV column must be t")
        series = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = [float(p) for p in line.split(",")]
            if len(parts) != len(columns):
                raise ValueError("CSV row width does not match header")
            series.append(SeriesRecord(t=parts[0],
                                       values=dict(zip(columns[1:],
                                                       parts[1:]))))
    return columns, series
