"""Legacy VTK structured-points writer (binary, big-endian).

One scalar array per field, point data, x varying fastest; file size is
header + N^3 * 4 bytes per field, readable by standard visualization tools.
"""

from __future__ import annotations

import numpy as np

from .fields import Grid3


def write_vtk(path, grid: Grid3, fields: dict, title: str = "triwell fields") -> None:
    """Write named scalar fields on the grid; dict order fixes array order."""
    n = grid.n
    for name, arr in fields.items():
        if arr.shape != grid.shape:
            raise ValueError(f"field {name!r} has shape {arr.shape}, expected {grid.shape}")
        if any(ch.isspace() for ch in name):
            raise ValueError(f"field name {name!r} must not contain whitespace")
    with open(path, "wb") as f:
        f.write(b"# vtk DataFile Version 3.0\n")
        f.write(title.encode()[:255] + b"\n")
        f.write(b"BINARY\n")
        f.write(b"DATASET STRUCTURED_POINTS\n")
        f.write(f"DIMENSIONS {n} {n} {n}\n".encode())
        f.write(b"ORIGIN 0 0 0\n")
        f.write(f"SPACING {grid.h!r} {grid.h!r} {grid.h!r}\n".encode())
        f.write(f"POINT_DATA {n**3}\n".encode())
        for name, arr in fields.items():
            f.write(f"SCALARS {name} float 1\n".encode())
            f.write(b"LOOKUP_TABLE default\n")
            # VTK flattens with x fastest: Fortran order over (ix, iy, iz)
            f.write(np.asarray(arr, dtype=">f4").ravel(order="F").tobytes())
            f.write(b"\n")
