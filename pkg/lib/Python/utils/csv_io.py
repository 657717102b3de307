"""
aniso CSV I/O - sampled functions (t,v1..vd) and space-time fields (t,x[,y],v)
"""

import math
import os

import numpy as np

from utils.error_handling import AnisoError, DataFormatError
from utils.general import SIGNIFICANT_DIGITS, log_debug

CSV_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"


def _read_table(path):
    """Read a numeric CSV with a header row; returns (names, 2-D array)."""
    if not os.path.exists(path):
        raise DataFormatError(f"CSV file not found: {path}", operation="read_csv")
    try:
        data = np.genfromtxt(path, delimiter=",", names=True, dtype=float, encoding="utf-8")
    except ValueError as e:
        raise DataFormatError(f"{path}: {e}", operation="read_csv") from e
    names = list(data.dtype.names or ())
    if not names:
        raise DataFormatError(f"{path}: missing header", operation="read_csv")
    table = np.atleast_1d(data)
    columns = np.column_stack([np.asarray(table[name], dtype=float) for name in names])
    if not np.all(np.isfinite(columns)):
        raise DataFormatError(f"{path}: non-numeric or missing entries", operation="read_csv")
    return names, columns


def read_sampled_function(path, domain_kind="finite"):
    """Read `t,v1..vd` into a SampledFunction on the grid the nodes imply.

    Raises:
        DataFormatError: bad header, non-numeric data, or nodes that are not
            midpoints of a partition of (0, T)
    """
    from ops.grids import SampledFunction, grid_from_nodes

    names, columns = _read_table(path)
    expected = ["t"] + [f"v{i}" for i in range(1, len(names))]
    if names != expected or len(names) < 2:
        raise DataFormatError(
            f"{path}: header must be t,v1..vd, got {','.join(names)}",
            operation="read_sampled_function",
        )
    try:
        grid = grid_from_nodes(columns[:, 0], domain_kind)
    except AnisoError as e:
        raise DataFormatError(f"{path}: {e.message}", operation="read_sampled_function", details=e.details) from e
    log_debug(f"read {grid.n} samples of dimension {len(names) - 1} from {path}")
    return SampledFunction(grid, columns[:, 1:])


def write_sampled_function(path, u):
    """Write a SampledFunction as `t,v1..vd`."""
    header = ",".join(["t"] + [f"v{i}" for i in range(1, u.d + 1)])
    table = np.column_stack((u.nodes, u.values))
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt=CSV_FORMAT)


def _axis_from_column(values, name, path):
    axis = np.unique(values)
    if axis.size < 2 or axis.size & (axis.size - 1):
        raise DataFormatError(f"{path}: {name} axis size {axis.size} is not a power of two", operation="read_field")
    steps = np.diff(axis)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise DataFormatError(f"{path}: {name} axis is not uniform", operation="read_field")
    return axis, float(steps[0])


def read_field(path, half=False, domain_kind="finite"):
    """Read `t,x,v` or `t,x,y,v` (rows in C order of the tensor grid) into a SpaceTimeField.

    Args:
        path: CSV path
        half: Treat the last spatial axis as the half-torus y in (0, pi L)
        domain_kind: Time domain kind of the reconstructed grid
    """
    from ops.grids import SpaceTimeField, SpatialGrid, grid_from_nodes

    names, columns = _read_table(path)
    if names not in (["t", "x", "v"], ["t", "x", "y", "v"]):
        raise DataFormatError(f"{path}: header must be t,x,v or t,x,y,v", operation="read_field")
    ndim = len(names) - 2

    tnodes = np.unique(columns[:, 0])
    axes = [_axis_from_column(columns[:, 1 + i], names[1 + i], path) for i in range(ndim)]
    shape = tuple(axis.size for axis, _ in axes)
    if columns.shape[0] != tnodes.size * int(np.prod(shape)):
        raise DataFormatError(f"{path}: rows do not form a tensor grid", operation="read_field")

    last_axis, last_step = axes[-1]
    last_span = last_step * shape[-1]
    first_span = axes[0][1] * shape[0]
    length_scale = first_span / (2.0 * math.pi)
    y_extent = None
    if half:
        if not math.isclose(last_axis[0], 0.5 * last_step, rel_tol=1e-9):
            raise DataFormatError(f"{path}: half-torus layers must start at h/2", operation="read_field")
        y_extent = last_span
        if ndim == 1:
            length_scale = 1.0
    elif ndim == 2 and not math.isclose(last_span, first_span, rel_tol=1e-9):
        y_extent = 0.5 * last_span
    origin = 0.0 if half else float(last_axis[0])

    try:
        tgrid = grid_from_nodes(tnodes, domain_kind)
        xgrid = SpatialGrid(shape, length_scale, half=half, origin=origin, y_extent=y_extent)
    except AnisoError as e:
        raise DataFormatError(f"{path}: {e.message}", operation="read_field", details=e.details) from e
    values = columns[:, -1].reshape((tnodes.size,) + shape)
    return SpaceTimeField(tgrid, xgrid, values)


def write_field(path, field):
    """Write a SpaceTimeField as `t,x,v` or `t,x,y,v`."""
    xgrid = field.xgrid
    names = ["t", "x", "y"][: 1 + xgrid.ndim] + ["v"]
    axes = [field.tgrid.nodes] + [xgrid.axis_nodes(i) for i in range(xgrid.ndim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    table = np.column_stack([m.ravel() for m in mesh] + [field.values.ravel()])
    np.savetxt(path, table, delimiter=",", header=",".join(names), comments="", fmt=CSV_FORMAT)
