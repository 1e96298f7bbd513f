"""Prescribed orientation maps ``(x, y) -> alpha0`` on the unit square.

Angles are axial (defined modulo pi) and always returned in ``(-pi/2, pi/2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral_model import reduce_angle


def eval_v1(x, y):
    """Cone axis of the field ``V1(x, y) = u(-pi/2 + y)``."""
    return reduce_angle(-0.5 * math.pi + np.asarray(y, dtype=float) + 0.0 * np.asarray(x, dtype=float))


def eval_v2(x, y):
    """Cone axis of the field ``V2(x, y) = u(sin(2x - 1))``."""
    out = np.sin(2.0 * np.asarray(x, dtype=float) - 1.0) + 0.0 * np.asarray(y, dtype=float)
    if np.ndim(out) == 0:
        return float(out)
    return out


class OrientationField:
    """Base class; subclasses implement :meth:`__call__` on scalars or arrays."""

    def __call__(self, x, y):
        raise NotImplementedError

    def on_grid(self, r: int) -> np.ndarray:
        """Axis angles at the grid nodes, indexed ``[k1, k2]``."""
        k1, k2 = np.meshgrid(np.arange(r + 1), np.arange(r + 1), indexing="ij")
        return np.asarray(self(k1 / r, k2 / r), dtype=float) * np.ones((r + 1, r + 1))

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantOrientation(OrientationField):
    alpha0: float

    def __call__(self, x, y):
        val = reduce_angle(self.alpha0)
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        return val if shape == () else np.full(shape, val)

    def describe(self):
        return f"const:{reduce_angle(self.alpha0)!r}"


class V1Orientation(OrientationField):
    def __call__(self, x, y):
        return eval_v1(x, y)

    def describe(self):
        return "v1"


class V2Orientation(OrientationField):
    def __call__(self, x, y):
        return eval_v2(x, y)

    def describe(self):
        return "v2"


class RasterOrientation(OrientationField):
    """Bilinear interpolation of a raster of angles, done on doubled angles.

    Node ``(i, j)`` sits at ``y = i / (rows - 1)``, ``x = j / (cols - 1)``; a
    single row or column makes the field constant along that axis.
    """

    def __init__(self, angles, source: str | None = None):
        angles = np.asarray(angles, dtype=float)
        if angles.ndim != 2 or angles.size == 0:
            raise ValueError("raster must be a non-empty 2-D array")
        if not np.all(np.isfinite(angles)):
            raise ValueError("raster contains non-finite values")
        self.angles = angles
        self.source = source
        self._c = np.cos(2.0 * angles)
        self._s = np.sin(2.0 * angles)

    def _interp(self, table, x, y):
        rows, cols = table.shape

        def locate(t, n):
            if n == 1:
                z = np.zeros_like(t, dtype=np.int64)
                return z, z, np.zeros_like(t)
            pos = np.clip(t, 0.0, 1.0) * (n - 1)
            i0 = np.minimum(np.floor(pos).astype(np.int64), n - 2)
            return i0, i0 + 1, pos - i0

        i0, i1, fy = locate(y, rows)
        j0, j1, fx = locate(x, cols)
        return ((1 - fy) * ((1 - fx) * table[i0, j0] + fx * table[i0, j1])
                + fy * ((1 - fx) * table[i1, j0] + fx * table[i1, j1]))

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        c = self._interp(self._c, x, y)
        s = self._interp(self._s, x, y)
        return reduce_angle(0.5 * np.arctan2(s, c))

    def describe(self):
        return f"raster:{self.source}" if self.source else "raster"


def load_orientation_raster(path) -> RasterOrientation:
    """Read an ``ORI <rows> <cols>`` text raster (row 0 is ``y = 0``)."""
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 3 or tokens[0] != "ORI":
        raise ValueError(f"{path}: missing 'ORI <rows> <cols>' header")
    try:
        rows, cols = int(tokens[1]), int(tokens[2])
        vals = np.array([float(t) for t in tokens[3:]])
    except ValueError as exc:
        raise ValueError(f"{path}: malformed raster: {exc}") from None
    if rows < 1 or cols < 1:
        raise ValueError(f"{path}: empty raster")
    if vals.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} values, found {vals.size}")
    return RasterOrientation(vals.reshape(rows, cols), source=str(path))


def parse_orientation(text: str) -> OrientationField:
    """``const:RAD``, ``v1``, ``v2`` or ``raster:PATH``."""
    if text == "v1":
        return V1Orientation()
    if text == "v2":
        return V2Orientation()
    kind, _, arg = text.partition(":")
    if kind == "const" and arg:
        return ConstantOrientation(float(arg))
    if kind == "raster" and arg:
        return load_orientation_raster(arg)
    raise ValueError(f"unknown orientation field {text!r}")
