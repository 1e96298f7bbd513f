"""Measurement tools for synthesized fields: variograms, orientation, regularity."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from .spectral_model import angle_distance, reduce_angle

DEGENERATE_REL_TOL = 1e-12
REFERENCE_R = 255
REFERENCE_SMOOTHING = 8.0


class ValidationError(ValueError):
    pass


def _values(field):
    return np.asarray(getattr(field, "values", field), dtype=float)


def empirical_variogram(field, lag) -> float:
    """Half the mean squared increment ``X(x + lag) - X(x)`` over all valid ``x``."""
    v = _values(field)
    a, b = int(lag[0]), int(lag[1])
    n1, n2 = v.shape
    if abs(a) >= n1 or abs(b) >= n2:
        raise ValidationError(f"lag {(a, b)} leaves no valid pairs on a {v.shape} grid")
    src = v[max(0, -a):n1 - max(0, a), max(0, -b):n2 - max(0, b)]
    dst = v[max(0, a):n1 - max(0, -a) or None, max(0, b):n2 - max(0, -b) or None]
    return 0.5 * float(np.mean((dst - src) ** 2))


def default_smoothing(r: int) -> float:
    """Tensor smoothing scale: 8 pixels at r = 255, proportional otherwise."""
    return REFERENCE_SMOOTHING * r / REFERENCE_R


def structure_tensor(field, smoothing_scale: float, gradient_scale: float = 1.0):
    """Smoothed tensor components ``(J11, J12, J22)`` per pixel.

    Gradients are central differences of the field pre-smoothed at
    ``gradient_scale`` pixels (0 disables pre-smoothing); axis 0 is ``x``.
    """
    v = _values(field)
    if gradient_scale > 0:
        v = ndimage.gaussian_filter(v, gradient_scale, mode="nearest")
    gx, gy = np.gradient(v)
    smooth = (lambda a: ndimage.gaussian_filter(a, smoothing_scale, mode="nearest")) \
        if smoothing_scale > 0 else (lambda a: a)
    return smooth(gx * gx), smooth(gx * gy), smooth(gy * gy)


def _orientation_from_tensor(j11, j12, j22):
    trace = j11 + j22
    gap = math.hypot(j11 - j22, 2.0 * j12)
    if trace <= 0.0 or gap <= DEGENERATE_REL_TOL * trace:
        return None
    # gradient direction, rotated a quarter turn onto the stripes
    return reduce_angle(0.5 * math.atan2(2.0 * j12, j11 - j22) + 0.5 * math.pi)


def structure_tensor_orientation(field, window_center=None, window_radius=None,
                                 smoothing_scale=None, gradient_scale: float = 1.0,
                                 tensor=None):
    """Dominant stripe orientation in a square window, in ``(-pi/2, pi/2]``.

    Returns ``None`` when the averaged tensor has no dominant direction.
    """
    v = _values(field)
    n1, n2 = v.shape
    if window_center is None:
        window_center = ((n1 - 1) / 2.0, (n2 - 1) / 2.0)
    if window_radius is None:
        window_radius = (min(n1, n2) - 1) / 2.0
    if smoothing_scale is None:
        smoothing_scale = default_smoothing(min(n1, n2) - 1)
    c1, c2 = window_center
    lo1, hi1 = int(math.floor(c1 - window_radius)), int(math.ceil(c1 + window_radius))
    lo2, hi2 = int(math.floor(c2 - window_radius)), int(math.ceil(c2 + window_radius))
    if lo1 < 0 or lo2 < 0 or hi1 >= n1 or hi2 >= n2:
        raise ValidationError("window extends outside the grid")
    if tensor is None:
        tensor = structure_tensor(v, smoothing_scale, gradient_scale)
    j11, j12, j22 = (float(np.mean(t[lo1:hi1 + 1, lo2:hi2 + 1])) for t in tensor)
    return _orientation_from_tensor(j11, j12, j22)


def window_centers(r: int, size: int = 33, stride: int | None = None):
    """Centres of ``size x size`` windows tiling the grid with the given stride."""
    stride = size if stride is None else stride
    half = size // 2
    pos = list(range(half, r + 1 - half, stride))
    return [(a, b) for a in pos for b in pos]


def windowed_orientation_errors(field, alpha0_grid, size: int = 33, stride: int | None = None,
                                smoothing_scale=None, gradient_scale: float = 1.0):
    """Angular error of the estimated stripe direction in each window.

    The prescribed stripe direction at a window centre ``x`` is
    ``alpha0(x) + pi/2``.  Windows without a dominant orientation count as
    error ``pi/2``.
    """
    v = _values(field)
    r = v.shape[0] - 1
    if smoothing_scale is None:
        smoothing_scale = default_smoothing(r)
    tensor = structure_tensor(v, smoothing_scale, gradient_scale)
    errors = []
    for c in window_centers(r, size, stride):
        est = structure_tensor_orientation(v, c, size // 2, tensor=tensor)
        target = alpha0_grid[c] + 0.5 * math.pi
        errors.append(0.5 * math.pi if est is None else float(angle_distance(est, target)))
    return np.array(errors)


def estimate_hurst(field, direction=(1, 0), lags=range(1, 9)) -> float:
    """Half the log-log slope of the empirical variogram along a grid axis."""
    v = _values(field)
    if min(v.shape) < 64:
        raise ValidationError("Hurst estimation needs at least a 64 x 64 field")
    d = (int(direction[0]), int(direction[1]))
    if sorted(map(abs, d)) != [0, 1]:
        raise ValidationError("direction must be a unit grid axis")
    ells = np.array(list(lags), dtype=float)
    gam = np.array([empirical_variogram(v, (int(l) * d[0], int(l) * d[1])) for l in ells])
    if np.any(gam <= 0.0):
        raise ValidationError("non-positive variogram value; cannot take logarithms")
    slope = np.polyfit(np.log(ells), np.log(gam), 1)[0]
    return 0.5 * float(slope)


@dataclass
class Check:
    metric: str
    value: float
    expected: float
    tolerance: float
    passed: bool

    def __post_init__(self):
        # numpy scalars are not JSON serializable
        self.value, self.expected, self.tolerance = (
            float(self.value), float(self.expected), float(self.tolerance))
        self.passed = bool(self.passed)

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def report_json(checks) -> str:
    return json.dumps([c.to_dict() for c in checks])
