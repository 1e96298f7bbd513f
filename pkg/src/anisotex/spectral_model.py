"""Spectral cone model of the elementary anisotropic fractional Brownian field.

The elementary field has spectral density ``c(arg xi)^2 |xi|^(-2H-2)`` where the
angular weight ``c`` selects a cone of half-width ``alpha`` around ``alpha0``.
Its variogram reduces to a one-dimensional angular integral which is evaluated
here by adaptive quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

HALF_PI = 0.5 * math.pi

#: Gaussian windows are cut to zero beyond this many standard deviations.
GAUSS_TRUNCATION = 3.0

QUAD_EPSABS = 1e-10


class Window(str, enum.Enum):
    INDICATOR = "indicator"
    GAUSS = "gauss"


def reduce_angle(theta):
    """Reduce angle(s) modulo pi into ``(-pi/2, pi/2]``."""
    t = np.mod(theta, math.pi)
    t = np.where(t > HALF_PI, t - math.pi, t)
    if np.ndim(t) == 0:
        return float(t)
    return t


def angle_distance(theta, phi):
    """pi-periodic angular distance, in ``[0, pi/2]``."""
    return np.abs(reduce_angle(np.asarray(theta) - np.asarray(phi)))


@dataclass(frozen=True)
class ElementaryParams:
    """Parameters of an elementary field: Hurst index and spectral cone."""

    hurst: float
    alpha0: float
    alpha: float
    window: Window = Window.INDICATOR

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if not 0.0 < self.alpha <= HALF_PI:
            raise ValueError(f"alpha must lie in (0, pi/2], got {self.alpha}")
        object.__setattr__(self, "hurst", float(self.hurst))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "alpha0", reduce_angle(float(self.alpha0)))
        object.__setattr__(self, "window", Window(self.window))

    @property
    def support(self) -> float:
        """Angular half-width outside which the cone weight vanishes."""
        return cone_support(self.alpha, self.window)

    def with_alpha0(self, alpha0: float) -> "ElementaryParams":
        return ElementaryParams(self.hurst, alpha0, self.alpha, self.window)

    def to_dict(self) -> dict:
        return {"hurst": self.hurst, "alpha0": self.alpha0, "alpha": self.alpha,
                "window": self.window.value}


def cone_support(alpha: float, window) -> float:
    if Window(window) is Window.GAUSS:
        return GAUSS_TRUNCATION * alpha
    return alpha


def gamma_factor(hurst: float) -> float:
    """Normalisation ``pi / (2 H Gamma(2H) sin(H pi))`` of the polar variogram."""
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")
    return math.pi / (2.0 * hurst * special.gamma(2.0 * hurst) * math.sin(hurst * math.pi))


def window_weight(distance, alpha: float, window):
    """Cone weight as a function of the angular distance to the cone axis."""
    d = np.asarray(distance, dtype=float)
    if Window(window) is Window.GAUSS:
        w = np.where(d <= GAUSS_TRUNCATION * alpha, np.exp(-d * d / (2.0 * alpha * alpha)), 0.0)
    else:
        w = np.where(d <= alpha, 1.0, 0.0)
    if w.ndim == 0:
        return float(w)
    return w


def cone_weight(params: ElementaryParams, theta):
    """Angular weight ``c(theta)`` in ``[0, 1]``; pi-periodic in ``theta``."""
    return window_weight(angle_distance(theta, params.alpha0), params.alpha, params.window)


def _angular_integral(params: ElementaryParams, phi: float) -> float:
    """``int w(theta) |cos(theta - phi)|^{2H} dtheta`` over one period."""
    s = min(params.support, HALF_PI)
    lo, hi = params.alpha0 - s, params.alpha0 + s
    two_h = 2.0 * params.hurst
    a0, alpha = params.alpha0, params.alpha
    gauss = params.window is Window.GAUSS

    def integrand(theta):
        t = math.fmod(theta - a0, math.pi)
        if t > HALF_PI:
            t -= math.pi
        elif t <= -HALF_PI:
            t += math.pi
        d = abs(t)
        if gauss:
            w = math.exp(-d * d / (2.0 * alpha * alpha)) if d <= GAUSS_TRUNCATION * alpha else 0.0
        else:
            w = 1.0 if d <= alpha else 0.0
        return w * abs(math.cos(theta - phi)) ** two_h

    # kinks of |cos(theta - phi)| sit at phi + pi/2 + k pi
    k_lo = math.ceil((lo - phi - HALF_PI) / math.pi)
    k_hi = math.floor((hi - phi - HALF_PI) / math.pi)
    nodes = [lo]
    nodes += [phi + HALF_PI + k * math.pi for k in range(k_lo, k_hi + 1)]
    nodes.append(hi)
    nodes = sorted(set(nodes))
    total = 0.0
    for a, b in zip(nodes[:-1], nodes[1:]):
        if b - a <= 0.0:
            continue
        val, _ = integrate.quad(integrand, a, b, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)
        total += val
    return total


def variogram(params: ElementaryParams, x) -> float:
    """Variogram ``v(x) = gamma(H) int c(theta) |x . u(theta)|^{2H} dtheta``.

    Uses ``|x . u(theta)| = |x| |cos(theta - arg x)|`` so that the quadrature
    only depends on the direction of ``x``.
    """
    x0, x1 = float(x[0]), float(x[1])
    norm = math.hypot(x0, x1)
    if norm == 0.0:
        return 0.0
    # v is even, so fold the direction into (-pi/2, pi/2]
    phi = reduce_angle(math.atan2(x1, x0))
    return gamma_factor(params.hurst) * norm ** (2.0 * params.hurst) * _angular_integral(params, phi)


def covariance(params: ElementaryParams, x, y) -> float:
    """``Cov(Y(x), Y(y)) = v(x) + v(y) - v(x - y)`` for the origin-pinned field."""
    d = (float(x[0]) - float(y[0]), float(x[1]) - float(y[1]))
    return variogram(params, x) + variogram(params, y) - variogram(params, d)


def covariance_matrix_points(params: ElementaryParams, points) -> np.ndarray:
    """Covariance matrix over an arbitrary finite point set."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    v_pts = np.array([variogram(params, p) for p in pts])
    sigma = np.empty((n, n))
    for i in range(n):
        sigma[i, i] = 2.0 * v_pts[i]
        for j in range(i + 1, n):
            c = v_pts[i] + v_pts[j] - variogram(params, pts[i] - pts[j])
            sigma[i, j] = sigma[j, i] = c
    return sigma
