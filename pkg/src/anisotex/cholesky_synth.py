"""Exact elementary-field sampling by Cholesky factorisation of the grid covariance.

Cost is O(r^6) in time and O(r^4) in memory, so this backend is a reference
for small grids.  The origin is pinned to zero and left out of the system.
"""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np

from .grid import FieldGrid
from .spectral_model import ElementaryParams, variogram

logger = logging.getLogger(__name__)

MAX_DEFAULT_R = 63
JITTER_SCALE = 1e-10
JITTER_ESCALATIONS = 3
RECONSTRUCTION_TOL = 1e-6


class ResourceGuardError(RuntimeError):
    """Raised when a Cholesky grid would be too large without an explicit override."""


class FactorizationError(RuntimeError):
    pass


def _check_size(r, force):
    if r < 1:
        raise ValueError("r must be >= 1")
    if r > MAX_DEFAULT_R and not force:
        raise ResourceGuardError(
            f"Cholesky synthesis at r={r} needs a {((r + 1) ** 2 - 1)}^2 matrix and "
            f"O(r^6) work; pass force=True to run it anyway (limit r <= {MAX_DEFAULT_R})")


def grid_points(r: int) -> np.ndarray:
    """Integer grid nodes ``(k1, k2)`` in row-major order, origin excluded."""
    k1, k2 = np.meshgrid(np.arange(r + 1), np.arange(r + 1), indexing="ij")
    pts = np.column_stack([k1.ravel(), k2.ravel()])
    return pts[1:]


def lag_variograms(params: ElementaryParams, r: int) -> np.ndarray:
    """``v((a, b) / r)`` for integer lags ``-r <= a, b <= r``, indexed ``[a + r, b + r]``.

    Uses evenness and homogeneity: ``v(l / r) = r^{-2H} v(l)``.
    """
    size = 2 * r + 1
    table = np.zeros((size, size))
    scale = float(r) ** (-2.0 * params.hurst)
    for a in range(0, r + 1):
        for b in range(-r, r + 1):
            if a == 0 and b <= 0:
                continue
            val = scale * variogram(params, (a, b))
            table[a + r, b + r] = val
            table[r - a, r - b] = val
    return table


def covariance_matrix(params: ElementaryParams, r: int, force: bool = False) -> np.ndarray:
    """Covariance of the field at all grid nodes but the origin."""
    _check_size(r, force)
    table = lag_variograms(params, r)
    pts = grid_points(r)
    v_pts = table[pts[:, 0] + r, pts[:, 1] + r]
    da = pts[:, None, 0] - pts[None, :, 0] + r
    db = pts[:, None, 1] - pts[None, :, 1] + r
    return v_pts[:, None] + v_pts[None, :] - table[da, db]


def cholesky_factor(sigma) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T ~= sigma``, adding diagonal jitter if needed."""
    sigma = np.asarray(sigma, dtype=float)
    m = sigma.shape[0]
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        pass
    delta = JITTER_SCALE * np.trace(sigma) / m
    for attempt in range(JITTER_ESCALATIONS + 1):
        try:
            factor = np.linalg.cholesky(sigma + delta * np.eye(m))
        except np.linalg.LinAlgError:
            delta *= 10.0
            continue
        logger.info("Cholesky needed jitter %.3e (attempt %d)", delta, attempt + 1)
        err = np.abs(factor @ factor.T - sigma).max()
        if err > RECONSTRUCTION_TOL * np.abs(sigma).max():
            raise FactorizationError(f"jittered factor reconstruction error {err:.3e} too large")
        return factor
    raise FactorizationError(
        f"covariance is not positive definite even with jitter {delta / 10.0:.3e}")


@lru_cache(maxsize=8)
def _cached_factor(params: ElementaryParams, r: int) -> np.ndarray:
    factor = cholesky_factor(covariance_matrix(params, r, force=True))
    factor.flags.writeable = False
    return factor


def exact_factor(params: ElementaryParams, r: int, force: bool = False) -> np.ndarray:
    _check_size(r, force)
    return _cached_factor(params, r)


def sample_elementary_exact(params: ElementaryParams, r: int, seed, force: bool = False) -> FieldGrid:
    """Exact-in-law elementary field ``Y = L Z`` on the grid, ``Y(0) = 0``."""
    factor = exact_factor(params, r, force)
    z = np.random.default_rng(seed).standard_normal(factor.shape[0])
    values = np.concatenate([[0.0], factor @ z]).reshape(r + 1, r + 1)
    meta = {"backend": "cholesky", "params": params.to_dict(), "seed": seed}
    return FieldGrid(r, values, meta)


def sample_elementary_exact_batch(params: ElementaryParams, r: int, n_samples: int, seed,
                                  force: bool = False) -> np.ndarray:
    """``n_samples`` independent fields as an array ``(n_samples, r + 1, r + 1)``."""
    factor = exact_factor(params, r, force)
    z = np.random.default_rng(seed).standard_normal((factor.shape[0], n_samples))
    out = np.zeros((n_samples, (r + 1) ** 2))
    out[:, 1:] = (factor @ z).T
    return out.reshape(n_samples, r + 1, r + 1)


def sample_lafbf_exact(orientation, hurst: float, alpha: float, window, r: int, seed,
                       force: bool = False) -> FieldGrid:
    """Locally anisotropic field from exact tangent fields sharing one noise vector.

    Pixel ``x`` takes row ``x`` of ``L_{alpha0(x)} Z``; one factorisation is
    needed per distinct cone axis on the grid.
    """
    _check_size(r, force)
    alpha0 = orientation.on_grid(r).ravel()
    m = (r + 1) ** 2 - 1
    z = np.random.default_rng(seed).standard_normal(m)
    values = np.zeros((r + 1) ** 2)
    axes, inverse = np.unique(alpha0[1:], return_inverse=True)
    for k, a0 in enumerate(axes):
        params = ElementaryParams(hurst, float(a0), alpha, window)
        factor = cholesky_factor(covariance_matrix(params, r, force=True))
        rows = np.flatnonzero(inverse == k)
        values[rows + 1] = factor[rows] @ z
    meta = {"backend": "cholesky", "hurst": float(hurst), "alpha": float(alpha),
            "window": ElementaryParams(hurst, 0.0, alpha, window).window.value,
            "orientation": orientation.describe(), "seed": seed, "distinct_axes": int(len(axes))}
    return FieldGrid(r, values.reshape(r + 1, r + 1), meta)
