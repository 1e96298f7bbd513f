"""Exact fractional Brownian motion on integer lattices by circulant embedding.

The fractional Gaussian noise (unit-step increments of fBm) is stationary, so
its covariance embeds into a circulant matrix which the FFT diagonalises.  A
single complex Gaussian vector in the spectral domain yields an exact sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_EMBEDDING_RETRIES = 4
NEGATIVE_EIGEN_TOL = 1e-12


class EmbeddingError(RuntimeError):
    pass


@dataclass(frozen=True)
class LineProcess:
    """fBm path sampled at the integers ``index_min .. index_max``."""

    hurst: float
    index_min: int
    index_max: int
    values: np.ndarray

    def __post_init__(self):
        if not self.index_min <= 0 <= self.index_max:
            raise ValueError("line must contain index 0")
        if len(self.values) != self.index_max - self.index_min + 1:
            raise ValueError("values length does not match the index range")

    def __len__(self):
        return len(self.values)

    def at(self, index):
        """Value(s) at integer index (or index array)."""
        return self.values[np.asarray(index) - self.index_min]


def _check_hurst(hurst):
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")


def fgn_autocovariance(hurst: float, k):
    """Autocovariance of unit-step fBm increments at lag ``k``."""
    _check_hurst(hurst)
    k = np.abs(np.asarray(k, dtype=float))
    two_h = 2.0 * hurst
    out = 0.5 * (np.abs(k + 1.0) ** two_h - 2.0 * k ** two_h + np.abs(k - 1.0) ** two_h)
    if out.ndim == 0:
        return float(out)
    return out


def embedding_size(n: int) -> int:
    """Number of autocovariance lags ``M`` embedded for a path of ``n`` steps."""
    m = 1
    while m < n:
        m *= 2
    return m + 1


def circulant_eigenvalues(hurst: float, m: int) -> np.ndarray:
    """Eigenvalues of the size ``2m - 2`` circulant holding lags ``0..m-1``."""
    lags = fgn_autocovariance(hurst, np.arange(m))
    row = np.concatenate([lags, lags[-2:0:-1]])
    return np.fft.fft(row).real


@lru_cache(maxsize=512)
def _spectrum(hurst, n):
    m = embedding_size(n)
    for _ in range(MAX_EMBEDDING_RETRIES + 1):
        eig = circulant_eigenvalues(hurst, m)
        if eig.min() >= -NEGATIVE_EIGEN_TOL * eig.max():
            out = np.sqrt(np.clip(eig, 0.0, None) / len(eig))
            out.flags.writeable = False
            return out
        m = 2 * m - 1
    raise EmbeddingError(
        f"circulant embedding of fGn (H={hurst}, n={n}) has negative eigenvalue "
        f"{eig.min():.3e} after {MAX_EMBEDDING_RETRIES} enlargements")


def sample_fgn(hurst: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` exact fractional Gaussian noise samples.

    The generator is consumed as ``2L`` standard normals with ``L`` the
    circulant size: all real parts first, then all imaginary parts.
    """
    amp = _spectrum(float(hurst), int(n))
    size = len(amp)
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    w = np.fft.fft(amp * z)
    return w.real[:n]


def sample_fbm_line(hurst: float, length: int, seed) -> LineProcess:
    """Exact fBm sample at the integers ``0 .. length`` with ``B(0) = 0``.

    Parameters
    ----------
    hurst : float
        Hurst index in (0, 1).
    length : int
        Number of unit steps ``N``; the path has ``N + 1`` values.
    seed : int or numpy.random.SeedSequence
        Seed for the path; identical inputs give bitwise-identical paths.
    """
    _check_hurst(hurst)
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(seed)
    values = np.empty(length + 1)
    values[0] = 0.0
    np.cumsum(sample_fgn(hurst, length, rng), out=values[1:])
    return LineProcess(hurst, 0, int(length), values)


def sample_fbm_line_signed(hurst: float, index_min: int, index_max: int, seed) -> LineProcess:
    """fBm on ``index_min .. index_max`` re-pinned so that ``B(0) = 0``."""
    _check_hurst(hurst)
    if not index_min <= 0 <= index_max:
        raise ValueError("need index_min <= 0 <= index_max")
    if index_min == index_max:
        return LineProcess(hurst, 0, 0, np.zeros(1))
    base = sample_fbm_line(hurst, index_max - index_min, seed)
    values = base.values - base.values[-index_min]
    return LineProcess(hurst, int(index_min), int(index_max), values)
