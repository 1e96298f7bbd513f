"""Turning-bands synthesis of elementary fields and locally anisotropic fields.

Each band ``p/q`` carries one exact fBm line sampled on the integers; the
grid node ``(k1, k2)`` reads it at ``k1*q + k2*p`` and the ``(cos theta/(r q))^H``
factor restores the scale of ``x . u(theta)``.  For the locally anisotropic
field the cone axis changes per pixel, so each pixel sums only the bands
found in its own cone by binary search.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .band_plan import Band, BandPlan, cone_ranges_grid
from .fbm1d import sample_fbm_line_signed
from .grid import FieldGrid
from .orientation_fields import OrientationField
from .spectral_model import (ElementaryParams, Window, angle_distance, cone_support,
                             gamma_factor, window_weight)

logger = logging.getLogger(__name__)

THREADS_ENV = "ANISOTEX_THREADS"

# Band lines are standard fBm (E B(t)^2 = |t|^{2H}); the band sum needs lines
# whose variogram is |t|^{2H}, i.e. variance 2|t|^{2H}.
LINE_VARIANCE_FACTOR = 2.0


def band_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Seed of band ``index``: ``SeedSequence(seed, spawn_key=(index,))``."""
    return np.random.SeedSequence(int(seed), spawn_key=(int(index),))


def band_index_range(band: Band, r: int) -> tuple[int, int]:
    """Smallest integer range holding every ``k1*q + k2*p`` with ``0 <= k1, k2 <= r``."""
    return r * min(0, band.p), r * band.q + r * max(0, band.p)


@dataclass(frozen=True)
class LineTable:
    """One fBm line per band of ``plan``; ``None`` for bands not generated."""

    plan: BandPlan
    hurst: float
    seed: int
    lines: tuple

    def __len__(self):
        return len(self.lines)


def build_line_table(plan: BandPlan, hurst: float, seed: int, bands=None) -> LineTable:
    """Generate the band lines.

    ``bands`` optionally restricts generation to a subset of band indices; a
    line's content depends only on ``(seed, index)``, never on the subset.
    """
    wanted = range(len(plan)) if bands is None else set(int(i) for i in bands)
    lines = []
    for i, band in enumerate(plan.bands):
        if i in wanted:
            lo, hi = band_index_range(band, plan.r)
            lines.append(sample_fbm_line_signed(hurst, lo, hi, band_seed(seed, i)))
        else:
            lines.append(None)
    return LineTable(plan, float(hurst), int(seed), tuple(lines))


def band_weight(band: Band, local_alpha0: float, params, r: int) -> float:
    """``sqrt(lambda * gamma(H) * c(theta)) * (cos theta / (r q))^H``.

    ``params`` needs ``hurst``, ``alpha`` and ``window`` attributes.
    """
    c = window_weight(angle_distance(band.theta, local_alpha0), params.alpha, params.window)
    return (math.sqrt(band.width * gamma_factor(params.hurst) * c)
            * (math.cos(band.theta) / (r * band.q)) ** params.hurst)


def tb_model_covariance(params: ElementaryParams, plan: BandPlan, x, y) -> float:
    """Exact covariance of the discrete band sum at continuous points ``x``, ``y``.

    ``gamma(H) sum_i lambda_i c_i (|x.u_i|^{2H} + |y.u_i|^{2H} - |(x-y).u_i|^{2H})``
    """
    thetas = plan.thetas
    c = window_weight(angle_distance(thetas, params.alpha0), params.alpha, params.window)
    w = plan.widths * c
    cos, sin = np.cos(thetas), np.sin(thetas)
    x0, x1, y0, y1 = float(x[0]), float(x[1]), float(y[0]), float(y[1])
    two_h = 2.0 * params.hurst
    px = np.abs(x0 * cos + x1 * sin) ** two_h
    py = np.abs(y0 * cos + y1 * sin) ** two_h
    pd = np.abs((x0 - y0) * cos + (x1 - y1) * sin) ** two_h
    return gamma_factor(params.hurst) * float(np.sum(w * ((px + py) - pd)))


def resolve_workers(workers=None) -> int:
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return int(workers)


def needed_bands(start, stop, wrapped, n: int) -> np.ndarray:
    """Indices of bands that fall in at least one pixel's cone."""
    diff = np.zeros(n + 1, dtype=np.int64)
    plain = ~wrapped & (start < stop)
    np.add.at(diff, start[plain], 1)
    np.add.at(diff, stop[plain], -1)
    if wrapped.any():
        diff[0] += int(wrapped.sum())
        np.add.at(diff, stop[wrapped], -1)
        np.add.at(diff, start[wrapped], 1)
    return np.flatnonzero(np.cumsum(diff[:n]) > 0)


def _assemble_block(k1, k2, alpha0, start, count, n, flat, offset, p, q, thetas, scales,
                    alpha, window):
    # member j of a pixel's cone is band (start + j) mod n; j runs upward for every pixel
    out = np.zeros(len(k1))
    for j in range(int(count.max(initial=0))):
        sel = np.flatnonzero(count > j)
        b = start[sel] + j
        b[b >= n] -= n
        c = window_weight(angle_distance(thetas[b], alpha0[sel]), alpha, window)
        vals = flat[offset[b] + k1[sel] * q[b] + k2[sel] * p[b]]
        out[sel] += (scales[b] * np.sqrt(c)) * vals
    return out


def _assemble(alpha0_grid, hurst, alpha, window, plan: BandPlan, r: int, seed: int,
              workers=None, timings=None):
    if plan.r != r:
        raise ValueError(f"plan built for r={plan.r}, grid has r={r}")
    window = Window(window)
    t0 = time.perf_counter()
    alpha0 = np.asarray(alpha0_grid, dtype=float).ravel()
    k1, k2 = np.meshgrid(np.arange(r + 1), np.arange(r + 1), indexing="ij")
    k1, k2 = k1.ravel(), k2.ravel()
    support = cone_support(alpha, window)
    start, stop, wrapped = cone_ranges_grid(plan.thetas, alpha0, support)
    band_ids = needed_bands(start, stop, wrapped, len(plan))
    n = len(plan)
    count = np.where(wrapped, stop + (n - start), np.maximum(stop - start, 0))
    empty = int(np.sum(count == 0))
    if empty:
        logger.warning("%d pixels have no band in their cone (epsilon=%g, alpha=%g)",
                       empty, plan.epsilon, alpha)

    table = build_line_table(plan, hurst, seed, bands=band_ids)
    # all needed lines in one array; offset[i] maps k1*q + k2*p of band i into it
    offset = np.zeros(n, dtype=np.int64)
    pos = 0
    for i in band_ids:
        offset[i] = pos - table.lines[i].index_min
        pos += len(table.lines[i])
    flat = np.concatenate([table.lines[i].values for i in band_ids]) if len(band_ids) else np.zeros(0)
    t1 = time.perf_counter()

    scales = (np.sqrt(LINE_VARIANCE_FACTOR * plan.widths * gamma_factor(hurst))
              * (np.cos(plan.thetas) / (r * plan.q)) ** hurst)
    npix = len(alpha0)
    nworkers = min(resolve_workers(workers), npix)
    bounds = np.linspace(0, npix, nworkers + 1).astype(np.int64)

    def run(b):
        sl = slice(bounds[b], bounds[b + 1])
        return _assemble_block(k1[sl], k2[sl], alpha0[sl], start[sl], count[sl], n, flat, offset,
                               plan.p, plan.q, plan.thetas, scales, alpha, window)

    if nworkers == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            parts = list(pool.map(run, range(nworkers)))
    values = np.concatenate(parts).reshape(r + 1, r + 1)
    values[0, 0] = 0.0
    t2 = time.perf_counter()
    if timings is not None:
        timings["lines"] = t1 - t0
        timings["assembly"] = t2 - t1
    meta = {"backend": "tb", "seed": int(seed), "epsilon": plan.epsilon, "n_bands": len(plan),
            "bands_used": int(len(band_ids)), "empty_cone_pixels": empty}
    return values, meta


def synth_elementary_tb(params: ElementaryParams, plan: BandPlan, r: int, seed: int,
                        workers=None, timings=None) -> FieldGrid:
    """Elementary field with a constant cone axis, by turning bands."""
    alpha0 = np.full((r + 1, r + 1), params.alpha0)
    values, meta = _assemble(alpha0, params.hurst, params.alpha, params.window, plan, r, seed,
                             workers, timings)
    meta["params"] = params.to_dict()
    return FieldGrid(r, values, meta)


def synth_lafbf(orientation: OrientationField, hurst: float, alpha: float, window,
                plan: BandPlan, r: int, seed: int, workers=None, timings=None) -> FieldGrid:
    """Locally anisotropic field: pixel ``x`` takes the value of its tangent field at ``x``."""
    # validates hurst/alpha the same way as the elementary model
    ElementaryParams(hurst, 0.0, alpha, window)
    alpha0 = orientation.on_grid(r)
    values, meta = _assemble(alpha0, hurst, alpha, window, plan, r, seed, workers, timings)
    meta.update(hurst=float(hurst), alpha=float(alpha), window=Window(window).value,
                orientation=orientation.describe())
    return FieldGrid(r, values, meta)
