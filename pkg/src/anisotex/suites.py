"""Statistical validation suites shared by the CLI and the acceptance tests.

Every suite returns a list of :class:`~anisotex.validation.Check` records.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import band_plan, cholesky_synth, fbm1d, turning_band_synth as tbs
from .orientation_fields import parse_orientation
from .spectral_model import ElementaryParams, Window, angle_distance, covariance
from .validation import (Check, estimate_hurst, structure_tensor_orientation,
                         windowed_orientation_errors)

STRIPE_CONFIG = {"hurst": 0.2, "alpha0": math.pi / 6, "alpha": 1e-2}
LOCAL_CONFIG = {"r": 255, "alpha": 1e-1, "epsilon": 1e-2}


def _random_pairs(r, n_pairs, rng):
    """Distinct grid-node pairs, origin excluded."""
    pairs = []
    while len(pairs) < n_pairs:
        a = tuple(int(v) for v in rng.integers(0, r + 1, 2))
        b = tuple(int(v) for v in rng.integers(0, r + 1, 2))
        if a != (0, 0) and b != (0, 0):
            pairs.append((a, b))
    return pairs


def _empirical_cov(samples, a, b):
    prod = samples[:, a[0], a[1]] * samples[:, b[0], b[1]]
    return float(prod.mean()), float(prod.std(ddof=1) / math.sqrt(len(prod)))


def tb_samples(params, plan, r, n_samples, seed):
    """``n_samples`` turning-band fields with seeds ``seed, seed + 1, ...``."""
    return np.array([tbs.synth_elementary_tb(params, plan, r, seed + s, workers=1).values
                     for s in range(n_samples)])


def fbm_exactness(hursts=(0.2, 0.5, 0.7), n_lines=10_000, length=256, max_lag=4,
                  n_paths=100, path_length=4096, seed=0, nsigma=3.0):
    """Increment autocovariance of fBm lines and Hurst recovery from their variogram."""
    checks = []
    for h in hursts:
        inc = np.array([np.diff(fbm1d.sample_fbm_line(h, length, seed + 7919 * k).values)
                        for k in range(n_lines)])
        for lag in range(max_lag + 1):
            per_line = np.mean(inc[:, :length - lag] * inc[:, lag:], axis=1)
            est = float(per_line.mean())
            se = float(per_line.std(ddof=1) / math.sqrt(n_lines))
            exp = fbm1d.fgn_autocovariance(h, lag)
            checks.append(Check(f"fgn_autocov[H={h},lag={lag}]", est, exp, nsigma * se,
                                abs(est - exp) <= nsigma * se))
        ells = np.arange(1, 9)
        msq = np.zeros(len(ells))
        for k in range(n_paths):
            b = fbm1d.sample_fbm_line(h, path_length, seed + 104729 + k).values
            msq += [np.mean((b[l:] - b[:-l]) ** 2) for l in ells]
        slope = np.polyfit(np.log(ells), np.log(msq / n_paths), 1)[0]
        checks.append(Check(f"fbm_hurst_recovery[H={h}]", 0.5 * float(slope), h, 0.05,
                            abs(0.5 * slope - h) <= 0.05))
    return checks


def discretization(hurst=0.5, alpha0=0.0, alpha=math.pi / 2, window=Window.INDICATOR,
                   epsilons=(0.04, 0.02, 0.01), n_pairs=100, seed=0, rel_tol=1e-2):
    """Deterministic gap between the band-sum covariance and the exact covariance.

    The error at each epsilon is ``max |C_tb - C| / max |C|`` over random point
    pairs in the unit square.
    """
    params = ElementaryParams(hurst, alpha0, alpha, window)
    rng = np.random.default_rng(seed)
    pairs = rng.uniform(0.0, 1.0, (n_pairs, 2, 2))
    exact = np.array([covariance(params, x, y) for x, y in pairs])
    scale = np.abs(exact).max()
    errors = []
    for eps in epsilons:
        plan = band_plan.select_bands(1, eps)
        tb = np.array([tbs.tb_model_covariance(params, plan, x, y) for x, y in pairs])
        errors.append(float(np.abs(tb - exact).max() / scale))
    checks = []
    tag = f"H={hurst},alpha={alpha:.4g}"
    for eps, err in zip(epsilons, errors):
        checks.append(Check(f"discretization_rel_error[{tag},eps={eps}]", err, 0.0,
                            rel_tol, True if eps != min(epsilons) else err <= rel_tol))
        checks.append(Check(f"discretization_constant[{tag},eps={eps}]", err * scale / eps,
                            float("nan"), float("nan"), True))
    order = np.argsort(epsilons)[::-1]
    ordered = [errors[i] for i in order]
    mono = all(b < a for a, b in zip(ordered, ordered[1:]))
    checks.append(Check(f"discretization_monotone[{tag}]", float(mono), 1.0, 0.0, mono))
    return checks


def covariance_oracle(r=16, n_samples=2000, seed=7, hurst=0.3, alpha0=math.pi / 6, alpha=0.3,
                      window=Window.INDICATOR, epsilon=1e-2, n_pairs=10, nsigma=4.0):
    """Turning-band empirical covariance against the exact band-sum covariance."""
    params = ElementaryParams(hurst, alpha0, alpha, window)
    plan = band_plan.select_bands(r, epsilon)
    samples = tb_samples(params, plan, r, n_samples, seed)
    checks = []
    for a, b in _random_pairs(r, n_pairs, np.random.default_rng(seed)):
        est, se = _empirical_cov(samples, a, b)
        exp = tbs.tb_model_covariance(params, plan, np.array(a) / r, np.array(b) / r)
        checks.append(Check(f"tb_cov[H={hurst},{a},{b}]", est, exp, nsigma * se,
                            abs(est - exp) <= nsigma * se))
    return checks


def cross_backend(r=16, hursts=(0.3, 0.7), n_samples=5000, seed=11, alpha0=math.pi / 6,
                  alpha=0.3, window=Window.INDICATOR, epsilon=1e-2, n_pairs=10, nsigma=4.0):
    """Turning-band and Cholesky empirical covariances on random point pairs."""
    plan = band_plan.select_bands(r, epsilon)
    checks = []
    for h in hursts:
        params = ElementaryParams(h, alpha0, alpha, window)
        tb = tb_samples(params, plan, r, n_samples, seed)
        ch = cholesky_synth.sample_elementary_exact_batch(params, r, n_samples, seed)
        for a, b in _random_pairs(r, n_pairs, np.random.default_rng(seed + 1)):
            ct, st = _empirical_cov(tb, a, b)
            cc, sc = _empirical_cov(ch, a, b)
            tol = nsigma * math.hypot(st, sc)
            checks.append(Check(f"crossbackend_cov[H={h},{a},{b}]", ct, cc, tol,
                                abs(ct - cc) <= tol))
    return checks


def global_orientation(n_seeds=100, seed=0, r=255, epsilon=1e-2, tol_deg=5.0, min_rate=0.95,
                       **overrides):
    """Full-image stripe direction of the elementary field versus ``alpha0 + pi/2``."""
    cfg = dict(STRIPE_CONFIG, **overrides)
    params = ElementaryParams(cfg["hurst"], cfg["alpha0"], cfg["alpha"])
    plan = band_plan.select_bands(r, epsilon)
    target = params.alpha0 + 0.5 * math.pi
    errs = []
    for s in range(n_seeds):
        field = tbs.synth_elementary_tb(params, plan, r, seed + s)
        est = structure_tensor_orientation(field)
        errs.append(90.0 if est is None else math.degrees(angle_distance(est, target)))
    errs = np.array(errs)
    rate = float(np.mean(errs <= tol_deg))
    return [Check("global_orientation_pass_rate", rate, 1.0, 1.0 - min_rate, rate >= min_rate)]


def local_orientation(orient="v1", hurst=0.2, alpha=LOCAL_CONFIG["alpha"], window=Window.GAUSS,
                      r=LOCAL_CONFIG["r"], epsilon=LOCAL_CONFIG["epsilon"], seeds=(0,), tol_deg=10.0,
                      min_rate=0.9, size=33):
    """Fraction of ``size x size`` windows whose stripe direction matches the prescription."""
    field_def = parse_orientation(orient) if isinstance(orient, str) else orient
    plan = band_plan.select_bands(r, epsilon)
    alpha0 = field_def.on_grid(r)
    checks = []
    for s in seeds:
        field = tbs.synth_lafbf(field_def, hurst, alpha, window, plan, r, s)
        errs = np.degrees(windowed_orientation_errors(field, alpha0, size=size))
        rate = float(np.mean(errs <= tol_deg))
        checks.append(Check(f"local_orientation[{field_def.describe()},seed={s}]", rate, 1.0,
                            1.0 - min_rate, rate >= min_rate))
    return checks


def hurst_suite(n_seeds=100, seed=0, r=255, epsilon=1e-2, tol=0.05, iso_seeds=5):
    """Hurst estimation on lifted fBm lines and on the isotropic field."""
    est = []
    for s in range(n_seeds):
        line = fbm1d.sample_fbm_line(0.5, r, seed + s).values
        est.append(estimate_hurst(np.repeat(line[:, None], r + 1, axis=1), (1, 0)))
    mean = float(np.mean(est))
    checks = [Check("hurst_lifted_fbm_mean", mean, 0.5, tol, abs(mean - 0.5) <= tol)]
    params = ElementaryParams(0.5, 0.0, math.pi / 2)
    plan = band_plan.select_bands(r, epsilon)
    for s in range(iso_seeds):
        field = tbs.synth_elementary_tb(params, plan, r, seed + s)
        hx, hy = estimate_hurst(field, (1, 0)), estimate_hurst(field, (0, 1))
        checks.append(Check(f"hurst_isotropic_axes_gap[seed={seed + s}]", abs(hx - hy), 0.0, tol,
                            abs(hx - hy) <= tol))
    return checks


def time_tb(r, epsilon=1e-2, orient="v1", hurst=0.2, alpha=LOCAL_CONFIG["alpha"],
            window=Window.GAUSS, seed=0, repeats=1, workers=None):
    """Best-of-``repeats`` phase timings of a turning-band locally anisotropic synthesis."""
    field_def = parse_orientation(orient)
    records = []
    for _ in range(repeats):
        band_plan._select.cache_clear()
        band_plan._candidates.cache_clear()
        t0 = time.perf_counter()
        plan = band_plan.select_bands(r, epsilon)
        t_plan = time.perf_counter() - t0
        timings = {}
        tbs.synth_lafbf(field_def, hurst, alpha, window, plan, r, seed, workers=workers,
                        timings=timings)
        records.append({"plan": t_plan, "lines": timings["lines"],
                        "assembly": timings["assembly"], "total": time.perf_counter() - t0,
                        "n_bands": len(plan)})
    return {key: min(rec[key] for rec in records) for key in records[0]}


def time_cholesky(r, hurst=0.2, seed=0, **cone):
    cfg = dict(STRIPE_CONFIG, **cone)
    params = ElementaryParams(hurst, cfg["alpha0"], cfg["alpha"])
    t0 = time.perf_counter()
    sigma = cholesky_synth.covariance_matrix(params, r)
    t1 = time.perf_counter()
    factor = cholesky_synth.cholesky_factor(sigma)
    t2 = time.perf_counter()
    factor @ np.random.default_rng(seed).standard_normal(factor.shape[0])
    t3 = time.perf_counter()
    return {"covariance": t1 - t0, "factor": t2 - t1, "sample": t3 - t2, "total": t3 - t0}


def scaling_exponent(rs, times) -> float:
    return float(np.polyfit(np.log(rs), np.log(times), 1)[0])


def lookup_comparisons(plan, orientation, support, r):
    """Maximum binary-search comparisons over all pixels of ``orientation`` on the grid."""
    grid = orientation.on_grid(r).ravel()
    worst = 0
    for a0 in grid:
        counter = band_plan.ComparisonCounter()
        band_plan.bands_in_cone(plan, float(a0), support, counter)
        worst = max(worst, counter.count)
    return worst


def comparison_bound(n: int) -> int:
    return 2 * math.ceil(math.log2(n)) + 2
