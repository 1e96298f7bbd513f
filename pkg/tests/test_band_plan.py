import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisotex.band_plan import (BandPlan, ComparisonCounter, band_widths, bands_in_cone,
                                candidate_angles, cone_ranges_grid, select_bands)
from anisotex.spectral_model import angle_distance
from anisotex.suites import comparison_bound

EPSILONS = (math.pi / 2, 0.3, 0.1, 0.04, 0.02, 0.01)
# the seam gap can equal epsilon up to rounding (pi/2 exactly for epsilon = pi/2)
GAP_TOL = 1e-12


def linear_scan(plan, alpha0, support):
    return {i for i, t in enumerate(plan.thetas) if angle_distance(t, alpha0) <= support}


def members(ranges):
    return {i for a, b in ranges for i in range(a, b)}


@pytest.mark.parametrize("eps", EPSILONS)
def test_plan_invariants(eps):
    plan = select_bands(255, eps)
    assert math.fsum(plan.widths) == pytest.approx(math.pi, abs=1e-12)
    assert plan.widths.max() <= eps + GAP_TOL
    assert np.all(np.diff(plan.thetas) > 0)
    for b in plan.bands:
        assert b.q >= 1 and math.gcd(abs(b.p), b.q) == 1
        assert b.theta == math.atan2(b.p, b.q)
        assert -math.pi / 2 < b.theta < math.pi / 2


@pytest.mark.parametrize("eps", EPSILONS)
def test_candidate_gaps(eps):
    thetas = np.array([b.theta for b in candidate_angles(eps)])
    assert band_widths(thetas).max() <= eps + GAP_TOL


def test_coarsest_plan():
    plan = select_bands(1, math.pi / 2)
    assert [(b.p, b.q) for b in plan.bands] == [(-1, 1), (1, 1)]
    assert plan.total_cost == 4


def test_plan_size_at_reference_epsilon():
    assert len(select_bands(255, 0.01)) == 383


def test_plan_depends_on_r_only_through_cost_scale():
    a, b = select_bands(16, 0.04), select_bands(255, 0.04)
    assert [(x.p, x.q) for x in a.bands] == [(x.p, x.q) for x in b.bands]
    assert b.total_cost * 16 == a.total_cost * 255


@pytest.mark.parametrize("eps", [0.3, 0.1])
def test_dp_beats_random_feasible_subsets(eps):
    cands = candidate_angles(eps)
    best = select_bands(1, eps).total_cost
    rng = np.random.default_rng(0)
    tried = 0
    for _ in range(3000):
        keep = rng.random(len(cands)) < rng.uniform(0.3, 0.95)
        sub = [c for c, k in zip(cands, keep) if k]
        if len(sub) < 2:
            continue
        if band_widths(np.array([c.theta for c in sub])).max() > eps:
            continue
        tried += 1
        assert sum(c.cost for c in sub) >= best
    assert tried > 10


def test_dp_matches_brute_force_small():
    eps = 0.7
    cands = candidate_angles(eps)
    assert len(cands) <= 16
    best = None
    for mask in range(1, 1 << len(cands)):
        sub = [c for i, c in enumerate(cands) if mask >> i & 1]
        if band_widths(np.array([c.theta for c in sub])).max() <= eps:
            cost = sum(c.cost for c in sub)
            best = cost if best is None else min(best, cost)
    assert select_bands(1, eps).total_cost == best


def test_json_round_trip():
    plan = select_bands(127, 0.02)
    doc = json.loads(plan.to_json())
    assert set(doc) == {"epsilon", "r", "bands"}
    assert set(doc["bands"][0]) == {"p", "q"}
    back = BandPlan.from_json(plan.to_json())
    assert back == plan


def test_from_pq_rejects_unreduced():
    with pytest.raises(ValueError):
        BandPlan.from_pq([(2, 2), (1, 1)], 1.0, 4)


def test_band_widths_validation():
    with pytest.raises(ValueError):
        band_widths([0.2, 0.1])
    with pytest.raises(ValueError):
        band_widths([-math.pi / 2, 0.0])


@pytest.mark.parametrize("eps", [0.0, -1.0, 2.0])
def test_select_rejects_epsilon(eps):
    with pytest.raises(ValueError):
        select_bands(10, eps)


class TestConeLookup:
    def test_against_linear_scan(self):
        rng = np.random.default_rng(2024)
        plans = [select_bands(255, e) for e in (0.01, 0.1)]
        for _ in range(1000):
            plan = plans[int(rng.integers(2))]
            alpha0 = rng.uniform(-math.pi, math.pi)
            support = rng.choice([rng.uniform(0.0, 0.5), rng.uniform(0.0, math.pi / 2)])
            got = members(bands_in_cone(plan, alpha0, support))
            assert got == linear_scan(plan, alpha0, support)

    def test_seam_split(self):
        plan = select_bands(255, 0.05)
        ranges = bands_in_cone(plan, math.pi / 2, 0.2)
        assert len(ranges) == 2
        assert ranges[0][0] == 0 and ranges[1][1] == len(plan)

    def test_full_support(self):
        plan = select_bands(255, 0.1)
        assert bands_in_cone(plan, 0.3, math.pi / 2) == [(0, len(plan))]

    @settings(max_examples=300, deadline=None)
    @given(alpha0=st.floats(-4, 4), support=st.floats(0, 1.6))
    def test_comparison_bound(self, alpha0, support):
        plan = select_bands(255, 0.01)
        counter = ComparisonCounter()
        bands_in_cone(plan, alpha0, support, counter)
        assert counter.count <= comparison_bound(len(plan))

    def test_grid_version_agrees(self):
        plan = select_bands(255, 0.02)
        rng = np.random.default_rng(9)
        a0 = rng.uniform(-2, 2, 500)
        for support in (0.05, 0.3, 1.0):
            start, stop, wrapped = cone_ranges_grid(plan.thetas, a0, support)
            for k in range(len(a0)):
                if wrapped[k]:
                    got = set(range(0, stop[k])) | set(range(start[k], len(plan)))
                else:
                    got = set(range(start[k], stop[k]))
                assert got == members(bands_in_cone(plan, float(a0[k]), support))
