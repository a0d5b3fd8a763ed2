import math

import numpy as np
import pytest

from latdec import lattices as lat
from latdec import vr

from util import fam


def test_wilson_interval():
    lo, hi = vr.wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = vr.wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert vr.wilson_interval(0, 0) == (0.0, 1.0)


def test_vr_basis_has_zero_ratio():
    rep = vr.estimate_nonvr_volume(fam("A", 2), 50_000, seed=1)
    assert rep.vol_ratio == 0.0
    assert rep.hits == 0
    assert rep.d_oc_sq_over_rho_sq is None
    assert rep.verdict() == "VR-consistent"


def test_e6_quasi_numbers():
    rep = vr.estimate_nonvr_volume(fam("E6-quasi", 6), 300_000, seed=2)
    assert 1.5e-3 < rep.vol_ratio < 3.5e-3
    assert rep.ci[0] < rep.vol_ratio < rep.ci[1]
    assert 1.3 < rep.d_oc_sq_over_rho_sq < 2.0
    assert rep.d_oc_sq_over_rho_sq >= 1.0  # sphere-packing bound
    assert rep.verdict() == "quasi-VR"


def test_worker_sharding_is_deterministic():
    G = fam("E6-quasi", 6)
    a = vr.estimate_nonvr_volume(G, 60_000, seed=3, workers=1, shard_size=20_000)
    b = vr.estimate_nonvr_volume(G, 60_000, seed=3, workers=3, shard_size=20_000)
    assert a == b


def test_not_quasi_vr_verdict():
    skew = lat.GeneratorMatrix([[0.5, 0.0], [1.0, 2.0]])
    rep = vr.estimate_nonvr_volume(skew, 30_000, seed=8)
    assert rep.vol_ratio >= 1e-2
    assert rep.verdict() == "not quasi-VR"


def test_verify_vr_interior():
    ok, witness = vr.verify_vr_interior(fam("Z", 3), 20_000, seed=4)
    assert ok and witness is None
    ok, witness = vr.verify_vr_interior(fam("E8-special", 8), 30_000, seed=5)
    assert ok and witness is None
    # skewed 2-d basis: some interior points decode outside the corners
    skew = lat.GeneratorMatrix([[0.5, 0.0], [1.0, 2.0]])
    ok, witness = vr.verify_vr_interior(skew, 20_000, seed=6)
    assert not ok
    from latdec import cvp
    z = cvp.sphere_decode(skew, witness).z
    assert np.any((z < 0) | (z > 1))


def test_pe_union_bound_empty_below_min():
    G = fam("E8-special", 8)
    assert vr.pe_union_bound(G, 1.0, 3.9) == 0.0


def test_pe_union_bound_z2_hand_enumeration():
    # Z^2 shells: 4 points at norm 1 and 4 at norm 2, so the truncated
    # bound is 2 e^(-1/(8 s^2)) + 2 e^(-2/(8 s^2))
    G = fam("Z", 2)
    s2 = lat.sigma_from_vnr(G, 1.0)
    assert abs(s2 - 1 / (2 * math.pi * math.e)) < 1e-15
    expect = 2 * math.exp(-1 / (8 * s2)) + 2 * math.exp(-2 / (8 * s2))
    assert abs(vr.pe_union_bound(G, 1.0, 2.0) - expect) < 1e-12 * expect


def test_pe_union_bound_asymptotics_e8():
    G = fam("E8-special", 8)
    d2 = lat.minimum_distance(G) ** 2
    tau = lat.count_points_in_sphere(G, d2 * (1 + 1e-9))
    gamma = lat.nominal_coding_gain(G)
    ratios = []
    for Delta in (2.0, 4.0, 8.0):
        ub = vr.pe_union_bound(G, Delta, 2 * d2)
        asym = vr.asymptotic_union_bound(tau, gamma, Delta)
        ratios.append(ub / asym)
        assert 0.5 <= ub / asym <= 2.0
    assert ratios[0] > ratios[1] >= ratios[2]  # tightens with Delta
    assert abs(ratios[2] - 1.0) < 1e-6


def test_pe_union_bound_monotonicity():
    G = fam("E8-special", 8)
    bounds = [vr.pe_union_bound(G, d, 8.0) for d in (1.0, 2.0, 4.0, 8.0)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))
    caps = [vr.pe_union_bound(G, 2.0, c) for c in (4.0, 8.0, 12.0, 16.0)]
    assert all(a <= b for a, b in zip(caps, caps[1:]))


def test_lemma1_bound():
    assert vr.lemma1_bound(0.5, 0.0, 1.0, 2.0, 4.0, 8) == 0.5
    # quasi-reduced E6 numbers: escape term about 1e-4 of the leading
    # union-bound term at Delta = 1
    G = fam("E6-quasi", 6)
    gamma = lat.nominal_coding_gain(G)
    d2 = lat.minimum_distance(G) ** 2
    tau = lat.count_points_in_sphere(G, d2 * (1 + 1e-9))
    assert tau == 72
    pe_ub = vr.asymptotic_union_bound(tau, gamma, 1.0)
    total = vr.lemma1_bound(pe_ub, 2.47e-3, 1.60, gamma, 1.0, 6)
    ratio = (total - pe_ub) / pe_ub
    assert 0.5e-4 < ratio < 3e-4
    # monotone decreasing in the O-to-corner distance
    hi = vr.lemma1_bound(pe_ub, 2.47e-3, 3.20, gamma, 1.0, 6)
    assert hi < total
    assert total >= pe_ub and hi >= pe_ub


def test_facet_distance():
    assert abs(vr.facet_distance(2.0, 2.0, 2.0) - 1.0) < 1e-15
    assert abs(vr.facet_distance(2.0, 4.0, 4.0) - 0.5) < 1e-15
    assert abs(vr.facet_distance(3.7, 1.0, 1.0) - 3.7) < 1e-15
    with pytest.raises(ValueError):
        vr.facet_distance(0.0, 1.0, 1.0)
