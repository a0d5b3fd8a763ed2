import math

import numpy as np
import pytest

from latdec import lattices as lat
from latdec import cvp

from util import brute_shortest_sq, coxeter_todd, fam


def test_gram_family_values():
    assert np.array_equal(lat.gram_for_family("A", 2), [[2, 1], [1, 2]])
    assert np.array_equal(lat.gram_for_family("D", 3),
                          [[2, 0, 1], [0, 2, 1], [1, 1, 2]])
    assert np.array_equal(lat.gram_for_family("Z", 4), np.eye(4))
    e8 = lat.gram_for_family("E8-special", 8)
    assert np.array_equal(np.diag(e8), [4] * 8)
    e6 = lat.gram_for_family("E6-quasi", 6)
    assert np.array_equal(np.diag(e6), [3] * 6)
    assert e6[0, 4] == 1.5 and e6[0, 2] == 0.0
    en = lat.gram_for_family("E", 7)
    assert en[0, 1] == 0 and en[0, 2] == 0 and en[1, 2] == 1 and en[0, 3] == 1


def test_gram_family_errors():
    for family, n in [("A", 1), ("D", 2), ("E", 5), ("E", 9),
                      ("E8-special", 7), ("E6-quasi", 7), ("nope", 4)]:
        with pytest.raises(ValueError):
            lat.gram_for_family(family, n)


def test_generator_from_gram():
    assert np.allclose(lat.generator_from_gram(np.eye(5)).matrix, np.eye(5))
    a2 = lat.generator_from_gram(lat.gram_for_family("A", 2))
    assert np.allclose(a2.matrix, [[math.sqrt(2), 0],
                                   [1 / math.sqrt(2), math.sqrt(1.5)]])
    e8 = fam("E8-special", 8)
    assert np.allclose(np.sum(e8.matrix ** 2, axis=1), 4.0)
    with pytest.raises(ValueError):
        lat.generator_from_gram([[1.0, 2.0], [2.0, 1.0]])  # not PD
    with pytest.raises(ValueError):
        lat.generator_from_gram([[1.0, 0.5], [0.0, 1.0]])  # not symmetric


def test_gram_roundtrip_all_families():
    cases = [("A", 2), ("A", 5), ("D", 3), ("D", 6), ("E", 6), ("E", 8),
             ("E8-special", 8), ("E6-quasi", 6), ("Z", 4)]
    for family, n in cases:
        gram = lat.gram_for_family(family, n)
        G = lat.generator_from_gram(gram)
        assert np.max(np.abs(G.matrix @ G.matrix.T - gram)) < 1e-9


def test_generator_matrix_validation():
    with pytest.raises(ValueError):
        lat.GeneratorMatrix([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        lat.GeneratorMatrix([[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError):
        lat.GeneratorMatrix([[np.nan, 0], [0, 1]])


def test_random_mimo_structure_and_determinism():
    G = lat.random_mimo_generator(2, 12345)
    assert G.n == 4
    M, h = G.matrix, 2
    assert np.allclose(M[:h, :h], M[h:, h:])
    assert np.allclose(M[:h, h:], -M[h:, :h])
    assert lat.random_mimo_generator(5, 7).n == 10
    again = lat.random_mimo_generator(2, 12345)
    assert np.array_equal(G.matrix, again.matrix)
    assert G.info["seed"] == 12345 and G.info["redraws"] == 0


def test_lll_identity_and_unimodularity():
    GZ = fam("Z", 4)
    assert np.allclose(lat.lll_reduce(GZ).matrix, np.eye(4))
    rng = np.random.default_rng(0)
    for _ in range(20):
        G = lat.GeneratorMatrix(rng.standard_normal((5, 5)))
        R = lat.lll_reduce(G)
        assert abs(abs(R.det) - abs(G.det)) < 1e-6 * abs(G.det)


def test_lll_finds_shortest_vector_2d():
    G = lat.GeneratorMatrix([[201.0, 37.0], [1648.0, 297.0]])
    best = brute_shortest_sq(G, 50)
    R = lat.lll_reduce(G)
    row_norms = np.sum(R.matrix ** 2, axis=1)
    assert abs(row_norms.min() - best) < 1e-6 * best


def test_lll_conditions_hold():
    # size reduction |mu| <= 1/2 and the Lovasz condition at delta = 0.99
    rng = np.random.default_rng(3)
    for _ in range(10):
        G = lat.lll_reduce(lat.GeneratorMatrix(rng.standard_normal((6, 6))), 0.99)
        B = G.matrix
        n = B.shape[0]
        bs = np.zeros_like(B)
        mu = np.zeros((n, n))
        norms = np.zeros(n)
        for i in range(n):
            bs[i] = B[i]
            for j in range(i):
                mu[i, j] = (B[i] @ bs[j]) / norms[j]
                bs[i] -= mu[i, j] * bs[j]
            norms[i] = bs[i] @ bs[i]
        assert np.max(np.abs(np.tril(mu, -1))) <= 0.5 + 1e-9
        for k in range(1, n):
            assert norms[k] >= (0.99 - mu[k, k - 1] ** 2) * norms[k - 1] - 1e-9


def test_lll_preserves_cvp():
    rng = np.random.default_rng(7)
    G = lat.random_mimo_generator(2, 99)
    R = lat.lll_reduce(G)
    Y = rng.standard_normal((100, 4)) * 2.0
    for y in Y:
        a = cvp.sphere_decode(G, y)
        b = cvp.sphere_decode(R, y)
        assert np.allclose(a.x, b.x, atol=1e-7)
        assert abs(a.dist_sq - b.dist_sq) < 1e-7


def test_lll_delta_validation():
    with pytest.raises(ValueError):
        lat.lll_reduce(fam("Z", 2), 0.2)
    with pytest.raises(ValueError):
        lat.lll_reduce(fam("Z", 2), 1.5)


def test_dual_generator():
    assert np.allclose(lat.dual_generator(fam("Z", 3)).matrix, np.eye(3))
    rng = np.random.default_rng(1)
    for _ in range(10):
        G = lat.GeneratorMatrix(rng.standard_normal((4, 4)) + 2 * np.eye(4))
        D = lat.dual_generator(G)
        assert abs(D.det - 1.0 / G.det) < 1e-9 * abs(1.0 / G.det)
    # the scaled E8 basis: twice the dual Gram is an even integral matrix
    # (the dual lattice is the same lattice shrunk by 2, i.e. self-dual
    # up to scale)
    dg = lat.dual_generator(fam("E8-special", 8)).gram
    assert np.max(np.abs(2 * dg - np.round(2 * dg))) < 1e-9
    assert np.all(np.abs(np.diag(2 * dg) - 2.0) < 1e-9)


def test_minimum_distance():
    assert abs(lat.minimum_distance(fam("Z", 5)) - 1.0) < 1e-12
    assert abs(lat.minimum_distance(fam("A", 2)) - math.sqrt(2)) < 1e-12
    assert abs(lat.minimum_distance(fam("E8-special", 8)) - 2.0) < 1e-9
    # independent small-box check for E8
    assert abs(brute_shortest_sq(fam("E8-special", 8), 1) - 4.0) < 1e-9


def test_relevant_vectors_z2_a2():
    rv = lat.relevant_vectors(fam("Z", 2))
    assert len(rv) == 4
    assert sorted(tuple(np.round(v).astype(int)) for v in rv) == \
        [(-1, 0), (0, -1), (0, 1), (1, 0)]
    rv = lat.relevant_vectors(fam("A", 2))
    assert len(rv) == 6
    assert all(abs(v @ v - 2.0) < 1e-9 for v in rv)


def test_relevant_vectors_random():
    # generic random lattices have 2^(n+1) - 2 relevant vectors
    for seed in (7, 11):
        G = lat.random_real_generator(4, seed)
        assert len(lat.relevant_vectors(G)) == 2 ** 5 - 2
    # the complex MIMO embedding is not generic: multiplication by i is a
    # lattice isometry, which ties the minimizers of 3 of the 15 cosets
    for seed in (7, 11):
        G = lat.random_mimo_generator(2, seed)
        assert len(lat.relevant_vectors(G)) == 2 ** 5 - 2 - 6


def test_relevant_vectors_properties():
    for family, n in [("A", 3), ("D", 4), ("E", 6), ("E8-special", 8)]:
        G = fam(family, n)
        rv = lat.relevant_vectors(G)
        assert len(rv) % 2 == 0
        d = lat.minimum_distance(G)
        norms = np.array([math.sqrt(v @ v) for v in rv])
        assert np.all(norms >= d - 1e-9)
        # eats the first shell exactly for root lattices
        assert len(rv) == lat.count_points_in_sphere(G, d * d * (1 + 1e-9))
        arr = np.array(rv)
        for v in rv:
            assert np.min(np.sum((arr + v) ** 2, axis=1)) < 1e-12  # -v present


def test_count_points_in_sphere():
    assert lat.count_points_in_sphere(fam("Z", 2), 1.0) == 4
    e8 = fam("E8-special", 8)
    assert lat.count_points_in_sphere(e8, 4.0) == 240
    # monotone in the radius
    counts = [lat.count_points_in_sphere(e8, r) for r in (3.9, 4.0, 8.0, 12.0)]
    assert counts == sorted(counts)
    assert counts[0] == 0


def test_count_points_coxeter_todd():
    K12 = coxeter_todd()
    assert abs(K12.volume - 27.0) < 1e-9
    d = lat.minimum_distance(K12)
    assert abs(d - 2.0) < 1e-9
    assert lat.count_points_in_sphere(K12, d * d * (1 + 1e-9)) == 756
    # the reference count 25201 for this sphere includes the origin;
    # this operation excludes it by contract
    assert lat.count_points_in_sphere(K12, 2 * d * d) == 25201 - 1


def test_theta_shells():
    shells = lat.theta_shells(fam("E8-special", 8), 8.0)
    assert [s.count for s in shells] == [240, 2160]
    assert abs(shells[0].radius_sq - 4.0) < 1e-9
    assert abs(shells[1].radius_sq - 8.0) < 1e-9


def test_sigma_from_vnr():
    two_pi_e = 2 * math.pi * math.e
    assert abs(lat.sigma_from_vnr(fam("Z", 6), 1.0) - 1 / two_pi_e) < 1e-15
    assert abs(lat.sigma_from_vnr(fam("E8-special", 8), 1.0)
               - 2 / two_pi_e) < 1e-12
    G = lat.random_mimo_generator(3, 5)
    assert abs(lat.sigma_from_vnr(G, 2.0) * 2
               - lat.sigma_from_vnr(G, 1.0)) < 1e-15
    with pytest.raises(ValueError):
        lat.sigma_from_vnr(G, 0.0)


def test_nominal_coding_gain():
    assert abs(lat.nominal_coding_gain(fam("E8-special", 8)) - 2.0) < 1e-9
    assert abs(lat.nominal_coding_gain(fam("Z", 4)) - 1.0) < 1e-12


def test_budget_override(monkeypatch):
    monkeypatch.setenv("LATDEC_NODE_BUDGET", "3")
    G = lat.GeneratorMatrix(np.random.default_rng(0).standard_normal((6, 6))
                            + 3 * np.eye(6))
    with pytest.raises(lat.BudgetExceededError):
        lat.minimum_distance(G)
