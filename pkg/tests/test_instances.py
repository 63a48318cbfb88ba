"""Seeded test-instance generators and the shortest-path closure."""

import numpy as np
import pytest
from scipy.sparse.csgraph import floyd_warshall

from metric_union import (InputError, distortion_of, distort_sides,
                          pairwise_distances, sample_glue_instance, stream,
                          union_instance)


def test_closure_matches_scipy():
    from metric_union import shortest_path_closure
    rng = stream(1, "test.closure")
    for _ in range(5):
        n = int(rng.integers(3, 15))
        w = rng.uniform(0.5, 3.0, size=(n, n))
        w = 0.5 * (w + w.T)
        np.fill_diagonal(w, 0.0)
        ours = shortest_path_closure(w)
        ref = floyd_warshall(w, directed=False)
        np.testing.assert_allclose(ours, ref, atol=1e-12)


def test_union_instance_sides_are_exact():
    inst = union_instance(14, 11, 3, 5, seed=2)
    X, P = inst.space, inst.partition
    assert X.n == 25
    # the coordinates realize each side of the metric exactly
    np.testing.assert_allclose(
        pairwise_distances(inst.phi_a), X.sub(P.idx_a), atol=1e-12)
    np.testing.assert_allclose(
        pairwise_distances(inst.phi_b), X.sub(P.idx_b), atol=1e-12)
    assert distortion_of(X, inst.phi_a, subset=P.idx_a).distortion \
        == pytest.approx(1.0, abs=1e-9)


def test_union_instance_cross_distances_dominate():
    # cross weights are drawn at side-diameter scale and cannot shorten
    # within-side paths
    inst = union_instance(10, 12, 2, 2, seed=3)
    X, P = inst.space, inst.partition
    only_a = np.setdiff1d(P.idx_a, P.idx_b)
    only_b = np.setdiff1d(P.idx_b, P.idx_a)
    cross = X.dist[np.ix_(only_a, only_b)]
    side_max = max(X.sub(P.idx_a).max(), X.sub(P.idx_b).max())
    assert cross.min() >= side_max - 1e-12


def test_union_instance_overlap_points_coincide():
    inst = union_instance(9, 8, 2, 4, seed=4, overlap=3)
    P = inst.partition
    np.testing.assert_array_equal(P.overlap, [0, 1, 2])
    assert inst.space.n == 9 + 8 - 3
    pos_b = {int(v): k for k, v in enumerate(P.idx_b)}
    for k in range(3):
        # a shared point sits at distance zero from the other side
        assert P.r_a[k] == 0.0
        assert P.r_b[pos_b[k]] == 0.0


def test_union_instance_validation():
    with pytest.raises(InputError):
        union_instance(0, 5, 2, 2, seed=0)
    with pytest.raises(InputError):
        union_instance(5, 5, 2, 2, seed=0, overlap=6)


def test_union_instance_deterministic():
    a = union_instance(8, 9, 2, 3, seed=11)
    b = union_instance(8, 9, 2, 3, seed=11)
    np.testing.assert_array_equal(a.space.dist, b.space.dist)
    np.testing.assert_array_equal(a.phi_b.points, b.phi_b.points)
    c = union_instance(8, 9, 2, 3, seed=12)
    assert not np.array_equal(a.space.dist, c.space.dist)


def test_distort_sides_bounds_measured_distortion():
    inst = union_instance(12, 10, 3, 3, seed=5)
    for da, db in [(1.5, 3.0), (2.0, 2.0)]:
        scaled = distort_sides(inst, da, db)
        rep_a = distortion_of(scaled.space, scaled.phi_a,
                              subset=scaled.partition.idx_a)
        rep_b = distortion_of(scaled.space, scaled.phi_b,
                              subset=scaled.partition.idx_b)
        # stretching one coordinate never contracts and stays below the
        # nominal factor
        assert rep_a.contraction <= 1.0 + 1e-9
        assert rep_a.expansion <= da * (1.0 + 1e-9)
        assert rep_b.expansion <= db * (1.0 + 1e-9)
        assert rep_a.distortion <= da * (1.0 + 1e-9)
    with pytest.raises(InputError):
        distort_sides(inst, 0.9, 2.0)


def test_sample_glue_instance_shapes_and_normalization():
    G = sample_glue_instance(5, 7, 4, 2, 3, seed=6)
    assert G.u_points.m == 12 and G.v_points.m == 9
    assert G.n_pairs == 5
    # pairing is a bijection onto b_idx
    np.testing.assert_array_equal(np.sort(G.pairing), G.b_idx)
    assert G.d_f >= 1.0
    # stored coordinates are already normalized: pairing never contracts
    du = pairwise_distances(G.u_points.points[G.a_idx])
    dv = pairwise_distances(G.v_points.points[G.pairing])
    iu, ju = np.triu_indices(5, k=1)
    ratios = dv[iu, ju] / du[iu, ju]
    assert ratios.min() >= 1.0 - 1e-12
    assert ratios.max() <= G.d_f * (1.0 + 1e-12)


def test_sample_glue_instance_zero_wobble_is_isometric():
    G = sample_glue_instance(6, 2, 2, 3, 5, seed=7, wobble=0.0)
    assert G.d_f == pytest.approx(1.0, abs=1e-9)


def test_sample_glue_instance_validation():
    with pytest.raises(InputError):
        sample_glue_instance(0, 1, 1, 2, 2, seed=0)
    with pytest.raises(InputError):
        sample_glue_instance(3, -1, 0, 2, 2, seed=0)
