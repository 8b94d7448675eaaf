"""Kinematic chord sampling, crossing counts, and scaling fits."""

import numpy as np
import pytest

from curlwave import hypermc as hm
from curlwave.errors import (
    EpsilonTooLarge,
    ExtrapolationUnstable,
    NonPositiveLambda,
    RadiusTooSmall,
)
from curlwave.fieldlines import circle_in_chart, hopf_fiber
from curlwave.quaternions import haar_sample

K1 = -1.0


def _sample_chords(n, rr, seed):
    rng = np.random.default_rng(seed)
    return [hm.sample_geodesic(K1, rr, rng) for _ in range(n)]


def test_lambda_to_curvature():
    assert hm.lambda_to_curvature(1.0) == -1.0
    assert np.isclose(hm.lambda_to_curvature(8.0), -0.25, atol=1e-15)
    with pytest.raises(NonPositiveLambda):
        hm.lambda_to_curvature(0.0)


def test_disk_geometry_closed_forms():
    # rho = 2, rr = 1.5
    assert np.isclose(hm.disk_perimeter(-0.25, 3.0), 2 * np.pi * 2 * np.sinh(1.5))
    assert np.isclose(hm.disk_area(-0.25, 3.0), 2 * np.pi * 4 * (np.cosh(1.5) - 1))


def test_chord_invariants():
    rng = np.random.default_rng(0)
    for _ in range(200):
        c = hm.sample_geodesic(K1, 3.0, rng)
        assert c.uhp_residual() < 1e-9
        ends = c.endpoints()
        assert np.allclose(ends[:, 0], np.cosh(3.0), atol=1e-9)
        assert np.isclose(hm.mink_dot(c.normal, c.normal), 1.0, atol=1e-12)
        assert np.isclose(hm.mink_dot(c.base, c.base), -1.0, atol=1e-12)
        assert np.isclose(hm.mink_dot(c.tangent, c.tangent), 1.0, atol=1e-12)
        assert abs(hm.mink_dot(c.base, c.tangent)) < 1e-12
        assert abs(hm.mink_dot(c.normal, c.base)) < 1e-12
        assert abs(hm.mink_dot(c.normal, c.tangent)) < 1e-12
        assert 0.0 <= c.foot_distance < 3.0


def test_chord_from_foot_fields():
    c = hm.chord_from_foot(K1, 3.0, 0.7, 1.2)
    assert c.foot_distance == 0.7
    assert c.foot_direction == 1.2
    assert np.isclose(c.half_length, np.arccosh(np.cosh(3.0) / np.cosh(0.7)))
    assert np.allclose(c.endpoints()[:, 0], np.cosh(3.0), atol=1e-12)
    with pytest.raises(ValueError):
        hm.chord_from_foot(K1, 3.0, 3.0, 0.0)


def test_uhp_descriptor_vertical_and_circle():
    kind, params = hm.chord_from_foot(K1, 3.0, 0.0, 0.0).uhp_descriptor()
    assert kind == "vertical"
    assert abs(params[0]) < 1e-12
    kind, params = hm.chord_from_foot(K1, 3.0, 0.5, 1.0).uhp_descriptor()
    assert kind == "circle"
    assert params[1] > 0


def test_half_disk_fraction():
    assert hm.half_disk_fraction(3.0) == np.sinh(1.5) / np.sinh(3.0)
    chords = _sample_chords(4000, 3.0, 4)
    hits = sum(c.foot_distance < 1.5 for c in chords)
    # chord_meets_disk agrees with the foot-distance test (rho = 1 here)
    assert hits == sum(hm.chord_meets_disk(c, 1.5) for c in chords)
    p = hm.half_disk_fraction(3.0)
    assert abs(hits / 4000 - p) < 3 * np.sqrt(p * (1 - p) / 4000)


def test_crossing_predicate_matches_flag_matrix():
    chords = _sample_chords(300, 3.0, 8)
    normals = np.stack([c.normal for c in chords])
    flags = hm._pair_flag_matrix(normals, 3.0, 1e-12)
    for i in range(300):
        for j in range(i + 1, 300):
            hit = hm.chords_cross_inside(chords[i], chords[j])
            assert hit == hm.chords_cross_inside(chords[j], chords[i])
            assert hit == bool(flags[i, j]) == bool(flags[j, i])


def test_pair_row_counts_match_flag_matrix():
    rng = np.random.default_rng(6)
    normals = hm._sample_normals(3.0, 1000, rng)["normal"]
    counts = hm._pair_row_counts(normals, 3.0)
    flags = hm._pair_flag_matrix(normals, 3.0, 1e-12)
    assert np.array_equal(counts, flags.sum(axis=1))


def test_exact_triangle_count_vs_independent_oracle():
    chords = _sample_chords(400, 3.0, 12)
    normals = np.stack([c.normal for c in chords])
    eps = 0.3
    n = len(chords)
    mine = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if not hm.chords_cross_inside(chords[i], chords[j]):
                continue
            kappa = float(hm.mink_dot(chords[i].normal, chords[j].normal))
            if np.arccos(abs(kappa)) >= eps:
                mine[i, j] = mine[j, i] = True
    m = mine.astype(np.int64)
    oracle = int(np.einsum("ij,jk,ki->", m, m, m)) // 6
    assert hm.exact_triangle_count(normals, 3.0, eps) == oracle


def test_triple_counts_exact_path_matches_direct_count():
    counts, total, info = hm._triple_counts(
        K1, 3.0, 1000, 12, np.array([0.3]), 10**9, 1
    )
    assert info["exact"]
    assert total == 1000 * 999 * 998 // 6
    # replay the sampling stream and count from scratch
    rng = np.random.default_rng(12)
    normals = hm._sample_normals(3.0, 1000, rng)["normal"]
    assert np.array_equal(normals, info["normals"])
    assert counts[0] == hm.exact_triangle_count(normals, 3.0, 0.3)


def test_subsampled_min_angles_match_python_oracle():
    rng = np.random.default_rng(14)
    normals = hm._sample_normals(3.0, 1300, rng)["normal"]
    idx = hm._sample_triples(1300, 2000, rng)
    angles = hm._triple_min_angles(normals, 3.0, idx)
    ch = np.cosh(3.0)
    for row, got in zip(idx, angles):
        kappas = []
        ok = True
        for u, v in ((0, 1), (0, 2), (1, 2)):
            kap = float(hm.mink_dot(normals[row[u]], normals[row[v]]))
            if abs(kap) >= 1.0:
                ok = False
                break
            p = hm.mink_cross(normals[row[u]], normals[row[v]])
            if abs(p[0]) / np.sqrt(1 - kap**2) >= ch:
                ok = False
                break
            kappas.append(abs(kap))
        want = np.arccos(max(kappas)) if ok else -1.0
        assert np.isclose(got, want, atol=1e-12)


def test_triangle_density_nested_in_cutoff():
    loose = hm.triangle_density(K1, 3.0, 1500, 0.4, 3, n_triples=150_000)[0]
    mid = hm.triangle_density(K1, 3.0, 1500, 0.25, 3, n_triples=150_000)[0]
    tight = hm.triangle_density(K1, 3.0, 1500, 0.1, 3, n_triples=150_000)[0]
    # one seed, nested events: monotone without any stderr allowance
    assert loose <= mid <= tight


def test_cutoff_gates():
    with pytest.raises(EpsilonTooLarge):
        hm.triangle_density(K1, 3.0, 1500, 0.5 * np.pi, 0)
    with pytest.raises(EpsilonTooLarge):
        hm.triangle_bulk_density(K1, 3.0, 1500, 1.6, 0)
    near = hm.triangle_density(K1, 3.0, 1200, 0.5 * np.pi - 1e-9, 0)[0]
    assert near == 0.0
    with pytest.raises(ValueError):
        hm.triangle_density(K1, 3.0, 900, 0.3, 0)


def test_pair_density_radius_doubling():
    d3, e3 = hm.pair_intersection_density(K1, 3.0, 6000, 41)
    d6, e6 = hm.pair_intersection_density(K1, 6.0, 6000, 42)
    assert abs(d3 - d6) <= 2 * np.hypot(e3, e6)
    assert np.isclose(d3, 2 * np.pi, rtol=0.05)


def test_pair_density_seed_stability():
    d1, e1 = hm.pair_intersection_density(K1, 3.0, 6000, 5)
    d2, e2 = hm.pair_intersection_density(K1, 3.0, 6000, 77)
    assert abs(d1 - d2) <= 3 * np.hypot(e1, e2)


def test_triangle_bulk_density_radius_doubling():
    def replicate_mean(radius):
        vals = [
            hm.triangle_bulk_density(K1, radius, 1100, 0.3, s)[0]
            for s in range(200, 208)
        ]
        v = np.asarray(vals)
        return v.mean(), v.std(ddof=1) / np.sqrt(v.size)

    m4, s4 = replicate_mean(4.0)
    m8, s8 = replicate_mean(8.0)
    assert abs(m4 - m8) <= 2 * np.hypot(s4, s8)


def test_worker_count_exact_on_subsample_path():
    one = hm.triangle_density(K1, 3.0, 1400, 0.3, 5, n_triples=150_000, workers=1)
    four = hm.triangle_density(K1, 3.0, 1400, 0.3, 5, n_triples=150_000, workers=4)
    assert one == four


def test_epsilon_limit_scan():
    fit = hm.epsilon_limit_scan(
        K1, 3.0, 2000, (0.4, 0.3, 0.2, 0.15, 0.1), 7, n_triples=300_000
    )
    assert fit.intercept > 0
    assert fit.metadata["total"] > 0
    counts = np.asarray(fit.metadata["counts"])
    assert np.all(np.diff(counts) >= 0)
    assert np.all(np.diff(fit.y) >= 0)
    with pytest.raises(ExtrapolationUnstable):
        hm.epsilon_limit_scan(K1, 3.0, 2000, (0.4, 0.3, 0.2), 7)
    with pytest.raises(ExtrapolationUnstable):
        hm.epsilon_limit_scan(K1, 3.0, 2000, (0.1, 0.15, 0.2, 0.3), 7)
    with pytest.raises(EpsilonTooLarge):
        hm.epsilon_limit_scan(K1, 3.0, 2000, (1.6, 0.3, 0.2, 0.1), 7)


def test_loglog_fit_exact_power_law():
    x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    fit = hm.loglog_fit(x, 3.0 * x**-2.0, claimed=-2.0)
    assert np.isclose(fit.slope, -2.0, atol=1e-12)
    assert np.isclose(fit.intercept, np.log(3.0), atol=1e-12)
    assert fit.consistent()
    with pytest.raises(ExtrapolationUnstable):
        hm.loglog_fit(x, np.array([1.0, 2.0, 0.0, 4.0, 5.0]))
    with pytest.raises(ValueError):
        hm.loglog_fit(x[:1], x[:1])


def test_consistent_window_semantics():
    fit = hm.loglog_fit(
        np.array([1.0, 2.0, 4.0]), np.array([1.0, 0.81, 0.66]), claimed=-1.0 / 3.0
    )
    assert abs(fit.slope + 1.0 / 3.0) > fit.half_width
    assert not fit.consistent()
    assert fit.consistent(0.2)


def test_parallelism_angle_closed_form_vs_shooting():
    for rr in (5.0, 8.0, 12.0):
        shot = hm.parallelism_angle_shooting(K1, rr, 0.7)
        assert abs(shot - 2.0 * np.arctan(np.exp(-rr))) < 1e-10
        ratio = hm.parallelism_ratio(K1, rr, 0.7)
        assert np.isclose(
            ratio, 2.0 * np.arctan(np.exp(-rr)) / hm.disk_perimeter(K1, rr)
        )
        # rotational symmetry: position on the circle is immaterial
        assert ratio == hm.parallelism_ratio(K1, rr, 2.9)
    with pytest.raises(RadiusTooSmall):
        hm.parallelism_ratio(K1, 4.9, 0.0)
    with pytest.raises(RadiusTooSmall):
        hm.parallelism_angle_shooting(K1, 4.9, 0.0)


def test_parallelism_ratio_scaling_exponent():
    grid = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    vals = []
    for lam in grid:
        K = hm.lambda_to_curvature(lam)
        rho = 1.0 / np.sqrt(-K)
        vals.append(hm.parallelism_ratio(K, 5.0 * rho, 0.0))
    fit = hm.loglog_fit(grid, np.asarray(vals), claimed=-1.0 / 3.0)
    assert abs(fit.slope + 1.0 / 3.0) < 1e-12


def test_alpha_scaling_small_run():
    fit = hm.alpha_scaling(
        (1.0, 2.0, 4.0, 8.0, 16.0), {"n_chords": 3000, "n_triples": 200_000}, 12
    )
    assert fit.claimed == -1.0 / 3.0
    assert fit.consistent(0.12)
    assert fit.metadata["balance"] == "direct"
    assert fit.metadata["kolmogorov_field"] == -5.0 / 3.0
    assert fit.metadata["kolmogorov_flow"] == -7.0 / 6.0


def test_alpha_scaling_grid_gates():
    with pytest.raises(ValueError):
        hm.alpha_scaling((1.0, 2.0, 4.0, 8.0))
    with pytest.raises(ValueError):
        hm.alpha_scaling((1.0, 2.0, 3.0, 4.0, 5.0))
    with pytest.raises(NonPositiveLambda):
        hm.alpha_scaling((-1.0, 2.0, 4.0, 8.0, 16.0))


def test_m5_fiber_quintuple():
    base = haar_sample(np.random.default_rng(1), 5)
    fibers = [hopf_fiber(b, "right") for b in base]
    out = hm.m5_quintuple_details(fibers)
    assert out["triangles"] == 10
    assert out["linking_product"] == 1
    assert out["estimate"] == 10.0
    assert np.all(out["linking"][~np.eye(5, dtype=bool)] == 1)


def test_m5_far_circles_and_mixed():
    centers = np.linspace(-3.0, 3.0, 5)
    far = [
        circle_in_chart(np.array([0.0, 0.0, c]), 0.25, normal_axis=i % 3)
        for i, c in enumerate(centers)
    ]
    out = hm.m5_quintuple_details(far)
    assert out["estimate"] == 0.0
    base = haar_sample(np.random.default_rng(2), 4)
    mixed = [hopf_fiber(b, "right") for b in base]
    mixed.append(circle_in_chart(np.array([0.0, 0.0, 2.5]), 0.2))
    out = hm.m5_quintuple_details(mixed)
    assert out["linking_product"] == 0
    assert out["estimate"] == 0.0
    with pytest.raises(ValueError):
        hm.m5_quintuple_details(mixed[:4])


def test_collect_triangle_events():
    events = hm.collect_triangle_events(K1, 3.0, 2000, 0.3, 5, max_events=16)
    assert 0 < len(events) <= 16
    for ev in events:
        assert ev.min_angle >= 0.3
        assert ev.min_angle == min(ev.angles)
        assert ev.points.shape == (3, 2)
        assert np.all(np.isfinite(ev.points))
        assert np.all(ev.points[:, 1] > 0)
        assert len(set(ev.chord_ids)) == 3


def test_sample_geodesic_seed_forms():
    a = hm.sample_geodesic(K1, 3.0, 19)
    b = hm.sample_geodesic(K1, 3.0, np.random.default_rng(19))
    assert np.array_equal(a.normal, b.normal)
    assert np.array_equal(a.base, b.base)
    assert a.foot_distance == b.foot_distance
