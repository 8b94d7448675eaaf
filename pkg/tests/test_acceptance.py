"""End-to-end acceptance checks, one per verification claim.

Each test prints a single pass/fail line naming the claim and the measured
quantities, then asserts.  Seeds are fixed, so every number here is
reproducible from a clean checkout.
"""

import time

import numpy as np
import pytest

from curlwave import chartlab, frames, hyperbolic, hypermc, s3
from curlwave.cli import ExperimentConfig, run
from curlwave.fieldlines import (
    asymptotic_hopf,
    circle_in_chart,
    crossing_linking_oracle,
    gauss_linking,
    helicity_integral,
    hopf_fiber,
)
from curlwave.quaternions import haar_sample
from curlwave.seeds import substream


def _verdict(tag: str, ok: bool, detail: str) -> None:
    print(f"{tag}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{tag}: {detail}"


def test_criterion_01_curl_eigenvalues():
    t0 = time.perf_counter()
    worst = 0.0
    for l in (1, 2, 3):
        worst = max(worst, abs(frames.curl_eigenvalue(frames.su2_unit(), l) + 2.0))
        worst = max(worst, abs(frames.curl_eigenvalue(frames.su2_right(), l) - 2.0))
    for lam in (0.25, 1.0, 4.0):
        spec = frames.lambda_fields(lam)
        for l in (1, 2, 3):
            worst = max(worst, abs(frames.curl_eigenvalue(spec, l) + 2.0 / lam))
    dt = time.perf_counter() - t0
    _verdict(
        "curl eigenvalues",
        worst < 1e-12 and dt < 1.0,
        f"max abs error {worst:.3e}, {dt:.3f}s",
    )


def test_criterion_02_yang_mills_residuals():
    t0 = time.perf_counter()
    left = s3.ym_residual(s3.build_frame("left"), n_points=1000, seed=0)
    right = s3.ym_residual(s3.build_frame("right"), n_points=1000, seed=0)
    dt = time.perf_counter() - t0
    _verdict(
        "stationarity residuals",
        left < 1e-8 and right > 0.1 and dt < 10.0,
        f"left {left:.3e} < 1e-8, right {right:.4f} > 0.1, {dt:.2f}s",
    )


def test_criterion_03_helicity_constant_in_lambda():
    vals = {}
    for l in (1, 2, 3):
        vals[("s3", l)] = frames.helicity_density_algebraic(frames.su2_unit(), l)
    for lam in (0.5, 1.0, 2.0, 4.0, 8.0):
        fr = hyperbolic.build_lambda_frame(lam)
        for l in (1, 2, 3):
            vals[(lam, l)] = frames.helicity_density_algebraic(fr.spec, l)
    worst = max(abs(v + 2.0) for v in vals.values())
    spread = max(vals.values()) - min(vals.values())
    exact = all(vals[(lam, l)] == -2.0 for lam in ("s3", 1.0, 4.0) for l in (1, 2, 3))
    _verdict(
        "helicity density",
        worst <= 1e-15 and spread <= 1e-15 and exact,
        f"max |h+2| {worst:.2e} (one ulp), spread {spread:.2e}, exact at square scales",
    )


def test_criterion_04_triple_density_compensation():
    prods = [
        lam * frames.triple_density_algebraic(hyperbolic.build_lambda_frame(lam).spec)
        for lam in (0.5, 1.0, 2.0, 4.0, 8.0)
    ]
    spread = max(prods) - min(prods)
    _verdict(
        "triple wedge compensation",
        spread < 1e-10 and abs(prods[1] - 3.0) < 1e-12,
        f"lambda * density spread {spread:.2e}, value {prods[1]!r}",
    )


def test_criterion_05_rescale_covariance():
    fr = hyperbolic.build_lambda_frame(2.0)
    worst_vol = 0.0
    worst_term2 = 0.0
    for l in (0.5, 2.0, 3.0):
        rep = hyperbolic.rescale_check(fr, l)
        worst_vol = max(worst_vol, abs(rep.volume_ratio - l**3))
        worst_term2 = max(worst_term2, abs(rep.term2_density_ratio - 1.0))
    _verdict(
        "metric rescale covariance",
        worst_vol <= 1e-12 and worst_term2 <= 1e-12,
        f"volume ratio error {worst_vol:.2e}, cubic-term ratio error {worst_term2:.2e}",
    )


def test_criterion_06_sectional_curvatures():
    prof = hyperbolic.sectional_profile(1.0)
    base_err = max(abs(k + 1.0) for k in prof)
    grid = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    horiz = np.array([abs(hyperbolic.sectional_profile(l)[0]) for l in grid])
    slope = hypermc.loglog_fit(grid, horiz).slope
    fd_err = 0.0
    for spec, lam in (
        (frames.su2_unit(), None),
        (frames.lambda_geometry(1.0), 1.0),
        (frames.lambda_geometry(2.0), 2.0),
    ):
        fd = np.asarray(chartlab.fd_sectional_of_spec(spec, lam))
        closed = np.asarray(frames.milnor_curvatures(spec))
        fd_err = max(fd_err, float(np.max(np.abs(fd - closed))))
    _verdict(
        "sectional curvatures",
        base_err <= 1e-10 and abs(slope + 2.0 / 3.0) <= 0.01 and fd_err <= 1e-6,
        f"profile(1) error {base_err:.2e}, horizontal slope {slope:.6f}, "
        f"chart-vs-closed-form {fd_err:.2e}",
    )


def test_criterion_07_linking_quadrature_vs_crossings():
    t0 = time.perf_counter()
    checked = 0
    worst_gap = 0.0
    for k in range(23):
        base = haar_sample(substream(100, k), 2)
        c1, c2 = (hopf_fiber(b, "right") for b in base)
        g = gauss_linking(c1, c2)
        worst_gap = max(worst_gap, abs(g - round(g)))
        assert round(g) == 1 == crossing_linking_oracle(c1, c2)
        checked += 1
    for k in range(23):
        base = haar_sample(substream(200, k), 2)
        c1, c2 = (hopf_fiber(b, "left") for b in base)
        g = gauss_linking(c1, c2)
        worst_gap = max(worst_gap, abs(g - round(g)))
        # projected signed crossings resolve the mirror pair to -1
        assert round(g) == -1 == crossing_linking_oracle(c1, c2)
        checked += 1
    for k in range(4):
        a = circle_in_chart(np.array([0.0, 0.0, -2.0 - 0.3 * k]), 0.3, normal_axis=k % 3)
        b = circle_in_chart(np.array([0.0, 0.0, 2.0 + 0.3 * k]), 0.3)
        g = gauss_linking(a, b)
        worst_gap = max(worst_gap, abs(g - round(g)))
        assert round(g) == 0 == crossing_linking_oracle(a, b)
        checked += 1
    dt = time.perf_counter() - t0
    _verdict(
        "pairwise linking",
        checked == 50 and worst_gap < 1e-3 and dt < 30.0,
        f"{checked} pairs, max quadrature-to-integer gap {worst_gap:.2e}, {dt:.1f}s",
    )


def test_criterion_08_asymptotic_linking_matches_helicity():
    t0 = time.perf_counter()
    frame = s3.build_frame("left")
    pot = frame.leg(1)
    field = lambda x: -2.0 * pot(x)
    target = helicity_integral(pot, field, 20000, seed=0) / s3.VOL_UNIT_SPHERE**2
    est = asymptotic_hopf(field, pot, 500, 4.0 * np.pi, seed=0, workers=8)
    gap = abs(est.estimate - target)
    dt = time.perf_counter() - t0
    _verdict(
        "asymptotic linking vs helicity",
        gap <= 2.0 * est.stderr and est.failures == 0 and dt < 300.0,
        f"estimate {est.estimate:.12f}, target {target:.12f}, "
        f"gap {gap:.2e} <= 2*stderr {2 * est.stderr:.2e}, {dt:.0f}s",
    )


def test_criterion_09_scaling_exponents(tmp_path):
    t0 = time.perf_counter()
    scan = run(
        ExperimentConfig(
            verb="triangle-scan", out_dir=str(tmp_path / "scan"), workers=8
        )
    )
    alpha = run(
        ExperimentConfig(
            verb="alpha-scaling", out_dir=str(tmp_path / "alpha"), workers=8
        )
    )
    dt = time.perf_counter() - t0
    summary = {}
    for line in (tmp_path / "scan" / "triangle-scan_summary.txt").read_text().splitlines():
        key, _, value = line.partition("=")
        summary[key] = value
    slopes = ", ".join(
        f"{k.removeprefix('slope_')} {float(v):.4f}"
        for k, v in sorted(summary.items())
        if k.startswith("slope_")
    )
    _verdict(
        "scaling exponents",
        scan.violations == () and alpha.violations == () and dt < 600.0,
        f"{slopes}, all within windows, {dt:.0f}s",
    )


def test_criterion_10_quintuple_estimator():
    base = haar_sample(substream(300, 0), 5)
    fibers = [hopf_fiber(b, "right") for b in base]
    linked = hypermc.m5_quintuple_details(fibers)
    far = [
        circle_in_chart(np.array([0.0, 0.0, c]), 0.25, normal_axis=i % 3)
        for i, c in enumerate(np.linspace(-3.0, 3.0, 5))
    ]
    unlinked = hypermc.m5_quintuple_details(far)
    mixed = fibers[:4] + [circle_in_chart(np.array([0.0, 0.0, 2.5]), 0.2)]
    part = hypermc.m5_quintuple_details(mixed)
    _verdict(
        "quintuple estimator",
        linked["estimate"] == 10.0 and unlinked["estimate"] == 0.0 and part["estimate"] == 0.0,
        f"fiber quintuple {linked['estimate']!r}, far circles {unlinked['estimate']!r}, "
        f"one unlinked pair {part['estimate']!r}",
    )


def test_criterion_11_worker_count_byte_identity(tmp_path):
    small = dict(n_chords=2000, n_triples=200000, seed=0)
    outs = {}
    for verb, extra in (("triangle-scan", small), ("verify-hyperbolic", {})):
        blobs = []
        for w in (1, 8):
            out = tmp_path / f"{verb}-w{w}"
            run(ExperimentConfig(verb=verb, out_dir=str(out), workers=w, **extra))
            blobs.append((out / f"{verb}.csv").read_bytes())
        outs[verb] = blobs[0] == blobs[1]
    _verdict(
        "worker-count byte identity",
        all(outs.values()),
        ", ".join(f"{v} identical={ok}" for v, ok in outs.items()),
    )
