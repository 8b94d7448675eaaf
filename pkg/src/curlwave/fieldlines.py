"""Field-line tracing, curve closure, and linking numbers on the 3-sphere.

Curves live on a radius-R sphere in quaternion space.  Integration runs in
the embedding with per-step renormalization; chart coordinates and ids are
stored alongside, per the two-chart atlas.  Linking numbers come from two
independent routes: a per-segment-pair solid-angle quadrature (exact for
polylines) and a signed-crossing count on a generic projection.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ChartEscape,
    ClosureFailures,
    CurlwaveError,
    CurvesTooClose,
    DegenerateProjection,
    GapTooLarge,
    QuadratureUnderflow,
    StepTooLarge,
)
from .quaternions import IMAG_UNITS, haar_sample, qmul, slerp
from .s3 import (
    VOL_UNIT_SPHERE,
    chart_embed,
    chart_of,
    chart_point,
    conformal_factor,
    curl_field,
    field_in_chart,
    helicity_density,
)
from .seeds import fixed_chunks, ordered_map, substream

MAX_STEP = 1e-2
CLOSURE_TOL = 1e-6
MIN_SEPARATION = 1e-4


# ---------------------------------------------------------------------------
# Field lines.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldLine:
    """Polyline on the sphere with chart bookkeeping.

    points are chart coordinates, charts the per-point chart id, embedding
    the 4-space positions.  For closed lines the first and last embedded
    points coincide to the closure tolerance.
    """

    points: np.ndarray
    charts: np.ndarray
    embedding: np.ndarray
    closed: bool
    period_or_T: float
    h: float
    step_bound: float
    drift: float = 0.0
    renorms: int = 0
    radius: float = 1.0

    @classmethod
    def from_embedding(
        cls,
        xs: np.ndarray,
        closed: bool,
        period_or_T: float = 0.0,
        h: float = 0.0,
        drift: float = 0.0,
        renorms: int = 0,
        radius: float = 1.0,
    ) -> "FieldLine":
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if not np.isfinite(xs).all():
            raise ChartEscape("non-finite curve point")
        charts = chart_of(xs, radius)
        pts = np.empty((xs.shape[0], 3))
        for ch in (0, 1):
            idx = np.nonzero(charts == ch)[0]
            if idx.size:
                pts[idx] = chart_point(xs[idx], ch, radius)
        if xs.shape[0] > 1:
            step_bound = float(np.max(np.linalg.norm(np.diff(xs, axis=0), axis=1)))
        else:
            step_bound = 0.0
        return cls(pts, charts, xs, closed, period_or_T, h, step_bound, drift, renorms, radius)

    def gap(self) -> float:
        return float(np.linalg.norm(self.embedding[-1] - self.embedding[0]))

    def diameter(self) -> float:
        return _diameter(self.embedding)

    def length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.embedding, axis=0), axis=1)))


def _diameter(xs: np.ndarray) -> float:
    best = 0.0
    for lo, hi in fixed_chunks(xs.shape[0], 512):
        d = np.linalg.norm(xs[lo:hi, None, :] - xs[None, :, :], axis=-1)
        best = max(best, float(np.max(d)))
    return best


def _rk4_step(field: Callable, y: np.ndarray, h: float) -> np.ndarray:
    k1 = field(y)
    k2 = field(y + 0.5 * h * k1)
    k3 = field(y + 0.5 * h * k2)
    k4 = field(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def trace_field_line(
    field: Callable,
    x0: np.ndarray,
    T: float,
    h: float = 0.01,
    radius: float = 1.0,
    detect_period: bool = True,
) -> FieldLine:
    """Fixed-step 4th-order trace of the field through x0 for time T.

    The state is renormalized to the sphere after every step; the maximum
    pre-renormalization radial error is logged as drift.  With
    detect_period=True the trace stops at the first return to the transverse
    hyperplane through x0 within the closure tolerance and marks the line
    closed.
    """
    if h > MAX_STEP or h <= 0:
        raise StepTooLarge(f"step must lie in (0, {MAX_STEP}], got {h}")
    if T <= 0:
        raise ValueError(f"trace time must be positive, got {T}")
    x0 = np.asarray(x0, dtype=float)
    x0 = radius * x0 / np.linalg.norm(x0)
    f0 = np.asarray(field(x0), dtype=float)
    speed0 = float(np.linalg.norm(f0))
    if speed0 < 1e-13:
        return FieldLine.from_embedding(x0[None, :], closed=False, period_or_T=0.0, h=h, radius=radius)
    normal = f0 / speed0

    n_steps = int(np.ceil(T / h))
    out = [x0]
    drift = 0.0
    renorms = 0
    max_speed = speed0
    y = x0
    s_prev = 0.0
    closed = False
    period = float(T)
    for k in range(n_steps):
        y_prev = y
        y = _rk4_step(field, y, h)
        r = float(np.linalg.norm(y))
        drift = max(drift, abs(r - radius))
        y = radius * y / r
        renorms += 1
        max_speed = max(max_speed, float(np.linalg.norm(np.asarray(field(y), dtype=float))))
        s = float(np.dot(y - x0, normal))
        near = float(np.linalg.norm(y - x0)) < 0.3 * radius
        if detect_period and k >= 2 and s_prev < 0.0 <= s and near:
            landing, tau = _refine_crossing(field, y_prev, x0, normal, h, radius)
            if float(np.linalg.norm(landing - x0)) <= CLOSURE_TOL * radius:
                out.append(landing)
                closed = True
                period = (k) * h + tau
                break
        out.append(y)
        s_prev = s
    xs = np.stack(out, axis=0)
    if not np.isfinite(xs).all():
        raise ChartEscape("trace left both charts")
    return FieldLine.from_embedding(
        xs,
        closed=closed,
        period_or_T=period if closed else float(T),
        h=h,
        drift=drift,
        renorms=renorms,
        radius=radius,
    )


def _refine_crossing(
    field: Callable,
    y_prev: np.ndarray,
    x0: np.ndarray,
    normal: np.ndarray,
    h: float,
    radius: float,
) -> tuple[np.ndarray, float]:
    """Bisect the sub-step time at which the trace crosses the section plane."""

    def s_at(tau: float) -> tuple[float, np.ndarray]:
        z = _rk4_step(field, y_prev, tau)
        z = radius * z / np.linalg.norm(z)
        return float(np.dot(z - x0, normal)), z

    lo, hi = 0.0, h
    s_hi, z_hi = s_at(hi)
    if s_hi < 0:
        return z_hi, hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        s_mid, z_mid = s_at(mid)
        if s_mid < 0.0:
            lo = mid
        else:
            hi, s_hi, z_hi = mid, s_mid, z_mid
        if hi - lo < 1e-16:
            break
    return z_hi, hi


def trace_batch(
    field: Callable, x0s: np.ndarray, T: float, h: float = 0.01, radius: float = 1.0
) -> tuple[np.ndarray, float]:
    """Trace many starting points at once; returns (paths, max drift).

    paths has shape (n, steps+1, 4); no period detection is attempted.
    """
    if h > MAX_STEP or h <= 0:
        raise StepTooLarge(f"step must lie in (0, {MAX_STEP}], got {h}")
    if T <= 0:
        raise ValueError(f"trace time must be positive, got {T}")
    y = np.atleast_2d(np.asarray(x0s, dtype=float))
    y = radius * y / np.linalg.norm(y, axis=1, keepdims=True)
    n_steps = int(np.ceil(T / h))
    paths = np.empty((y.shape[0], n_steps + 1, 4))
    paths[:, 0] = y
    drift = 0.0
    for k in range(n_steps):
        y = _rk4_step(field, y, h)
        r = np.linalg.norm(y, axis=1, keepdims=True)
        drift = max(drift, float(np.max(np.abs(r - radius))))
        y = radius * y / r
        paths[:, k + 1] = y
    if not np.isfinite(paths).all():
        raise ChartEscape("batch trace left both charts")
    return paths, drift


def close_curve(line: FieldLine, max_gap_fraction: float = 0.1) -> FieldLine:
    """Close an open line by a short great-circle arc between its endpoints.

    The gap must not exceed max_gap_fraction of the curve diameter; the
    appended arc uses the median point spacing of the line.
    """
    if line.closed:
        return line
    gap = line.gap()
    diam = line.diameter()
    if diam == 0.0 or gap > max_gap_fraction * diam:
        raise GapTooLarge(f"endpoint gap {gap:.3g} exceeds {max_gap_fraction:.0%} of diameter {diam:.3g}")
    xs = line.embedding
    if gap <= 1e-12 * line.radius:
        arc = xs[:1]
    else:
        steps = np.linalg.norm(np.diff(xs, axis=0), axis=1)
        spacing = float(np.median(steps)) if steps.size else gap
        n_arc = max(1, int(np.ceil(gap / max(spacing, 1e-12))))
        t = np.linspace(0.0, 1.0, n_arc + 1)[1:]
        arc = line.radius * slerp(xs[-1] / line.radius, xs[0] / line.radius, t)
    closed_xs = np.concatenate([xs, arc], axis=0)
    new = FieldLine.from_embedding(
        closed_xs,
        closed=True,
        period_or_T=line.period_or_T,
        h=line.h,
        drift=line.drift,
        renorms=line.renorms,
        radius=line.radius,
    )
    return new


# ---------------------------------------------------------------------------
# Mapping closed sphere curves to generic 3-space polylines.
# ---------------------------------------------------------------------------


def _rotation_candidates(seed: int, attempts: int) -> list[tuple[np.ndarray, np.ndarray]]:
    cands = [(np.array([1.0, 0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0, 0.0]))]
    rng = substream(seed, 31)
    pairs = haar_sample(rng, 2 * attempts)
    for i in range(attempts):
        cands.append((pairs[2 * i], pairs[2 * i + 1]))
    return cands


def to_r3_polylines(curves: Sequence[np.ndarray], seed: int = 0) -> list[np.ndarray]:
    """Map unit-sphere closed polylines through a common rotation and chart 0.

    The rotation x -> a x b is chosen so every point stays far from the
    chart-0 pole; rotations preserve orientation and hence all linking
    numbers, and a single chart keeps the polylines honest in 3-space.
    """
    for a, b in _rotation_candidates(seed, 60):
        rotated = [qmul(qmul(a, c), b) for c in curves]
        margin = min(float(np.min(1.0 + c[:, 0])) for c in rotated)
        if margin > 0.15:
            return [np.asarray(chart_point(c, 0, 1.0), dtype=float) for c in rotated]
    raise DegenerateProjection("no rotation kept the curves away from the chart pole")


def _min_distance(p: np.ndarray, q: np.ndarray) -> float:
    best = np.inf
    for lo, hi in fixed_chunks(p.shape[0], 512):
        d = np.linalg.norm(p[lo:hi, None, :] - q[None, :, :], axis=-1)
        best = min(best, float(np.min(d)))
    return best


def resample_polyline(points: np.ndarray, target_seg: float, max_points: int = 2400) -> np.ndarray:
    """Uniform arc-length resampling of a closed polyline (last == first)."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = float(np.sum(seg))
    if total == 0.0:
        return points[:1].repeat(2, axis=0)
    m = int(np.clip(np.ceil(total / target_seg), 16, max_points))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    grid = np.linspace(0.0, total, m + 1)
    out = np.stack([np.interp(grid, s, points[:, k]) for k in range(points.shape[1])], axis=1)
    out[-1] = out[0]
    return out


def _prepare_pair(c1: FieldLine, c2: FieldLine, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Common preprocessing for both linking routes.

    Checks closure and separation, maps both curves through one generic
    rotation into chart 0, and resamples to a separation-aware density.
    """
    for c in (c1, c2):
        if not c.closed:
            raise GapTooLarge("linking requires closed curves")
        if c.gap() > CLOSURE_TOL * c.radius * 10.0:
            raise GapTooLarge(f"closed line has endpoint gap {c.gap():.3g}")
    if c1.radius != c2.radius:
        raise ValueError("curves live on spheres of different radii")
    e1 = c1.embedding / c1.radius
    e2 = c2.embedding / c2.radius
    sep = _min_distance(e1, e2)
    if sep < MIN_SEPARATION:
        raise CurvesTooClose(f"minimum curve separation {sep:.3g} below {MIN_SEPARATION}")
    p1, p2 = to_r3_polylines([e1, e2], seed=seed)
    sep3 = _min_distance(p1, p2)
    target = min(0.08, sep3 / 3.0)
    return resample_polyline(p1, target), resample_polyline(p2, target)


# ---------------------------------------------------------------------------
# Gauss linking via per-segment-pair solid angles.
# ---------------------------------------------------------------------------


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(n < 1e-300, 1.0, n)


def linking_solid_angle(p: np.ndarray, q: np.ndarray) -> float:
    """Linking number of two closed polylines (last point repeats the first).

    Sums the exact signed solid angle each segment pair subtends; no step
    tuning enters, so values land within roundoff of integers for honestly
    separated curves.
    """
    a1, a2 = p[:-1], p[1:]
    b1, b2 = q[:-1], q[1:]
    total = 0.0
    for lo, hi in fixed_chunks(a1.shape[0], 256):
        r1 = a1[lo:hi, None, :]
        r2 = a2[lo:hi, None, :]
        r3 = b1[None, :, :]
        r4 = b2[None, :, :]
        r13 = r3 - r1
        r14 = r4 - r1
        r23 = r3 - r2
        r24 = r4 - r2
        n1 = _unit(np.cross(r13, r14))
        n2 = _unit(np.cross(r14, r24))
        n3 = _unit(np.cross(r24, r23))
        n4 = _unit(np.cross(r23, r13))
        clip = lambda x: np.clip(x, -1.0, 1.0)
        omega = (
            np.arcsin(clip(np.sum(n1 * n2, axis=-1)))
            + np.arcsin(clip(np.sum(n2 * n3, axis=-1)))
            + np.arcsin(clip(np.sum(n3 * n4, axis=-1)))
            + np.arcsin(clip(np.sum(n4 * n1, axis=-1)))
        )
        sign = np.sign(np.sum(np.cross(r4 - r3, r2 - r1) * r13, axis=-1))
        total += float(np.sum(omega * sign))
    return total / (4.0 * np.pi)


def gauss_linking(c1: FieldLine, c2: FieldLine, seed: int = 0) -> float:
    """Gauss linking number of two closed sphere curves.

    The curves are rotated away from the chart pole and evaluated in
    3-space; the result must land within 1e-3 of an integer.
    """
    p1, p2 = _prepare_pair(c1, c2, seed=seed)
    return linking_solid_angle(p1, p2)


# ---------------------------------------------------------------------------
# Signed-crossing oracle.
# ---------------------------------------------------------------------------


def _projection_frame(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    aux = np.zeros(3)
    aux[int(np.argmin(np.abs(d)))] = 1.0
    e1 = np.cross(d, aux)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return e1, e2, d


def _signed_crossings(p: np.ndarray, q: np.ndarray, direction: np.ndarray) -> int:
    """Sum of crossing signs between two projected polylines.

    Raises DegenerateProjection if any crossing is tangential, touches a
    segment endpoint, or has ambiguous depth.
    """
    e1, e2, d = _projection_frame(direction)
    scale = max(float(np.max(np.abs(p))), float(np.max(np.abs(q))), 1e-30)

    pa = np.stack([p @ e1, p @ e2], axis=1)
    qa = np.stack([q @ e1, q @ e2], axis=1)
    pz = p @ d
    qz = q @ d

    a1, a2 = pa[:-1], pa[1:]
    b1, b2 = qa[:-1], qa[1:]
    z1a, z2a = pz[:-1], pz[1:]
    z1b, z2b = qz[:-1], qz[1:]

    total = 0
    for lo, hi in fixed_chunks(a1.shape[0], 512):
        da = (a2 - a1)[lo:hi, None, :]
        db = (b2 - b1)[None, :, :]
        diff = b1[None, :, :] - a1[lo:hi, None, :]
        denom = da[..., 0] * db[..., 1] - da[..., 1] * db[..., 0]
        norm_prod = np.linalg.norm(da, axis=-1) * np.linalg.norm(db, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (diff[..., 0] * db[..., 1] - diff[..., 1] * db[..., 0]) / denom
            t = (diff[..., 0] * da[..., 1] - diff[..., 1] * da[..., 0]) / denom
        parallel = np.abs(denom) <= 1e-12 * np.maximum(norm_prod, 1e-300)
        inside = (~parallel) & (s > 0.0) & (s < 1.0) & (t > 0.0) & (t < 1.0)
        margin = 1e-9
        touching = (~parallel) & (
            (np.abs(s) < margin)
            | (np.abs(1.0 - s) < margin)
            | (np.abs(t) < margin)
            | (np.abs(1.0 - t) < margin)
        )
        if np.any(touching):
            raise DegenerateProjection("crossing at a segment endpoint")
        if not np.any(inside):
            continue
        si = s[inside]
        ti = t[inside]
        ii, jj = np.nonzero(inside)
        ii = ii + lo
        za = z1a[ii] + si * (z2a[ii] - z1a[ii])
        zb = z1b[jj] + ti * (z2b[jj] - z1b[jj])
        if np.any(np.abs(za - zb) < 1e-7 * scale):
            raise DegenerateProjection("ambiguous crossing depth")
        ta = a2[ii] - a1[ii]
        tb = b2[jj] - b1[jj]
        cross = ta[:, 0] * tb[:, 1] - ta[:, 1] * tb[:, 0]
        if np.any(np.abs(cross) < 1e-14 * scale * scale):
            raise DegenerateProjection("tangential crossing")
        over_first = za > zb
        sgn = np.where(over_first, np.sign(cross), -np.sign(cross))
        total += int(np.sum(sgn))
    return total


def crossing_linking_oracle(
    c1: FieldLine, c2: FieldLine, direction: np.ndarray | None = None, seed: int = 0
) -> int:
    """Linking number as half the sum of signed crossings in a projection.

    Retries up to 10 directions when the projection is degenerate.
    """
    p1, p2 = _prepare_pair(c1, c2, seed=seed)
    rng = substream(seed, 77)
    tried = 0
    last_exc: Exception | None = None
    while tried < 10:
        if direction is not None and tried == 0:
            d = np.asarray(direction, dtype=float)
        else:
            d = rng.standard_normal(3)
        tried += 1
        try:
            total = _signed_crossings(p1, p2, d)
        except DegenerateProjection as exc:
            last_exc = exc
            continue
        if total % 2 != 0:
            last_exc = DegenerateProjection("odd crossing sum")
            continue
        return total // 2
    raise DegenerateProjection(f"no generic projection after {tried} tries: {last_exc}")


@dataclass(frozen=True)
class LinkingMatrix:
    """Pairwise integer linking numbers with their quadrature values."""

    n: int
    lk: np.ndarray
    quad: np.ndarray

    def __post_init__(self) -> None:
        if self.lk.shape != (self.n, self.n) or self.quad.shape != (self.n, self.n):
            raise ValueError("linking matrix shape mismatch")
        if np.any(self.lk != self.lk.T) or np.any(np.diag(self.lk) != 0):
            raise ValueError("linking matrix must be symmetric with zero diagonal")
        if np.max(np.abs(self.quad - self.lk)) > 1e-3:
            raise ValueError("quadrature strays more than 1e-3 from integers")


def build_linking_matrix(curves: Sequence[FieldLine], seed: int = 0) -> LinkingMatrix:
    n = len(curves)
    lk = np.zeros((n, n), dtype=int)
    quad = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            val = gauss_linking(curves[i], curves[j], seed=seed)
            rounded = int(np.rint(val))
            if abs(val - rounded) > 1e-3:
                raise CurlwaveError(f"linking quadrature {val} is not integer-like")
            lk[i, j] = lk[j, i] = rounded
            quad[i, j] = quad[j, i] = val
    return LinkingMatrix(n, lk, quad)


# ---------------------------------------------------------------------------
# Helicity quadrature and the asymptotic linking estimate.
# ---------------------------------------------------------------------------


def helicity_integral(
    field_a: Callable,
    field_b: Callable,
    n_quad: int,
    seed: int = 0,
    radius: float = 1.0,
    box: tuple[np.ndarray, np.ndarray] | None = None,
    check_curl: bool = True,
) -> float:
    """Quadrature of the inner product (A, B) over the sphere or a chart box.

    With check_curl=True, B is spot-checked against the numerical curl of A
    at a handful of points before integrating.
    """
    if n_quad < 100:
        raise QuadratureUnderflow(f"need at least 100 quadrature points, got {n_quad}")
    if check_curl:
        probe = radius * haar_sample(substream(seed, 991), 8)
        _, _, _, rot = curl_field(field_a, probe, radius)
        charts = chart_of(probe, radius)
        b_chart = np.empty_like(rot)
        for ch in (0, 1):
            idx = np.nonzero(charts == ch)[0]
            if idx.size:
                u = chart_point(probe[idx], ch, radius)
                b_chart[idx] = np.real(field_in_chart(field_b, u, ch, radius))
        err = np.max(np.abs(rot - b_chart)) / max(np.max(np.abs(b_chart)), 1e-30)
        if err > 1e-5:
            raise ValueError(f"B fails the curl spot check, relative error {err:.2e}")
    if box is None:
        x = radius * haar_sample(substream(seed, 0), n_quad)
        dens = helicity_density(field_a, field_b, x, radius)
        return float(np.mean(dens)) * VOL_UNIT_SPHERE * radius**3
    lo, hi = (np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float))
    rng = substream(seed, 1)
    u = lo + (hi - lo) * rng.random((n_quad, 3))
    x = chart_embed(u, 0, radius)
    dens = helicity_density(field_a, field_b, x, radius)
    weight = conformal_factor(u, radius) ** 3
    flat_vol = float(np.prod(hi - lo))
    return float(np.mean(dens * weight)) * flat_vol


def chart_box_volume(
    box: tuple[np.ndarray, np.ndarray], n_quad: int, seed: int = 0, radius: float = 1.0
) -> float:
    """Riemannian volume of a chart-0 coordinate box, by direct quadrature."""
    lo, hi = (np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float))
    rng = substream(seed, 2)
    u = lo + (hi - lo) * rng.random((n_quad, 3))
    weight = conformal_factor(u, radius) ** 3
    return float(np.mean(weight)) * float(np.prod(hi - lo))


@dataclass(frozen=True)
class HopfEstimate:
    """Mean pairwise linking of T-closures, normalized by T^2."""

    estimate: float
    stderr: float
    n_pairs: int
    T: float
    failures: int
    resamples: int


def asymptotic_hopf(
    field: Callable,
    potential: Callable,
    n_pairs: int,
    T: float,
    seed: int = 0,
    h: float = 0.01,
    workers: int = 1,
    radius: float = 1.0,
) -> HopfEstimate:
    """Asymptotic pairwise-linking estimate of the field's helicity density.

    Traces 2 n_pairs field lines from uniform starts for time T, closes each
    by a short arc, and averages lk/T^2 over the pairs.  Pairs that violate
    the separation precondition are redrawn (counted); closure failures
    beyond 5% reject the run.  The potential argument fixes the intended
    comparison target helicity_integral(potential, field)/vol^2 and is not
    used in the estimate itself.
    """
    if n_pairs < 100:
        raise ValueError(f"need at least 100 pairs, got {n_pairs}")
    if T < 2.0 * np.pi:
        raise ValueError(f"trace time must cover at least one period scale, got {T}")
    del potential
    starts = radius * haar_sample(substream(seed, 0), 2 * n_pairs)
    speeds = np.linalg.norm(np.asarray(field(starts), dtype=float), axis=1)
    if float(np.max(speeds)) < 1e-13:
        return HopfEstimate(0.0, 0.0, n_pairs, float(T), 0, 0)
    paths, _ = trace_batch(field, starts, T, h=h, radius=radius)

    resamples = 0
    failures = 0

    def close_path(xs: np.ndarray) -> FieldLine | None:
        line = FieldLine.from_embedding(xs, closed=False, period_or_T=float(T), h=h, radius=radius)
        try:
            return close_curve(line)
        except GapTooLarge:
            return None

    def link_pair(p: int) -> tuple[float, int, int]:
        xs_a = paths[2 * p]
        xs_b = paths[2 * p + 1]
        local_resamples = 0
        for attempt in range(4):
            la = close_path(xs_a)
            lb = close_path(xs_b)
            if la is None or lb is None:
                return 0.0, 1, local_resamples
            try:
                return gauss_linking(la, lb, seed=seed), 0, local_resamples
            except CurvesTooClose:
                local_resamples += 1
                fresh = radius * haar_sample(substream(seed, 7, p, attempt), 2)
                redo, _ = trace_batch(field, fresh, T, h=h, radius=radius)
                xs_a, xs_b = redo[0], redo[1]
        return 0.0, 1, local_resamples

    results = ordered_map(link_pair, list(range(n_pairs)), workers)
    lks = []
    for lk, failed, local_resamples in results:
        resamples += local_resamples
        if failed:
            failures += 1
        else:
            lks.append(lk)
    if failures > 0.05 * n_pairs:
        raise ClosureFailures(f"{failures} of {n_pairs} pairs failed to close")
    lks = np.asarray(lks)
    estimate = float(np.mean(lks)) / T**2
    stderr = float(np.std(lks, ddof=1)) / np.sqrt(lks.size) / T**2
    return HopfEstimate(estimate, stderr, n_pairs, float(T), failures, resamples)


# ---------------------------------------------------------------------------
# Benchmark curves.
# ---------------------------------------------------------------------------


def hopf_fiber(x0: np.ndarray, side: str = "right", axis: int = 0, n: int = 400) -> FieldLine:
    """Closed orbit of a translation field through x0.

    side="right" gives t -> exp(t q) x0 (pairwise linking +1); side="left"
    gives t -> x0 exp(t q) (pairwise linking -1).
    """
    x0 = np.asarray(x0, dtype=float)
    x0 = x0 / np.linalg.norm(x0)
    q = IMAG_UNITS[axis]
    t = np.linspace(0.0, 2.0 * np.pi, n + 1)
    qx = qmul(q, x0) if side == "right" else qmul(x0, q)
    xs = np.cos(t)[:, None] * x0[None, :] + np.sin(t)[:, None] * qx[None, :]
    xs[-1] = xs[0]
    return FieldLine.from_embedding(xs, closed=True, period_or_T=2.0 * np.pi)


def circle_in_chart(center: np.ndarray, r3: float, n: int = 256, normal_axis: int = 2) -> FieldLine:
    """Planar circle in chart-0 coordinates, embedded back on the sphere."""
    center = np.asarray(center, dtype=float)
    t = np.linspace(0.0, 2.0 * np.pi, n + 1)
    pts = np.tile(center, (n + 1, 1))
    i, j = [k for k in range(3) if k != normal_axis]
    pts[:, i] += r3 * np.cos(t)
    pts[:, j] += r3 * np.sin(t)
    xs = chart_embed(pts, 0, 1.0)
    xs[-1] = xs[0]
    return FieldLine.from_embedding(xs, closed=True, period_or_T=2.0 * np.pi)


def mirror_line(line: FieldLine) -> FieldLine:
    """Reflect the last embedding coordinate (orientation-reversing)."""
    xs = line.embedding.copy()
    xs[:, 3] = -xs[:, 3]
    return FieldLine.from_embedding(
        xs, closed=line.closed, period_or_T=line.period_or_T, h=line.h, radius=line.radius
    )


def reverse_line(line: FieldLine) -> FieldLine:
    """Reverse the traversal orientation of a closed line."""
    return FieldLine.from_embedding(
        line.embedding[::-1].copy(),
        closed=line.closed,
        period_or_T=line.period_or_T,
        h=line.h,
        radius=line.radius,
    )
