"""Frame fields on round 3-spheres and their gauge-theoretic checks.

The sphere of radius R sits in quaternion space; left fields are x -> x*q and
right fields are x -> q*x for the imaginary units q.  All differential
operators run in a two-chart stereographic atlas where the round metric is
conformally flat, so curls reduce to flat curls of rescaled components.
Derivatives use complex-step evaluation by default (the whole pipeline is
rational in the chart coordinate), with a real central-difference fallback
that serves as an independent second route.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence

import numpy as np

from .errors import ChartEscape, QuadratureUnderflow
from .frames import LieFrameSpec, curl_eigenvalue, lambda_fields, su2_right, su2_unit
from .quaternions import IMAG_UNITS, haar_sample, qconj, qmul
from .seeds import fixed_chunks, ordered_map, substream

VOL_UNIT_SPHERE = 2.0 * np.pi**2

# Trace normalization relative to the 2x2 complex representation of the unit
# quaternions: tr(p) := -2 * (2 Re p) = -4 Re p, so the half-unit generators
# q_l / 2 come out orthonormal under (p, q) -> tr(p q).
TRACE_NORMALIZATION = -2.0

COMPLEX_STEP = 1e-20


def trace_pair(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Normalized trace form of a product of two algebra values."""
    return -4.0 * qmul(p, q)[..., 0]


# ---------------------------------------------------------------------------
# Stereographic atlas.  Chart 0 projects from the pole -1, chart 1 from +1
# with the third coordinate negated so both charts induce the same
# orientation.  Points are assigned to the chart whose pole is far away.
# ---------------------------------------------------------------------------


def chart_of(x: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Chart index per point: 0 unless the point is close to the -1 pole."""
    x = np.asarray(x)
    return np.where(np.real(x[..., 0]) > -0.6 * radius, 0, 1).astype(int)


def _reflect(u: np.ndarray) -> np.ndarray:
    out = u.copy()
    out[..., 2] = -out[..., 2]
    return out


def chart_point(x: np.ndarray, chart: int, radius: float = 1.0) -> np.ndarray:
    """Chart coordinates of embedded points, complex-step safe."""
    y = np.asarray(x) / radius
    if chart == 0:
        u = y[..., 1:] / (1.0 + y[..., :1])
    else:
        u = _reflect(y[..., 1:] / (1.0 - y[..., :1]))
    return radius * u


def chart_embed(u: np.ndarray, chart: int, radius: float = 1.0) -> np.ndarray:
    """Embedded point for chart coordinates, complex-step safe."""
    w = np.asarray(u) / radius
    if chart == 1:
        w = _reflect(w)
    s = np.sum(w * w, axis=-1)[..., None]
    first = (1.0 - s) / (1.0 + s)
    if chart == 1:
        first = -first
    rest = 2.0 * w / (1.0 + s)
    return radius * np.concatenate([first, rest], axis=-1)


def chart_push(x: np.ndarray, xi: np.ndarray, chart: int, radius: float = 1.0) -> np.ndarray:
    """Differential of the chart map applied to a tangent vector at x."""
    y = np.asarray(x) / radius
    eta = np.asarray(xi)
    y0 = y[..., :1]
    e0 = eta[..., :1]
    if chart == 0:
        den = (1.0 + y0) ** 2
        return (eta[..., 1:] * (1.0 + y0) - y[..., 1:] * e0) / den
    den = (1.0 - y0) ** 2
    return _reflect((eta[..., 1:] * (1.0 - y0) + y[..., 1:] * e0) / den)


def conformal_factor(u: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Round-metric conformal factor in either chart, complex-step safe."""
    u = np.asarray(u)
    r2 = radius * radius
    return 2.0 * r2 / (r2 + np.sum(u * u, axis=-1))


# ---------------------------------------------------------------------------
# Frames.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class S3Frame:
    """Translation frame on a radius-R sphere.

    side is "left" (x -> amp * x*q) or "right" (x -> amp * q*x); spec is the
    matching algebraic description (constants + leg metric).
    """

    side: str
    spec: LieFrameSpec
    radius: float = 1.0
    amp: float = 1.0

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def leg(self, l: int) -> Callable[[np.ndarray], np.ndarray]:
        """Leg l in {1, 2, 3} as a callable field on ambient points."""
        if l not in (1, 2, 3):
            raise ValueError(f"leg index must be 1, 2 or 3, got {l}")
        q = IMAG_UNITS[l - 1]
        if self.side == "left":
            return lambda x: self.amp * qmul(x, q)
        return lambda x: self.amp * qmul(q, x)

    def legs(self) -> tuple[Callable[[np.ndarray], np.ndarray], ...]:
        return tuple(self.leg(l) for l in (1, 2, 3))

    def value(self, x: np.ndarray) -> np.ndarray:
        """All three leg values at points x, shape (3,) + x.shape."""
        return np.stack([self.leg(l)(x) for l in (1, 2, 3)], axis=0)


def build_frame(side: str) -> S3Frame:
    """Unit-sphere frame with the matching algebraic spec."""
    if side == "left":
        return S3Frame("left", su2_unit(), 1.0, 1.0)
    if side == "right":
        return S3Frame("right", su2_right(), 1.0, 1.0)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def lambda_realized_frame(lam: float) -> S3Frame:
    """Normalized left triple on the radius-lam sphere.

    Legs x*q/sqrt(lam) have squared length lam and bracket constant
    2/sqrt(lam), matching the algebraic spec.
    """
    return S3Frame("left", lambda_fields(lam), radius=lam, amp=lam**-0.5)


def nu_of(field: Callable, radius: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Algebra-valued profile of a tangent field under left trivialization.

    nu(xi)(x) = conj(x) * xi(x) / (2 R); constant q_l/2 on unit left legs.
    """
    return lambda x: qmul(qconj(np.asarray(x)), field(x)) / (2.0 * radius)


def field_of_nu(profile: Callable, radius: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Inverse of nu_of: value x -> 2 x * profile(x) / R."""
    return lambda x: 2.0 * qmul(np.asarray(x), profile(x)) / radius


def gauge_bracket(fa: Callable, fb: Callable, radius: float = 1.0) -> Callable:
    """Pointwise algebra commutator of two fields, mapped back to a field."""
    na = nu_of(fa, radius)
    nb = nu_of(fb, radius)

    def bracket(x: np.ndarray) -> np.ndarray:
        pa = na(x)
        pb = nb(x)
        return 2.0 * qmul(np.asarray(x), qmul(pa, pb) - qmul(pb, pa)) / radius

    return bracket


# ---------------------------------------------------------------------------
# Chart derivatives.
# ---------------------------------------------------------------------------


def field_in_chart(field: Callable, u: np.ndarray, chart: int, radius: float = 1.0) -> np.ndarray:
    """Chart components of an ambient field at chart points u."""
    x = chart_embed(u, chart, radius)
    return chart_push(x, field(x), chart, radius)


def curl_in_chart(
    field: Callable,
    u: np.ndarray,
    chart: int,
    radius: float = 1.0,
    mode: str = "complex",
    step: float = 1e-3,
) -> np.ndarray:
    """Chart components of the round-metric curl at chart points u.

    Uses rot_g V = rot_flat(Omega^2 V) / Omega^3, valid in each conformal,
    positively oriented chart.
    """

    def weighted(uu: np.ndarray) -> np.ndarray:
        return conformal_factor(uu, radius)[..., None] ** 2 * field_in_chart(
            field, uu, chart, radius
        )

    grads = []
    if mode == "complex":
        h = COMPLEX_STEP
        for j in range(3):
            up = u.astype(complex).copy()
            up[..., j] += 1j * h
            grads.append(np.imag(weighted(up)) / h)
    elif mode == "real":
        for j in range(3):
            up = u.copy()
            up[..., j] += step
            um = u.copy()
            um[..., j] -= step
            grads.append((weighted(up) - weighted(um)) / (2.0 * step))
    else:
        raise ValueError(f"mode must be 'complex' or 'real', got {mode!r}")
    rot_flat = np.stack(
        [
            grads[1][..., 2] - grads[2][..., 1],
            grads[2][..., 0] - grads[0][..., 2],
            grads[0][..., 1] - grads[1][..., 0],
        ],
        axis=-1,
    )
    return rot_flat / conformal_factor(u, radius)[..., None] ** 3


def _group_by_chart(x: np.ndarray, radius: float) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """[(chart, index_array, chart_points)] for a batch of embedded points."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if not np.isfinite(x).all():
        raise ChartEscape("non-finite embedded point")
    charts = chart_of(x, radius)
    groups = []
    for ch in (0, 1):
        idx = np.nonzero(charts == ch)[0]
        if idx.size:
            groups.append((ch, idx, chart_point(x[idx], ch, radius)))
    return groups


def curl_field(
    field: Callable,
    x: np.ndarray,
    radius: float = 1.0,
    mode: str = "complex",
    step: float = 1e-3,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Curl of an ambient field at embedded points.

    Returns (charts, u, field_chart, curl_chart); components live in the
    per-point chart, so compare like against like.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[0]
    charts = np.empty(n, dtype=int)
    u_all = np.empty((n, 3))
    v_all = np.empty((n, 3))
    c_all = np.empty((n, 3))
    for ch, idx, u in _group_by_chart(x, radius):
        charts[idx] = ch
        u_all[idx] = u
        v_all[idx] = np.real(field_in_chart(field, u, ch, radius))
        c_all[idx] = curl_in_chart(field, u, ch, radius, mode=mode, step=step)
    return charts, u_all, v_all, c_all


def chart_inner(u: np.ndarray, a: np.ndarray, b: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Round-metric inner product of chart components."""
    return conformal_factor(u, radius) ** 2 * np.sum(a * b, axis=-1)


def helicity_density(
    field_a: Callable, field_b: Callable, x: np.ndarray, radius: float = 1.0
) -> np.ndarray:
    """Pointwise round-metric inner product <A, B> at embedded points."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.empty(x.shape[0])
    for ch, idx, u in _group_by_chart(x, radius):
        a = np.real(field_in_chart(field_a, u, ch, radius))
        b = np.real(field_in_chart(field_b, u, ch, radius))
        out[idx] = chart_inner(u, a, b, radius)
    return out


# ---------------------------------------------------------------------------
# Yang-Mills residual.
# ---------------------------------------------------------------------------


def ym_residual(frame: S3Frame, n_points: int = 1000, seed: int = 0) -> float:
    """Max pointwise norm of the Yang-Mills residual over random points.

    Per leg l with partners i, j: rot [A_i, A_j] + [A_i, [A_l, A_i]]
    + [A_j, [A_l, A_j]], all brackets in the gauge sense.  Vanishes for the
    left frame, stays order one for the right frame.
    """
    if frame.radius != 1.0:
        raise ValueError("residual check is defined on the unit sphere")
    x = haar_sample(substream(seed, 0), n_points)
    legs = frame.legs()
    worst = 0.0
    for l in range(3):
        i, j = (l + 1) % 3, (l + 2) % 3
        pair = gauge_bracket(legs[i], legs[j])
        cubic_i = gauge_bracket(legs[i], gauge_bracket(legs[l], legs[i]))
        cubic_j = gauge_bracket(legs[j], gauge_bracket(legs[l], legs[j]))
        for ch, idx, u in _group_by_chart(x, frame.radius):
            res = curl_in_chart(pair, u, ch, frame.radius)
            res = res + np.real(field_in_chart(cubic_i, u, ch, frame.radius))
            res = res + np.real(field_in_chart(cubic_j, u, ch, frame.radius))
            norms = np.sqrt(chart_inner(u, res, res, frame.radius))
            worst = max(worst, float(np.max(norms)))
    return worst


# ---------------------------------------------------------------------------
# Chern-Simons densities and functional.
# ---------------------------------------------------------------------------


def wedge_density_values(nu_values: np.ndarray, spec: LieFrameSpec) -> np.ndarray:
    """Cubic wedge density from the three algebra values on the frame legs.

    Evaluates the alternating triple product under the normalized trace and
    divides by the frame volume, i.e. the density against the orthonormal
    coframe.  nu_values has shape (3, n, 4).
    """
    acc = np.zeros(nu_values.shape[1])
    for perm in permutations(range(3)):
        sgn = _perm_sign(perm)
        prod = qmul(qmul(nu_values[perm[0]], nu_values[perm[1]]), nu_values[perm[2]])
        acc = acc + sgn * (-4.0 * prod[..., 0])
    vol = float(np.sqrt(np.prod(spec.g)))
    return float(spec.orientation) * acc / vol


def _perm_sign(perm: Sequence[int]) -> float:
    sgn = 1.0
    for a in range(3):
        for b in range(a + 1, 3):
            if perm[a] > perm[b]:
                sgn = -sgn
    return sgn


def cs_densities(frame: S3Frame, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise helicity-term and wedge-term densities at embedded points."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    legs = frame.legs()
    dens1 = np.zeros(x.shape[0])
    for leg in legs:
        charts, u, v, c = curl_field(leg, x, frame.radius)
        dens1 = dens1 + chart_inner(u, v, c, frame.radius)
    nu_vals = np.stack([nu_of(leg, frame.radius)(x) for leg in legs], axis=0)
    dens2 = wedge_density_values(nu_vals, frame.spec)
    return dens1, dens2


def cs_functional(
    frame: S3Frame, n_quad: int, seed: int = 0, workers: int = 1
) -> tuple[float, float]:
    """Monte Carlo values of the two Chern-Simons terms over the sphere.

    Returns (helicity term, wedge term), each density mean times the sphere
    volume.  Fixed chunking keeps results worker-count independent.
    """
    if n_quad < 1000:
        raise QuadratureUnderflow(f"need at least 1000 quadrature points, got {n_quad}")
    vol = VOL_UNIT_SPHERE * frame.radius**3
    chunks = fixed_chunks(n_quad, 8192)

    def run_chunk(args: tuple[int, tuple[int, int]]) -> tuple[float, float]:
        i, (lo, hi) = args
        x = frame.radius * haar_sample(substream(seed, i), hi - lo)
        d1, d2 = cs_densities(frame, x)
        return float(np.sum(d1)), float(np.sum(d2))

    sums = ordered_map(run_chunk, list(enumerate(chunks)), workers)
    s1 = sum(s[0] for s in sums)
    s2 = sum(s[1] for s in sums)
    return s1 / n_quad * vol, s2 / n_quad * vol


# ---------------------------------------------------------------------------
# Curvature 2-form and magnetic triple.
# ---------------------------------------------------------------------------


def _directional(fn: Callable, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Complex-step directional derivative of a quaternion-valued map."""
    h = COMPLEX_STEP
    return np.imag(fn(x + 1j * h * v)) / h


@dataclass(frozen=True)
class CurvatureField:
    """Gauge curvature of a frame as three component fields.

    components[k] is the field dual to F(e_i, e_j) for (i, j, k) cyclic.
    """

    components: tuple[Callable, Callable, Callable]


def curvature_field(frame: S3Frame) -> CurvatureField:
    """Curvature F = dA + [A, A] of the frame connection, leg by leg.

    dA uses complex-step directional derivatives of the algebra profiles and
    a numerically evaluated ambient bracket of the legs, so no structure
    constants enter; the left frame must return minus the legs.
    """
    legs = frame.legs()
    nus = [nu_of(leg, frame.radius) for leg in legs]
    radius = frame.radius

    def component(k: int) -> Callable:
        i, j = (k + 1) % 3, (k + 2) % 3

        def comp(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            ai = legs[i](x)
            aj = legs[j](x)
            d_ij = _directional(nus[j], x, ai) - _directional(nus[i], x, aj)
            amb = _directional(legs[j], x, ai) - _directional(legs[i], x, aj)
            nu_amb = qmul(qconj(x), amb) / (2.0 * radius)
            pi = nus[i](x)
            pj = nus[j](x)
            comm = qmul(pi, pj) - qmul(pj, pi)
            return 2.0 * qmul(x, d_ij - nu_amb + comm) / radius

        return comp

    return CurvatureField((component(0), component(1), component(2)))


@dataclass(frozen=True)
class MagneticTriple:
    """Curl fields of the three frame legs, as ambient callables."""

    frame: S3Frame
    fields: tuple[Callable, Callable, Callable]
    eigenvalues: tuple[float, float, float]


def build_magnetic_triple(frame: S3Frame) -> MagneticTriple:
    """B_l = curl A_l, using the algebraic eigenvalue relation per leg."""
    eigs = tuple(curl_eigenvalue(frame.spec, l) for l in (1, 2, 3))
    legs = frame.legs()

    def make(l: int) -> Callable:
        mu = eigs[l]
        leg = legs[l]
        return lambda x: mu * leg(x)

    return MagneticTriple(frame, (make(0), make(1), make(2)), eigs)
