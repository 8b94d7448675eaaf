"""Curl eigenframes on the 3-sphere, their hyperbolic deformations, linking
invariants of field lines, and Monte Carlo scaling laws in the hyperbolic
plane, with a reproducible experiment runner."""

from . import chartlab, cli, errors, fieldlines, frames, hyperbolic, hypermc, quaternions, s3, seeds
from .frames import (
    LieFrameSpec,
    curl_eigenvalue,
    curl_eigenvalues,
    default_fleet,
    lambda_fields,
    lambda_geometry,
    lambda_right,
    load_fleet,
    milnor_curvatures,
    su2_halved,
    su2_right,
    su2_unit,
    write_fleet,
)
from .hyperbolic import LambdaFrame, build_lambda_frame, cs_density_lambda, rescale_check, sectional_profile
from .hypermc import (
    GeodesicChord,
    ScalingFit,
    TriangleEvent,
    alpha_scaling,
    epsilon_limit_scan,
    lambda_to_curvature,
    m5_quintuple_estimate,
    pair_intersection_density,
    parallelism_ratio,
    sample_geodesic,
    triangle_density,
)
from .fieldlines import (
    FieldLine,
    LinkingMatrix,
    asymptotic_hopf,
    build_linking_matrix,
    close_curve,
    crossing_linking_oracle,
    gauss_linking,
    helicity_integral,
    trace_field_line,
)
from .s3 import S3Frame, build_frame, cs_functional, lambda_realized_frame, ym_residual

__version__ = "0.1.0"
