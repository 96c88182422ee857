"""Multi-primitive rigid registration.

Point, line, and plane correspondences reduce to a common vector-pair
form solved by any of three interchangeable SE(3) estimators (optimal
quaternion, linear attitude estimator with sequential rotations,
Gauss-Newton), with scale-based outlier rejection and a full ICP loop on
top.  ``KERNEL_BACKEND`` reports whether the compiled kernels or the pure
numpy fallback are active.
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (
    DegenerateGeometry,
    DegenerateViewpoint,
    EmptyPointSet,
    InvalidThreshold,
    MissingModel,
    NoCorrespondences,
    PlyParseError,
    RegistrationError,
    SingularHessian,
    UnsupportedFormat,
)
from .geometry import (
    Line,
    Plane,
    Pose,
    gibbs_from_quat,
    quat_from_axis_angle,
    quat_from_gibbs,
    quat_from_matrix,
    quat_multiply,
    quat_to_matrix,
    rotation_angle,
    rotation_error,
    se3_exp,
    se3_log,
    so3_exp,
    so3_log,
    transform_line,
    transform_plane,
    transform_primitive,
)
from .icp import (
    IcpParams,
    IcpResult,
    Matches,
    MetricMap,
    icp_align,
    match_planes,
    match_points,
    robust_weight,
)
from .pairings import (
    LinePairs,
    PairingSet,
    PlanePairs,
    PointPairs,
    PointPlanePairs,
    UnifiedVectors,
    build_horn_vectors,
    build_olae_unit_vectors,
    canonicalize_line_direction,
    detect_scale_outliers,
    weighted_centroids,
)
from .solvers import (
    GnOptions,
    OlaeSystem,
    ResidualBlock,
    SolverResult,
    attitude_profile,
    horn_rotation,
    olae_rotation,
    residual_blocks,
    sequential_rotation_select,
    solve_gn,
    solve_horn,
    solve_linear_3x3,
    solve_olae,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # errors
    "RegistrationError",
    "EmptyPointSet",
    "InvalidThreshold",
    "DegenerateGeometry",
    "DegenerateViewpoint",
    "SingularHessian",
    "NoCorrespondences",
    "PlyParseError",
    "UnsupportedFormat",
    "MissingModel",
    # geometry
    "Pose",
    "Line",
    "Plane",
    "quat_from_gibbs",
    "gibbs_from_quat",
    "quat_from_axis_angle",
    "quat_from_matrix",
    "quat_to_matrix",
    "quat_multiply",
    "rotation_angle",
    "rotation_error",
    "se3_exp",
    "se3_log",
    "so3_exp",
    "so3_log",
    "transform_line",
    "transform_plane",
    "transform_primitive",
    # pairings
    "PointPairs",
    "LinePairs",
    "PlanePairs",
    "PointPlanePairs",
    "PairingSet",
    "UnifiedVectors",
    "weighted_centroids",
    "detect_scale_outliers",
    "build_horn_vectors",
    "build_olae_unit_vectors",
    "canonicalize_line_direction",
    # solvers
    "SolverResult",
    "GnOptions",
    "ResidualBlock",
    "OlaeSystem",
    "solve_horn",
    "solve_olae",
    "solve_gn",
    "solve_linear_3x3",
    "horn_rotation",
    "olae_rotation",
    "attitude_profile",
    "sequential_rotation_select",
    "residual_blocks",
    # icp
    "MetricMap",
    "Matches",
    "IcpParams",
    "IcpResult",
    "icp_align",
    "match_points",
    "match_planes",
    "robust_weight",
]
