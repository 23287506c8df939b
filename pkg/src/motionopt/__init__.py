"""Motion optimization: unconstrained least squares over rigid motions
parametrized as ``[rotation vector, translation]`` and mapped through unit
dual quaternions."""

from .dualquat import DQ_ONE, DualNumber, DualQuaternion, UnitDualQuaternion
from .motion import (
    MetricWeights,
    Motion,
    MotionVector,
    flatten,
    motion_from_udq,
    motion_magnitude,
    motion_vector_norm,
    rotation_from_uq,
    udq_from_motion,
    unflatten,
    uq_from_rotation,
)
from .quat import ONE, Quaternion, UnitQuaternion
from .residual import (
    HandEyeDataset,
    PoseGraph,
    ResidualProblem,
    handeye_one_unknown,
    handeye_two_unknown,
    objective,
    slam_problem,
)
from .solver import SolveReport, SolverOptions, levenberg_marquardt

__version__ = "0.1.0"
