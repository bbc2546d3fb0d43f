"""Attitude and heading estimation with a cubature Kalman filter.

Quaternion mechanization driven by gyro samples, FastEuler angle
pseudo-measurements from accelerometer and magnetometer, and a cubature
filter whose covariance square root comes from Cholesky (CKF) or symmetric
SVD (SVDCKF).
"""

from ._jit import BACKEND
from .ahrs import AhrsConfig, AhrsEstimator, AttitudeEstimate, init_static
from .attitude import euler_to_quat, quat_mul, quat_to_dcm, quat_to_euler, rotvec_to_quat
from .cubature import CubatureFilter, FilterState, ModelSpec, cubature_points, predict, update
from .errors import CkfAhrsError, DataError, FactorizationFailed, FormatError, IllConditioned, InitFailed
from .evaluate import compare, rmse, run_filter
from .fasteuler import EulerObservation, GateConfig, fast_euler
from .linalg import Method, SqrtFactor, sqrt_factor, sym_svd
from .sensors import ImuSample, MagReference, NoiseConfig
from .sim import ImuSeries, Profile, Scenario, TruthSeries, load_csv, simulate, write_csv

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AhrsConfig", "AhrsEstimator", "AttitudeEstimate", "init_static",
    "euler_to_quat", "quat_mul", "quat_to_dcm", "quat_to_euler", "rotvec_to_quat",
    "CubatureFilter", "FilterState", "ModelSpec", "cubature_points", "predict", "update",
    "CkfAhrsError", "DataError", "FactorizationFailed", "FormatError", "IllConditioned", "InitFailed",
    "compare", "rmse", "run_filter",
    "EulerObservation", "GateConfig", "fast_euler",
    "Method", "SqrtFactor", "sqrt_factor", "sym_svd",
    "ImuSample", "MagReference", "NoiseConfig",
    "ImuSeries", "Profile", "Scenario", "TruthSeries", "load_csv", "simulate", "write_csv",
]
