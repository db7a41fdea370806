"""Head-pose utility analysis for face recognition.

Fits a sparse sign-split polynomial regression of comparison scores on yaw
and pitch, turns it into ISO/IEC-style integer quality scores, and evaluates
pose quality estimators with verification error rates and
error-vs-discard curves.
"""

from .biometrics import (
    ComparisonRecord, ScoreSet, eer, error_rates_at, fmr_at_fnmr, fnmr_at_fmr, surface_grid,
)
from .covariates import CovariateSpec, covariate_matrix, covariate_vector, design_matrix, split_signed
from .edc import EdcCurve, edc_curve, pauc
from .lasso import FitOptions, LassoModel, adjusted_r2, fit, kkt_residual, predict
from .pose import (
    PoseAngles, PoseEstimate, PoseGrid, ReannotationTable, build_reannotation_table,
    default_grid, make_grid, reannotate,
)
from .quality import Calibration, calibrate, iso_component, iso_fused, syp_quality
from .simulator import (
    SYSTEM_COEFFICIENTS, SimulatorConfig, simulate_mated, simulate_mated_arrays, simulate_nonmated,
)

__version__ = "0.1.0"
