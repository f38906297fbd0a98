"""Polyharmonic RBF interpolation of rough data and convergence-rate studies."""
from .errors import RoughSplineError
from .interpolator import (Interpolant, InterpolationProblem, assemble_system,
                           interpolate, solve_interpolant)
from .kernels import KernelSpec, eval_kernel, make_kernel, predicted_rate
from .pointsets import (Domain, GeometryStats, PointSet, fill_distance,
                        generate_halton, generate_jittered_grid, geometry_stats,
                        is_unisolvent, separation_radius)
from .study import StudyConfig, StudyReport, fit_rate, l2_error, run_study
from .surrogate import (SurrogatePair, blend_local_polynomials, make_moment_bump,
                        mollify, seminorm_scaling_probe)
from .targets import (TargetFunction, beppo_levi_seminorm, make_power_cusp,
                      make_smooth_reference)

__version__ = "0.1.0"

__all__ = [
    "Domain", "GeometryStats", "Interpolant", "InterpolationProblem", "KernelSpec",
    "PointSet", "RoughSplineError", "StudyConfig", "StudyReport", "SurrogatePair",
    "TargetFunction", "assemble_system", "beppo_levi_seminorm", "blend_local_polynomials",
    "eval_kernel", "fill_distance", "fit_rate", "generate_halton", "generate_jittered_grid",
    "geometry_stats", "interpolate", "is_unisolvent", "l2_error", "make_kernel",
    "make_moment_bump", "make_power_cusp", "make_smooth_reference", "mollify",
    "predicted_rate", "run_study", "seminorm_scaling_probe", "separation_radius",
    "solve_interpolant",
]
