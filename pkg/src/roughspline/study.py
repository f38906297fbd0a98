"""Refinement studies: L2 error of the interpolant against fill distance.

A study interpolates one target on a sequence of node sets, records the
geometry and the L2 error at each level and fits the slope of
``log(error)`` against ``log(h)``. The slope is compared with the exponent
``k - lam/2 - d/2`` predicted for data of smoothness ``k``.
"""
from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (AllLevelsFailed, InsufficientPoints, InvalidParameters,
                     NonpositiveInput, QuadratureUnderresolved, RoughSplineError)
from .interpolator import Interpolant, InterpolationProblem, solve_interpolant
from .kernels import KernelSpec, make_kernel, predicted_rate
from .pointsets import (Domain, generate_halton, generate_jittered_grid,
                        geometry_stats)
from .quadrature import integrate
from .targets import TargetFunction, target_from_dict

ERROR_FLOOR = 1e-10
RATE_SLACK = 0.15
THREADS_ENV = "ROUGHSPLINE_THREADS"


def nodes_per_axis(n_nodes: int, d: int) -> int:
    return int(math.ceil(n_nodes ** (1.0 / d) - 1e-9))


def l2_error(interp: Interpolant, f: TargetFunction, domain: Domain, quad_panels: int,
             nodes_axis: int | None = None) -> float:
    """``||f - Sf||_{L2(domain)}`` by composite 5-point Gauss-Legendre per axis.

    ``quad_panels`` per axis must be at least twice the number of nodes per
    axis; panels are graded toward the target's singular points.
    """
    if nodes_axis is None:
        nodes_axis = nodes_per_axis(len(interp.problem.nodes), domain.dim)
    if quad_panels < 2 * nodes_axis:
        raise QuadratureUnderresolved(
            f"quad_panels={quad_panels} < 2 x {nodes_axis} nodes per axis")

    def sq_err(x):
        return (f(x) - interp(x)) ** 2

    return math.sqrt(max(integrate(sq_err, domain, quad_panels, f.singular_points), 0.0))


@dataclass(frozen=True)
class RateFit:
    slope: float
    stderr: float
    used: tuple


def fit_rate(h_list, e_list, window=None) -> RateFit:
    """Least-squares slope of ``log e`` against ``log h`` over ``window``.

    ``window`` is a ``(start, stop)`` index range (stop exclusive). Errors
    below ``ERROR_FLOOR`` are dropped before fitting.
    """
    h = np.asarray(h_list, dtype=float)
    e = np.asarray(e_list, dtype=float)
    if h.shape != e.shape:
        raise InvalidParameters("h_list and e_list differ in length")
    start, stop = (0, len(h)) if window is None else window
    idx = np.arange(len(h))[start:stop]
    if np.any(h[idx] <= 0) or np.any(e[idx] < 0) or not np.all(np.isfinite(h[idx])):
        raise NonpositiveInput("fill distances must be positive and errors nonnegative")
    idx = idx[e[idx] > ERROR_FLOOR]
    if len(idx) < 2:
        raise InsufficientPoints(f"{len(idx)} usable points in window; need at least 2")
    x, y = np.log(h[idx]), np.log(e[idx])
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = len(x) - 2
    if dof > 0:
        sigma2 = float(resid @ resid) / dof
        stderr = math.sqrt(sigma2 / float(np.sum((x - x.mean()) ** 2)))
    else:
        stderr = 0.0
    return RateFit(slope=float(coef[1]), stderr=stderr, used=tuple(int(i) for i in idx))


@dataclass
class StudyConfig:
    kernel: KernelSpec
    target: dict
    rough_order: int
    domain: Domain
    levels: list
    generator: str = "jittered_grid"
    jitter: float = 0.0
    seed: int = 0
    mesh_ratio_bound: float = 2.0
    quad_panels: int | None = None
    fit_window: tuple | None = None
    condition_cap: float = 1e12
    fill_resolution: int | None = None

    def __post_init__(self):
        self.levels = [int(n) for n in self.levels]
        if not self.levels or any(n < 1 for n in self.levels):
            raise InvalidParameters("levels must be a nonempty list of positive node counts")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise InvalidParameters("levels must be strictly increasing")
        if self.generator not in ("jittered_grid", "halton"):
            raise InvalidParameters(f"unknown generator {self.generator!r}")
        if self.domain.dim != self.kernel.d:
            raise InvalidParameters("domain dimension differs from kernel dimension")
        if self.mesh_ratio_bound < 1:
            raise InvalidParameters("mesh_ratio_bound must be >= 1")
        if self.fit_window is None:
            self.fit_window = (1 if len(self.levels) > 2 else 0, len(self.levels))
        self.fit_window = tuple(int(v) for v in self.fit_window)
        start, stop = self.fit_window
        if not 0 <= start < stop <= len(self.levels):
            raise InvalidParameters(f"fit_window {self.fit_window} outside levels 0..{len(self.levels)}")
        finest = self.axis_count(self.levels[-1])
        if self.quad_panels is None:
            self.quad_panels = 2 * finest
        elif self.quad_panels < 2 * finest:
            raise InvalidParameters(
                f"quad_panels={self.quad_panels} must be >= 2 x {finest} (finest nodes per axis)")
        # Validates k against the kernel (range and continuity condition).
        predicted_rate(self.kernel, self.rough_order)

    def axis_count(self, level: int) -> int:
        if self.generator == "jittered_grid":
            return level
        return nodes_per_axis(level, self.kernel.d)

    def make_target(self) -> TargetFunction:
        return target_from_dict(self.target)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "target": dict(self.target),
            "rough_order": self.rough_order,
            "domain": self.domain.to_dict(),
            "levels": list(self.levels),
            "generator": {"kind": self.generator, "jitter": self.jitter, "seed": self.seed},
            "mesh_ratio_bound": self.mesh_ratio_bound,
            "quad_panels": self.quad_panels,
            "fit_window": list(self.fit_window),
            "condition_cap": self.condition_cap,
            "fill_resolution": self.fill_resolution,
        }


@dataclass
class LevelResult:
    level: int
    n: int
    h: float = math.nan
    q: float = math.nan
    mesh_ratio: float = math.nan
    l2_error: float = math.nan
    cond_est: float = math.nan
    wall_ms: float = 0.0
    mesh_ok: bool = False
    cond_ok: bool = False
    failed: bool = False
    message: str = ""

    @property
    def accepted(self) -> bool:
        return not self.failed and self.mesh_ok and self.cond_ok


@dataclass
class StudyReport:
    config: StudyConfig
    rows: list
    fitted_slope: float | None
    slope_stderr: float | None
    predicted_rate: float
    fit_levels: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return self.fitted_slope is not None and self.fitted_slope >= self.predicted_rate - RATE_SLACK

    def to_dict(self) -> dict:
        return {
            "config_echo": self.config.to_dict(),
            "rows": [
                {"level": r.level, "n": r.n, "h": r.h, "q": r.q, "mesh_ratio": r.mesh_ratio,
                 "l2_error": r.l2_error, "cond_est": r.cond_est, "wall_ms": r.wall_ms,
                 "mesh_ok": r.mesh_ok, "cond_ok": r.cond_ok, "failed": r.failed,
                 "message": r.message}
                for r in self.rows
            ],
            "fitted_slope": self.fitted_slope,
            "slope_stderr": self.slope_stderr,
            "predicted_rate": self.predicted_rate,
            "fit_levels": list(self.fit_levels),
            "pass": self.passed,
        }


def _make_nodes(config: StudyConfig, level: int):
    if config.generator == "jittered_grid":
        return generate_jittered_grid(config.domain, level, config.jitter, config.seed + level)
    return generate_halton(config.domain, level)


def _run_level(config: StudyConfig, f: TargetFunction, index: int, record_timing: bool) -> LevelResult:
    n_level = config.levels[index]
    row = LevelResult(level=index, n=n_level)
    t0 = time.perf_counter()
    try:
        nodes = _make_nodes(config, n_level)
        row.n = len(nodes)
        axis = config.axis_count(n_level)
        res = config.fill_resolution or max(129, 8 * axis + 1)
        stats = geometry_stats(nodes, res)
        row.h, row.q, row.mesh_ratio = stats.fill_distance, stats.separation, stats.mesh_ratio
        row.mesh_ok = stats.mesh_ratio <= config.mesh_ratio_bound
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            interp = solve_interpolant(InterpolationProblem(config.kernel, nodes, f(nodes.points)))
        row.cond_est = interp.condition_estimate
        row.cond_ok = interp.condition_estimate <= config.condition_cap
        row.message = "; ".join(interp.warnings)
        row.l2_error = l2_error(interp, f, config.domain, config.quad_panels, axis)
    except RoughSplineError as exc:
        row.failed = True
        row.message = f"{type(exc).__name__}: {exc}"
    if record_timing:
        row.wall_ms = (time.perf_counter() - t0) * 1e3
    return row


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_study(config: StudyConfig, record_timing: bool = True) -> StudyReport:
    """Run every level, then fit the rate over accepted levels in the window."""
    f = config.make_target()
    if f.d != config.kernel.d:
        raise InvalidParameters(f"target lives in R^{f.d}, kernel in R^{config.kernel.d}")
    pred = predicted_rate(config.kernel, config.rough_order)
    indices = range(len(config.levels))
    threads = min(_thread_count(), len(config.levels))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda i: _run_level(config, f, i, record_timing), indices))
    else:
        rows = [_run_level(config, f, i, record_timing) for i in indices]
    if all(r.failed for r in rows):
        raise AllLevelsFailed("; ".join(r.message for r in rows))

    start, stop = config.fit_window
    usable = [r for r in rows[start:stop] if r.accepted]
    slope = stderr = None
    used: tuple = ()
    if len(usable) >= 2:
        try:
            fit = fit_rate([r.h for r in usable], [r.l2_error for r in usable])
            slope, stderr = fit.slope, fit.stderr
            used = tuple(usable[i].level for i in fit.used)
        except InsufficientPoints:
            pass
    return StudyReport(config=config, rows=rows, fitted_slope=slope, slope_stderr=stderr,
                       predicted_rate=pred, fit_levels=used)


def config_from_dict(data: dict) -> StudyConfig:
    """Build a StudyConfig from the ``study`` part of a JSON document."""
    kern = data["kernel"]
    kernel = make_kernel(kern["d"], kern["m"], kern.get("mu", 0.0), kern.get("poly_degree"))
    gen = data.get("generator", {"kind": "jittered_grid"})
    return StudyConfig(
        kernel=kernel,
        target=dict(data["target"]),
        rough_order=int(data["rough_order"]),
        domain=Domain.from_dict(data["domain"]),
        levels=list(data["levels"]),
        generator=gen.get("kind", "jittered_grid"),
        jitter=float(gen.get("jitter", 0.0)),
        seed=int(gen.get("seed", 0)),
        mesh_ratio_bound=float(data.get("mesh_ratio_bound", 2.0)),
        quad_panels=data.get("quad_panels"),
        fit_window=tuple(data["fit_window"]) if data.get("fit_window") is not None else None,
        condition_cap=float(data.get("condition_cap", 1e12)),
        fill_resolution=data.get("fill_resolution"),
    )
