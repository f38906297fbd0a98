import math

import numpy as np
import pytest

from roughspline.errors import (AllLevelsFailed, InsufficientPoints, InvalidParameters,
                                NonpositiveInput, QuadratureUnderresolved, RoughSpaceNotContinuous)
from roughspline.interpolator import interpolate
from roughspline.kernels import make_kernel
from roughspline.pointsets import Domain, generate_jittered_grid
from roughspline.study import (StudyConfig, config_from_dict, fit_rate, l2_error, run_study)
from roughspline.targets import make_smooth_reference

UNIT = Domain.unit_box(1)
K13 = make_kernel(1, 2)


def test_l2_error_matches_trapezoid_oracle():
    f = make_smooth_reference("sine")
    ps = generate_jittered_grid(UNIT, 9)
    s = interpolate(K13, ps, f(ps.points))
    x = np.linspace(0, 1, 100001)
    oracle = math.sqrt(np.trapezoid((f(x) - s(x)) ** 2, x))
    assert l2_error(s, f, UNIT, 18) == pytest.approx(oracle, rel=1e-6)


def test_l2_error_trivial_cases():
    zero = make_smooth_reference("polynomial", 1, coefficients=[0.0])
    ps = generate_jittered_grid(UNIT, 8)
    s = interpolate(K13, ps, np.zeros(8))
    assert l2_error(s, zero, UNIT, 16) == 0.0
    lin = make_smooth_reference("polynomial", 1, coefficients=[1.0, 2.0])
    s = interpolate(K13, ps, lin(ps.points))
    assert l2_error(s, lin, UNIT, 16) <= 1e-9


def test_l2_error_resolution_rule():
    f = make_smooth_reference("sine")
    ps = generate_jittered_grid(UNIT, 9)
    s = interpolate(K13, ps, f(ps.points))
    with pytest.raises(QuadratureUnderresolved):
        l2_error(s, f, UNIT, 17)


def test_fit_rate_examples():
    fit = fit_rate([0.1, 0.05], [1e-2, 2.5e-3])
    assert fit.slope == pytest.approx(2.0, abs=1e-12) and fit.stderr == 0.0
    h = [0.1 * 2.0 ** -j for j in range(5)]
    assert fit_rate(h, [3 * v for v in h]).slope == pytest.approx(1.0, abs=1e-12)


def test_fit_rate_synthetic_noise():
    rng = np.random.default_rng(42)
    h = 0.1 * 2.0 ** -np.arange(6)
    e = h ** 1.5 * (1 + 0.05 * rng.standard_normal(6))
    fit = fit_rate(h, e)
    assert abs(fit.slope - 1.5) <= 0.1
    assert 0 < fit.stderr < 0.1


def test_fit_rate_errors_and_floor():
    with pytest.raises(InsufficientPoints):
        fit_rate([0.1], [0.01])
    with pytest.raises(NonpositiveInput):
        fit_rate([0.1, -0.05], [0.01, 0.001])
    with pytest.raises(InsufficientPoints):
        fit_rate([0.1, 0.05, 0.025], [1e-3, 1e-11, 1e-12])
    fit = fit_rate([0.1, 0.05, 0.025, 0.0125], [1e-2, 2.5e-3, 1e-11, 1e-12])
    assert fit.used == (0, 1)
    fit = fit_rate([0.2, 0.1, 0.05, 0.025], [1.0, 1e-2, 2.5e-3, 6.25e-4], window=(1, 4))
    assert fit.slope == pytest.approx(2.0) and fit.used == (1, 2, 3)


def _config(**kw):
    base = dict(kernel=K13, target={"family": "sine", "d": 1}, rough_order=2, domain=UNIT, levels=[8, 16, 32])
    base.update(kw)
    return StudyConfig(**base)


def test_config_validation():
    with pytest.raises(InvalidParameters):
        _config(levels=[16, 8])
    with pytest.raises(InvalidParameters):
        _config(levels=[])
    with pytest.raises(InvalidParameters):
        _config(fit_window=(0, 5))
    with pytest.raises(InvalidParameters):
        _config(mesh_ratio_bound=0.5)
    with pytest.raises(InvalidParameters):
        _config(quad_panels=10)
    with pytest.raises(RoughSpaceNotContinuous):
        _config(kernel=make_kernel(2, 2, -0.5), rough_order=1, domain=Domain.unit_box(2))
    cfg = _config()
    assert cfg.quad_panels == 64 and cfg.fit_window == (1, 3)


def test_run_study_basic_shape():
    report = run_study(_config(levels=[8, 16, 32, 64]), record_timing=False)
    hs = [r.h for r in report.rows]
    assert all(b < a for a, b in zip(hs, hs[1:]))
    assert all(r.mesh_ok and r.cond_ok and not r.failed for r in report.rows)
    assert all(r.wall_ms == 0.0 for r in report.rows)
    assert report.fit_levels == (1, 2, 3)
    assert report.predicted_rate == 2.0
    assert report.passed
    d = report.to_dict()
    assert set(d) == {"config_echo", "rows", "fitted_slope", "slope_stderr", "predicted_rate", "fit_levels", "pass"}


def test_kernel_span_reproduced():
    span = {"family": "kernel_span", "kernel": {"d": 1, "m": 2}, "centers": [[0.1], [0.3], [0.5], [0.7], [0.9]],
            "weights": [1, -2, 3, 0.5, 1], "tail": [0.2, 1.0], "domain": UNIT.to_dict()}
    report = run_study(_config(target=span, levels=[5, 15, 45]))
    assert all(r.l2_error <= 1e-8 for r in report.rows)


def test_mesh_ratio_flag_excludes_levels():
    report = run_study(_config(levels=[8, 16, 32, 64], jitter=0.6, seed=3, mesh_ratio_bound=1.5))
    bad = [r for r in report.rows if not r.mesh_ok]
    assert bad and all(r.mesh_ratio > 1.5 for r in bad)
    assert not set(r.level for r in bad) & set(report.fit_levels)


def test_condition_cap_excludes_levels():
    report = run_study(_config(levels=[8, 16, 32, 64], condition_cap=1e6))
    assert [r.cond_ok for r in report.rows] == [r.cond_est <= 1e6 for r in report.rows]
    assert all(report.rows[i].cond_ok for i in report.fit_levels)


def test_failed_levels_are_marked():
    # a degree-3 tail needs 4 nodes per level; level 2 cannot be solved
    kern = make_kernel(1, 2, poly_degree_override=3)
    report = run_study(_config(kernel=kern, levels=[2, 8, 16, 32]))
    assert report.rows[0].failed and "NotUnisolvent" in report.rows[0].message
    assert not any(r.failed for r in report.rows[1:])
    with pytest.raises(AllLevelsFailed):
        run_study(_config(kernel=kern, levels=[1, 2, 3]))


def test_threads_do_not_change_results(monkeypatch):
    cfg = _config(levels=[8, 16, 32, 64], jitter=0.3, seed=9)
    serial = run_study(cfg, record_timing=False).to_dict()
    monkeypatch.setenv("ROUGHSPLINE_THREADS", "4")
    assert run_study(cfg, record_timing=False).to_dict() == serial


def test_halton_generator_in_2d():
    cfg = StudyConfig(kernel=make_kernel(2, 2), target={"family": "sine", "d": 2}, rough_order=2,
                      domain=Domain.unit_box(2), levels=[16, 64, 256], generator="halton", mesh_ratio_bound=10)
    report = run_study(cfg)
    assert [r.n for r in report.rows] == [16, 64, 256]
    assert report.fitted_slope is not None and report.fitted_slope > 1


def test_config_from_dict_round_trip():
    cfg = _config(levels=[8, 16, 32], jitter=0.2, seed=4)
    again = config_from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()
