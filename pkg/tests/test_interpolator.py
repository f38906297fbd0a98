import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import saddle_solve_mp, three_node_value_exact
from roughspline.errors import IllConditionedWarning, InvalidParameters, NotUnisolvent
from roughspline.interpolator import (Interpolant, InterpolationProblem, assemble_system,
                                      interpolate, solve_interpolant)
from roughspline.kernels import make_kernel
from roughspline.pointsets import Domain, PointSet, generate_halton, generate_jittered_grid

K13 = make_kernel(1, 2)          # r^3
TPS = make_kernel(2, 2)          # r^2 log r


def pts1(xs, lo=0.0, hi=1.0):
    return PointSet(np.asarray(xs, dtype=float)[:, None], Domain.box([lo], [hi]))


def test_assemble_two_nodes():
    # scaled monomials on [-1, 1] are the plain ones
    M, rhs = assemble_system(InterpolationProblem(K13, pts1([0, 1], -1, 1), [0, 1]))
    np.testing.assert_array_equal(M[:2, :2], [[0, 1], [1, 0]])
    np.testing.assert_array_equal(M[:2, 2:], [[1, 0], [1, 1]])
    np.testing.assert_array_equal(M[2:, 2:], 0)
    np.testing.assert_array_equal(rhs, [0, 1, 0, 0])


def test_assemble_single_node_degree_zero():
    k = make_kernel(1, 1)  # beta = 1, floor 0
    M, rhs = assemble_system(InterpolationProblem(k, pts1([0], -1, 1), [3.0], poly_degree=0))
    np.testing.assert_array_equal(M, [[0, 1], [1, 0]])
    np.testing.assert_array_equal(rhs, [3, 0])


def test_assemble_three_nodes():
    M, _ = assemble_system(InterpolationProblem(K13, pts1([0, 0.5, 1]), [0, 1, 0]))
    assert M.shape == (5, 5)
    assert M[0, 2] == 1 and M[0, 1] == M[1, 2] == 0.125
    np.testing.assert_array_equal(M, M.T)


def test_line_is_reproduced_with_zero_kernel_part():
    s = interpolate(K13, pts1([0, 1], -1, 1), [0, 1])
    np.testing.assert_allclose(s.b, 0, atol=1e-15)
    assert s(0.3) == pytest.approx(0.3, abs=1e-15)
    assert s.native_energy() == 0


def test_constant_reproduction():
    ps = generate_halton(Domain.unit_box(2), 20)
    s = interpolate(TPS, ps, np.full(20, 5.0))
    np.testing.assert_allclose(s.b, 0, atol=1e-12)
    x = np.random.default_rng(0).random((30, 2))
    np.testing.assert_allclose(s(x), 5.0, rtol=1e-12)


def test_three_node_example_matches_exact_oracle():
    s = interpolate(K13, pts1([0, 0.5, 1]), [0, 1, 0])
    value, b, _ = three_node_value_exact(0.25)
    assert s(0.25) == pytest.approx(float(value), rel=1e-13)   # 11/16
    np.testing.assert_allclose(s.b, [float(v) for v in b], rtol=1e-12)
    assert s(0.5) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_small_systems_match_high_precision_oracle(seed):
    rng = np.random.default_rng(seed)
    d = 1 + seed % 2
    kern = K13 if d == 1 else TPS
    n = int(rng.integers(3 + d, 7))
    dom = Domain.unit_box(d)
    nodes = PointSet(rng.random((n, d)), dom)
    vals = rng.standard_normal(n)
    s = interpolate(kern, nodes, vals)
    b, c = saddle_solve_mp(nodes.points, vals, kern.beta, kern.log_branch, kern.poly_degree,
                           dom.midpoint, dom.half_width)
    coef = np.concatenate([s.b, s.c])
    ref = np.concatenate([b, c])
    assert np.max(np.abs(coef - ref)) <= 1e-10 * np.max(np.abs(ref))


def test_not_unisolvent():
    collinear = PointSet([[0, 0], [0.5, 0.5], [1, 1]], Domain.unit_box(2))
    with pytest.raises(NotUnisolvent):
        interpolate(TPS, collinear, [1, 2, 3])


def test_values_length_checked():
    with pytest.raises(InvalidParameters):
        InterpolationProblem(K13, pts1([0, 1]), [1, 2, 3])


def test_ill_conditioned_warning():
    # near-duplicate nodes blow up the condition number
    ps = pts1([0.0, 0.5, 0.5 + 1e-7, 1.0])
    with pytest.warns(IllConditionedWarning):
        s = interpolate(K13, ps, [0.0, 1.0, 1.0, 0.0])
    assert s.condition_estimate > 1e12
    assert s.warnings


def _random_problem(rng, d, n):
    dom = Domain.unit_box(d)
    return PointSet(rng.random((n, d)), dom)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10 ** 6), d=st.sampled_from([1, 2]), n=st.integers(6, 60))
def test_residual_and_side_conditions(seed, d, n):
    rng = np.random.default_rng(seed)
    kern = K13 if d == 1 else TPS
    ps = _random_problem(rng, d, n)
    vals = rng.standard_normal(n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        s = interpolate(kern, ps, vals)
    if s.condition_estimate > 1e10:
        return
    M, _ = assemble_system(s.problem)
    A, P = M[:n, :n], M[:n, n:]
    # 1e-8 relative, or the floor eps*|A||b| of the accumulation type
    floor = 64 * np.finfo(np.longdouble).eps * np.max(np.abs(A) @ np.abs(s.b) + np.abs(P) @ np.abs(s.c))
    scale = np.max(np.abs(vals))
    assert np.max(np.abs(s(ps.points) - vals)) <= max(1e-8 * scale, floor)
    bound = 1e-8 * np.linalg.norm(s.b) * np.linalg.norm(P, axis=0)
    assert np.all(np.abs(P.T @ s.b) <= bound)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10 ** 6), kern=st.sampled_from([K13, TPS, make_kernel(1, 3), make_kernel(2, 2, 0.5)]))
def test_polynomial_reproduction(seed, kern):
    rng = np.random.default_rng(seed)
    d = kern.d
    ps = _random_problem(rng, d, 25)
    coeffs = rng.standard_normal(len(InterpolationProblem(kern, ps, np.zeros(25)).exponents))
    prob = InterpolationProblem(kern, ps, np.zeros(25))

    def p(x):
        return prob.poly_matrix(x) @ coeffs

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        s = interpolate(kern, ps, p(ps.points))
    if s.condition_estimate > 1e10:
        return
    x = rng.random((100, d))
    scale = np.max(np.abs(p(x)))
    assert np.max(np.abs(s(x) - p(x))) <= 1e-7 * scale
    assert np.max(np.abs(s.b)) <= 1e-7 * scale


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6), shift=st.floats(-3, 3), scale=st.floats(0.2, 5))
def test_translation_and_scaling(seed, shift, scale):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.random(12))
    x = x[np.concatenate([[True], np.diff(x) > 1e-3])]
    vals = np.sin(5 * x)
    base = interpolate(K13, pts1(x), vals)
    t = rng.random(20)
    shifted = interpolate(K13, pts1(x + shift, shift, 1 + shift), vals)
    np.testing.assert_allclose(shifted(t + shift), base(t), rtol=1e-7, atol=1e-7 * np.max(np.abs(vals)))
    scaled = interpolate(K13, pts1(scale * x, 0, scale), vals)
    np.testing.assert_allclose(scaled(scale * t), base(t), rtol=1e-7, atol=1e-7 * np.max(np.abs(vals)))


def test_translation_invariance_tps():
    rng = np.random.default_rng(11)
    pts = rng.random((30, 2))
    vals = np.cos(3 * pts[:, 0]) * pts[:, 1]
    base = interpolate(TPS, PointSet(pts, Domain.unit_box(2)), vals)
    shift = np.array([2.0, -1.5])
    moved = interpolate(TPS, PointSet(pts + shift, Domain.box(shift, shift + 1)), vals)
    t = rng.random((20, 2))
    np.testing.assert_allclose(moved(t + shift), base(t), rtol=1e-7, atol=1e-9)


@pytest.mark.parametrize("kern", [K13, TPS, make_kernel(1, 1), make_kernel(2, 3), make_kernel(1, 3)])
def test_energy_nonnegative(kern):
    rng = np.random.default_rng(2)
    ps = generate_halton(Domain.unit_box(kern.d), 20)
    s = interpolate(kern, ps, rng.standard_normal(20))
    assert s.native_energy() >= 0
    assert s.native_energy() > 0


def test_energy_zero_for_polynomial_data():
    ps = pts1(np.linspace(0.05, 0.95, 9))
    s = interpolate(K13, ps, 2 - 3 * ps.points[:, 0])
    assert s.native_energy() == pytest.approx(0, abs=1e-20)


@pytest.mark.parametrize("kern", [K13, TPS])
def test_energy_monotone_under_inclusion(kern):
    rng = np.random.default_rng(4)
    ps_y = _random_problem(rng, kern.d, 40)
    ps_x = PointSet(ps_y.points[:20], ps_y.domain)

    def f(x):
        return np.sin(4 * x).prod(axis=1)

    ex = interpolate(kern, ps_x, f(ps_x.points)).native_energy()
    ey = interpolate(kern, ps_y, f(ps_y.points)).native_energy()
    assert ex <= ey * (1 + 1e-8)


def test_json_round_trip():
    ps = generate_jittered_grid(Domain.unit_box(2), 4, 0.2, seed=1)
    s = interpolate(TPS, ps, ps.points[:, 0] ** 2)
    back = Interpolant.from_json(s.to_json())
    assert set(json.loads(s.to_json())) >= {"kernel", "nodes", "b", "c", "poly_degree", "condition_estimate"}
    x = np.random.default_rng(5).random((10, 2))
    np.testing.assert_array_equal(back(x), s(x))
    np.testing.assert_array_equal(back.b_lo, s.b_lo)


def test_json_without_low_parts_loads():
    s = interpolate(K13, pts1([0, 0.5, 1]), [0, 1, 0])
    data = s.to_dict()
    del data["b_lo"], data["c_lo"]
    back = Interpolant.from_dict(data)
    np.testing.assert_array_equal(back.b_lo, 0)
    assert back(0.25) == pytest.approx(11 / 16, rel=1e-14)


@pytest.mark.skipif(np.finfo(np.longdouble).eps >= np.finfo(float).eps,
                    reason="longdouble is plain double here")
def test_low_parts_reduce_node_residual():
    # nearby nodes give |b| >> |values|; the hi part alone cannot fit the data to 1e-8
    rng = np.random.default_rng(3)
    x = np.sort(np.concatenate([rng.random(40), [0.3, 0.3 + 1e-4, 0.7, 0.7 + 1e-4]]))
    vals = rng.standard_normal(len(x))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        s = interpolate(K13, pts1(x), vals)
    hi_only = Interpolant(s.b, s.c, s.problem, s.condition_estimate)
    full = np.max(np.abs(s(x[:, None]) - vals))
    assert full <= 1e-8 * np.max(np.abs(vals))
    assert full < np.max(np.abs(hi_only(x[:, None]) - vals))


def test_evaluate_scalar_and_batch():
    s = interpolate(K13, pts1([0, 0.5, 1]), [0, 1, 0])
    assert isinstance(s(0.25), float)
    assert s(np.array([0.25, 0.5])).shape == (2,)
