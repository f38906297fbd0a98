"""Test functions of known smoothness and the unweighted Beppo-Levi seminorm.

A target is a closed-form expression in ``x1, ..., xd``. Partial derivatives
are generated symbolically and compiled to numpy callables on first use.
"""
from __future__ import annotations

import math
from functools import cached_property, lru_cache

import numpy as np
import sympy as sp

from .errors import (DerivativeUnavailable, InvalidExponent, InvalidParameters,
                     WeightedUnsupported)
from .kernels import make_kernel
from .pointsets import Domain, monomial_exponents, monomial_matrix
from .quadrature import GRADING_LEVELS, integrate

MAX_DERIVATIVE_ORDER = 6


def multi_indices(d: int, k: int) -> list[tuple[int, ...]]:
    """All ``alpha`` in ``N^d`` with ``|alpha| = k``."""
    return [e for e in monomial_exponents(d, k) if sum(e) == k]


def multinomial_weight(alpha) -> float:
    """``|alpha|! / alpha!``, so that ``sum c_alpha x^(2 alpha) = |x|^(2k)``."""
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return float(out)


def _const(v) -> sp.Rational:
    # Exact rational of the double: lambdify would otherwise print 15 digits.
    return sp.Rational(float(v))


class TargetFunction:
    """A function on R^d with analytic derivatives and smoothness metadata."""

    def __init__(self, descriptor: dict, d: int, expr, k_max0: float, singular_points=(),
                 max_order: int = MAX_DERIVATIVE_ORDER):
        self.descriptor = dict(descriptor)
        self.d = int(d)
        self.symbols = sp.symbols(f"x1:{self.d + 1}")
        self.expr = expr(self.symbols) if callable(expr) else expr
        self.k_max0 = k_max0
        self.singular_points = tuple(tuple(float(v) for v in p) for p in singular_points)
        self.max_order = max_order
        self.degree = None

    def __repr__(self) -> str:
        return f"TargetFunction({self.descriptor!r})"

    def k_max(self, mu: float = 0.0) -> float:
        """Order up to which the target has square-integrable derivatives; only known for ``mu = 0``."""
        if mu != 0:
            raise WeightedUnsupported("smoothness bookkeeping is only available for mu = 0")
        return self.k_max0

    @cached_property
    def _value(self):
        return self._compile((0,) * self.d)

    def _compile(self, alpha):
        expr = self.expr
        for sym, order in zip(self.symbols, alpha):
            if order:
                expr = sp.diff(expr, sym, order)
        fn = sp.lambdify(self.symbols, expr, modules="numpy")
        return fn

    @lru_cache(maxsize=None)
    def _derivative_fn(self, alpha):
        return self._compile(alpha)

    def _call(self, fn, x):
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 0 or (arr.ndim == 1 and self.d > 1)
        pts = arr.reshape(-1, self.d)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.broadcast_to(np.asarray(fn(*pts.T), dtype=float), (len(pts),)).copy()
        return float(out[0]) if single else out

    def __call__(self, x):
        return self._call(self._value, x)

    def derivative(self, alpha, x):
        """``D^alpha f`` at ``x``; undefined (nan/inf) exactly at singular points."""
        alpha = tuple(int(a) for a in np.atleast_1d(alpha))
        if len(alpha) != self.d or min(alpha) < 0:
            raise InvalidParameters(f"multi-index {alpha} does not match d={self.d}")
        if sum(alpha) > self.max_order:
            raise DerivativeUnavailable(f"derivative order {sum(alpha)} exceeds {self.max_order}")
        return self._call(self._derivative_fn(alpha), x)

    def to_dict(self) -> dict:
        return dict(self.descriptor)


def make_power_cusp(d: int, center, alpha: float) -> TargetFunction:
    """``f(x) = |x - center|**alpha``.

    Its k-th derivatives behave like ``|x - c|**(alpha - k)`` and are square
    integrable near ``c`` iff ``2(alpha - k) + d > 0``, so the unweighted
    smoothness index is the largest integer below ``alpha + d/2``.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if len(center) != d:
        raise InvalidParameters(f"center {center.tolist()} does not have {d} coordinates")
    alpha = float(alpha)
    if not alpha > 0:
        raise InvalidExponent(f"cusp exponent must be positive, got {alpha}")
    if abs(alpha - round(alpha)) < 1e-12 and round(alpha) % 2 == 0:
        raise InvalidExponent(f"cusp exponent {alpha} is an even integer (polynomial, not rough)")
    k_max = math.ceil(alpha + d / 2) - 1
    a = sp.nsimplify(alpha) if abs(alpha * 10 - round(alpha * 10)) < 1e-12 else sp.Float(alpha)

    def expr(xs):
        r2 = sum((x - _const(c)) ** 2 for x, c in zip(xs, center))
        return r2 ** (a / 2)

    desc = {"family": "power_cusp", "center": center.tolist(), "alpha": alpha}
    return TargetFunction(desc, d, expr, k_max, singular_points=[center])


def make_smooth_reference(kind: str, d: int = 1, **params) -> TargetFunction:
    """Infinitely smooth targets: ``sine``, ``gaussian_bump`` or ``polynomial``.

    sine            prod_i sin(frequency * x_i + phase)
    gaussian_bump   exp(-|x - center|^2 / (2 width^2))
    polynomial      sum of ``coef * x^exponent`` over ``terms``; in d=1 a plain
                    ``coefficients`` list (constant term first) is accepted too
    """
    if int(d) != d or d < 1:
        raise InvalidParameters(f"d must be a positive integer, got {d!r}")
    if kind == "sine":
        freq = float(params.pop("frequency", 2 * math.pi))
        phase = float(params.pop("phase", 0.0))
        _reject_extra(kind, params)

        def expr(xs):
            out = sp.Integer(1)
            for x in xs:
                out = out * sp.sin(_const(freq) * x + _const(phase))
            return out

        desc = {"family": "sine", "d": d, "frequency": freq, "phase": phase}
        return TargetFunction(desc, d, expr, math.inf)
    if kind == "gaussian_bump":
        width = float(params.pop("width", 0.2))
        center = np.atleast_1d(np.asarray(params.pop("center", [0.5] * d), dtype=float))
        _reject_extra(kind, params)
        if not width > 0 or len(center) != d:
            raise InvalidParameters("gaussian_bump needs width > 0 and a d-dimensional center")

        def expr(xs):
            r2 = sum((x - _const(c)) ** 2 for x, c in zip(xs, center))
            return sp.exp(-r2 / (2 * _const(width) ** 2))

        desc = {"family": "gaussian_bump", "d": d, "width": width, "center": center.tolist()}
        return TargetFunction(desc, d, expr, math.inf)
    if kind == "polynomial":
        terms = _polynomial_terms(d, params)

        def expr(xs):
            out = sp.Integer(0)
            for exps, coef in terms:
                mono = sp.Integer(1)
                for x, e in zip(xs, exps):
                    mono = mono * x ** e
                out = out + _const(coef) * mono
            return out

        desc = {"family": "polynomial", "d": d, "terms": [[list(e), c] for e, c in terms]}
        f = TargetFunction(desc, d, expr, math.inf)
        f.degree = max((sum(e) for e, c in terms if c != 0), default=0)
        return f
    raise InvalidParameters(f"unknown smooth target kind {kind!r}")


def _reject_extra(kind, params):
    if params:
        raise InvalidParameters(f"unexpected parameters for {kind}: {sorted(params)}")


def _polynomial_terms(d, params):
    if "coefficients" in params:
        if d != 1:
            raise InvalidParameters("'coefficients' shorthand is for d=1; use 'terms'")
        coeffs = params.pop("coefficients")
        terms = [((j,), float(c)) for j, c in enumerate(coeffs)]
    else:
        terms = [(tuple(int(v) for v in e), float(c)) for e, c in params.pop("terms", [])]
    _reject_extra("polynomial", params)
    if not terms or any(len(e) != d or min(e) < 0 for e, _ in terms):
        raise InvalidParameters("polynomial terms must be nonempty with d nonnegative exponents")
    return terms


def make_kernel_span(kernel_params: dict, centers, weights, domain: Domain, tail=None) -> TargetFunction:
    """Finite combination of kernel translates plus a polynomial tail.

    Weights are projected onto the side-condition subspace of the kernel's
    polynomial space, so the function has exactly the interpolant form and
    is reproduced by any node set containing the centers.
    """
    kern = make_kernel(kernel_params["d"], kernel_params["m"], kernel_params.get("mu", 0.0),
                       kernel_params.get("poly_degree"))
    centers = np.asarray(centers, dtype=float).reshape(-1, kern.d)
    w = np.asarray(weights, dtype=float).reshape(-1)
    exps = monomial_exponents(kern.d, kern.poly_degree)
    z = (centers - domain.midpoint) / domain.half_width
    P = monomial_matrix(z, exps)
    w = w - P @ np.linalg.lstsq(P, w, rcond=None)[0]
    tail = np.zeros(len(exps)) if tail is None else np.asarray(tail, dtype=float)
    mid, hw = domain.midpoint, domain.half_width

    def expr(xs):
        out = sp.Integer(0)
        for a, wa in zip(centers, w):
            r2 = sum((x - _const(c)) ** 2 for x, c in zip(xs, a))
            if kern.log_branch:
                out = out + _const(wa) * r2 ** sp.Rational(int(kern.beta), 2) * sp.log(r2) / 2
            else:
                out = out + _const(wa) * r2 ** (sp.nsimplify(kern.beta) / 2)
        for e, t in zip(exps, tail):
            mono = sp.Integer(1)
            for x, m_, h_, p in zip(xs, mid, hw, e):
                mono = mono * ((x - _const(m_)) / _const(h_)) ** p
            out = out + _const(t) * mono
        return out

    desc = {"family": "kernel_span", "kernel": kern.to_dict(), "centers": centers.tolist(),
            "weights": w.tolist(), "tail": tail.tolist(), "domain": domain.to_dict()}
    return TargetFunction(desc, kern.d, expr, kern.m, singular_points=centers)


def target_from_dict(desc: dict) -> TargetFunction:
    """Build a target from its JSON descriptor (inverse of ``to_dict``)."""
    desc = dict(desc)
    family = desc.pop("family", None)
    if family == "power_cusp":
        center = desc.pop("center")
        alpha = desc.pop("alpha")
        d = int(desc.pop("d", len(np.atleast_1d(center))))
        _reject_extra(family, desc)
        return make_power_cusp(d, center, alpha)
    if family in ("sine", "gaussian_bump", "polynomial"):
        d = int(desc.pop("d", 1))
        return make_smooth_reference(family, d, **desc)
    if family == "kernel_span":
        return make_kernel_span(desc["kernel"], desc["centers"], desc["weights"],
                                Domain.from_dict(desc["domain"]), desc.get("tail"))
    raise InvalidParameters(f"unknown target family {family!r}")


def seminorm_from_derivatives(derivative, d: int, k: int, domain: Domain, panels: int,
                              singular_points=(), grading_levels: int = GRADING_LEVELS) -> float:
    """``(sum_{|alpha|=k} c_alpha int |D^alpha f|^2)^(1/2)`` for a derivative oracle."""
    total = 0.0
    for alpha in multi_indices(d, k):
        weight = multinomial_weight(alpha)
        total += weight * integrate(lambda x, a=alpha: derivative(a, x) ** 2, domain, panels, singular_points,
                                   grading_levels=grading_levels)
    return math.sqrt(max(total, 0.0))


def beppo_levi_seminorm(f: TargetFunction, k: int, domain: Domain, panels: int = 64, mu: float = 0.0,
                        grading_levels: int = GRADING_LEVELS) -> float:
    """Unweighted order-``k`` seminorm of ``f`` over ``domain``.

    Composite 5-point Gauss-Legendre per axis with the target's singular
    points on panel boundaries and geometric grading next to them. When
    ``|D^k f|^2`` itself is singular but integrable (e.g. a cusp with
    ``alpha - k`` in (-1/2, 0)), four grading levels leave errors of several
    percent; raise ``grading_levels`` to resolve it.
    """
    if mu != 0:
        raise WeightedUnsupported("only the unweighted (w = 1) seminorm is evaluated")
    if k > f.max_order:
        raise DerivativeUnavailable(f"order {k} exceeds available derivative order {f.max_order}")
    return seminorm_from_derivatives(f.derivative, f.d, k, domain, panels, f.singular_points, grading_levels)


def c_alpha_identity_residual(x, k: int) -> float:
    """Relative defect of ``sum c_alpha x^(2 alpha) = |x|^(2k)`` at one point."""
    x = np.asarray(x, dtype=float)
    lhs = sum(multinomial_weight(a) * np.prod(x ** (2 * np.array(a))) for a in multi_indices(len(x), k))
    rhs = float(x @ x) ** k
    return abs(lhs - rhs) / max(abs(rhs), np.finfo(float).tiny)
