"""Node-preserving smooth surrogates of rough data (one space dimension).

Given rough ``f`` and nodes of separation ``q``, put ``delta = q/4`` and

* replace ``f`` on ``[a - delta, a + delta]`` by the degree-``k`` polynomial
  interpolating ``f`` at ``a`` and ``k`` nearby points, blending back to ``f``
  across ``delta < |x - a| < 2 delta`` with a flat smooth step (``H``);
* mollify with a bump whose moments of order ``1..k`` vanish
  (``F = phi_delta * H``).

Convolving a degree-``k`` polynomial with such a bump returns the polynomial,
so ``F(a) = H(a) = f(a)`` at every node while ``F`` is ``C^infinity``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from .errors import InsufficientSeparation, InvalidParameters, MomentSystemSingular
from .pointsets import Domain
from .quadrature import gauss_legendre
from .targets import TargetFunction, seminorm_from_derivatives

MOLLIFY_POINTS = 64
GRAM_POINTS = 400
MOMENT_TOL = 1e-8
FD_STEP = 1e-3


def base_bump(t):
    """``exp(-1/(1 - t^2))`` on ``(-1, 1)``, zero elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def smooth_step(s):
    """``C^infinity`` monotone step: 0 for ``s <= 0``, 1 for ``s >= 1``, all derivatives flat at the ends."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class MomentBump:
    """``phi(t) = base_bump(t) * sum_j coefficients[j] t^j`` on ``[-1, 1]``.

    ``int phi = 1`` and ``int phi t^j = 0`` for ``1 <= j <= k``.
    """

    k: int
    coefficients: np.ndarray
    moment_defects: np.ndarray = field(repr=False)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return base_bump(t) * np.polynomial.polynomial.polyval(t, self.coefficients)

    def derivative(self, order: int, t):
        if order == 0:
            return self(t)
        fn = _bump_derivative(tuple(float(c) for c in self.coefficients), int(order))
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            vals = fn(t[inside])
        out[inside] = np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)
        return out

    def moments(self, upto: int, points: int = GRAM_POINTS) -> np.ndarray:
        """``int phi t^j`` for ``j = 0..upto`` by Gauss-Legendre."""
        x, w = gauss_legendre(points)
        phi = self(x)
        return np.array([w @ (phi * x ** j) for j in range(upto + 1)])


@lru_cache(maxsize=None)
def _bump_derivative(coefficients: tuple, order: int):
    t = sp.Symbol("t")
    phi = sp.exp(-1 / (1 - t ** 2)) * sum(c * t ** j for j, c in enumerate(coefficients))
    return sp.lambdify(t, sp.diff(phi, t, order), modules="numpy")


def make_moment_bump(k: int) -> MomentBump:
    """Solve the ``(k+1) x (k+1)`` Gram system of monomials against the base bump."""
    if int(k) != k or k < 0:
        raise InvalidParameters(f"moment order k must be >= 0, got {k!r}")
    k = int(k)
    x, w = gauss_legendre(GRAM_POINTS)
    b = base_bump(x)
    gram = np.array([[w @ (b * x ** (i + j)) for j in range(k + 1)] for i in range(k + 1)])
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    try:
        coeffs = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise MomentSystemSingular(str(exc)) from None
    bump = MomentBump(k=k, coefficients=coeffs, moment_defects=np.zeros(k + 1))
    defects = bump.moments(k) - rhs
    if np.max(np.abs(defects)) > MOMENT_TOL:
        raise MomentSystemSingular(f"moment defects {defects} exceed {MOMENT_TOL}")
    return MomentBump(k=k, coefficients=coeffs, moment_defects=defects)


def local_offsets(k: int) -> np.ndarray:
    """Interpolation offsets in units of ``delta``: ``0`` first, then ``k`` points in ``[-1/2, 1/2]``."""
    if k == 0:
        return np.zeros(1)
    steps = math.ceil(k / 2)
    extra = []
    for i in range(1, steps + 1):
        extra.extend([i / steps, -i / steps])
    return np.concatenate([[0.0], 0.5 * np.array(extra[:k])])


class LocalPolynomialBlend:
    """``H``: ``f`` with a degree-``k`` polynomial patch on each node's ``delta``-ball."""

    def __init__(self, f: TargetFunction, nodes, k: int, delta: float | None = None):
        if f.d != 1:
            raise InvalidParameters("surrogates are built in d=1 only")
        pts = np.sort(np.asarray(getattr(nodes, "points", nodes), dtype=float).reshape(-1))
        if len(pts) >= 2:
            q = float(np.min(np.diff(pts))) / 2
        elif delta is not None:
            q = 4 * delta
        else:
            raise InsufficientSeparation("a single node needs an explicit delta")
        if q <= 0:
            raise InsufficientSeparation("nodes must be pairwise distinct (q > 0)")
        self.f = f
        self.k = int(k)
        self.nodes = pts
        self.q = q
        self.delta = q / 4 if delta is None else float(delta)
        if self.delta > q / 4 * (1 + 1e-12):
            raise InsufficientSeparation(f"delta={self.delta} exceeds q/4={q / 4}")
        offs = local_offsets(self.k)
        self._offsets = offs
        V = np.vander(offs, self.k + 1, increasing=True)
        samples = f((pts[:, None] + offs[None, :] * self.delta).reshape(-1)).reshape(len(pts), -1)
        self.patch_coeffs = np.linalg.solve(V, samples.T).T
        self.singular_points = tuple(p[0] for p in f.singular_points)

    def patch(self, i: int, x):
        z = (np.asarray(x, dtype=float) - self.nodes[i]) / self.delta
        return np.polynomial.polynomial.polyval(z, self.patch_coeffs[i])

    def _nearest(self, x):
        idx = np.clip(np.searchsorted(self.nodes, x), 1, max(len(self.nodes) - 1, 1))
        if len(self.nodes) == 1:
            return np.zeros(len(x), dtype=int)
        left = self.nodes[idx - 1]
        right = self.nodes[idx]
        return np.where(np.abs(x - left) <= np.abs(x - right), idx - 1, idx)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        near = self._nearest(flat)
        z = (flat - self.nodes[near]) / self.delta
        out = self.f(flat)
        local = np.abs(z) < 2
        if np.any(local):
            zl = z[local]
            coeffs = self.patch_coeffs[near[local]]
            poly = np.zeros(len(zl))
            for j in range(self.k, -1, -1):
                poly = poly * zl + coeffs[:, j]
            chi = smooth_step(np.abs(zl) - 1)
            out[local] = chi * out[local] + (1 - chi) * poly
        return out.reshape(x.shape) if x.ndim else float(out[0])


def blend_local_polynomials(f: TargetFunction, nodes, k: int) -> LocalPolynomialBlend:
    return LocalPolynomialBlend(f, nodes, k)


def mollify(H, delta: float, bump: MomentBump, x, *, derivative: int = 0, points: int | None = None,
            kinks=None):
    """``(phi_delta * H)^(derivative)`` at ``x``.

    Gauss-Legendre in the window variable ``s`` on ``[-1, 1]``, split where
    ``x - delta s`` meets a kink of ``H`` (``kinks``, defaulting to
    ``H.singular_points`` when present). Derivatives are moved onto
    the bump, ``D^n (phi_delta * H) = delta^(-n) int phi^(n)(s) H(x - delta s) ds``.
    """
    if not delta > 0:
        raise InvalidParameters(f"delta must be positive, got {delta!r}")
    if points is None:
        points = MOLLIFY_POINTS if derivative == 0 else 64 * (derivative + 1)
    x_arr = np.asarray(x, dtype=float)
    xs = x_arr.reshape(-1)
    t, w = gauss_legendre(points)
    if kinks is None:
        kinks = getattr(H, "singular_points", ())
    sing = np.asarray(kinks, dtype=float).reshape(-1)
    # Window breakpoints per x: -1, each singular point clipped to [-1, 1], +1.
    cuts = np.clip((xs[:, None] - sing[None, :]) / delta, -1.0, 1.0)
    br = np.sort(np.concatenate([-np.ones((len(xs), 1)), cuts, np.ones((len(xs), 1))], axis=1), axis=1)
    total = np.zeros(len(xs))
    for p in range(br.shape[1] - 1):
        a, b = br[:, p:p + 1], br[:, p + 1:p + 2]
        half = 0.5 * (b - a)
        s = 0.5 * (a + b) + half * t[None, :]
        kern = bump.derivative(derivative, s)
        arg = xs[:, None] - delta * s
        vals = np.asarray(H(arg.reshape(-1)), dtype=float).reshape(arg.shape)
        total += np.sum(kern * vals * w[None, :], axis=1) * half[:, 0]
    total /= delta ** derivative
    return total.reshape(x_arr.shape) if x_arr.ndim else float(total[0])


def central_difference(fn, x, order: int, step: float):
    """Central finite difference of order 1..4 (second-order accurate)."""
    stencils = {
        1: ([-1, 1], [-0.5, 0.5]),
        2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
        3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
        4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0]),
    }
    if order not in stencils:
        raise InvalidParameters(f"finite differences implemented for orders 1..4, got {order}")
    offs, coeffs = stencils[order]
    x = np.asarray(x, dtype=float)
    return sum(c * fn(x + o * step) for o, c in zip(offs, coeffs)) / step ** order


class SurrogatePair:
    """The blended ``H`` and its mollification ``F`` for one node set."""

    def __init__(self, f: TargetFunction, nodes, k: int, m: int, bump: MomentBump | None = None):
        if m < k:
            raise InvalidParameters(f"target order m={m} must be >= rough order k={k}")
        self.H = LocalPolynomialBlend(f, nodes, k)
        self.delta = self.H.delta
        self.k = int(k)
        self.m = int(m)
        self.bump = bump if bump is not None else make_moment_bump(k)
        if self.bump.k < k:
            raise InvalidParameters(f"bump has vanishing moments up to {self.bump.k} < k={k}")

    @property
    def nodes(self) -> np.ndarray:
        return self.H.nodes

    def F(self, x):
        return mollify(self.H, self.delta, self.bump, x)

    __call__ = F

    def derivative(self, alpha, x):
        order = int(np.atleast_1d(alpha)[0])
        x = np.asarray(x, dtype=float).reshape(-1)
        return mollify(self.H, self.delta, self.bump, x, derivative=order)

    def fd_derivative(self, order: int, x, step: float | None = None):
        step = FD_STEP * self.delta if step is None else step
        return central_difference(self.F, x, order, step)

    def seminorm(self, order: int, domain: Domain | None = None, panels: int | None = None) -> float:
        domain = Domain.box([0.0], [1.0]) if domain is None else domain
        if panels is None:
            lo, hi = domain.bounding_box
            panels = max(64, int(math.ceil(8 * (hi[0] - lo[0]) / self.delta)))
        return seminorm_from_derivatives(self.derivative, 1, order, domain, panels)


def build_surrogate(f: TargetFunction, nodes, k: int, m: int) -> SurrogatePair:
    return SurrogatePair(f, nodes, k, m)


def probe_nodes(q: float, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Nodes ``lo + q, lo + 3q, ...`` inside ``[lo, hi]``: separation exactly ``q``."""
    count = int(math.floor((hi - lo) / (2 * q) + 1e-9))
    return lo + q + 2 * q * np.arange(count)


def seminorm_scaling_probe(f: TargetFunction, k: int, m: int, q_list, panels: int | None = None):
    """``[(q, |F|_m over [0, 1])]`` for each separation ``q``."""
    if f.d != 1:
        raise InvalidParameters("seminorm scaling probe is d=1 only")
    if not 1 <= k <= m:
        raise InvalidParameters(f"probe needs 1 <= k <= m, got k={k}, m={m}")
    q_list = [float(q) for q in q_list]
    if any(q <= 0 for q in q_list) or any(b >= a for a, b in zip(q_list, q_list[1:])):
        raise InvalidParameters("q_list must be positive and strictly decreasing")
    bump = make_moment_bump(k)
    out = []
    for q in q_list:
        pair = SurrogatePair(f, probe_nodes(q), k, m, bump)
        out.append((q, pair.seminorm(m, panels=panels)))
    return out
