"""Minimal-norm interpolation by kernel translates plus a polynomial tail.

The interpolant is

    Sf(x) = sum_a b_a psi(|x - a|) + sum_j c_j p_j(x)

with ``sum_a b_a p_j(a) = 0`` for every monomial ``p_j`` of the appended
polynomial space. Monomials are taken in the box-normalized variable
``(x - midpoint) / half_width`` of the problem's domain.

Coefficients are kept as double pairs ``b + b_lo`` (and ``c + c_lo``) from
refinement against a residual computed in ``np.longdouble``, and the kernel
sum is accumulated in the same type. Near-coincident nodes make ``|b|``
large, and a plain double evaluation then cannot reproduce the data better
than about ``eps * |A| |b|``. Where ``longdouble`` is just double the pairs
degrade gracefully to ordinary double accuracy.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack
from scipy.spatial.distance import cdist

from .errors import (IllConditionedWarning, InvalidParameters, NegativeEnergy,
                     NotUnisolvent, SingularSystem)
from .kernels import KernelSpec, eval_kernel, make_kernel
from .pointsets import (Domain, PointSet, is_unisolvent, monomial_exponents,
                        monomial_matrix)

TOL_SIDE = 1e-8
TOL_INTERP = 1e-8
ILL_CONDITIONED = 1e12
_ENERGY_CLAMP = 1e-10
_EVAL_CHUNK = 2_000_000
_ROUNDOFF_FACTOR = 64
_ACC = np.longdouble
_REFINE_STEPS = 2


@dataclass(frozen=True)
class InterpolationProblem:
    kernel: KernelSpec
    nodes: PointSet
    values: np.ndarray
    poly_degree: int | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if len(vals) != len(self.nodes):
            raise InvalidParameters(f"{len(vals)} values for {len(self.nodes)} nodes")
        if self.nodes.dim != self.kernel.d:
            raise InvalidParameters(f"nodes in R^{self.nodes.dim} but kernel built for d={self.kernel.d}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        degree = self.kernel.poly_degree if self.poly_degree is None else int(self.poly_degree)
        if degree < self.kernel.min_poly_degree:
            raise InvalidParameters(
                f"poly_degree {degree} is below the solvability floor {self.kernel.min_poly_degree}")
        object.__setattr__(self, "poly_degree", degree)

    @property
    def exponents(self) -> list[tuple[int, ...]]:
        return monomial_exponents(self.kernel.d, self.poly_degree)

    def poly_matrix(self, x) -> np.ndarray:
        dom = self.nodes.domain
        z = (np.atleast_2d(x) - dom.midpoint) / dom.half_width
        return monomial_matrix(z, self.exponents)


def assemble_system(problem: InterpolationProblem) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric saddle matrix ``[[A, P], [P.T, 0]]`` and right-hand side ``(f, 0)``."""
    pts = problem.nodes.points
    n = len(pts)
    A = eval_kernel(problem.kernel, cdist(pts, pts))
    P = problem.poly_matrix(pts)
    ell = P.shape[1]
    M = np.zeros((n + ell, n + ell))
    M[:n, :n] = A
    M[:n, n:] = P
    M[n:, :n] = P.T
    rhs = np.concatenate([problem.values, np.zeros(ell)])
    return M, rhs


@dataclass(frozen=True)
class Interpolant:
    b: np.ndarray
    c: np.ndarray
    problem: InterpolationProblem
    condition_estimate: float
    max_residual: float = 0.0
    side_residual: float = 0.0
    warnings: tuple = field(default=())
    b_lo: np.ndarray | None = None
    c_lo: np.ndarray | None = None

    def __post_init__(self):
        for name, ref in (("b_lo", self.b), ("c_lo", self.c)):
            if getattr(self, name) is None:
                object.__setattr__(self, name, np.zeros_like(ref))

    def _coefficients(self):
        return (self.b.astype(_ACC) + self.b_lo.astype(_ACC),
                self.c.astype(_ACC) + self.c_lo.astype(_ACC))

    @property
    def kernel(self) -> KernelSpec:
        return self.problem.kernel

    def evaluate(self, x):
        """Value of the interpolant at one point or an array of points."""
        d = self.kernel.d
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 0 or (arr.ndim == 1 and d > 1)
        pts = arr.reshape(-1, d)
        nodes = self.problem.nodes.points
        out = np.empty(len(pts))
        b, c = self._coefficients()
        step = max(1, _EVAL_CHUNK // max(1, len(nodes)))
        for s in range(0, len(pts), step):
            chunk = pts[s:s + step]
            K = eval_kernel(self.kernel, cdist(chunk, nodes)).astype(_ACC)
            out[s:s + step] = K @ b + self.problem.poly_matrix(chunk).astype(_ACC) @ c
        return float(out[0]) if single else out

    __call__ = evaluate

    def native_energy(self) -> float:
        """Squared native seminorm ``b^T A b`` (up to the kernel normalization).

        The kernel sign is folded in so the value is nonnegative for every
        ``psi`` of the family. Roundoff-sized negatives are clamped to zero.
        """
        pts = self.problem.nodes.points
        A = eval_kernel(self.kernel, cdist(pts, pts))
        energy = self.kernel.sign * float(self.b @ A @ self.b)
        if energy < 0:
            floor = _ENERGY_CLAMP * float(self.b @ self.b) * np.abs(A).sum(axis=0).max()
            if energy < -floor:
                raise NegativeEnergy(f"native energy {energy:g} below roundoff floor {-floor:g}")
            energy = 0.0
        return energy

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "domain": self.problem.nodes.domain.to_dict(),
            "nodes": self.problem.nodes.points.tolist(),
            "values": self.problem.values.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "b_lo": self.b_lo.tolist(),
            "c_lo": self.c_lo.tolist(),
            "poly_degree": self.problem.poly_degree,
            "condition_estimate": self.condition_estimate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Interpolant":
        kernel = make_kernel(**{k: v for k, v in data["kernel"].items() if k != "poly_degree"},
                             poly_degree_override=data["kernel"].get("poly_degree"))
        domain = Domain.from_dict(data["domain"])
        nodes = PointSet(np.array(data["nodes"], dtype=float).reshape(-1, kernel.d), domain)
        problem = InterpolationProblem(kernel, nodes, data["values"], data["poly_degree"])
        lo = {k: np.array(data[k], dtype=float) for k in ("b_lo", "c_lo") if k in data}
        return cls(np.array(data["b"], dtype=float), np.array(data["c"], dtype=float),
                   problem, float(data["condition_estimate"]), **lo)

    @classmethod
    def from_json(cls, text: str) -> "Interpolant":
        return cls.from_dict(json.loads(text))


def _factor(M: np.ndarray):
    lwork, info = lapack.dsytrf_lwork(len(M))
    ldu, ipiv, info = lapack.dsytrf(M, lower=0, lwork=max(int(lwork), 1))
    if info > 0:
        raise SingularSystem(f"symmetric indefinite factorization hit an exactly singular pivot (info={info})")
    if info < 0:  # pragma: no cover - argument error inside LAPACK
        raise SingularSystem(f"dsytrf rejected argument {-info}")
    anorm = float(np.abs(M).sum(axis=0).max())
    rcond, _ = lapack.dsycon(ldu, ipiv, anorm)
    # The estimator's trailing bits depend on the alignment of its internal
    # work arrays, so they differ between processes; keep 10 digits.
    cond = np.inf if rcond == 0 else float(f"{1.0 / rcond:.10g}")
    return ldu, ipiv, cond


def _backsolve(ldu, ipiv, rhs):
    x, info = lapack.dsytrs(ldu, ipiv, rhs.reshape(-1, 1))
    return x[:, 0]


def solve_interpolant(problem: InterpolationProblem, *, check: bool = True) -> Interpolant:
    """Solve the saddle system by Bunch-Kaufman LDL^T, refined in extended precision."""
    if not is_unisolvent(problem.nodes, problem.poly_degree):
        raise NotUnisolvent(
            f"{len(problem.nodes)} nodes are not unisolvent for polynomials of degree {problem.poly_degree}")
    M, rhs = assemble_system(problem)
    ldu, ipiv, cond = _factor(M)
    sol = _backsolve(ldu, ipiv, rhs)
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("solution of the interpolation system is not finite")
    M_acc, rhs_acc = M.astype(_ACC), rhs.astype(_ACC)
    x = sol.astype(_ACC)
    for _ in range(_REFINE_STEPS):
        x = x + _backsolve(ldu, ipiv, (rhs_acc - M_acc @ x).astype(float))
    hi = x.astype(float)
    lo = (x - hi).astype(float)

    n = len(problem.nodes)
    A, P = M[:n, :n], M[:n, n:]
    scale = float(np.abs(problem.values).max()) if n else 0.0
    scale = scale if scale > 0 else 1.0
    res = (M_acc @ x - rhs_acc).astype(float)
    max_res = float(np.abs(res[:n]).max()) / scale
    b, c = hi[:n], hi[n:]
    side = np.abs(res[n:]) / (max(float(np.linalg.norm(b)), np.finfo(float).tiny) * np.abs(P).max(axis=0))
    side_res = float(side.max()) if np.any(b) else 0.0

    notes = []
    if cond > ILL_CONDITIONED:
        msg = f"condition estimate {cond:.3e} exceeds {ILL_CONDITIONED:.0e}"
        notes.append(msg)
        warnings.warn(msg, IllConditionedWarning, stacklevel=2)
    if check and (max_res > TOL_INTERP or side_res > TOL_SIDE):
        msg = f"post-solve check failed: node residual {max_res:.3e}, side conditions {side_res:.3e}"
        # Residuals within a modest multiple of eps*(|A||b| + |P||c|) are all
        # the accumulation type can deliver; anything larger means the
        # factorization broke down.
        roundoff = _ROUNDOFF_FACTOR * float(np.finfo(_ACC).eps) * float(
            (np.abs(A) @ np.abs(b) + np.abs(P) @ np.abs(c)).max()) / scale
        broken = max_res > max(roundoff, TOL_INTERP) or side_res > TOL_SIDE
        if broken and cond <= ILL_CONDITIONED:
            raise SingularSystem(msg)
        notes.append(msg)
        warnings.warn(msg, IllConditionedWarning, stacklevel=2)
    return Interpolant(b=b, c=c, problem=problem, condition_estimate=float(cond),
                       max_residual=max_res, side_residual=side_res, warnings=tuple(notes),
                       b_lo=lo[:n], c_lo=lo[n:])


def interpolate(kernel: KernelSpec, nodes: PointSet, values, poly_degree: int | None = None) -> Interpolant:
    return solve_interpolant(InterpolationProblem(kernel, nodes, values, poly_degree))


def native_energy(interp: Interpolant) -> float:
    return interp.native_energy()


def evaluate(interp: Interpolant, x):
    return interp.evaluate(x)
