"""Polyharmonic radial basis functions and the rough-data rate predictor.

The kernel family is indexed by the spatial dimension ``d``, the native
space order ``m`` and the weight exponent ``mu`` of ``w(x) = |x|**(2*mu)``.
Its exponent is ``beta = 2m + 2mu - d``; when ``beta`` is an even integer the
kernel carries a logarithmic factor (``r**2 log r`` is the thin-plate spline).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (InvalidParameters, KOutOfRange, NegativeRadius,
                     OverrideBelowFloor, RoughSpaceNotContinuous)

_INT_TOL = 1e-12


def _is_even_integer(x: float) -> bool:
    n = round(x)
    return abs(x - n) <= _INT_TOL and n % 2 == 0


@dataclass(frozen=True)
class KernelSpec:
    """Derived description of ``psi(r) = r**beta`` (or ``r**beta log r``)."""

    d: int
    m: int
    mu: float
    beta: float
    log_branch: bool
    lam: float
    poly_degree: int
    # Sign making sign * psi conditionally positive definite on the
    # side-condition subspace.
    sign: int = field(default=1)

    @property
    def min_poly_degree(self) -> int:
        return solvability_floor(self.beta)

    def to_dict(self) -> dict:
        return {"d": self.d, "m": self.m, "mu": self.mu, "poly_degree": self.poly_degree}

    @classmethod
    def from_dict(cls, data: dict) -> "KernelSpec":
        return make_kernel(data["d"], data["m"], data.get("mu", 0.0), data.get("poly_degree"))


def solvability_floor(beta: float) -> int:
    """Smallest polynomial degree for which ``r**beta`` (log) is CPD.

    ``r**beta`` with non-even ``beta`` is conditionally positive definite of
    order ``ceil(beta/2)``, ``r**(2j) log r`` of order ``j + 1``; both give an
    appended polynomial degree of ``floor(beta/2)``.
    """
    return int(math.floor(beta / 2 + _INT_TOL))


def make_kernel(d: int, m: int, mu: float = 0.0, poly_degree_override: int | None = None) -> KernelSpec:
    if int(d) != d or d < 1:
        raise InvalidParameters(f"d must be a positive integer, got {d!r}")
    if int(m) != m or m < 1:
        raise InvalidParameters(f"m must be an integer >= 1, got {m!r}")
    d, m, mu = int(d), int(m), float(mu)
    if not math.isfinite(mu):
        raise InvalidParameters(f"mu must be finite, got {mu!r}")
    if m + mu - d / 2 <= 0:
        raise InvalidParameters(
            f"m + mu - d/2 = {m + mu - d / 2:g} must be positive for the native space to embed in C"
        )
    beta = 2 * m + 2 * mu - d
    if beta <= 0:
        raise InvalidParameters(f"kernel exponent beta = {beta:g} must be positive")
    log_branch = _is_even_integer(beta)
    if log_branch:
        beta = float(round(beta))
    floor = solvability_floor(beta)
    if poly_degree_override is None:
        degree = floor
    else:
        if int(poly_degree_override) != poly_degree_override or poly_degree_override < floor:
            raise OverrideBelowFloor(
                f"poly_degree override {poly_degree_override!r} is below the solvability floor {floor}"
            )
        degree = int(poly_degree_override)
    sign = -1 if (floor + 1) % 2 else 1
    return KernelSpec(d=d, m=m, mu=mu, beta=beta, log_branch=log_branch,
                      lam=-2 * mu - d, poly_degree=degree, sign=sign)


def eval_kernel(spec: KernelSpec, r):
    """Evaluate ``psi`` at radius ``r`` (scalar or array); ``psi(0) = 0``."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise NegativeRadius("kernel radius must be nonnegative")
    out = np.zeros_like(r_arr)
    pos = r_arr > 0
    rp = r_arr[pos]
    if spec.log_branch:
        out[pos] = rp ** spec.beta * np.log(rp)
    else:
        out[pos] = rp ** spec.beta
    if np.ndim(r) == 0:
        return float(out)
    return out


def predicted_rate(spec: KernelSpec, k: int) -> float:
    """L2 convergence exponent ``k - lam/2 - d/2`` for data of smoothness ``k``."""
    if int(k) != k or not 1 <= k <= spec.m:
        raise KOutOfRange(f"rough order k={k!r} must be an integer in [1, m={spec.m}]")
    if k + spec.mu - spec.d / 2 <= 0:
        raise RoughSpaceNotContinuous(
            f"k + mu - d/2 = {k + spec.mu - spec.d / 2:g} <= 0: point values are undefined "
            "at this smoothness (continuity condition violated)"
        )
    return k - spec.lam / 2 - spec.d / 2
