"""Scattered node sets and their geometry (fill distance, separation, mesh ratio)."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DegenerateDomain, EmptyPointSet, InvalidParameters, TooFewPoints

UNISOLVENT_TOL = 1e-10


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box (``lower``/``upper``) or ball (``center``/``radius``)."""

    kind: str
    lower: tuple = ()
    upper: tuple = ()
    center: tuple = ()
    radius: float = 0.0

    def __post_init__(self):
        if self.kind == "box":
            lo = np.asarray(self.lower, dtype=float)
            hi = np.asarray(self.upper, dtype=float)
            if lo.ndim != 1 or lo.size == 0 or lo.shape != hi.shape:
                raise DegenerateDomain("box bounds must be two equal-length nonempty sequences")
            if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))) or np.any(hi <= lo):
                raise DegenerateDomain(f"box {list(lo)} x {list(hi)} has empty interior")
            object.__setattr__(self, "lower", tuple(float(v) for v in lo))
            object.__setattr__(self, "upper", tuple(float(v) for v in hi))
        elif self.kind == "ball":
            c = np.asarray(self.center, dtype=float)
            if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
                raise DegenerateDomain("ball center must be a finite nonempty sequence")
            if not (math.isfinite(self.radius) and self.radius > 0):
                raise DegenerateDomain(f"ball radius {self.radius!r} must be positive and finite")
            object.__setattr__(self, "center", tuple(float(v) for v in c))
            object.__setattr__(self, "radius", float(self.radius))
        else:
            raise DegenerateDomain(f"unknown domain kind {self.kind!r}")

    @classmethod
    def box(cls, lower, upper) -> "Domain":
        return cls("box", lower=tuple(np.atleast_1d(lower)), upper=tuple(np.atleast_1d(upper)))

    @classmethod
    def unit_box(cls, d: int) -> "Domain":
        return cls.box([0.0] * d, [1.0] * d)

    @classmethod
    def ball(cls, center, radius: float) -> "Domain":
        return cls("ball", center=tuple(np.atleast_1d(center)), radius=radius)

    @property
    def dim(self) -> int:
        return len(self.lower) if self.kind == "box" else len(self.center)

    @property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "box":
            return np.array(self.lower), np.array(self.upper)
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    @property
    def midpoint(self) -> np.ndarray:
        lo, hi = self.bounding_box
        return 0.5 * (lo + hi)

    @property
    def half_width(self) -> np.ndarray:
        lo, hi = self.bounding_box
        return 0.5 * (hi - lo)

    @property
    def diameter(self) -> float:
        if self.kind == "ball":
            return 2 * self.radius
        lo, hi = self.bounding_box
        return float(np.linalg.norm(hi - lo))

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        """Membership in the closure, with a relative slack ``tol``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        slack = tol * max(1.0, self.diameter)
        if self.kind == "box":
            lo, hi = self.bounding_box
            return np.all((x >= lo - slack) & (x <= hi + slack), axis=1)
        dist = np.linalg.norm(x - np.array(self.center), axis=1)
        return dist <= self.radius + slack

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "lower": list(self.lower), "upper": list(self.upper)}
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}

    @classmethod
    def from_dict(cls, data: dict) -> "Domain":
        if data.get("kind") == "ball":
            return cls.ball(data["center"], data["radius"])
        return cls.box(data["lower"], data["upper"])


@dataclass(frozen=True)
class GeometryStats:
    fill_distance: float
    separation: float
    mesh_ratio: float


class PointSet:
    """Immutable array of distinct points lying in the closure of a domain."""

    def __init__(self, points, domain: Domain):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if domain.dim == 1 else pts.reshape(1, -1)
        if pts.ndim != 2 or (pts.size and pts.shape[1] != domain.dim):
            raise InvalidParameters(f"points of shape {pts.shape} do not match domain dimension {domain.dim}")
        if not np.all(np.isfinite(pts)):
            raise InvalidParameters("points must be finite")
        if not np.all(domain.contains(pts)) and pts.size:
            raise InvalidParameters("points must lie in the closure of the domain")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise InvalidParameters("point set contains exact duplicates")
        pts.setflags(write=False)
        self._points = pts
        self.domain = domain

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __len__(self) -> int:
        return len(self._points)

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)}, d={self.dim}, domain={self.domain.kind})"

    def with_points(self, extra) -> "PointSet":
        extra = np.atleast_2d(np.asarray(extra, dtype=float)).reshape(-1, self.dim)
        return PointSet(np.vstack([self._points, extra]), self.domain)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{i + 1}" for i in range(self.dim)])
        for row in self._points:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, domain: Domain | None = None) -> "PointSet":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise InvalidParameters("empty CSV")
        header = [h.strip() for h in rows[0]]
        if header != [f"x{i + 1}" for i in range(len(header))]:
            raise InvalidParameters(f"bad CSV header {rows[0]!r}; expected x1,...,xd")
        data = []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InvalidParameters(f"line {lineno}: expected {len(header)} columns, got {len(row)}")
            try:
                data.append([float(v) for v in row])
            except ValueError as exc:
                raise InvalidParameters(f"line {lineno}: {exc}") from None
        pts = np.array(data, dtype=float).reshape(-1, len(header))
        if domain is None:
            if len(pts) == 0:
                raise InvalidParameters("cannot infer a domain from an empty CSV")
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            hi = np.where(hi > lo, hi, lo + 1.0)
            domain = Domain.box(lo, hi)
        return cls(pts, domain)


def generate_jittered_grid(domain: Domain, n_per_axis: int, jitter_fraction: float = 0.0,
                           seed: int = 0) -> PointSet:
    """One point per cell of a regular ``n_per_axis**d`` grid on a box.

    Each point sits at its cell center, displaced per axis by a uniform amount
    of at most ``jitter_fraction`` times the half cell width. Separation is at
    least ``(1 - j)`` half-cells and fill distance at most ``sqrt(d) (1 + j)``
    half-cells, so the mesh ratio stays below ``sqrt(d) (1 + j)/(1 - j)``.
    """
    if domain.kind != "box":
        raise DegenerateDomain("jittered grids are generated on boxes only")
    if int(n_per_axis) != n_per_axis or n_per_axis < 1:
        raise InvalidParameters(f"n_per_axis must be >= 1, got {n_per_axis!r}")
    if not 0 <= jitter_fraction < 1:
        raise InvalidParameters(f"jitter_fraction must lie in [0, 1), got {jitter_fraction!r}")
    n = int(n_per_axis)
    lo, hi = domain.bounding_box
    cell = (hi - lo) / n
    axes = [lo[i] + (np.arange(n) + 0.5) * cell[i] for i in range(domain.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    if jitter_fraction > 0:
        rng = np.random.default_rng(seed)
        grid = grid + rng.uniform(-1.0, 1.0, size=grid.shape) * (jitter_fraction * 0.5 * cell)
    return PointSet(grid, domain)


def _first_primes(count: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def _van_der_corput(indices: np.ndarray, base: int) -> np.ndarray:
    out = np.zeros(len(indices))
    denom = 1.0
    idx = indices.copy()
    while np.any(idx > 0):
        denom *= base
        idx, digit = np.divmod(idx, base)
        out += digit / denom
    return out


def generate_halton(domain: Domain, n: int) -> PointSet:
    """First ``n`` Halton points (index 1 onwards, no leap) mapped into a box."""
    if domain.kind != "box":
        raise DegenerateDomain("Halton points are generated on boxes only")
    if int(n) != n or n < 1:
        raise InvalidParameters(f"n must be >= 1, got {n!r}")
    idx = np.arange(1, int(n) + 1)
    unit = np.column_stack([_van_der_corput(idx, b) for b in _first_primes(domain.dim)])
    lo, hi = domain.bounding_box
    return PointSet(lo + unit * (hi - lo), domain)


def _candidate_grid(domain: Domain, resolution: int) -> np.ndarray:
    lo, hi = domain.bounding_box
    axes = [np.linspace(lo[i], hi[i], resolution) for i in range(domain.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    if domain.kind == "ball":
        grid = grid[domain.contains(grid, tol=0.0)]
    return grid


def min_distances(targets: np.ndarray, points: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Distance from each target to its nearest point, scanned in chunks."""
    out = np.empty(len(targets))
    for start in range(0, len(targets), chunk):
        out[start:start + chunk] = cdist(targets[start:start + chunk], points).min(axis=1)
    return out


def fill_distance(ps: PointSet, candidate_resolution: int = 257) -> float:
    """Largest distance from a candidate grid point of the domain to the nodes.

    The candidate grid has ``candidate_resolution`` points per axis including
    the box faces. The result is a lower bound on the true fill distance,
    short by at most ``diameter * sqrt(d) / candidate_resolution``.
    """
    if len(ps) == 0:
        raise EmptyPointSet("fill distance of an empty point set")
    if candidate_resolution < 2:
        raise InvalidParameters("candidate_resolution must be >= 2")
    cand = _candidate_grid(ps.domain, int(candidate_resolution))
    return float(min_distances(cand, ps.points).max())


def fill_distance_error_bound(domain: Domain, candidate_resolution: int) -> float:
    return domain.diameter * math.sqrt(domain.dim) / candidate_resolution


def separation_radius(ps: PointSet) -> float:
    """Half the smallest pairwise distance (exhaustive scan)."""
    if len(ps) < 2:
        raise TooFewPoints("separation needs at least two points")
    return float(pdist(ps.points).min() / 2)


def geometry_stats(ps: PointSet, candidate_resolution: int = 257) -> GeometryStats:
    h = fill_distance(ps, candidate_resolution)
    q = separation_radius(ps)
    return GeometryStats(fill_distance=h, separation=q, mesh_ratio=h / q)


def monomial_exponents(d: int, degree: int) -> list[tuple[int, ...]]:
    """Exponents of the monomials of total degree <= ``degree``, graded order."""
    exps: list[tuple[int, ...]] = []
    for total in range(degree + 1):
        block = []
        for combo in combinations_with_replacement(range(d), total):
            e = [0] * d
            for axis in combo:
                e[axis] += 1
            block.append(tuple(e))
        exps.extend(sorted(block, reverse=True))
    return exps


def poly_dim(d: int, degree: int) -> int:
    return math.comb(degree + d, d)


def monomial_matrix(x: np.ndarray, exponents) -> np.ndarray:
    x = np.atleast_2d(x)
    out = np.ones((len(x), len(exponents)))
    for j, e in enumerate(exponents):
        for axis, power in enumerate(e):
            if power:
                out[:, j] *= x[:, axis] ** power
    return out


def is_unisolvent(ps: PointSet, degree: int, tol: float = UNISOLVENT_TOL) -> bool:
    """Whether polynomial interpolation of total degree ``degree`` is unique on ``ps``.

    Points are centered and scaled to the unit ball before building the
    monomial collocation matrix; the rank test uses unit-norm columns and a
    relative singular value threshold.
    """
    if int(degree) != degree or degree < 0:
        raise InvalidParameters(f"degree must be >= 0, got {degree!r}")
    ell = poly_dim(ps.dim, int(degree))
    if len(ps) < ell:
        return False
    x = ps.points - ps.points.mean(axis=0)
    scale = np.abs(x).max()
    if scale > 0:
        x = x / scale
    P = monomial_matrix(x, monomial_exponents(ps.dim, int(degree)))
    norms = np.linalg.norm(P, axis=0)
    if np.any(norms == 0):
        return False
    s = np.linalg.svd(P / norms, compute_uv=False)
    return bool(s[-1] > tol * s[0])

