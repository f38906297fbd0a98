"""Independent reference computations used by the tests.

None of these share code with the package: the linear solve is plain
Gaussian elimination in exact rationals or 50-digit mpmath, the kernel is
re-derived from its formula and the monomials are written out directly.
"""
from fractions import Fraction
from itertools import product

import mpmath


def eliminate(M, rhs, zero=0):
    """Solve M x = rhs by Gaussian elimination without partial pivoting.

    Rows are swapped only when the pivot is exactly zero, which the saddle
    system forces (psi(0) = 0 on the diagonal). Works for Fraction or mpf.
    """
    n = len(M)
    A = [list(row) + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next(i for i in range(col, n) if A[i][col] != zero)
        A[col], A[piv] = A[piv], A[col]
        for i in range(col + 1, n):
            f = A[i][col] / A[col][col]
            if f != zero:
                A[i] = [a - f * p for a, p in zip(A[i], A[col])]
    x = [zero] * n
    for i in reversed(range(n)):
        x[i] = (A[i][n] - sum(A[i][j] * x[j] for j in range(i + 1, n))) / A[i][i]
    return x


def monomial_powers(d, degree):
    out = []
    for total in range(degree + 1):
        block = [e for e in product(range(total + 1), repeat=d) if sum(e) == total]
        out.extend(sorted(block, reverse=True))
    return out


def _psi(r, beta, log_branch):
    if r == 0:
        return mpmath.mpf(0)
    return r ** beta * mpmath.log(r) if log_branch else r ** beta


def saddle_solve_mp(nodes, values, beta, log_branch, degree, mid, half, dps=50):
    """Coefficients (b, c) of the interpolant at ``dps`` digits.

    Monomials are taken in ``(x - mid) / half`` so c is comparable with the
    package's scaled basis.
    """
    with mpmath.workdps(dps):
        pts = [[mpmath.mpf(float(v)) for v in p] for p in nodes]
        n = len(pts)
        beta_mp = mpmath.mpf(beta)
        powers = monomial_powers(len(pts[0]), degree)
        z = [[(x - mpmath.mpf(float(m))) / mpmath.mpf(float(h)) for x, m, h in zip(p, mid, half)] for p in pts]
        P = [[mpmath.fprod(zi ** e for zi, e in zip(row, ex)) for ex in powers] for row in z]
        ell = len(powers)
        M = [[mpmath.mpf(0)] * (n + ell) for _ in range(n + ell)]
        for i in range(n):
            for j in range(n):
                r = mpmath.sqrt(mpmath.fsum((a - b) ** 2 for a, b in zip(pts[i], pts[j])))
                M[i][j] = _psi(r, beta_mp, log_branch)
            for j in range(ell):
                M[i][n + j] = M[n + j][i] = P[i][j]
        rhs = [mpmath.mpf(float(v)) for v in values] + [mpmath.mpf(0)] * ell
        sol = eliminate(M, rhs, zero=mpmath.mpf(0))
        return [float(v) for v in sol[:n]], [float(v) for v in sol[n:]]


def three_node_value_exact(x):
    """Interpolant of (0, 1, 0) at (0, 1/2, 1) with psi = r^3 and tail {1, t}, evaluated at x.

    Everything is rational for beta = 3 in d = 1, so the answer is exact.
    """
    nodes = [Fraction(0), Fraction(1, 2), Fraction(1)]
    vals = [Fraction(0), Fraction(1), Fraction(0)]
    M = [[abs(a - b) ** 3 for b in nodes] + [Fraction(1), a] for a in nodes]
    M.append([Fraction(1)] * 3 + [Fraction(0)] * 2)
    M.append(nodes + [Fraction(0)] * 2)
    sol = eliminate(M, vals + [Fraction(0)] * 2, zero=Fraction(0))
    b, c = sol[:3], sol[3:]
    x = Fraction(x)
    return sum(bi * abs(x - a) ** 3 for bi, a in zip(b, nodes)) + c[0] + c[1] * x, b, c
