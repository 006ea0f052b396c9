"""Conjugate-gradient solve of the grid Poisson equation.

Solves laplacian(u) = rhs on interior nodes with u = 0 on the boundary,
using the 7-point finite-difference stencil and a matrix-free CG on the
(symmetric positive definite) negated operator. Reductions go through
numpy dot on contiguous arrays, so results are run-to-run identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError
from .grid import ScalarGrid


@dataclass
class CGReport:
    converged: bool
    iterations: int
    relative_residual: float
    residual_history: list[float] = field(default_factory=list)


def _neg_laplacian(x: np.ndarray, inv_h2: np.ndarray) -> np.ndarray:
    """-laplacian(x) at interior nodes; x carries zero boundary values."""
    core = x[1:-1, 1:-1, 1:-1]
    out = 2.0 * (inv_h2[0] + inv_h2[1] + inv_h2[2]) * core
    out -= inv_h2[0] * (x[2:, 1:-1, 1:-1] + x[:-2, 1:-1, 1:-1])
    out -= inv_h2[1] * (x[1:-1, 2:, 1:-1] + x[1:-1, :-2, 1:-1])
    out -= inv_h2[2] * (x[1:-1, 1:-1, 2:] + x[1:-1, 1:-1, :-2])
    return out


def solve_poisson(rhs: ScalarGrid, tol: float = 1e-6,
                  max_iter: int = 2000) -> tuple[ScalarGrid, CGReport]:
    """Least-squares indicator solve; returns the solution grid and a report
    stating whether the residual target or the iteration cap stopped it."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.all(np.isfinite(rhs.values)):
        raise NumericError("rhs contains non-finite values")
    inv_h2 = 1.0 / rhs.spacing**2

    b = -rhs.values[1:-1, 1:-1, 1:-1]  # negated operator, negated rhs
    x = np.zeros(rhs.resolution)
    b_norm = float(np.linalg.norm(b.ravel()))
    report = CGReport(converged=True, iterations=0, relative_residual=0.0,
                      residual_history=[])
    if b_norm == 0.0:
        return ScalarGrid(rhs.resolution, rhs.box, x), report

    r = b - _neg_laplacian(x, inv_h2)
    p = np.zeros_like(x)
    p[1:-1, 1:-1, 1:-1] = r
    rs = float(np.dot(r.ravel(), r.ravel()))
    rel = np.sqrt(rs) / b_norm
    report.residual_history.append(rel)

    for it in range(1, max_iter + 1):
        ap = _neg_laplacian(p, inv_h2)
        denom = float(np.dot(p[1:-1, 1:-1, 1:-1].ravel(), ap.ravel()))
        if not np.isfinite(denom) or denom <= 0.0:
            raise NumericError(f"CG breakdown at iteration {it}")
        alpha = rs / denom
        x[1:-1, 1:-1, 1:-1] += alpha * p[1:-1, 1:-1, 1:-1]
        r -= alpha * ap
        rs_new = float(np.dot(r.ravel(), r.ravel()))
        if not np.isfinite(rs_new):
            raise NumericError(f"CG breakdown at iteration {it}")
        rel = np.sqrt(rs_new) / b_norm
        report.residual_history.append(rel)
        report.iterations = it
        if rel <= tol:
            report.converged = True
            report.relative_residual = rel
            return ScalarGrid(rhs.resolution, rhs.box, x), report
        p[1:-1, 1:-1, 1:-1] = r + (rs_new / rs) * p[1:-1, 1:-1, 1:-1]
        rs = rs_new

    report.converged = False
    report.relative_residual = rel
    return ScalarGrid(rhs.resolution, rhs.box, x), report
