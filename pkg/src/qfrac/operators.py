"""Finite-sum operators on grid windows: nabla q-derivative and q-integral,
the left q-fractional integral, the Caputo q-fractional derivative, and the
coefficient-weighted summation operator used by the comparison series.

On a grid window the q-integral from the lower limit a to any point is an
exact finite sum over the points in (a, t], so the fractional integral is
materialized once per (grid, a, order) as a lower-triangular weight matrix;
every later application is a triangular mat-vec.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .errors import BoundaryError, DomainError, GridMismatchError
from .qcore import (
    DEFAULT_TOL,
    FracOrder,
    GridFn,
    QGrid,
    Tolerance,
    gamma_q,
    q_factorial_power,
)


def nabla_derivative(f: GridFn, at_index: int) -> float:
    """(f(t) - f(qt)) / ((1 - q) t) at t = points[at_index]."""
    if at_index < 1:
        raise BoundaryError("nabla derivative needs a predecessor (index >= 1)")
    grid = f.grid
    t = grid.points[at_index]
    return float(f.values[at_index] - f.values[at_index - 1]) / ((1.0 - grid.q) * t)


def _nabla_values(grid: QGrid, values: np.ndarray) -> np.ndarray:
    """Backward difference quotient at every point; NaN where no predecessor exists."""
    out = np.empty_like(values)
    out[0] = np.nan
    out[1:] = (values[1:] - values[:-1]) / ((1.0 - grid.q) * grid.t[1:])
    return out


def nabla_integral(f: GridFn, from_index: int, to_index: int) -> float:
    """The q-integral of f over (points[from_index], points[to_index]].

    Equals (1 - q) * sum of s f(s) over grid points in the half-open range:
    the infinite Jackson tails below the lower limit cancel, leaving this
    exact finite sum.
    """
    if from_index > to_index:
        raise DomainError("from_index must not exceed to_index")
    if from_index < 0 or to_index >= f.grid.count:
        raise BoundaryError("integration limits outside the grid")
    sl = slice(from_index + 1, to_index + 1)
    terms = f.grid.t[sl] * f.values[sl]
    return (1.0 - f.grid.q) * math.fsum(terms.tolist())


@dataclass(frozen=True, eq=False)
class OperatorKernel:
    """Lower-triangular weights realizing the order-alpha fractional integral.

    weights[i, j] multiplies f(points[j]) in the value at points[i]; rows at
    and below the lower limit are zero, and the diagonal above it equals
    (1 - q)**alpha * t**alpha.
    """

    grid: QGrid
    a_index: int
    alpha: FracOrder
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.shape != (self.grid.count, self.grid.count):
            raise GridMismatchError("kernel matrix shape must match the grid")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.weights)


def build_kernel(
    grid: QGrid, a_index: int, alpha: FracOrder, tol: Tolerance = DEFAULT_TOL
) -> OperatorKernel:
    """Materialize the left fractional integral of order alpha from points[a_index]."""
    if not 0 <= a_index < grid.count:
        raise BoundaryError(f"a_index {a_index} outside grid of {grid.count} points")
    q = grid.q
    al = alpha.alpha
    g = gamma_q(al, q, tol)
    w = np.zeros((grid.count, grid.count))
    for i in range(a_index + 1, grid.count):
        ti = grid.points[i]
        for j in range(a_index + 1, i + 1):
            tj = grid.points[j]
            w[i, j] = (1.0 - q) * tj * q_factorial_power(ti, q * tj, al - 1.0, q, tol) / g
    return OperatorKernel(grid=grid, a_index=a_index, alpha=alpha, weights=w)


def fractional_integral(f: GridFn, kernel: OperatorKernel) -> GridFn:
    """Apply the kernel; the result vanishes at and below the lower limit."""
    if f.grid != kernel.grid:
        raise GridMismatchError("function and kernel live on different grids")
    vals = np.array(f.values)
    vals[: kernel.a_index + 1] = 0.0  # zero-weight columns; keeps NaN markers inert
    return GridFn(f.grid, kernel.weights @ vals)


def caputo_derivative(
    f: GridFn, a_index: int, alpha: FracOrder, tol: Tolerance = DEFAULT_TOL
) -> GridFn:
    """Caputo derivative: order-(n - alpha) fractional integral of the n-th
    nabla derivative, n = alpha.n.

    Integer orders reduce to the n-fold nabla derivative; its first n points
    have no predecessor chain and come back as NaN rather than extrapolated.
    """
    grid = f.grid
    n = alpha.n
    if alpha.is_integer:
        vals = np.array(f.values)
        for _ in range(n):
            vals = _nabla_values(grid, vals)
        return GridFn(grid, vals)
    if grid.count <= n:
        raise BoundaryError(f"grid too short for {n} difference levels")
    if a_index < n - 1:
        raise BoundaryError(
            f"order-{n} differences start at index {n}; lower limit {a_index} is too early"
        )
    vals = np.array(f.values)
    for _ in range(n):
        vals = _nabla_values(grid, vals)
    vals[:n] = 0.0  # undefined head, never weighted because a_index >= n - 1
    kernel = build_kernel(grid, a_index, FracOrder(n - alpha.alpha), tol)
    return fractional_integral(GridFn(grid, vals), kernel)


def caputo_inverse_identity_check(
    f: GridFn, a_index: int, alpha: FracOrder, tol: Tolerance = DEFAULT_TOL
) -> float:
    """Max absolute residual, over t >= a, of composing the fractional integral
    with the Caputo derivative against f minus its degree-(n-1) q-Taylor part.

    For 0 < alpha <= 1 the subtracted part is just f(a), so this measures the
    defect of the inversion identity on the grid.
    """
    grid = f.grid
    n = alpha.n
    if a_index < n - 1:
        raise BoundaryError(
            f"identity needs the order-{n} derivative on (a, t]; raise a_index"
        )
    cap = caputo_derivative(f, a_index, alpha, tol)
    kernel = build_kernel(grid, a_index, FracOrder(alpha.alpha), tol)
    recon = fractional_integral(cap, kernel)
    a = grid.points[a_index]
    taylor = np.zeros(grid.count)
    level = np.array(f.values)
    for k in range(n):
        coeff = float(level[a_index]) / gamma_q(k + 1.0, grid.q, tol)
        for i in range(a_index, grid.count):
            taylor[i] += coeff * q_factorial_power(grid.points[i], a, float(k), grid.q, tol)
        level = _nabla_values(grid, level)
    resid = recon.values - (f.values - taylor)
    return float(np.max(np.abs(resid[a_index:])))


@dataclass(frozen=True, eq=False)
class OmegaOp:
    """phi -> fractional integral of x * phi, the comparison-series building block."""

    kernel: OperatorKernel
    x: GridFn

    def __post_init__(self) -> None:
        if self.x.grid != self.kernel.grid:
            raise GridMismatchError("coefficient and kernel live on different grids")


def omega_apply(op: OmegaOp, phi: GridFn) -> GridFn:
    if phi.grid != op.kernel.grid:
        raise GridMismatchError("phi and kernel live on different grids")
    return fractional_integral(GridFn(phi.grid, op.x.values * phi.values), op.kernel)


def omega_power_one_closed(
    lam: float,
    n: int,
    alpha: FracOrder,
    grid: QGrid,
    a_index: int,
    tol: Tolerance = DEFAULT_TOL,
) -> GridFn:
    """Closed form lam**n (t - a)_q^(n alpha) / Gamma_q(n alpha + 1) for n
    applications of the constant-coefficient operator to the constant 1."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if not 0 <= a_index < grid.count:
        raise BoundaryError(f"a_index {a_index} outside grid")
    if n == 0:
        return GridFn(grid, np.ones(grid.count))
    a = grid.points[a_index]
    g = gamma_q(n * alpha.alpha + 1.0, grid.q, tol)
    vals = np.zeros(grid.count)
    for i in range(a_index, grid.count):
        vals[i] = lam ** n * q_factorial_power(grid.points[i], a, n * alpha.alpha, grid.q, tol) / g
    return GridFn(grid, vals)
