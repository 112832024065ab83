"""Executable checks for the comparison theorem, the Gronwall-type bound,
its order-1 corollary, and the continuous-dependence experiment.

The central object is the comparison series sum_k (Omega_mu^k 1): under the
admissibility ceiling 0 <= mu(t) < 1/(t**alpha (1-q)**alpha) the diagonal
step of the integral inequality stays solvable and any v with
v <= v(a) + I^alpha(mu v) is dominated by v(a) times that series.  All
hypotheses are verified numerically, never assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DivergenceError, DomainError, PreconditionError, QFracError
from .operators import OmegaOp, OperatorKernel, build_kernel, omega_apply
from .qcore import DEFAULT_TOL, FracOrder, GridFn, QGrid, Tolerance
from .solver import NonlinearIVP, solve_marching
from .special import MLSpec, mittag_leffler

#: absolute slack used when checking integral-inequality hypotheses, so that
#: equality-case instances (zero slack) do not fail on rounding.
HYPOTHESIS_TOL = 1e-12


def sart_bound(grid: QGrid, alpha: FracOrder) -> np.ndarray:
    """Admissibility ceiling 1 / (t**alpha (1-q)**alpha) at every grid point."""
    return 1.0 / (grid.t ** alpha.alpha * (1.0 - grid.q) ** alpha.alpha)


def check_sart(x: GridFn, alpha: FracOrder, strict: bool = False) -> np.ndarray:
    """Per-point flags for 0 <= x(t) <= ceiling (non-strict) or < ceiling (strict).

    The strict form is what keeps the diagonal factor
    1 - x(t) (1-q)**alpha t**alpha positive; the non-strict form is enough
    for the comparison argument.
    """
    bound = sart_bound(x.grid, alpha)
    if strict:
        return (x.values >= 0.0) & (x.values < bound)
    return (x.values >= 0.0) & (x.values <= bound)


@dataclass(frozen=True, eq=False)
class GronwallInput:
    """A candidate function v and nonnegative coefficient mu on a shared grid."""

    v: GridFn
    mu: GridFn
    alpha: FracOrder
    a_index: int

    def __post_init__(self) -> None:
        if self.v.grid != self.mu.grid:
            raise DomainError("v and mu must live on the same grid")
        if self.alpha.alpha > 1.0:
            raise DomainError("the bound is stated for orders in (0, 1]")
        if not 0 <= self.a_index < self.v.grid.count:
            raise DomainError(f"a_index {self.a_index} outside grid")
        if np.any(self.mu.values < 0.0):
            raise DomainError("coefficient mu must be nonnegative")


@dataclass(frozen=True, eq=False)
class BoundResult:
    bound: GridFn
    terms_used: int
    satisfied: np.ndarray
    max_violation: float


def gronwall_bound(
    inp: GronwallInput, tol: Tolerance = DEFAULT_TOL, max_terms: int = 2048
) -> BoundResult:
    """v(a) times the comparison series, with per-point domination flags.

    Terms are added by iterated operator application until the newest term's
    sup norm drops below tolerance.  The worst-case decay rate is the sup of
    mu(t) t**alpha (1-q)**alpha (the diagonal weight feeds each term back into
    the next), so coefficients close to the ceiling converge slowly; outside
    the proven regime (grid points beyond t = 1) that rate can exceed 1, and
    sustained growth raises a divergence error instead of returning a partial
    sum.
    """
    flags = check_sart(inp.mu, inp.alpha, strict=True)
    if not bool(flags.all()):
        bad = tuple(int(i) for i in np.flatnonzero(~flags))
        raise PreconditionError(
            f"mu violates the strict admissibility ceiling at indices {list(bad)}",
            indices=bad,
        )
    grid = inp.v.grid
    kernel = build_kernel(grid, inp.a_index, inp.alpha, tol)
    w = kernel.weights
    mu_vals = inp.mu.values
    term = np.ones(grid.count)
    acc = term.copy()
    terms_used = 1
    prev_sup = math.inf
    growth_run = 0
    for _ in range(max_terms):
        term = w @ (mu_vals * term)
        acc = acc + term
        terms_used += 1
        sup = float(np.max(np.abs(term)))
        if sup <= tol.abs_tol + tol.rel_tol * float(np.max(np.abs(acc))):
            break
        growth_run = growth_run + 1 if sup >= prev_sup else 0
        if sup > 1e100:
            raise DivergenceError(
                f"comparison series overflowed after {terms_used} terms "
                f"({growth_run} consecutive nondecreasing sup norms)",
                ratio=sup / prev_sup if math.isfinite(prev_sup) else None,
            )
        prev_sup = sup
    else:
        raise DivergenceError(
            f"comparison series missed tolerance within {max_terms} terms"
            + (f" ({growth_run} consecutive nondecreasing sup norms)" if growth_run else ""),
            ratio=None,
        )
    v_a = float(inp.v.values[inp.a_index])
    bound_vals = v_a * acc
    satisfied = np.ones(grid.count, dtype=bool)
    satisfied[inp.a_index :] = inp.v.values[inp.a_index :] <= bound_vals[inp.a_index :]
    excess = inp.v.values[inp.a_index :] - bound_vals[inp.a_index :]
    max_violation = max(0.0, float(np.max(excess)))
    return BoundResult(
        bound=GridFn(grid, bound_vals),
        terms_used=terms_used,
        satisfied=satisfied,
        max_violation=max_violation,
    )


@dataclass(frozen=True, eq=False)
class ComparisonInput:
    """Candidate pair (w, v) with coefficient x for the comparison check."""

    w: GridFn
    v: GridFn
    x: GridFn
    alpha: FracOrder
    a_index: int

    def __post_init__(self) -> None:
        if not (self.w.grid == self.v.grid == self.x.grid):
            raise DomainError("w, v and x must live on the same grid")
        if self.alpha.alpha > 1.0:
            raise DomainError("the comparison check is stated for orders in (0, 1]")
        if not 0 <= self.a_index < self.w.grid.count:
            raise DomainError(f"a_index {self.a_index} outside grid")


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    holds_super: bool      # w >= w(a) + I^alpha(x w)
    holds_sub: bool        # v <= v(a) + I^alpha(x v)
    holds_admissible: bool  # 0 <= x <= ceiling (non-strict)
    holds_initial: bool    # w(a) >= v(a)
    conclusion_checked: bool
    conclusion_holds: bool
    max_violation: float

    @property
    def all_hypotheses(self) -> bool:
        return (
            self.holds_super
            and self.holds_sub
            and self.holds_admissible
            and self.holds_initial
        )


def verify_comparison(
    inp: ComparisonInput, tol: float = 1e-12, *, work_tol: Tolerance = DEFAULT_TOL
) -> ComparisonReport:
    """Check the four comparison hypotheses; when all hold, assert w >= v - tol.

    Hypothesis inequalities absorb rounding with a fixed 1e-12 slack so that
    equality-case constructions do not report spurious failures; the
    conclusion uses the caller's tol.  The report carries every outcome, and
    the conclusion is never asserted when a hypothesis fails.
    """
    grid = inp.w.grid
    kernel = build_kernel(grid, inp.a_index, inp.alpha, work_tol)
    op = OmegaOp(kernel=kernel, x=inp.x)
    sl = slice(inp.a_index, grid.count)
    w_a = float(inp.w.values[inp.a_index])
    v_a = float(inp.v.values[inp.a_index])
    omega_w = omega_apply(op, inp.w).values
    omega_v = omega_apply(op, inp.v).values
    holds_super = bool(
        np.all(inp.w.values[sl] >= w_a + omega_w[sl] - HYPOTHESIS_TOL)
    )
    holds_sub = bool(np.all(inp.v.values[sl] <= v_a + omega_v[sl] + HYPOTHESIS_TOL))
    holds_admissible = bool(check_sart(inp.x, inp.alpha, strict=False).all())
    holds_initial = bool(w_a >= v_a)
    checked = holds_super and holds_sub and holds_admissible and holds_initial
    if checked:
        diff = inp.v.values[sl] - inp.w.values[sl]
        max_violation = max(0.0, float(np.max(diff)))
        conclusion_holds = bool(max_violation <= tol)
    else:
        max_violation = math.nan
        conclusion_holds = False
    return ComparisonReport(
        holds_super=holds_super,
        holds_sub=holds_sub,
        holds_admissible=holds_admissible,
        holds_initial=holds_initial,
        conclusion_checked=checked,
        conclusion_holds=conclusion_holds,
        max_violation=max_violation,
    )


def march_integral_equation(
    kernel: OperatorKernel, coeff: GridFn, y_a: float, slack: GridFn | None = None
) -> GridFn:
    """Solve y(t) = y_a + I^alpha(coeff * y)(t) - slack(t) above the lower limit.

    Forward substitution on the triangular kernel; each step divides by the
    diagonal factor 1 - W[i,i] coeff[i], which the strict admissibility
    ceiling keeps positive.  Below the lower limit y is filled with y_a.
    Nonnegative slack produces sub-solutions, nonpositive slack
    super-solutions, zero slack the equality solution.
    """
    if coeff.grid != kernel.grid:
        raise DomainError("coefficient and kernel live on different grids")
    grid = kernel.grid
    a_index = kernel.a_index
    s = np.zeros(grid.count) if slack is None else slack.values
    w = kernel.weights
    c = coeff.values
    denom = 1.0 - kernel.diagonal * c
    bad = [i for i in range(a_index + 1, grid.count) if denom[i] <= 0.0]
    if bad:
        raise PreconditionError(
            f"diagonal factor 1 - W_ii coeff_i not positive at indices {bad}",
            indices=tuple(bad),
        )
    y = np.empty(grid.count)
    y[: a_index + 1] = y_a
    for i in range(a_index + 1, grid.count):
        known = y_a + float(w[i, a_index + 1 : i] @ (c[a_index + 1 : i] * y[a_index + 1 : i]))
        y[i] = (known - s[i]) / denom[i]
    return GridFn(grid, y)


def q_gronwall_classical(
    v: GridFn,
    delta: GridFn,
    a_index: int,
    tol: Tolerance = DEFAULT_TOL,
    max_terms: int = 2048,
) -> BoundResult:
    """Order-1 specialization: bound v(a) * sum_k (Omega_delta^k 1) under
    0 <= delta(t) < 1/(1-q).

    For constant delta the series bound is cross-checked against the
    order-1 Mittag-Leffler closed form; a disagreement raises.
    """
    grid = v.grid
    q = grid.q
    bad = [
        int(i)
        for i in range(grid.count)
        if not (0.0 <= delta.values[i] < 1.0 / (1.0 - q))
    ]
    if bad:
        raise PreconditionError(
            f"delta must satisfy 0 <= delta < 1/(1-q); offending indices {bad}",
            indices=tuple(bad),
        )
    inp = GronwallInput(v=v, mu=delta, alpha=FracOrder(1.0), a_index=a_index)
    result = gronwall_bound(inp, tol, max_terms)
    lam = float(delta.values[0])
    if np.all(delta.values == lam):
        a = grid.points[a_index]
        v_a = float(v.values[a_index])
        for i in range(a_index, grid.count):
            ml = mittag_leffler(MLSpec(1.0, 1.0, lam, a, tol), grid.points[i], q).value
            closed = v_a * ml
            got = float(result.bound.values[i])
            if abs(got - closed) > 100.0 * (tol.abs_tol + tol.rel_tol * abs(closed)):
                raise QFracError(
                    f"series/closed-form mismatch at t={grid.points[i]!r}: "
                    f"{got!r} vs {closed!r}"
                )
    return result


@dataclass(frozen=True, eq=False)
class DependenceReport:
    """Outcome of the continuous-dependence experiment."""

    phi: GridFn
    psi: GridFn
    abs_diff: np.ndarray
    bound: np.ndarray
    bound_holds: bool
    max_excess: float
    sequence_gammas: tuple[float, ...]
    sequence_sup_diffs: tuple[float, ...]
    sequence_bounds: tuple[float, ...]
    sequence_monotone: bool
    sequence_within_bound: bool


def _ml_bound_factor(
    grid: QGrid, a_index: int, alpha: FracOrder, lam: float, tol: Tolerance
) -> np.ndarray:
    """E_alpha(lam, t - a) per grid point, cross-checked against the
    operator series sum_k (Omega_lam^k 1) which it must equal term-for-term."""
    a = grid.points[a_index]
    q = grid.q
    out = np.ones(grid.count)
    for i in range(a_index, grid.count):
        out[i] = mittag_leffler(MLSpec(alpha.alpha, 1.0, lam, a, tol), grid.points[i], q).value
    kernel = build_kernel(grid, a_index, alpha, tol)
    op = OmegaOp(kernel=kernel, x=GridFn.constant(grid, lam))
    term = GridFn(grid, np.ones(grid.count))
    series = np.array(term.values)
    for _ in range(512):
        term = omega_apply(op, term)
        series += term.values
        if float(np.max(np.abs(term.values))) <= tol.abs_tol + tol.rel_tol * float(
            np.max(np.abs(series))
        ):
            break
    mismatch = np.max(np.abs(series[a_index:] - out[a_index:]))
    if mismatch > 1000.0 * (tol.abs_tol + tol.rel_tol * float(np.max(np.abs(out)))):
        raise QFracError(
            f"operator series and Mittag-Leffler bound factor disagree by {mismatch!r}"
        )
    return out


def dependence_experiment(
    grid: QGrid,
    a_index: int,
    alpha: FracOrder,
    gamma: float,
    beta: float,
    rhs: Callable[[float, float], float],
    lipschitz: float,
    tol: Tolerance = DEFAULT_TOL,
    bound_slack: float = 1e-12,
    seq_exponents: Sequence[int] = (1, 2, 3, 4, 5, 6),
) -> DependenceReport:
    """Solve the same problem from initial values gamma and beta and verify
    |phi - psi| <= |gamma - beta| * E_alpha(L, t - a) at every grid point.

    Also runs the perturbed-initial-value sequence gamma_n = gamma + 10**-n
    and reports whether sup|phi - phi_n| decreases monotonically and stays
    below |gamma - gamma_n| times the bound factor at the last grid point.
    """
    if not 0.0 <= lipschitz < 1.0:
        raise DomainError("Lipschitz constant must satisfy 0 <= L < 1")
    ratio = lipschitz * grid.points[-1] ** alpha.alpha * (1.0 - grid.q) ** alpha.alpha
    if ratio >= 1.0:
        raise DivergenceError(
            f"bound factor diverges on this grid: estimate {ratio:.6g} >= 1", ratio=ratio
        )

    def solve(y0: float) -> GridFn:
        ivp = NonlinearIVP(
            grid=grid, alpha=alpha, a_index=a_index, y0=y0, rhs=rhs, lipschitz=lipschitz
        )
        return solve_marching(ivp, tol).solution

    phi = solve(gamma)
    psi = solve(beta)
    factor = _ml_bound_factor(grid, a_index, alpha, lipschitz, tol)
    abs_diff = np.abs(phi.values - psi.values)
    bound = abs(gamma - beta) * factor
    sl = slice(a_index, grid.count)
    excess = abs_diff[sl] - bound[sl]
    max_excess = max(0.0, float(np.max(excess)))
    bound_holds = bool(max_excess <= bound_slack)
    gammas: list[float] = []
    sups: list[float] = []
    bounds: list[float] = []
    factor_last = float(factor[-1])
    for n in seq_exponents:
        g_n = gamma + 10.0 ** (-n)
        phi_n = solve(g_n)
        gammas.append(g_n)
        sups.append(float(np.max(np.abs(phi.values[sl] - phi_n.values[sl]))))
        bounds.append(abs(gamma - g_n) * factor_last)
    monotone = all(sups[i + 1] <= sups[i] for i in range(len(sups) - 1))
    within = all(s <= b + bound_slack for s, b in zip(sups, bounds))
    return DependenceReport(
        phi=phi,
        psi=psi,
        abs_diff=abs_diff,
        bound=bound,
        bound_holds=bound_holds,
        max_excess=max_excess,
        sequence_gammas=tuple(gammas),
        sequence_sup_diffs=tuple(sups),
        sequence_bounds=tuple(bounds),
        sequence_monotone=monotone,
        sequence_within_bound=within,
    )
