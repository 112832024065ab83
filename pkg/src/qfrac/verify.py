"""Seeded verification suites.

Each suite checks one family of identities or bounds at its published
tolerance and returns a JSON-ready report::

    {"suite": ..., "seed": ..., "cases": ..., "failures": [...],
     "max_errors_by_property": {...}}

Suites are deterministic: randomized instances draw from per-case generators
derived by seed-splitting, so reports are byte-stable for a fixed seed and
independent of execution order.
"""
from __future__ import annotations

import math
from itertools import product
from typing import Callable

import numpy as np

from .gronwall import (
    ComparisonInput,
    GronwallInput,
    gronwall_bound,
    march_integral_equation,
    q_gronwall_classical,
    sart_bound,
    verify_comparison,
    dependence_experiment,
)
from .operators import build_kernel, fractional_integral
from .qcore import (
    FracOrder,
    GridFn,
    gamma_q,
    make_grid,
    q_bracket,
    q_factorial_power,
)
from .solver import LinearIVP, NonlinearIVP, solve_linear_closed, solve_linear_iterative, solve_marching
from .special import MLSpec, mittag_leffler

_TINY = 1e-300


def _rel_err(got: float, want: float) -> float:
    return abs(got - want) / max(abs(want), _TINY)


def _rng(seed: int, suite_id: int, case: int) -> np.random.Generator:
    return np.random.default_rng([seed, suite_id, case])


def _record(errors: dict[str, float], key: str, err: float) -> float:
    errors[key] = max(errors.get(key, 0.0), float(err))
    return err


def suite_lemma1(seed: int, cases: int | None = None):
    """Factorial-power identities: exponent addition, scaling, and the two
    one-sided derivative rules, each at 1e-10 relative error."""
    pair_count = cases or 20
    exps = (0.25, 0.5, 1.3)
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    for qi, q in enumerate((0.3, 0.5, 0.9)):
        grid = make_grid(q, 6, 8)
        pts = grid.points
        for c in range(pair_count):
            rng = _rng(seed, 10 + qi, c)
            i = int(rng.integers(2, grid.count))
            j = int(rng.integers(0, i - 1))
            t, s = pts[i], pts[j]
            n_cases += 1
            for beta, gam in product(exps, exps):
                lhs = q_factorial_power(t, s, beta + gam, q)
                rhs = q_factorial_power(t, s, beta, q) * q_factorial_power(
                    t, q ** beta * s, gam, q
                )
                err = _record(errors, "I", _rel_err(lhs, rhs))
                if err > 1e-10:
                    failures.append(
                        f"lemma1/I q={q} t={t!r} s={s!r} beta={beta} gamma={gam}: {err:.3e}"
                    )
            for a_scale in (q, 1.0 / q, 2.0):
                for beta in exps:
                    lhs = q_factorial_power(a_scale * t, a_scale * s, beta, q)
                    rhs = a_scale ** beta * q_factorial_power(t, s, beta, q)
                    err = _record(errors, "II", _rel_err(lhs, rhs))
                    if err > 1e-10:
                        failures.append(
                            f"lemma1/II q={q} a={a_scale!r} beta={beta}: {err:.3e}"
                        )
            for al in exps:
                # derivative in t: needs s below the predecessor point
                lhs = (
                    q_factorial_power(t, s, al, q) - q_factorial_power(q * t, s, al, q)
                ) / ((1.0 - q) * t)
                rhs = q_bracket(al, q) * q_factorial_power(t, s, al - 1.0, q)
                err = _record(errors, "III", _rel_err(lhs, rhs))
                if err > 1e-10:
                    failures.append(f"lemma1/III q={q} alpha={al}: {err:.3e}")
                # derivative in s
                lhs = (
                    q_factorial_power(t, s, al, q) - q_factorial_power(t, q * s, al, q)
                ) / ((1.0 - q) * s)
                rhs = -q_bracket(al, q) * q_factorial_power(t, q * s, al - 1.0, q)
                err = _record(errors, "IV", _rel_err(lhs, rhs))
                if err > 1e-10:
                    failures.append(f"lemma1/IV q={q} alpha={al}: {err:.3e}")
    return n_cases, failures, errors


def suite_gamma(seed: int, cases: int | None = None):
    """q-Gamma recurrence at 1e-10 and integer factorial values at 1e-12."""
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    for q in (0.3, 0.5, 0.9):
        for al in (0.3, 0.5, 1.7, 2.4):
            n_cases += 1
            err = _record(
                errors,
                "recurrence",
                _rel_err(gamma_q(al + 1.0, q), q_bracket(al, q) * gamma_q(al, q)),
            )
            if err > 1e-10:
                failures.append(f"gamma/recurrence q={q} alpha={al}: {err:.3e}")
        for n in range(11):
            n_cases += 1
            fact = 1.0
            for k in range(1, n + 1):
                fact *= q_bracket(float(k), q)
            err = _record(errors, "factorial", _rel_err(gamma_q(n + 1.0, q), fact))
            if err > 1e-12:
                failures.append(f"gamma/factorial q={q} n={n}: {err:.3e}")
    return n_cases, failures, errors


def suite_powerrule(seed: int, cases: int | None = None):
    """Fractional integral of (x - a)_q^mu against its closed form, 1e-8."""
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    for q in (0.3, 0.5, 0.9):
        grid = make_grid(q, 11, 12)
        a = grid.points[0]
        for mu, al in product((0.0, 0.5, 1.0, 2.3), (0.25, 0.5, 0.9)):
            n_cases += 1
            kernel = build_kernel(grid, 0, FracOrder(al))
            fvals = np.zeros(grid.count)
            for i in range(grid.count):
                fvals[i] = q_factorial_power(grid.points[i], a, mu, q)
            got = fractional_integral(GridFn(grid, fvals), kernel).values
            coeff = gamma_q(mu + 1.0, q) / gamma_q(al + mu + 1.0, q)
            worst = 0.0
            for i in range(1, grid.count):
                want = coeff * q_factorial_power(grid.points[i], a, mu + al, q)
                worst = max(worst, _rel_err(got[i], want))
            _record(errors, "powerrule", worst)
            if worst > 1e-8:
                failures.append(f"powerrule q={q} mu={mu} alpha={al}: {worst:.3e}")
    return n_cases, failures, errors


def suite_lemma22(seed: int, cases: int | None = None):
    """Inversion identity residual for random grid functions, 1e-8."""
    per_pair = cases or 20
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    from .operators import caputo_inverse_identity_check

    for pi, (q, al) in enumerate(product((0.3, 0.5), (0.5, 0.8))):
        grid = make_grid(q, 9, 10)
        for c in range(per_pair):
            n_cases += 1
            rng = _rng(seed, 40 + pi, c)
            f = GridFn(grid, rng.uniform(-1.0, 1.0, grid.count))
            resid = caputo_inverse_identity_check(f, 0, FracOrder(al))
            _record(errors, "residual", resid)
            if resid > 1e-8:
                failures.append(f"lemma22 q={q} alpha={al} case={c}: {resid:.3e}")
    return n_cases, failures, errors


def suite_solver(seed: int, cases: int | None = None):
    """Closed form vs successive approximation vs marching, sup-norm 1e-7."""
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    for q, al, lam in product((0.3, 0.5), (0.5, 0.9), (0.2, 0.4)):
        n_cases += 1
        grid = make_grid(q, 11, 12)
        forcing = GridFn(grid, grid.t)
        p = LinearIVP(alpha=FracOrder(al), lam=lam, a_index=0, y0=1.0, forcing=forcing)
        closed = solve_linear_closed(p).solution.values
        iterative = solve_linear_iterative(p).solution.values
        ivp = NonlinearIVP(
            grid=grid,
            alpha=FracOrder(al),
            a_index=0,
            y0=1.0,
            rhs=lambda t, y, lam=lam: lam * y + t,
            lipschitz=lam,
        )
        marched = solve_marching(ivp).solution.values
        worst = max(
            float(np.max(np.abs(closed - iterative))),
            float(np.max(np.abs(closed - marched))),
            float(np.max(np.abs(iterative - marched))),
        )
        _record(errors, "pairwise_sup", worst)
        if worst > 1e-7:
            failures.append(f"solver q={q} alpha={al} lam={lam}: {worst:.3e}")
    return n_cases, failures, errors


def suite_ratio(seed: int, cases: int | None = None):
    """Measured consecutive-term ratio at term 40 against (1-q)**alpha, 1e-3."""
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    for q, al in product((0.3, 0.5), (0.5, 0.9)):
        n_cases += 1
        a40 = 1.0 / gamma_q(40 * al + 1.0, q)
        a39 = 1.0 / gamma_q(39 * al + 1.0, q)
        measured = a40 / a39
        limit = (1.0 - q) ** al
        err = _record(errors, "ratio", abs(measured - limit))
        if err > 1e-3:
            failures.append(f"ratio q={q} alpha={al}: {err:.3e}")
    return n_cases, failures, errors


def _march_nonneg(kernel, mu: GridFn, v_a: float, raw_slack: np.ndarray) -> GridFn:
    """March v = v_a + I^alpha(mu v) - slack with slack clamped so v stays
    nonnegative (slack_i <= accumulated history), preserving the inequality."""
    grid = kernel.grid
    w = kernel.weights
    c = mu.values
    y = np.empty(grid.count)
    y[: kernel.a_index + 1] = v_a
    for i in range(kernel.a_index + 1, grid.count):
        known = v_a + float(
            w[i, kernel.a_index + 1 : i] @ (c[kernel.a_index + 1 : i] * y[kernel.a_index + 1 : i])
        )
        slack = min(raw_slack[i], known)
        y[i] = (known - slack) / (1.0 - w[i, i] * c[i])
    return GridFn(grid, y)


def suite_gronwall(seed: int, cases: int | None = None):
    """Slack-constructed instances must never exceed the series bound (1e-12)."""
    per_combo = cases or 200
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    for ci, (q, al) in enumerate(product((0.3, 0.5), (0.5, 0.9))):
        grid = make_grid(q, 11, 12)
        alpha = FracOrder(al)
        kernel = build_kernel(grid, 0, alpha)
        ceiling = sart_bound(grid, alpha)
        for c in range(per_combo):
            n_cases += 1
            rng = _rng(seed, 70 + ci, c)
            v_a = float(rng.uniform(0.0, 2.0))
            mu = GridFn(grid, rng.uniform(0.0, 0.98, grid.count) * ceiling)
            raw_slack = rng.uniform(0.0, 1.0, grid.count)
            v = _march_nonneg(kernel, mu, v_a, raw_slack)
            result = gronwall_bound(GronwallInput(v=v, mu=mu, alpha=alpha, a_index=0))
            _record(errors, "max_violation", result.max_violation)
            if result.max_violation > 1e-12:
                failures.append(
                    f"gronwall q={q} alpha={al} case={c}: violation {result.max_violation:.3e}"
                )
    return n_cases, failures, errors


def suite_comparison(seed: int, cases: int | None = None):
    """Slack-constructed super/sub pairs must stay ordered (1e-12)."""
    total = cases or 200
    combos = tuple(product((0.3, 0.5), (0.5, 0.9)))
    per_combo = max(1, total // len(combos))
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    for ci, (q, al) in enumerate(combos):
        grid = make_grid(q, 11, 12)
        alpha = FracOrder(al)
        kernel = build_kernel(grid, 0, alpha)
        ceiling = sart_bound(grid, alpha)
        for c in range(per_combo):
            n_cases += 1
            rng = _rng(seed, 80 + ci, c)
            x = GridFn(grid, rng.uniform(0.0, 0.98, grid.count) * ceiling)
            w_a = float(rng.uniform(0.5, 2.0))
            v_a = w_a - float(rng.uniform(0.0, 1.0))
            slack_w = GridFn(grid, -rng.uniform(0.0, 0.5, grid.count))
            slack_v = GridFn(grid, rng.uniform(0.0, 0.5, grid.count))
            w = march_integral_equation(kernel, x, w_a, slack_w)
            v = march_integral_equation(kernel, x, v_a, slack_v)
            report = verify_comparison(
                ComparisonInput(w=w, v=v, x=x, alpha=alpha, a_index=0), tol=1e-12
            )
            if not report.all_hypotheses:
                failures.append(f"comparison q={q} alpha={al} case={c}: hypothesis dropout")
                continue
            _record(errors, "max_violation", report.max_violation)
            if not report.conclusion_holds:
                failures.append(
                    f"comparison q={q} alpha={al} case={c}: violation {report.max_violation:.3e}"
                )
    return n_cases, failures, errors


def suite_corollary(seed: int, cases: int | None = None):
    """Order-1 bound: series equals the Mittag-Leffler closed form (1e-10)
    and dominates slack-constructed instances."""
    instance_count = cases or 50
    failures: list[str] = []
    errors: dict[str, float] = {}
    n_cases = 0
    q = 0.5
    grid = make_grid(q, 11, 12)
    alpha = FracOrder(1.0)
    kernel = build_kernel(grid, 0, alpha)
    a = grid.points[0]
    for lam in (0.3, 0.9, 1.8):
        n_cases += 1
        delta = GridFn.constant(grid, lam)
        rng = _rng(seed, 90, n_cases)
        v = _march_nonneg(kernel, delta, float(rng.uniform(0.5, 2.0)), rng.uniform(0.0, 1.0, grid.count))
        result = q_gronwall_classical(v, delta, 0)
        v_a = float(v.values[0])
        worst = 0.0
        for i in range(grid.count):
            ml = mittag_leffler(MLSpec(1.0, 1.0, lam, a), grid.points[i], q).value
            worst = max(worst, _rel_err(float(result.bound.values[i]), v_a * ml))
        _record(errors, "closed_form", worst)
        if worst > 1e-10:
            failures.append(f"corollary lam={lam}: closed-form mismatch {worst:.3e}")
        if result.max_violation > 1e-12:
            failures.append(f"corollary lam={lam}: violation {result.max_violation:.3e}")
    for c in range(instance_count):
        n_cases += 1
        rng = _rng(seed, 91, c)
        delta = GridFn(grid, rng.uniform(0.0, 0.98 / (1.0 - q), grid.count))
        v = _march_nonneg(kernel, delta, float(rng.uniform(0.0, 2.0)), rng.uniform(0.0, 1.0, grid.count))
        result = q_gronwall_classical(v, delta, 0)
        _record(errors, "max_violation", result.max_violation)
        if result.max_violation > 1e-12:
            failures.append(f"corollary case={c}: violation {result.max_violation:.3e}")
    return n_cases, failures, errors


def suite_dependence(seed: int, cases: int | None = None):
    """Initial-value sensitivity: tight bound for linear right-hand sides,
    dominance for the bounded nonlinear one, vanishing perturbations."""
    failures: list[str] = []
    errors: dict[str, float] = {}
    q, al, lip = 0.5, 0.5, 0.5
    grid = make_grid(q, 11, 12)
    alpha = FracOrder(al)
    n_cases = 3
    linear = dependence_experiment(
        grid, 0, alpha, gamma=1.0, beta=0.0, rhs=lambda t, y: lip * y, lipschitz=lip
    )
    worst = 0.0
    for i in range(grid.count):
        worst = max(worst, _rel_err(float(linear.abs_diff[i]), float(linear.bound[i])))
    _record(errors, "linear_tightness", worst)
    if worst > 1e-8:
        failures.append(f"dependence/linear: bound not attained, rel err {worst:.3e}")
    bounded = dependence_experiment(
        grid, 0, alpha, gamma=1.0, beta=0.9,
        rhs=lambda t, y: lip * math.sin(y), lipschitz=lip,
    )
    _record(errors, "nonlinear_excess", bounded.max_excess)
    if not bounded.bound_holds:
        failures.append(f"dependence/nonlinear: bound exceeded by {bounded.max_excess:.3e}")
    if not bounded.sequence_monotone:
        failures.append("dependence/sequence: sup differences not monotone")
    if not bounded.sequence_within_bound:
        failures.append("dependence/sequence: bound exceeded")
    seq_excess = max(
        max(0.0, s - b)
        for s, b in zip(bounded.sequence_sup_diffs, bounded.sequence_bounds)
    )
    _record(errors, "sequence_excess", seq_excess)
    return n_cases, failures, errors


_SUITES: dict[str, Callable] = {
    "lemma1": suite_lemma1,
    "gamma": suite_gamma,
    "powerrule": suite_powerrule,
    "lemma22": suite_lemma22,
    "solver": suite_solver,
    "ratio": suite_ratio,
    "gronwall": suite_gronwall,
    "comparison": suite_comparison,
    "corollary": suite_corollary,
    "dependence": suite_dependence,
}


def available_suites() -> tuple[str, ...]:
    return tuple(_SUITES) + ("all",)


def run_suite(name: str, seed: int = 7, cases: int | None = None) -> dict:
    """Run one suite (or ``all``) and return its JSON-ready report."""
    if name == "all":
        total = 0
        failures: list[str] = []
        errors: dict[str, float] = {}
        for sub, fn in _SUITES.items():
            n, fail, errs = fn(seed, cases)
            total += n
            failures.extend(fail)
            for k, v in errs.items():
                errors[f"{sub}.{k}"] = v
        return {
            "suite": "all",
            "seed": seed,
            "cases": total,
            "failures": failures,
            "max_errors_by_property": errors,
        }
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {available_suites()}")
    n, failures, errors = _SUITES[name](seed, cases)
    return {
        "suite": name,
        "seed": seed,
        "cases": n,
        "failures": failures,
        "max_errors_by_property": errors,
    }
