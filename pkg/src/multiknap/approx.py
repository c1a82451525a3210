"""Approximation algorithms: LP rounding and the two approximation schemes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from itertools import combinations, product
from typing import Callable, Iterable, Optional, Sequence

from .core import GuardError, Instance, ObjectiveBreakdown, Schedule, evaluate
from .exact import DP_MAX_ENTRIES, dp_solve
from .simplex import ONE, ZERO, FractionalSolution, count_fractional_objects, solve_relaxation

PTAS_MAX_WORK = 10**9


@dataclass(frozen=True)
class GuessAssignment:
    """Guessed objects ``X`` and, per step, which of them are taken."""

    X: tuple[int, ...]
    X_t: tuple[tuple[int, ...], ...]

    def step_weight(self, inst: Instance, t: int) -> int:
        return sum(inst.w[t][j] for j in self.X_t[t])


@dataclass(frozen=True)
class PtasReport:
    best_schedule: Schedule
    value: int
    epsilon: Fraction
    ell: int
    assignments_examined: int
    lp_solves: int
    breakdown: Optional[ObjectiveBreakdown] = None
    best_guess: Optional[GuessAssignment] = None
    best_offset: Optional[int] = None
    partitions: Optional[tuple[tuple[range, ...], ...]] = None


def fractional_reward(sol: FractionalSolution, i: int) -> Fraction:
    """Reward of object ``i`` in a (normalized) fractional solution."""
    model = sol.model
    r = ZERO
    for t in range(model.T):
        r += model.objective[model.x_index(t, i)] * sol.x[t][i]
    for t in range(model.T - 1):
        r += model.objective[model.z_index(t, i)] * sol.z[t][i]
    return r


def rounding_loss_bound(sol: FractionalSolution) -> Fraction:
    """Total fractional reward of the fractional objects: what rounding down may lose."""
    _, frac = count_fractional_objects(sol)
    return sum((fractional_reward(sol, i) for i in frac), ZERO)


def round_lp(
    inst: Instance,
    fixed_zero: Iterable[tuple[int, int]] = (),
    capacities: Optional[Sequence[int]] = None,
) -> tuple[Schedule, FractionalSolution]:
    """Solve the relaxation to an optimal vertex and keep exactly the ``x`` equal to 1."""
    sol = solve_relaxation(inst, fixed_zero, capacities)
    sched = Schedule(tuple(tuple(v == ONE for v in row) for row in sol.x))
    value = evaluate(inst, sched).total
    if value < sol.objective_value - rounding_loss_bound(sol):
        raise AssertionError("rounded value below LP value minus fractional rewards")
    return sched, sol


def ptas_ell(T: int, epsilon: Fraction, n: int) -> int:
    """Number of guessed objects: ``min(ceil((T+1) T^3 / epsilon), n)``."""
    return min(math.ceil(Fraction((T + 1) * T**3) / epsilon), n)


def ptas_work_estimate(n: int, T: int, ell: int) -> int:
    return math.comb(n, ell) * 2 ** (ell * T)


def _check_epsilon(epsilon) -> Fraction:
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return eps


def ptas_constant(
    inst: Instance,
    epsilon,
    max_work: int = PTAS_MAX_WORK,
    ell: Optional[int] = None,
) -> PtasReport:
    """Guess-and-round approximation scheme for a fixed number of steps.

    For every set ``X`` of ``ell`` objects and every per-step choice of
    subsets of ``X`` that fits the capacities, the smallest reward ``g``
    among the guessed objects caps the profits allowed on the rest: any
    ``x[t][i]`` with ``p[t][i] > g`` is fixed to zero before the residual LP
    is rounded.  The best combined schedule wins; ties keep the first one in
    iteration order (``X`` in lexicographic order, each step's subset in
    binary-counter order over ``X``, step 1 varying slowest).

    ``ell`` overrides the formula; the ``(1 - epsilon)`` guarantee only
    holds for the default.
    """
    eps = _check_epsilon(epsilon)
    T, n = inst.T, inst.n
    if ell is None:
        ell = ptas_ell(T, eps, n)
    if not 0 <= ell <= n:
        raise ValueError(f"ell must lie in [0, {n}], got {ell}")
    work = ptas_work_estimate(n, T, ell)
    if work > max_work:
        raise GuardError("approximation scheme guess loop", work, max_work)

    best_value = -1
    best_sched = None
    best_guess = None
    examined = 0
    lp_solves = 0
    for X in combinations(range(n), ell):
        Xset = set(X)
        Y = [i for i in range(n) if i not in Xset]
        sub = inst.restrict_objects(Y)
        per_step = []
        for t in range(T):
            opts = []
            for mask in range(1 << ell):
                chosen = tuple(X[k] for k in range(ell) if (mask >> k) & 1)
                if sum(inst.w[t][j] for j in chosen) <= inst.C[t]:
                    opts.append(chosen)
            per_step.append(opts)
        lp_cache = {}
        for X_t in product(*per_step):
            examined += 1
            taken = [set(s) for s in X_t]
            g_min = None
            for j in X:
                r = sum(inst.p[t][j] for t in range(T) if j in taken[t])
                r += sum(inst.B[t][j] for t in range(T - 1) if (j in taken[t]) == (j in taken[t + 1]))
                g_min = r if g_min is None else min(g_min, r)
            residual = tuple(inst.C[t] - sum(inst.w[t][j] for j in X_t[t]) for t in range(T))
            fixed = frozenset(
                (t, k)
                for k, i in enumerate(Y)
                for t in range(T)
                if g_min is not None and inst.p[t][i] > g_min
            )
            key = (fixed, residual)
            if key not in lp_cache:
                lp_cache[key] = round_lp(sub, fixed, residual)[0] if Y else None
                lp_solves += bool(Y)
            y_sched = lp_cache[key]
            rows = []
            for t in range(T):
                row = [i in taken[t] for i in range(n)]
                if y_sched is not None:
                    for k, i in enumerate(Y):
                        row[i] = row[i] or y_sched.x[t][k]
                rows.append(tuple(row))
            sched = Schedule(tuple(rows))
            value = evaluate(inst, sched).total
            if value > best_value:
                best_value, best_sched = value, sched
                best_guess = GuessAssignment(X, tuple(X_t))

    return PtasReport(
        best_sched,
        best_value,
        eps,
        ell,
        examined,
        lp_solves,
        evaluate(inst, best_sched),
        best_guess,
    )


def dp_inner(inst: Instance, epsilon, max_entries: int = DP_MAX_ENTRIES) -> PtasReport:
    """Exact inner solver with the same report shape as :func:`ptas_constant`."""
    sched, res = dp_solve(inst, max_entries)
    return PtasReport(sched, res.total, Fraction(epsilon), 0, 0, 0, res)


def horizon_length(epsilon) -> int:
    """Interval length ``ceil(2 / epsilon)`` used by :func:`ptas_general`."""
    eps = _check_epsilon(epsilon)
    return math.ceil(1 / (eps / 2))


def interval_partition(T: int, T0: int, offset: int) -> list[range]:
    """0-based step ranges for shift ``offset`` in ``1..T0``.

    In 1-based terms the intervals are ``[s, s+T0-1]`` clipped to ``[1, T]``
    for every ``s`` congruent to ``offset`` modulo ``T0``.
    """
    if not 1 <= offset <= T0:
        raise ValueError(f"offset must lie in [1, {T0}]")
    parts = []
    for start in range(offset - T0, T + 1, T0):
        lo, hi = max(start, 1), min(start + T0 - 1, T)
        if lo <= hi:
            parts.append(range(lo - 1, hi))
    return parts


InnerSolver = Callable[[Instance, Fraction], PtasReport]


def ptas_general(
    inst: Instance,
    epsilon,
    inner: Optional[InnerSolver] = None,
    max_work: int = PTAS_MAX_WORK,
) -> PtasReport:
    """Approximation scheme for any horizon by shifted interval partitions.

    Each of the ``T0 = ceil(2/epsilon)`` shifts splits the horizon into
    intervals of at most ``T0`` steps, solved independently by ``inner`` at
    accuracy ``epsilon / 2`` with bonuses across interval boundaries ignored.
    The concatenations are scored on the full instance and the best is kept
    (first shift on ties).
    """
    eps = _check_epsilon(epsilon)
    inner_eps = eps / 2
    T0 = horizon_length(eps)
    if inner is None:
        inner = partial(ptas_constant, max_work=max_work)

    best = None
    ell = examined = lp_solves = 0
    partitions = tuple(tuple(interval_partition(inst.T, T0, k)) for k in range(1, T0 + 1))
    for offset, parts in enumerate(partitions, start=1):
        rows = []
        for steps in parts:
            rep = inner(inst.restrict_steps(steps.start, steps.stop), inner_eps)
            rows.extend(rep.best_schedule.x)
            ell = max(ell, rep.ell)
            examined += rep.assignments_examined
            lp_solves += rep.lp_solves
        sched = Schedule(tuple(rows))
        res = evaluate(inst, sched)
        if best is None or res.total > best[1].total:
            best = (sched, res, offset)

    sched, res, offset = best
    return PtasReport(sched, res.total, eps, ell, examined, lp_solves, res, None, offset, partitions)
