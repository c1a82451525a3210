"""LP relaxation of the multistage knapsack ILP, solved exactly to a vertex.

Variable order in every :class:`LpModel`: the ``T*n`` selection variables
``x[t][i]`` at index ``t*n + i``, followed by the ``(T-1)*n`` stability
variables ``z[t][i]`` at index ``T*n + t*n + i``.

Row order: ``T`` capacity rows, then for each ``(t, i)`` in row-major order
the pair ``z - x[t] + x[t+1] <= 1`` and ``z + x[t] - x[t+1] <= 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import Instance, StructuralError

ZERO = Fraction(0)
ONE = Fraction(1)


class UnboundedError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[tuple[int, Fraction], ...]  # sparse (var index, coefficient)
    rhs: Fraction
    relation: str = "<="


@dataclass(frozen=True)
class LpModel:
    """Maximize ``objective . v`` subject to ``constraints`` and ``bounds``."""

    T: int
    n: int
    num_vars: int
    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    bounds: tuple[tuple[Fraction, Fraction], ...]

    def x_index(self, t: int, i: int) -> int:
        return t * self.n + i

    def z_index(self, t: int, i: int) -> int:
        return self.T * self.n + t * self.n + i


@dataclass(frozen=True)
class FractionalSolution:
    x: tuple[tuple[Fraction, ...], ...]
    z: tuple[tuple[Fraction, ...], ...]
    objective_value: Fraction
    is_basic: bool
    model: LpModel = field(repr=False, compare=False)
    pivots: int = field(default=0, compare=False)


def build_lp(
    inst: Instance,
    fixed_zero: Iterable[tuple[int, int]] = (),
    capacities: Optional[Sequence[int]] = None,
) -> LpModel:
    """LP relaxation with ``x`` and ``z`` boxed in ``[0, 1]``.

    Pairs ``(t, i)`` in ``fixed_zero`` get bounds ``[0, 0]`` on ``x[t][i]``;
    ``capacities`` replaces ``inst.C`` when given.
    """
    T, n = inst.T, inst.n
    caps = inst.C if capacities is None else tuple(capacities)
    if len(caps) != T:
        raise StructuralError(f"capacity override has {len(caps)} entries, expected {T}")
    for c in caps:
        if c < 0:
            raise ValueError(f"negative capacity override {c}")

    nx = T * n
    num_vars = nx + (T - 1) * n
    objective = [ZERO] * num_vars
    for t in range(T):
        for i in range(n):
            objective[t * n + i] = Fraction(inst.p[t][i])
    for t in range(T - 1):
        for i in range(n):
            objective[nx + t * n + i] = Fraction(inst.B[t][i])

    bounds = [(ZERO, ONE)] * num_vars
    for t, i in fixed_zero:
        if not (0 <= t < T and 0 <= i < n):
            raise IndexError(f"fixed variable ({t}, {i}) out of range")
        bounds[t * n + i] = (ZERO, ZERO)

    rows = []
    for t in range(T):
        coeffs = tuple((t * n + i, Fraction(inst.w[t][i])) for i in range(n) if inst.w[t][i])
        rows.append(Constraint(coeffs, Fraction(caps[t])))
    for t in range(T - 1):
        for i in range(n):
            z, a, b = nx + t * n + i, t * n + i, (t + 1) * n + i
            rows.append(Constraint(((a, -ONE), (b, ONE), (z, ONE)), ONE))
            rows.append(Constraint(((a, ONE), (b, -ONE), (z, ONE)), ONE))

    return LpModel(T, n, num_vars, tuple(objective), tuple(rows), tuple(bounds))


def _bounded_simplex(c, rows, rhs, lower, upper):
    """Primal simplex for ``max c.v, A v <= rhs, lower <= v <= upper``.

    Bounds are handled implicitly (nonbasic variables sit at a bound), the
    start is the all-slack basis with every structural variable at its lower
    bound, and pivoting follows Bland's rule.  Returns ``(values, pivots)``.
    """
    N = len(c)
    m = len(rows)
    lo = list(lower) + [ZERO] * m
    hi = list(upper) + [None] * m
    value = list(lo)
    for r, row in enumerate(rows):
        s = rhs[r] - sum(a * lo[j] for j, a in row.items())
        if s < 0:
            raise ValueError(f"row {r} violated by the lower-bound start; need a phase-1 start")
        value[N + r] = s

    basis = [N + r for r in range(m)]
    # row r reads: v[basis[r]] + sum_j tab[r][j] * v[j] = const, over nonbasic j
    tab = [dict(row) for row in rows]
    d = {j: cj for j, cj in enumerate(c) if cj}
    pivots = 0

    while True:
        enter = None
        for j in sorted(d):
            dj = d[j]
            if (dj > 0 and (hi[j] is None or value[j] < hi[j])) or (dj < 0 and value[j] > lo[j]):
                enter = j
                break
        if enter is None:
            return value[:N], pivots
        j = enter
        direction = 1 if d[j] > 0 else -1

        theta = None if hi[j] is None else hi[j] - lo[j]
        leave_row = None
        rates = []
        for r in range(m):
            a = tab[r].get(j)
            if not a:
                continue
            rate = -a if direction > 0 else a
            rates.append((r, rate))
            b = basis[r]
            if rate < 0:
                lim = (value[b] - lo[b]) / -rate
            elif hi[b] is not None:
                lim = (hi[b] - value[b]) / rate
            else:
                continue
            if theta is None or lim < theta or (
                lim == theta and leave_row is not None and b < basis[leave_row]
            ):
                theta = lim
                leave_row = r
        if theta is None:
            raise UnboundedError(f"objective unbounded along variable {j}")

        value[j] += theta if direction > 0 else -theta
        for r, rate in rates:
            value[basis[r]] += rate * theta
        if leave_row is None:
            continue  # bound flip, basis unchanged

        pivots += 1
        r = leave_row
        leaving = basis[r]
        # snap to the bound it reached
        value[leaving] = lo[leaving] if value[leaving] <= lo[leaving] else hi[leaving]
        prow = tab[r]
        piv = prow.pop(j)
        new_row = {k: a / piv for k, a in prow.items()}
        new_row[leaving] = ONE / piv
        tab[r] = new_row
        basis[r] = j
        for s in range(m):
            if s == r:
                continue
            row = tab[s]
            f = row.pop(j, None)
            if not f:
                continue
            for k, a in new_row.items():
                v = row.get(k, ZERO) - f * a
                if v:
                    row[k] = v
                else:
                    row.pop(k, None)
        dj = d.pop(j)
        for k, a in new_row.items():
            v = d.get(k, ZERO) - dj * a
            if v:
                d[k] = v
            else:
                d.pop(k, None)


def solve_basic(model: LpModel) -> FractionalSolution:
    """Optimal vertex of ``model`` in exact rational arithmetic."""
    rows = [dict(con.coeffs) for con in model.constraints]
    rhs = [con.rhs for con in model.constraints]
    for con in model.constraints:
        if con.relation != "<=":
            raise ValueError(f"unsupported relation {con.relation!r}")
    values, pivots = _bounded_simplex(
        model.objective,
        rows,
        rhs,
        [b[0] for b in model.bounds],
        [b[1] for b in model.bounds],
    )
    T, n = model.T, model.n
    x = tuple(tuple(values[t * n + i] for i in range(n)) for t in range(T))
    z = tuple(tuple(values[T * n + t * n + i] for i in range(n)) for t in range(T - 1))
    obj = sum((cj * v for cj, v in zip(model.objective, values) if cj), ZERO)
    return FractionalSolution(x, z, obj, True, model, pivots)


def normalize_z(sol: FractionalSolution) -> FractionalSolution:
    """Set every ``z[t][i]`` to ``1 - |x[t+1][i] - x[t][i]|`` and recompute the objective."""
    model = sol.model
    x = sol.x
    z = tuple(
        tuple(ONE - abs(x[t + 1][i] - x[t][i]) for i in range(model.n))
        for t in range(model.T - 1)
    )
    obj = ZERO
    for t in range(model.T):
        for i in range(model.n):
            obj += model.objective[model.x_index(t, i)] * x[t][i]
    for t in range(model.T - 1):
        for i in range(model.n):
            obj += model.objective[model.z_index(t, i)] * z[t][i]
    return FractionalSolution(x, z, obj, sol.is_basic, model, sol.pivots)


def _fractional(v: Fraction) -> bool:
    return v.denominator != 1


def count_fractional_objects(sol: FractionalSolution) -> tuple[int, frozenset[int]]:
    """Objects with at least one strictly fractional ``x`` or ``z`` value."""
    objs = set()
    for rows in (sol.x, sol.z):
        for row in rows:
            for i, v in enumerate(row):
                if _fractional(v):
                    objs.add(i)
    return len(objs), frozenset(objs)


def fractional_object_bound(T: int) -> int:
    """Largest possible number of fractional objects at a vertex: (T^3 + 3T^2 + 2T) / 6."""
    return (T**3 + 3 * T**2 + 2 * T) // 6


def solve_relaxation(inst: Instance, fixed_zero=(), capacities=None) -> FractionalSolution:
    """Build, solve and normalize in one go."""
    return normalize_z(solve_basic(build_lp(inst, fixed_zero, capacities)))


def to_lp_format(model: LpModel) -> str:
    """CPLEX-LP text of the model, for cross-checking with external solvers."""

    def name(k: int) -> str:
        if k < model.T * model.n:
            t, i = divmod(k, model.n)
            return f"x_{t + 1}_{i + 1}"
        t, i = divmod(k - model.T * model.n, model.n)
        return f"z_{t + 1}_{i + 1}"

    def term(coef: Fraction, k: int, first: bool) -> str:
        sign = "-" if coef < 0 else ("" if first else "+")
        mag = abs(coef)
        num = "" if mag == 1 else f"{float(mag):.17g} "
        return f"{sign} {num}{name(k)}".strip()

    def expr(pairs) -> str:
        parts = [term(cf, k, idx == 0) for idx, (k, cf) in enumerate(pairs)]
        if not parts:
            return f"0 {name(0)}" if model.num_vars else "0"
        return " ".join(parts)

    lines = ["\\ multistage knapsack relaxation", "Maximize"]
    obj = [(k, cf) for k, cf in enumerate(model.objective) if cf]
    lines.append(" obj: " + (expr(obj) if obj else "0"))
    lines.append("Subject To")
    for r, con in enumerate(model.constraints):
        lines.append(f" r{r + 1}: {expr(con.coeffs)} <= {float(con.rhs):.17g}")
    lines.append("Bounds")
    for k, (lo, hi) in enumerate(model.bounds):
        lines.append(f" {float(lo):.17g} <= {name(k)} <= {float(hi):.17g}")
    lines.append("End")
    return "\n".join(lines) + "\n"
