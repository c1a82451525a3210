"""Instance data model, feasibility and objective evaluation.

Indices are 0-based throughout the library: time steps ``t`` run over
``range(T)`` and objects ``i`` over ``range(n)``.  Matrices are stored as
tuples of tuples so instances and schedules are hashable and immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence


class StructuralError(ValueError):
    """Dimensions or entries do not match what an instance requires."""


class GuardError(RuntimeError):
    """A solver refused to run because its work/size estimate exceeds a guard."""

    def __init__(self, message: str, estimate: int, limit: int):
        super().__init__(f"{message}: estimate {estimate} exceeds limit {limit}")
        self.estimate = estimate
        self.limit = limit


Matrix = tuple[tuple[int, ...], ...]


def _as_matrix(name: str, rows: Sequence[Sequence[int]], nrows: int, ncols: int) -> Matrix:
    rows = tuple(tuple(r) for r in rows)
    if len(rows) != nrows:
        raise StructuralError(f"{name}: expected {nrows} rows, got {len(rows)}")
    for k, r in enumerate(rows):
        if len(r) != ncols:
            raise StructuralError(f"{name}: row {k} has {len(r)} entries, expected {ncols}")
        for v in r:
            _check_entry(name, v)
    return rows


def _check_entry(name: str, v) -> None:
    # bool is an int subclass but never a meaningful datum here
    if isinstance(v, bool) or not isinstance(v, int):
        raise StructuralError(f"{name}: entries must be integers, got {v!r}")
    if v < 0:
        raise StructuralError(f"{name}: entries must be non-negative, got {v}")


@dataclass(frozen=True)
class Instance:
    """A multistage knapsack instance.

    ``p[t][i]`` and ``w[t][i]`` are the profit and weight of object ``i`` at
    step ``t``; ``B[t][i]`` is earned when the decision on ``i`` is the same
    at steps ``t`` and ``t + 1``; ``C[t]`` is the capacity at step ``t``.
    """

    T: int
    n: int
    p: Matrix
    w: Matrix
    B: Matrix
    C: tuple[int, ...]

    def __post_init__(self):
        if isinstance(self.T, bool) or not isinstance(self.T, int) or self.T < 1:
            raise StructuralError(f"T must be a positive integer, got {self.T!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 0:
            raise StructuralError(f"n must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "p", _as_matrix("profits", self.p, self.T, self.n))
        object.__setattr__(self, "w", _as_matrix("weights", self.w, self.T, self.n))
        object.__setattr__(self, "B", _as_matrix("bonuses", self.B, self.T - 1, self.n))
        caps = tuple(self.C)
        if len(caps) != self.T:
            raise StructuralError(f"capacities: expected {self.T} entries, got {len(caps)}")
        for c in caps:
            _check_entry("capacities", c)
        object.__setattr__(self, "C", caps)

    @classmethod
    def build(cls, p, w, B, C) -> "Instance":
        """Infer ``T`` and ``n`` from the matrices."""
        T = len(p)
        n = len(p[0]) if T else 0
        return cls(T=T, n=n, p=p, w=w, B=B, C=C)

    def restrict_objects(self, objects: Sequence[int]) -> "Instance":
        """Sub-instance on the given objects (columns), in the given order."""
        cols = list(objects)
        pick = lambda m: tuple(tuple(row[i] for i in cols) for row in m)  # noqa: E731
        return Instance(self.T, len(cols), pick(self.p), pick(self.w), pick(self.B), self.C)

    def restrict_steps(self, start: int, stop: int) -> "Instance":
        """Sub-instance on steps ``start..stop-1``; bonuses leaving the window are dropped."""
        if not 0 <= start < stop <= self.T:
            raise StructuralError(f"invalid step window [{start}, {stop})")
        return Instance(
            stop - start,
            self.n,
            self.p[start:stop],
            self.w[start:stop],
            self.B[start : stop - 1],
            self.C[start:stop],
        )

    def with_capacities(self, C: Sequence[int]) -> "Instance":
        return Instance(self.T, self.n, self.p, self.w, self.B, tuple(C))

    def total_bonus(self) -> int:
        return sum(sum(row) for row in self.B)


@dataclass(frozen=True)
class Schedule:
    """``x[t][i]`` is True iff object ``i`` is taken at step ``t``."""

    x: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(tuple(bool(v) for v in row) for row in self.x))

    @classmethod
    def empty(cls, T: int, n: int) -> "Schedule":
        return cls(tuple((False,) * n for _ in range(T)))

    @classmethod
    def from_sets(cls, T: int, n: int, sets: Sequence[Sequence[int]]) -> "Schedule":
        rows = []
        for t in range(T):
            chosen = set(sets[t])
            rows.append(tuple(i in chosen for i in range(n)))
        return cls(tuple(rows))

    @property
    def T(self) -> int:
        return len(self.x)

    @property
    def n(self) -> int:
        return len(self.x[0]) if self.x else 0

    def sets(self) -> list[list[int]]:
        return [[i for i, v in enumerate(row) if v] for row in self.x]

    def as_int_rows(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.x]


@dataclass(frozen=True)
class ObjectiveBreakdown:
    knapsack_profit: int
    transition_profit: int
    total: int
    per_object_reward: tuple[int, ...] = field(default=())


def _check_dims(inst: Instance, sched: Schedule) -> None:
    if len(sched.x) != inst.T or any(len(row) != inst.n for row in sched.x):
        shape = (len(sched.x), len(sched.x[0]) if sched.x else 0)
        raise StructuralError(f"schedule shape {shape} does not match instance ({inst.T}, {inst.n})")


def step_loads(inst: Instance, sched: Schedule) -> list[int]:
    """Total weight packed at each step."""
    _check_dims(inst, sched)
    return [
        sum(w for w, v in zip(inst.w[t], sched.x[t]) if v) for t in range(inst.T)
    ]


def is_feasible(inst: Instance, sched: Schedule) -> bool:
    return all(load <= cap for load, cap in zip(step_loads(inst, sched), inst.C))


def object_reward(inst: Instance, sched: Schedule, i: int) -> int:
    """Profit collected by object ``i`` plus the bonuses it keeps."""
    _check_dims(inst, sched)
    if not 0 <= i < inst.n:
        raise IndexError(f"object index {i} out of range for n={inst.n}")
    x = sched.x
    reward = sum(inst.p[t][i] for t in range(inst.T) if x[t][i])
    reward += sum(inst.B[t][i] for t in range(inst.T - 1) if x[t][i] == x[t + 1][i])
    return reward


def evaluate(inst: Instance, sched: Schedule) -> ObjectiveBreakdown:
    """Knapsack profit, transition profit and per-object rewards.

    Feasibility is not checked; callers gate on :func:`is_feasible`.
    """
    _check_dims(inst, sched)
    x = sched.x
    knap = 0
    trans = 0
    per_object = [0] * inst.n
    for t in range(inst.T):
        for i in range(inst.n):
            if x[t][i]:
                knap += inst.p[t][i]
                per_object[i] += inst.p[t][i]
    for t in range(inst.T - 1):
        for i in range(inst.n):
            if x[t][i] == x[t + 1][i]:
                trans += inst.B[t][i]
                per_object[i] += inst.B[t][i]
    return ObjectiveBreakdown(knap, trans, knap + trans, tuple(per_object))
