"""Exact solvers: exhaustive enumeration and the capacity-vector dynamic program."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import GuardError, Instance, ObjectiveBreakdown, Schedule, evaluate

BRUTE_MAX_CELLS = 20
DP_MAX_ENTRIES = 10**8
_INT64_HEADROOM = 2**62
_NEG = -_INT64_HEADROOM


class DpState(NamedTuple):
    residual_capacities: tuple[int, ...]
    prefix: int


def _check_int64(inst: Instance) -> None:
    bound = sum(map(sum, inst.p)) + inst.total_bonus()
    if bound >= _INT64_HEADROOM:
        raise OverflowError(f"objective bound {bound} does not fit in 64-bit table entries")


def brute_force(inst: Instance, max_cells: int = BRUTE_MAX_CELLS) -> tuple[Schedule, ObjectiveBreakdown]:
    """Enumerate every schedule; ties go to the lexicographically smallest ``x``.

    ``x`` is compared flattened step by step, object by object.  Refuses when
    ``n * T`` exceeds ``max_cells``.
    """
    T, n = inst.T, inst.n
    if n * T > max_cells:
        raise GuardError("brute force over 2^(n*T) schedules", n * T, max_cells)
    if n == 0:
        sched = Schedule.empty(T, 0)
        return sched, evaluate(inst, sched)
    _check_int64(inst)

    # object i sits at bit n-1-i so numeric order of masks is lexicographic order of rows
    masks = np.arange(1 << n, dtype=np.int64)
    bits = (masks[:, None] >> (n - 1 - np.arange(n))) & 1
    w = np.asarray(inst.w, dtype=np.int64)
    p = np.asarray(inst.p, dtype=np.int64)
    B = np.asarray(inst.B, dtype=np.int64).reshape(T - 1, n)

    feasible = [masks[bits @ w[t] <= inst.C[t]] for t in range(T)]
    profit = [bits @ p[t] for t in range(T)]
    bonus = [bits @ B[t] for t in range(T - 1)]

    grid = np.meshgrid(*feasible, indexing="ij")
    flat = [g.ravel() for g in grid]
    full = (1 << n) - 1
    value = np.zeros(flat[0].shape, dtype=np.int64)
    for t in range(T):
        value += profit[t][flat[t]]
    for t in range(T - 1):
        value += bonus[t][~(flat[t] ^ flat[t + 1]) & full]
    # argmax keeps the first maximum; C-order over sorted axes is lexicographic
    best = int(np.argmax(value))
    rows = [tuple(bool(b) for b in bits[flat[t][best]]) for t in range(T)]
    sched = Schedule(tuple(rows))
    return sched, evaluate(inst, sched)


def dp_table_size(inst: Instance) -> int:
    return math.prod(c + 1 for c in inst.C) * (inst.n + 1)


def _shift(table: np.ndarray, axis: int, w: int) -> np.ndarray:
    # out[c] = table[c - w * e_axis], or the sentinel where that leaves the grid
    out = np.full(table.shape, _NEG, dtype=np.int64)
    size = table.shape[axis]
    if w < size:
        dst = [slice(None)] * table.ndim
        src = [slice(None)] * table.ndim
        dst[axis] = slice(w, size)
        src[axis] = slice(0, size - w)
        out[tuple(dst)] = table[tuple(src)]
    return out


def _object_pass(inst: Instance, alpha: np.ndarray, s: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """Fold object ``s`` into the table ``alpha``.

    Runs over the steps from last to first.  ``rest[d]`` holds the best value
    of steps ``t..T-1`` plus ``alpha`` when the object's decision at ``t`` is
    ``d``.  Returns the new table and packed choice bits: first the decision
    at step 0, then for each step ``t < T-1`` and ``d`` the decision at
    ``t + 1``, indexed at the capacity left after step ``t``.
    """
    T = inst.T
    rest = [alpha, _shift(alpha, T - 1, inst.w[T - 1][s]) + inst.p[T - 1][s]]
    nexts = []
    for t in range(T - 2, -1, -1):
        b = inst.B[t][s]
        stay0, move1 = rest[0] + b, rest[1]
        move0, stay1 = rest[0], rest[1] + b
        # ties go to deciding 0 at step t+1
        nexts.append((move1 > stay0, stay1 > move0))
        h0 = np.maximum(stay0, move1)
        h1 = np.maximum(move0, stay1)
        rest = [h0, _shift(h1, t, inst.w[t][s]) + inst.p[t][s]]
    first = rest[1] > rest[0]
    bits = [first]
    for pair in reversed(nexts):
        bits.extend(pair)
    return np.maximum(rest[0], rest[1]), [np.packbits(b.ravel()) for b in bits]


def _bit(packed: np.ndarray, index: int) -> bool:
    return bool((packed[index >> 3] >> (7 - (index & 7))) & 1)


def dp_solve(inst: Instance, max_entries: int = DP_MAX_ENTRIES) -> tuple[Schedule, ObjectiveBreakdown]:
    """Optimal schedule by dynamic programming over residual capacity vectors.

    The table entry for capacities ``c`` after the first ``s`` objects holds
    the best value using only those objects.  Object ``s`` is placed at the
    steps of some subset ``A``; only the steps in ``A`` consume its weight.
    The best ``A`` for every ``c`` is found by a pass over the steps with
    the previous decision as state, so each object costs ``O(T)`` table
    sweeps.  Ties prefer the lexicographically smallest ``A``.
    """
    T, n = inst.T, inst.n
    size = dp_table_size(inst)
    if size > max_entries:
        raise GuardError("dynamic program table", size, max_entries)
    _check_int64(inst)

    shape = tuple(c + 1 for c in inst.C)
    caps = inst.C
    alpha = np.zeros(shape, dtype=np.int64)
    choices = []
    for s in range(n):
        alpha, bits = _object_pass(inst, alpha, s)
        choices.append(bits)

    state = DpState(tuple(caps), n)
    x = [[False] * n for _ in range(T)]
    while state.prefix > 0:
        s = state.prefix - 1
        bits = choices[s]
        residual = list(state.residual_capacities)
        d = _bit(bits[0], int(np.ravel_multi_index(residual, shape)))
        for t in range(T):
            if d:
                x[t][s] = True
                residual[t] -= inst.w[t][s]
            if t < T - 1:
                d = _bit(bits[1 + 2 * t + d], int(np.ravel_multi_index(residual, shape)))
        state = DpState(tuple(residual), s)

    sched = Schedule(tuple(tuple(row) for row in x))
    result = evaluate(inst, sched)
    if result.total != int(alpha[tuple(caps)]):
        raise AssertionError("backward pass disagrees with the table value")
    return sched, result
