"""Instance generators: seeded random families and the two hardness constructions.

Random instances draw from numpy's PCG64 bit generator (``numpy.random.PCG64``
seeded with the caller's integer), so a seed and a parameter set pin the
instance on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .core import Instance, StructuralError


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..num_vertices-1``."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.num_vertices < 0:
            raise StructuralError("num_vertices must be non-negative")
        seen = set()
        norm = []
        for u, v in self.edges:
            if u == v:
                raise StructuralError(f"self-loop on vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise StructuralError(f"edge ({u}, {v}) out of range")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise StructuralError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))


@dataclass(frozen=True)
class TwoKpInstance:
    """Two knapsack constraints over the same ``n`` objects."""

    w1: tuple[int, ...]
    w2: tuple[int, ...]
    C1: int
    C2: int

    def __post_init__(self):
        object.__setattr__(self, "w1", tuple(self.w1))
        object.__setattr__(self, "w2", tuple(self.w2))
        if len(self.w1) != len(self.w2):
            raise StructuralError("w1 and w2 differ in length")
        if any(v < 0 for v in self.w1 + self.w2) or self.C1 < 0 or self.C2 < 0:
            raise StructuralError("weights and capacities must be non-negative")

    @property
    def n(self) -> int:
        return len(self.w1)


def reduce_independent_set(g: Graph) -> Instance:
    """One step per edge; the edge's endpoints weigh 1 and the capacity is 1.

    All profits are 1 and every bonus is ``2 * n * m``.  The optimum equals
    ``n(m-1)B + m * alpha(G)`` with ``alpha`` the independence number.
    """
    n, m = g.num_vertices, len(g.edges)
    if m == 0:
        raise StructuralError("graph has no edges; the construction needs at least one step")
    bonus = 2 * n * m
    w = [tuple(1 if k in (u, v) else 0 for k in range(n)) for u, v in g.edges]
    p = [(1,) * n] * m
    B = [(bonus,) * n] * (m - 1)
    return Instance(m, n, p, w, B, (1,) * m)


def reduce_two_kp(kp: TwoKpInstance) -> Instance:
    """Two steps with the given weights, unit profits and a bonus of 2 everywhere."""
    n = kp.n
    return Instance(2, n, [(1,) * n, (1,) * n], [kp.w1, kp.w2], [(2,) * n], (kp.C1, kp.C2))


CapacityRule = Union[tuple[str, int], tuple[str, Fraction]]


def gen_random(
    seed: int,
    n: int,
    T: int,
    weight_max: int,
    profit_max: int,
    bonus_max: int,
    capacity_rule: CapacityRule = ("fraction", Fraction(1, 2)),
    weight_min: int = 1,
) -> Instance:
    """Seeded random instance.

    Weights are uniform on ``[weight_min, weight_max]``, profits on
    ``[0, profit_max]``, bonuses on ``[0, bonus_max]``.  ``capacity_rule`` is
    either ``("fixed", C)`` for ``C_t = C`` at every step or
    ``("fraction", rho)`` for ``C_t = floor(rho * sum_i w_ti)``.
    """
    if T < 1 or n < 0:
        raise ValueError("need T >= 1 and n >= 0")
    if not 0 <= weight_min <= weight_max or profit_max < 0 or bonus_max < 0:
        raise ValueError("value ranges must be non-negative and ordered")
    kind, arg = capacity_rule
    rng = np.random.Generator(np.random.PCG64(seed))
    w = rng.integers(weight_min, weight_max, size=(T, n), endpoint=True)
    p = rng.integers(0, profit_max, size=(T, n), endpoint=True)
    B = rng.integers(0, bonus_max, size=(T - 1, n), endpoint=True)
    if kind == "fixed":
        if int(arg) < 0:
            raise ValueError("fixed capacity must be non-negative")
        C = [int(arg)] * T
    elif kind == "fraction":
        rho = Fraction(arg)
        if rho < 0:
            raise ValueError("capacity fraction must be non-negative")
        C = [int(rho * int(row.sum())) for row in w]
    else:
        raise ValueError(f"unknown capacity rule {kind!r}")
    as_rows = lambda a: [tuple(int(v) for v in row) for row in a]  # noqa: E731
    return Instance(T, n, as_rows(p), as_rows(w), as_rows(B), tuple(C))


def parse_graph(text: str) -> Graph:
    """Edge list: first line ``n m``, then ``m`` lines ``u v`` (1-indexed)."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise StructuralError("line 1: expected 'n m'")
    n, m = (int(v) for v in lines[0])
    if len(lines) - 1 != m:
        raise StructuralError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for k, parts in enumerate(lines[1:], start=2):
        if len(parts) != 2:
            raise StructuralError(f"line {k}: expected 'u v'")
        u, v = int(parts[0]) - 1, int(parts[1]) - 1
        edges.append((u, v))
    return Graph(n, tuple(edges))


def format_graph(g: Graph) -> str:
    out = [f"{g.num_vertices} {len(g.edges)}"]
    out += [f"{u + 1} {v + 1}" for u, v in g.edges]
    return "\n".join(out) + "\n"


def parse_two_kp(text: str) -> TwoKpInstance:
    """Three lines: ``n C1 C2``, then the ``n`` weights of each constraint."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != 3 or len(lines[0]) != 3:
        raise StructuralError("expected 'n C1 C2' followed by two weight lines")
    n, c1, c2 = (int(v) for v in lines[0])
    w1 = tuple(int(v) for v in lines[1])
    w2 = tuple(int(v) for v in lines[2])
    if len(w1) != n or len(w2) != n:
        raise StructuralError(f"weight lines must have {n} entries")
    return TwoKpInstance(w1, w2, c1, c2)


def format_two_kp(kp: TwoKpInstance) -> str:
    return f"{kp.n} {kp.C1} {kp.C2}\n{' '.join(map(str, kp.w1))}\n{' '.join(map(str, kp.w2))}\n"


def path_graph(k: int) -> Graph:
    return Graph(k, tuple((i, i + 1) for i in range(k - 1)))


def cycle_graph(k: int) -> Graph:
    return Graph(k, tuple((i, (i + 1) % k) for i in range(k)))


def complete_graph(k: int) -> Graph:
    return Graph(k, tuple((i, j) for i in range(k) for j in range(i + 1, k)))


def random_graph(seed: int, k: int, edge_prob: Union[float, Fraction]) -> Graph:
    rng = np.random.Generator(np.random.PCG64(seed))
    edges = tuple((i, j) for i in range(k) for j in range(i + 1, k) if rng.random() < edge_prob)
    return Graph(k, edges)

