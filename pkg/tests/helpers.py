"""Independent oracles used across the test suite.

Nothing here calls into the solvers under test; the only library imports
are the data types.
"""

from fractions import Fraction
from itertools import combinations, product

from hypothesis import strategies as st

from multiknap.core import Instance, Schedule


def naive_value(inst, x):
    """Term-by-term objective of a 0/1 matrix ``x``."""
    total = 0
    for t in range(inst.T):
        for i in range(inst.n):
            total += inst.p[t][i] * x[t][i]
    for t in range(inst.T - 1):
        for i in range(inst.n):
            total += inst.B[t][i] * (1 if x[t][i] == x[t + 1][i] else 0)
    return total


def naive_feasible(inst, x):
    return all(
        sum(inst.w[t][i] * x[t][i] for i in range(inst.n)) <= inst.C[t] for t in range(inst.T)
    )


def naive_optimum(inst):
    """Plain itertools enumeration of every 0/1 matrix."""
    best = None
    cells = inst.T * inst.n
    for flat in product((0, 1), repeat=cells):
        x = [flat[t * inst.n : (t + 1) * inst.n] for t in range(inst.T)]
        if naive_feasible(inst, x):
            v = naive_value(inst, x)
            if best is None or v > best:
                best = v
    return best


def independence_number(num_vertices, edges):
    adj = {(u, v) for u, v in edges} | {(v, u) for u, v in edges}
    for size in range(num_vertices, -1, -1):
        for cand in combinations(range(num_vertices), size):
            if all((a, b) not in adj for a, b in combinations(cand, 2)):
                return size
    return 0


def max_cardinality_two_kp(w1, w2, c1, c2):
    n = len(w1)
    for size in range(n, -1, -1):
        for cand in combinations(range(n), size):
            if sum(w1[i] for i in cand) <= c1 and sum(w2[i] for i in cand) <= c2:
                return size
    return 0


def _solve_square(A, b):
    """Gaussian elimination over Fractions; None when singular."""
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[r][n] / M[r][r] for r in range(n)]


def rank(rows):
    M = [list(r) for r in rows]
    rk = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((r for r in range(rk, len(M)) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        for r in range(len(M)):
            if r != rk and M[r][col] != 0:
                f = M[r][col] / M[rk][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[rk])]
        rk += 1
    return rk


def model_halfspaces(model):
    """All constraints of an LpModel as dense (a, b) pairs meaning a.v <= b."""
    N = model.num_vars
    out = []
    for con in model.constraints:
        a = [Fraction(0)] * N
        for k, c in con.coeffs:
            a[k] = Fraction(c)
        out.append((a, Fraction(con.rhs)))
    for k, (lo, hi) in enumerate(model.bounds):
        e = [Fraction(0)] * N
        e[k] = Fraction(1)
        out.append((e, Fraction(hi)))
        out.append(([-v for v in e], -Fraction(lo)))
    return out


def vertex_enumeration_optimum(model):
    """Best objective over all vertices, by solving every square subsystem."""
    N = model.num_vars
    hs = model_halfspaces(model)
    best = None
    for idx in combinations(range(len(hs)), N):
        v = _solve_square([hs[k][0] for k in idx], [hs[k][1] for k in idx])
        if v is None:
            continue
        if all(sum(a * x for a, x in zip(row, v)) <= rhs for row, rhs in hs):
            val = sum(c * x for c, x in zip(model.objective, v))
            if best is None or val > best:
                best = val
    return best


def is_vertex(model, values):
    """True iff the constraints tight at ``values`` have full column rank."""
    hs = model_halfspaces(model)
    tight = [row for row, rhs in hs if sum(a * x for a, x in zip(row, values)) == rhs]
    return rank(tight) == model.num_vars if model.num_vars else True


def flat_values(sol):
    return [v for row in sol.x for v in row] + [v for row in sol.z for v in row]


@st.composite
def instances(draw, max_T=3, max_n=4, max_val=10, max_cells=None):
    T = draw(st.integers(1, max_T))
    n = draw(st.integers(0, max_n))
    if max_cells is not None:
        while n * T > max_cells:
            n -= 1
    vals = st.integers(0, max_val)
    p = [[draw(vals) for _ in range(n)] for _ in range(T)]
    w = [[draw(vals) for _ in range(n)] for _ in range(T)]
    B = [[draw(vals) for _ in range(n)] for _ in range(T - 1)]
    C = [draw(st.integers(0, max_val * max(n, 1) // 2 + 1)) for _ in range(T)]
    return Instance(T, n, p, w, B, C)


@st.composite
def instance_and_schedule(draw, **kw):
    inst = draw(instances(**kw))
    x = [[draw(st.booleans()) for _ in range(inst.n)] for _ in range(inst.T)]
    return inst, Schedule(tuple(tuple(r) for r in x))
