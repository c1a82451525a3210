from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from helpers import flat_values, instances, is_vertex, vertex_enumeration_optimum
from multiknap.core import Instance
from multiknap.exact import brute_force
from multiknap.reductions import gen_random
from multiknap.simplex import (
    build_lp,
    count_fractional_objects,
    fractional_object_bound,
    normalize_z,
    solve_basic,
    solve_relaxation,
    to_lp_format,
)

F = Fraction


def test_build_lp_counts_single_object():
    inst = Instance(2, 1, [[1], [1]], [[1], [1]], [[1]], [1, 1])
    m = build_lp(inst)
    assert m.num_vars == 3
    assert len(m.constraints) == 2 + 2


def test_build_lp_counts_two_objects_three_steps():
    inst = gen_random(0, 2, 3, 5, 5, 5)
    m = build_lp(inst)
    assert m.num_vars == 6 + 4
    assert len(m.constraints) == 3 + 2 * 2 * 2


def test_build_lp_layout():
    inst = Instance(2, 2, [[1, 2], [3, 4]], [[5, 6], [7, 8]], [[9, 10]], [11, 12])
    m = build_lp(inst)
    assert m.objective == tuple(map(F, (1, 2, 3, 4, 9, 10)))
    assert m.constraints[0].coeffs == ((0, 5), (1, 6)) and m.constraints[0].rhs == 11
    assert m.constraints[1].coeffs == ((2, 7), (3, 8)) and m.constraints[1].rhs == 12
    # z_11 <= -x_21 + x_11 + 1  and  z_11 <= x_21 - x_11 + 1
    assert dict(m.constraints[2].coeffs) == {0: -1, 2: 1, 4: 1}
    assert dict(m.constraints[3].coeffs) == {0: 1, 2: -1, 4: 1}
    assert all(c.rhs == 1 for c in m.constraints[2:])
    assert all(b == (0, 1) for b in m.bounds)
    assert all(isinstance(v, Fraction) for v in m.objective)


def test_build_lp_fixing_and_override():
    inst = Instance(2, 1, [[1], [1]], [[1], [1]], [[1]], [1, 1])
    base = build_lp(inst)
    m = build_lp(inst, fixed_zero={(0, 0)})
    assert m.bounds[0] == (0, 0)
    assert m.bounds[1:] == base.bounds[1:]
    assert m.constraints == base.constraints
    m = build_lp(inst, capacities=[0, 3])
    assert [c.rhs for c in m.constraints[:2]] == [0, 3]
    with pytest.raises(IndexError):
        build_lp(inst, fixed_zero={(2, 0)})
    with pytest.raises(ValueError):
        build_lp(inst, capacities=[-1, 0])


def test_zero_weights_give_all_ones():
    T, n = 3, 4
    inst = Instance(T, n, [[1] * n] * T, [[0] * n] * T, [[0] * n] * (T - 1), [0] * T)
    sol = normalize_z(solve_basic(build_lp(inst)))
    assert all(v == 1 for row in sol.x for v in row)
    assert sol.objective_value == T * n


def test_single_fractional_knapsack():
    inst = Instance(1, 1, [[10]], [[2]], [], [1])
    sol = solve_basic(build_lp(inst))
    assert sol.x == ((F(1, 2),),)
    assert sol.objective_value == 5
    assert sol.is_basic
    assert count_fractional_objects(normalize_z(sol)) == (1, frozenset({0}))


@pytest.mark.parametrize(
    "inst, expected",
    [
        (Instance(2, 1, [[3], [5]], [[2], [3]], [[4]], [1, 2]), F(49, 6)),
        (Instance(3, 1, [[6], [1], [7]], [[4], [2], [5]], [[3], [2]], [3, 1, 2]), F(237, 20)),
        (Instance(1, 3, [[10, 7, 3]], [[5, 4, 2]], [], [6]), F(47, 4)),
        (Instance(2, 2, [[4, 3], [2, 6]], [[3, 2], [2, 5]], [[1, 2]], [3, 4]), F(129, 11)),
    ],
)
def test_frozen_optima(inst, expected):
    # expected values come from exhaustive vertex enumeration
    sol = solve_basic(build_lp(inst))
    assert sol.objective_value == expected
    assert normalize_z(sol).objective_value == expected


@settings(max_examples=60, deadline=None)
@given(instances(max_T=3, max_n=1, max_val=6))
def test_matches_vertex_enumeration_single_object(inst):
    model = build_lp(inst)
    sol = solve_basic(model)
    assert sol.objective_value == vertex_enumeration_optimum(model)


@settings(max_examples=25, deadline=None)
@given(instances(max_T=1, max_n=3, max_val=6))
def test_matches_vertex_enumeration_one_step(inst):
    model = build_lp(inst)
    assert solve_basic(model).objective_value == vertex_enumeration_optimum(model)


@pytest.mark.parametrize("seed", range(15))
def test_matches_floating_point_solver(seed):
    T = 2 + seed % 3
    inst = gen_random(seed, 8, T, 10, 10, 10, ("fraction", F(1, 3)))
    model = build_lp(inst)
    sol = solve_basic(model)
    A = np.zeros((len(model.constraints), model.num_vars))
    for r, con in enumerate(model.constraints):
        for k, c in con.coeffs:
            A[r, k] = float(c)
    res = linprog(
        -np.array([float(c) for c in model.objective]),
        A_ub=A,
        b_ub=[float(c.rhs) for c in model.constraints],
        bounds=[(float(lo), float(hi)) for lo, hi in model.bounds],
        method="highs",
    )
    assert res.status == 0
    assert float(sol.objective_value) == pytest.approx(-res.fun, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(instances(max_T=3, max_n=3, max_val=8))
def test_solution_is_a_feasible_vertex(inst):
    model = build_lp(inst)
    sol = solve_basic(model)
    v = flat_values(sol)
    assert all(lo <= x <= hi for x, (lo, hi) in zip(v, model.bounds))
    for con in model.constraints:
        assert sum(c * v[k] for k, c in con.coeffs) <= con.rhs
    assert is_vertex(model, v)


def test_normalize_examples():
    inst = Instance(2, 1, [[1], [1]], [[0], [0]], [[0]], [1, 1])
    sol = solve_basic(build_lp(inst))
    assert sol.x == ((1,), (1,))
    norm = normalize_z(sol)
    assert norm.z == ((1,),)

    inst = Instance(2, 1, [[1], [1]], [[3], [1]], [[0]], [1, 1])
    sol = solve_basic(build_lp(inst))
    assert sol.x == ((F(1, 3),), (1,))
    assert normalize_z(sol).z == ((F(1, 3),),)


@settings(max_examples=40, deadline=None)
@given(instances(max_T=3, max_n=4, max_val=8))
def test_normalize_never_lowers_objective(inst):
    sol = solve_basic(build_lp(inst))
    norm = normalize_z(sol)
    assert norm.x == sol.x
    assert norm.objective_value >= sol.objective_value
    # sol is optimal and norm feasible, so they tie
    assert norm.objective_value == sol.objective_value
    for t in range(inst.T - 1):
        for i in range(inst.n):
            assert norm.z[t][i] == 1 - abs(norm.x[t + 1][i] - norm.x[t][i])
            if inst.B[t][i]:
                assert sol.z[t][i] == norm.z[t][i]


def test_integral_solution_has_no_fractional_objects():
    inst = Instance(2, 2, [[1, 1], [1, 1]], [[0, 0], [0, 0]], [[1, 1]], [0, 0])
    assert count_fractional_objects(solve_relaxation(inst)) == (0, frozenset())


def test_fractional_z_marks_object():
    inst = Instance(2, 1, [[1], [1]], [[3], [1]], [[0]], [1, 1])
    count, objs = count_fractional_objects(solve_relaxation(inst))
    assert (count, objs) == (1, frozenset({0}))


def test_bound_formula():
    assert [fractional_object_bound(T) for T in (1, 2, 3, 4)] == [1, 4, 10, 20]
    assert all(fractional_object_bound(T) <= T**3 for T in range(1, 10))


@pytest.mark.parametrize("seed", range(40))
def test_two_steps_at_most_four_fractional(seed):
    inst = gen_random(seed, 12, 2, 10, 10, 10, ("fraction", F(1, 3)))
    count, _ = count_fractional_objects(solve_relaxation(inst))
    assert count <= 4


@settings(max_examples=30, deadline=None)
@given(instances(max_T=3, max_n=3, max_val=6, max_cells=9))
def test_relaxation_sandwich(inst):
    lp = solve_relaxation(inst).objective_value
    assert lp >= brute_force(inst)[1].total


@settings(max_examples=25, deadline=None)
@given(instances(max_T=3, max_n=5, max_val=8), st.integers(2, 7))
def test_scaling_objective(inst, k):
    scaled = Instance(
        inst.T,
        inst.n,
        [[k * v for v in r] for r in inst.p],
        inst.w,
        [[k * v for v in r] for r in inst.B],
        inst.C,
    )
    a = solve_relaxation(inst)
    b = solve_relaxation(scaled)
    assert b.objective_value == k * a.objective_value
    assert b.x == a.x
    assert count_fractional_objects(a) == count_fractional_objects(b)


def test_deterministic():
    inst = gen_random(11, 10, 3, 10, 10, 10)
    a, b = solve_relaxation(inst), solve_relaxation(inst)
    assert a.x == b.x and a.z == b.z and a.pivots == b.pivots


def test_lp_text_dump():
    inst = Instance(2, 1, [[3], [5]], [[2], [3]], [[4]], [1, 2])
    text = to_lp_format(build_lp(inst))
    assert text.startswith("\\")
    assert "Maximize" in text and "Subject To" in text and text.rstrip().endswith("End")
    assert " obj: 3 x_1_1 + 5 x_2_1 + 4 z_1_1" in text
    assert " r1: 2 x_1_1 <= 1" in text
    assert " r3: - x_1_1 + x_2_1 + z_1_1 <= 1" in text
