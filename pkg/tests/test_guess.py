from fractions import Fraction

import numpy as np
import pytest
from flint import nmod_mat, nmod_poly

from sl3jones.arith import eval_mod
from sl3jones.guess import (
    GuessConfig,
    GuessProblem,
    InsufficientData,
    StructureSet,
    build_array,
    exact_lift,
    grid_side,
    heldout_verify,
    kernel_operator,
    make_problem,
    minimal_degree,
    modular_kernel,
    region_square,
    solve_structure,
    support_search,
)
from sl3jones.jones import SequenceTable, jones_table
from sl3jones.modfield import GUESS_PRIME, ModField, check_admissible, multiplicative_order
from sl3jones.ore import OreOp, SequenceOracle, canonicalize
from sl3jones.orders import TermOrder
from sl3jones.reconstruct import crt_pair, interpolate_columns, node_polynomial, ratrec_int, ratrec_poly

P = GUESS_PRIME
L1 = OreOp.L(1)


def const_table():
    return jones_table(1, 0, "modular", 2, P)


def test_modular_kernel_examples():
    assert modular_kernel(nmod_mat([[1, 1]], 7)) == [[6, 1]] or modular_kernel(nmod_mat([[1, 1]], 7)) == [[1, 6]]
    assert modular_kernel(nmod_mat([[1, 0], [0, 1]], 7)) == []


def test_build_array_constant_rows():
    prob = GuessProblem(const_table(), StructureSet(((0, 0, 0, 0), (0, 0, 1, 0))), [(0, 0), (2, 3)])
    A = build_array(prob)
    assert A.tolist() == [[1, 1], [1, 1]]
    one = GuessProblem(jones_table(3, 0, "modular", 2, P), StructureSet.dense([(0, 0), (1, 0)], 3), [(1, 1)])
    assert np.linalg.matrix_rank(build_array(one).astype(float)) <= 1


def test_grid_side():
    assert grid_side(10, 0.2) == 4
    assert grid_side(1800, 0.2) == 47
    prob = make_problem(const_table(), StructureSet.dense([(0, 0)], 6))
    assert int(len(prob.points) ** 0.5) >= 8
    with pytest.raises(InsufficientData):
        make_problem(const_table(), StructureSet.dense([(0, 0), (0, 1)], 20), max_table=10)


def test_constant_sequence_search():
    rep = support_search(const_table(), GuessConfig(max_ldeg=2, max_mdeg=4))
    first = rep.shapes[0]
    assert first.l_support == {(0, 0), (0, 1)} and first.mdeg == 0
    rep2 = support_search(const_table(), GuessConfig(max_ldeg=2, max_mdeg=4, precedence=2))
    assert rep2.shapes[0].l_support == {(0, 0), (1, 0)}


def test_constant_sequence_lift():
    tab = const_table()
    r = minimal_degree(tab, [(1, 0), (0, 0)], 4, GuessConfig())
    assert r.mdeg == 0 and r.kernel_dim == 1
    op = exact_lift(r, b=1)
    assert canonicalize(op) == canonicalize(L1 - 1)


def test_heldout_verify_examples():
    one = SequenceOracle.constant(1)
    assert heldout_verify(L1 - 1, one, region_square(0, 4)).passed
    rep = heldout_verify(L1 - 2, one, region_square(0, 2))
    assert not rep.passed and len(rep.failures) == 9


def test_p1_kernel_matches_golden(golden):
    tab = jones_table(3, 0, "modular", 2, P)
    order = TermOrder.deglex()
    r = solve_structure(tab, StructureSet.dense(sorted(golden.P1.terms), 23))
    assert r.kernel_dim == 1
    F = ModField(2, P)
    guessed = kernel_operator(r, F)
    assert canonicalize(guessed, order) == canonicalize(golden.P1.to_mod(F), order)
    assert solve_structure(tab, StructureSet.dense(sorted(golden.P1.terms), 22)).kernel_dim == 0


def test_admissibility():
    assert multiplicative_order(64, 2147483647) == 31
    with pytest.raises(ArithmeticError):
        check_admissible(2, 2147483647)
    check_admissible(2, P)
    check_admissible(3, 2147483587)


def test_reconstruction_helpers():
    m = 10007 * 10009
    assert ratrec_int(Fraction(-3, 7).numerator * pow(7, -1, m) % m, m) == Fraction(-3, 7)
    x, mm = crt_pair(3, 5, 4, 7)
    assert x % 5 == 3 and x % 7 == 4 and mm == 35
    p = 101
    xs = [2, 3, 5, 7]
    vals = np.array([[(1 + 2 * x + x**3) % p] for x in xs])
    assert interpolate_columns(xs, vals, p)[0].tolist() == [1, 2, 0, 1]
    # (x + 1) / (x - 3) from its values at 12 points
    pts = list(range(4, 16))
    ys = [(x + 1) * pow(x - 3, -1, p) % p for x in pts]
    coeffs = interpolate_columns(pts, np.array([[y] for y in ys]), p)[0].tolist()
    num, den = ratrec_poly(nmod_poly(coeffs, p), node_polynomial(pts, p))
    assert den == nmod_poly([p - 3, 1], p) and num == nmod_poly([1, 1], p)
