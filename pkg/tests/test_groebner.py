from fractions import Fraction

import pytest

from sl3jones.groebner import (
    QuotientModule,
    ReducedGB,
    buchberger,
    cone_interval,
    fan_is_swap_symmetric,
    fglm,
    groebner_fan,
    interior_rays,
    is_groebner,
    is_reduced,
    normal_form,
    reduction_certificate,
    same_ideal,
    staircase,
    support_relation,
    tau_invariant,
)
from sl3jones.modfield import GUESS_PRIME, ModField
from sl3jones.ore import OreOp, SequenceOracle, ore_apply
from sl3jones.orders import TermOrder

L1, L2 = OreOp.L(1), OreOp.L(2)
OM1, OM2, OQ = OreOp.M(1), OreOp.M(2), OreOp.q()
DEGLEX = TermOrder.deglex()


def test_constants_ideal():
    G = buchberger([L1 - 1, L2 - 1])
    assert G.leading_monomials() == [(0, 1), (1, 0)]
    st = staircase(G)
    assert st.monomials == [(0, 0)] and st.rank == 1
    assert normal_form(L1 * L2 - 1, G).is_zero()


def test_product_sequence():
    # f(n1, n2) = q^(n1 n2): L1 f = M2 f and L2 f = M1 f
    G = buchberger([L1 - OM2, L2 - OM1])
    assert is_groebner(G) and is_reduced(G)
    f = SequenceOracle(lambda a, b: __import__("sl3jones").arith.QLaurent.q_power(a * b))
    for g in G:
        assert ore_apply(g, f, 2, 3).is_zero()
    assert tau_invariant(G)


def test_rank_four_and_fglm():
    gens = [L1**2 - L2, L2**2 - 1]
    G = buchberger(gens)
    st = staircase(G)
    assert st.rank == 4 and set(st.monomials) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    H = fglm(G, TermOrder.parse("lex:L2,L1"))
    assert H.leading_monomials() == [(4, 0), (0, 1)] or set(H.leading_monomials()) == {(4, 0), (0, 1)}
    assert same_ideal(G, H)
    assert normal_form(L1**4 - 1, G).is_zero()


def test_normal_form_trace():
    G = buchberger([L1**2 - OM1 * L2, L2**2 - OQ])
    P = (OM2 + 1) * L1**3 * L2 + L1
    steps = []
    r = normal_form(P, G, trace=steps)
    assert steps
    assert reduction_certificate(P, G, steps) == r
    assert normal_form(r, G) == r


def test_staircase_not_zero_dimensional():
    G = buchberger([L1 - 1])
    assert not staircase(G).zero_dimensional


def test_quotient_module_matches_division():
    G = buchberger([L1**2 - OM1 * L2, L2**2 - OQ])
    assert staircase(G).rank == 4
    Q = QuotientModule(G)
    for P in [L1**3, OM2 * L1 * L2**2, L2**4 + L1]:
        assert Q.nf(P) == normal_form(P, G)


def test_support_relation():
    G = buchberger([L1**2 - L2, L2**2 - 1])
    rel = support_relation(G, [(4, 0), (0, 0)])
    assert rel is not None
    assert normal_form(rel, G).is_zero()
    assert support_relation(G, [(1, 0), (0, 0)]) is None


def test_fan_toy():
    cones = groebner_fan([L1**2 - L2, L2**2 - 1])
    assert interior_rays(cones) == [(1, 2)]
    assert not fan_is_swap_symmetric(cones)
    sym = groebner_fan([L1**2 - L2, L2**2 - L1])
    assert fan_is_swap_symmetric(sym)
    # slopes 1/2 and 2, where L1 - L2^2 and L2 - L1^2 take over
    assert interior_rays(sym) == [(2, 1), (1, 2)]


def test_unit_ideal():
    G = buchberger([L1**2 - OM1 * L2 - 1, L2**2 - OQ * L1])
    assert len(G) == 1 and G.leading_monomials() == [(0, 0)]
    Q = QuotientModule(G)
    assert Q.rank == 0 and Q.contains(L1 + OM2)


def test_cone_interval():
    G = buchberger([L1**2 - L2, L2**2 - 1])
    lo, hi = cone_interval(G)
    assert lo == 0 and hi == 2


def test_modular_buchberger():
    F = ModField(2, GUESS_PRIME)
    gens = [(L1**2 - OM1 * L2 - 1).to_mod(F), (L2**2 - OQ * L1).to_mod(F)]
    G = buchberger(gens)
    Gs = buchberger([L1**2 - OM1 * L2 - 1, L2**2 - OQ * L1])
    assert G.leading_monomials() == Gs.leading_monomials()
    assert [g.to_mod(F) for g in Gs] == G.generators
