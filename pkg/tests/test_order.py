import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmc import FINSTOCH, PAR, REL, FinRel, PartialFn, kernel
from pmc.errors import NotComparable, NotQuasiTotal, TooLarge
from pmc.order import conditional_leq, generic_witness_search, restriction_leq, sharp_witness, witness_residual
from pmc.sampling import random_below, random_morphism

R = FinRel.from_pairs([(0, 1)], 3, 3)
S = FinRel.from_pairs([(0, 1), (0, 2)], 3, 3)


def test_restriction_examples():
    assert restriction_leq(FINSTOCH, kernel([[0.25, 0.25]]), kernel([[0.5, 0.5]])).holds
    assert not restriction_leq(REL, R, S).holds
    f = kernel([[0.5, 0.5], [0.0, 0.0]])
    assert restriction_leq(FINSTOCH, f, f).holds


def test_conditional_examples():
    f, g = kernel([[0.2, 0.3]]), kernel([[0.5, 0.3]])
    v = conditional_leq(FINSTOCH, f, g)
    assert v.holds
    # witness rows are indexed y * |X| + x
    np.testing.assert_allclose(v.witness.matrix.ravel(), [0.4, 1.0])
    assert witness_residual(FINSTOCH, f, g, v.witness) <= 1e-12
    assert not conditional_leq(FINSTOCH, g, f).holds
    assert conditional_leq(REL, R, S).holds


def test_reflexivity_witness_is_true_effect():
    f = kernel([[0.5, 0.5], [0.2, 0.8]])
    v = conditional_leq(FINSTOCH, f, f)
    np.testing.assert_allclose(v.witness.matrix, np.ones((4, 1)))
    p = PartialFn((1, None), 2)
    assert conditional_leq(PAR, p, p).holds


def test_sharp_witness_example():
    f = kernel([[0, 0], [0.3, 0.7]])
    g = kernel([[0.4, 0.6], [0.3, 0.7]])
    r = sharp_witness(FINSTOCH, f, g)
    # r(y, x) depends on x only: 0 on the dead row, 1 on the live one
    np.testing.assert_array_equal(r.matrix.ravel(), [0, 1, 0, 1])
    assert FINSTOCH.equal(FINSTOCH.cond_compose(g, r), f)


def test_sharp_witness_equal_pair_is_true_effect():
    g = kernel([[0.4, 0.6], [0.3, 0.7]])
    np.testing.assert_array_equal(sharp_witness(FINSTOCH, g, g).matrix.ravel(), [1, 1, 1, 1])


def test_sharp_witness_errors():
    with pytest.raises(NotQuasiTotal):
        sharp_witness(FINSTOCH, kernel([[0.2, 0.3]]), kernel([[0.5, 0.5]]))
    with pytest.raises(NotComparable):
        sharp_witness(FINSTOCH, kernel([[0.5, 0.5]]), kernel([[0.0, 0.0]]))


def test_generic_search_reflexive_and_limits():
    f = kernel([[0.5, 0.5]])
    v = generic_witness_search(FINSTOCH, f, f)
    assert v.holds
    np.testing.assert_array_equal(v.witness.matrix.ravel(), [1, 1])
    with pytest.raises(TooLarge):
        generic_witness_search(FINSTOCH, FINSTOCH.identity(9), FINSTOCH.identity(9))
    with pytest.raises(TooLarge):
        generic_witness_search(REL, REL.identity(5), REL.identity(5))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1), st.booleans())
def test_rel_decider_matches_subset_and_enumeration(n, m, seed, built):
    rng = np.random.default_rng(seed)
    g = random_morphism(REL, rng, n, m)
    f = random_below(REL, rng, g) if built else random_morphism(REL, rng, n, m)
    subset = f.pairs() <= g.pairs()
    assert conditional_leq(REL, f, g).holds == subset == generic_witness_search(REL, f, g).holds


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1), st.booleans())
def test_par_decider_matches_enumeration(n, m, seed, built):
    rng = np.random.default_rng(seed)
    g = random_morphism(PAR, rng, n, m)
    f = random_below(PAR, rng, g) if built else random_morphism(PAR, rng, n, m)
    # f is below g when it agrees with g wherever f is defined
    want = all(a is None or a == b for a, b in zip(f.table, g.table))
    assert conditional_leq(PAR, f, g).holds == want == generic_witness_search(PAR, f, g).holds
    assert restriction_leq(PAR, f, g).holds == want


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_finstoch_witness_recomposes(n, m, seed):
    rng = np.random.default_rng(seed)
    g = random_morphism(FINSTOCH, rng, n, m)
    f = random_below(FINSTOCH, rng, g)
    v = conditional_leq(FINSTOCH, f, g)
    assert v.holds and v.residual <= 1e-9
    assert np.all((v.witness.matrix >= 0) & (v.witness.matrix <= 1))


def test_verdict_serialises():
    d = conditional_leq(REL, R, S).to_dict("rel")
    assert d["relation"] == "conditional" and d["holds"] and len(d["witness"]) == 9
