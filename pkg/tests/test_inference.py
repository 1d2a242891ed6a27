import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmc import FINSTOCH, PAR, REL, FinRel, PartialFn, kernel
from pmc.errors import DimensionMismatch, NotQuasiTotal
from pmc.inference import (
    bayes_invert, caps_from_least_conditionals, cond_compose, conditional, copy_conditional_checks,
    is_conditional, is_least_conditional_sample, least_conditional_formula, par_least_conditional,
)
from pmc.order import restriction_leq
from pmc.sampling import random_conditional, random_morphism


def test_cond_compose_finstoch():
    joint = cond_compose(FINSTOCH, kernel([[0.4, 0.6]]), kernel([[0.5, 0.5], [0.5, 0.5]]))
    np.testing.assert_allclose(joint.matrix, [[0.2, 0.2, 0.3, 0.3]])


def test_cond_compose_par():
    # A = {0}, B = {0, 1}; g(0, 0) = 1
    joint = cond_compose(PAR, PartialFn((0,), 1), PartialFn((1,), 2))
    assert joint.table == (0 * 2 + 1,)


def test_conditional_examples():
    fac = conditional(FINSTOCH, kernel([[0.2, 0.2, 0.3, 0.3]]), 2, 2)
    np.testing.assert_allclose(fac.marginal.matrix, [[0.4, 0.6]])
    np.testing.assert_allclose(fac.conditional.matrix, [[0.5, 0.5], [0.5, 0.5]])
    assert FINSTOCH.equal(fac.recompose(), kernel([[0.2, 0.2, 0.3, 0.3]]))

    fac = conditional(FINSTOCH, kernel([[0.5, 0.5, 0, 0]]), 2, 2)
    np.testing.assert_array_equal(fac.conditional.matrix[1], [0, 0])


def test_par_least_conditional_example():
    # X = {0, 1}, A = B = {0, 1}; f(0) = (a0, b1), f(1) undefined
    f = PartialFn((0 * 2 + 1, None), 4)
    c0 = par_least_conditional(f, 2, 2)
    # rows a * |X| + x
    assert c0.table == (1, None, None, None)
    assert c0 == conditional(PAR, f, 2, 2).conditional
    assert c0 == least_conditional_formula(PAR, f, 2, 2)


def test_bayes_identity_channel():
    prior = kernel([[0.25, 0.75, 0.0]])
    inv = bayes_invert(FINSTOCH, FINSTOCH.identity(3), prior)
    np.testing.assert_allclose(inv.matrix, [[1, 0, 0], [0, 1, 0], [0, 0, 0]])


def test_bayes_rule_example():
    inv = bayes_invert(FINSTOCH, kernel([[0.5, 0.5], [0, 1]]), kernel([[0.5, 0.5]]))
    np.testing.assert_allclose(inv.matrix, [[1, 0], [1 / 3, 2 / 3]])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_bayes_closed_forms(nx, na, nb, seed):
    rng = np.random.default_rng(seed)
    f, g = random_morphism(FINSTOCH, rng, nx, na), random_morphism(FINSTOCH, rng, na, nb)
    inv = bayes_invert(FINSTOCH, g, f).matrix
    for b in range(nb):
        for x in range(nx):
            w = f.matrix[x] * g.matrix[:, b]
            want = w / w.sum() if w.sum() > 1e-9 else np.zeros(na)
            np.testing.assert_allclose(inv[b * nx + x], want, atol=1e-12)
    fr, gr = random_morphism(REL, rng, nx, na), random_morphism(REL, rng, na, nb)
    inv = bayes_invert(REL, gr, fr)
    want = {(b * nx + x, a) for (x, a) in fr.pairs() for (a2, b) in gr.pairs() if a == a2}
    assert inv.pairs() == want


@pytest.mark.parametrize("name", ["finstoch", "par", "rel"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_compare_is_conditional_of_copy_and_cap_of_identity(name, n):
    from pmc import get_backend

    b = get_backend(name)
    assert is_conditional(b, b.compare(n), b.copy(n), n, n)
    assert is_conditional(b, b.cap(n), b.identity(n), n, 1)
    assert all(caps_from_least_conditionals(b, n).values())
    assert all(copy_conditional_checks(b, b.compare(n), n).values())


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["finstoch", "par", "rel"]), st.integers(1, 3), st.integers(1, 3),
       st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_recomposition_and_quasi_totality(name, nx, na, nb, seed):
    from pmc import get_backend

    b = get_backend(name)
    rng = np.random.default_rng(seed)
    f = random_morphism(b, rng, nx, na * nb)
    fac = conditional(b, f, na, nb)
    assert b.equal(fac.recompose(), f)
    assert b.is_quasi_total(fac.conditional)
    c = random_conditional(b, rng, f, na, nb)
    assert is_conditional(b, c, f, na, nb)
    assert restriction_leq(b, fac.conditional, c).holds


def test_is_conditional_errors():
    f = kernel([[0.2, 0.2, 0.3, 0.3]])
    with pytest.raises(NotQuasiTotal):
        is_conditional(FINSTOCH, kernel([[0.5, 0.2], [0.5, 0.5]]), f, 2, 2)
    with pytest.raises(DimensionMismatch):
        is_conditional(FINSTOCH, kernel([[0.5, 0.5]]), f, 2, 2)
    with pytest.raises(DimensionMismatch):
        conditional(FINSTOCH, f, 3, 2)


def test_least_conditional_sample_report():
    f = FinRel.from_pairs([(0, 0), (0, 3), (1, 1)], 2, 4)
    c0 = conditional(REL, f, 2, 2).conditional
    rep = is_least_conditional_sample(REL, c0, f, 2, 2, trials=50, seed=1)
    assert rep.passed and rep.checks["least"] == 50
    # something strictly larger is not least
    bigger = FinRel(np.ones_like(c0.matrix))
    rep = is_least_conditional_sample(REL, bigger, f, 2, 2, trials=50, seed=1)
    assert not rep.passed
