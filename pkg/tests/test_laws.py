import json

import numpy as np
import pytest

from pmc import FINSTOCH, PAR, REL, FinRel, PartialFn, get_backend, kernel
from pmc.laws import (
    REL_UNBALANCED, SUITES, applicable, balanced_instance, cauchy_schwarz_numeric, cauchy_schwarz_sides,
    check_balanced, check_cancellative, check_cauchy_schwarz, check_means, check_validity_increase,
    is_zero_scalar, is_zero_scalar_closed_form, means_numeric, run_suite, validity,
)
from pmc.order import conditional_leq


@pytest.mark.parametrize("suite", list(SUITES))
def test_every_suite_passes_small(suite, backend_name):
    if not applicable(suite, backend_name):
        pytest.skip("suite does not apply")
    rep = run_suite(suite, backend_name, trials=30, seed=11)
    assert rep.passed, rep.failures[:3]
    assert sum(rep.checks.values()) > 0


def test_reports_are_reproducible_and_schedule_independent():
    a = run_suite("enrichment", "finstoch", trials=40, seed=5)
    b = run_suite("enrichment", "finstoch", trials=40, seed=5, jobs=4)
    assert a.to_json(timing=False) == b.to_json(timing=False)
    c = run_suite("enrichment", "finstoch", trials=40, seed=6)
    assert a.to_json(timing=False) != c.to_json(timing=False)


def test_report_json_fields():
    doc = json.loads(run_suite("means", "par", trials=5, seed=0).to_json())
    for key in ("suite", "backend", "seed", "trials", "max_residual", "failures"):
        assert key in doc
    assert doc["suite"] == "means" and doc["backend"] == "par" and doc["passed"]


def test_rel_appendix_rejects_other_backends():
    with pytest.raises(ValueError):
        run_suite("rel-appendix", "finstoch", trials=1, seed=0)


def test_balanced_deterministic_middle():
    rng = np.random.default_rng(0)
    from pmc.sampling import random_morphism

    for _ in range(50):
        f = random_morphism(FINSTOCH, rng, 2, 3)
        g = random_morphism(FINSTOCH, rng, 3, 2, "deterministic")
        h = random_morphism(FINSTOCH, rng, 2, 3)
        assert balanced_instance(FINSTOCH, f, g, h) == (True, True)


def test_rel_known_counterexample():
    assert balanced_instance(REL, *REL_UNBALANCED) == (True, False)
    assert not check_balanced(REL, *REL_UNBALANCED)
    rep = run_suite("balanced", "rel", trials=20, seed=0)
    assert rep.passed and rep.counterexamples


def test_par_balanced_on_all_triples():
    rep = run_suite("balanced", "par", trials=200, seed=3)
    assert rep.passed and not rep.vacuous.get("random")


def test_cauchy_schwarz_examples():
    h = kernel([[0.5, 0.5]])
    lhs, rhs = cauchy_schwarz_sides(FINSTOCH, h, kernel([[1.0], [0.0]]), kernel([[0.0], [1.0]]))
    assert lhs.matrix[0, 0] == pytest.approx(0.0) and rhs.matrix[0, 0] == pytest.approx(0.25)
    lhs, rhs = cauchy_schwarz_sides(FINSTOCH, h, kernel([[1.0], [0.0]]), kernel([[1.0], [0.0]]))
    assert lhs.matrix[0, 0] == pytest.approx(0.25) == rhs.matrix[0, 0]


def test_cauchy_schwarz_diagram_matches_numeric_formula():
    rng = np.random.default_rng(2)
    from pmc.sampling import random_kernel

    for _ in range(200):
        nx, na, ny, nz = rng.integers(1, 4, size=4)
        h, f, g = random_kernel(rng, nx, na), random_kernel(rng, na, ny), random_kernel(rng, na, nz)
        lhs, rhs = cauchy_schwarz_sides(FINSTOCH, h, f, g)
        want_l = np.einsum("xa,ay,az->xyz", h.matrix, f.matrix, g.matrix) ** 2
        want_r = np.einsum("xa,ay,xb,bz->xyz", h.matrix, f.matrix ** 2, h.matrix, g.matrix ** 2)
        np.testing.assert_allclose(lhs.matrix, want_l.reshape(nx, -1), atol=1e-12)
        np.testing.assert_allclose(rhs.matrix, want_r.reshape(nx, -1), atol=1e-12)
        assert check_cauchy_schwarz(FINSTOCH, h, f, g) == cauchy_schwarz_numeric(h, f, g)


def test_means_numeric_and_diagram():
    u, v = kernel([[0.5, 0.5]]), kernel([[0.8], [0.4]])
    assert check_means(FINSTOCH, u, v) and means_numeric(u, v)
    # a violated instance of the bare inequality, to make sure the check can fail
    assert not conditional_leq(FINSTOCH, kernel([[0.5]]), kernel([[0.25]])).holds


def test_validity_examples():
    sigma = kernel([[0.5, 0.5]])
    assert FINSTOCH.scalar(validity(FINSTOCH, sigma, kernel([[1.0], [0.0]]))) == pytest.approx(0.5)
    assert FINSTOCH.scalar(validity(FINSTOCH, sigma, kernel([[0.8], [0.4]]))) == pytest.approx(0.6)
    assert FINSTOCH.scalar(validity(FINSTOCH, kernel([[0.3, 0.4]]), FINSTOCH.discard(2))) == pytest.approx(0.7)

    rep = check_validity_increase(FINSTOCH, sigma, kernel([[1.0], [0.0]]))
    assert rep.holds and not rep.degenerate
    np.testing.assert_allclose(rep.posterior.matrix, [[1.0, 0.0]])
    assert FINSTOCH.scalar(rep.posterior_validity) == pytest.approx(1.0, abs=1e-9)

    rep = check_validity_increase(FINSTOCH, sigma, kernel([[0.8], [0.4]]))
    np.testing.assert_allclose(rep.posterior.matrix, [[2 / 3, 1 / 3]])
    assert FINSTOCH.scalar(rep.posterior_validity) == pytest.approx(2 / 3, abs=1e-9)

    rep = check_validity_increase(FINSTOCH, sigma, kernel([[0.0], [0.0]]))
    assert rep.degenerate


@pytest.mark.parametrize("backend,s,zero", [
    (FINSTOCH, kernel([[0.0]]), True),
    (FINSTOCH, kernel([[0.5]]), False),
    (FINSTOCH, kernel([[1e-12]]), True),
    (PAR, PartialFn((None,), 1), True),
    (PAR, PartialFn((0,), 1), False),
    (REL, FinRel(np.zeros((1, 1), dtype=bool)), True),
    (REL, FinRel(np.ones((1, 1), dtype=bool)), False),
])
def test_zero_scalar_classification(backend, s, zero):
    assert is_zero_scalar_closed_form(backend, s) == zero
    assert is_zero_scalar(backend, s) == zero


def test_cancellative_examples():
    rep = check_cancellative(FINSTOCH, kernel([[0.5]]), trials=100, seed=0)
    assert rep.passed and rep.checks["cancel-order-built"] == 100
    rep = check_cancellative(REL, FinRel(np.ones((1, 1), dtype=bool)), trials=50, seed=0)
    assert rep.passed and rep.checks["cancel-equality-built"] == 50
    rep = check_cancellative(FINSTOCH, kernel([[0.0]]), trials=10, seed=0)
    assert rep.passed and not rep.checks and rep.notes


def test_enrichment_separating_pair_in_rel():
    rep = run_suite("enrichment", "rel", trials=1, seed=0)
    assert rep.checks["separating-pair-conditional"] == 1
    assert rep.checks["separating-pair-not-restriction"] == 1
    assert rep.passed


def test_failures_are_reported_with_inputs():
    from pmc.laws import Outcome, aggregate

    rep = aggregate("x", "finstoch", 0, 2, [[Outcome("a", True, 1e-12)], [Outcome("a", False, 0.5, detail={"k": 1})]])
    assert not rep.passed
    assert rep.failures == [{"trial": 1, "law": "a", "residual": 0.5, "k": 1}]
    assert rep.max_residual == 1e-12
