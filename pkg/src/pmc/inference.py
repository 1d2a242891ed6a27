"""Conditionals, Bayesian inverses and least conditionals.

Conventions: a joint ``f: X -> A⊗B`` factors as its marginal ``X -> A``
followed by a conditional ``c: A⊗X -> B``; rows of ``c`` are indexed by
``a * |X| + x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .backend import DEFAULT_TOL, Backend, get_backend
from .discrete import PAR, REL, PartialFn
from .errors import DimensionMismatch, NotQuasiTotal
from .finstoch import FINSTOCH, _raw


@dataclass(frozen=True)
class JointFactorization:
    marginal: Any
    conditional: Any
    backend: str
    na: int
    nb: int

    def recompose(self):
        return get_backend(self.backend).cond_compose(self.marginal, self.conditional)


def _backend(b) -> Backend:
    return get_backend(b) if isinstance(b, str) else b


def cond_compose(backend, f, g):
    """``f ◁ g`` for ``f: X -> A`` and ``g: A⊗X -> B``."""
    return _backend(backend).cond_compose(f, g)


def _check_split(b: Backend, f, na: int, nb: int):
    if b.cod(f) != na * nb:
        raise DimensionMismatch(f"codomain of size {b.cod(f)} does not split as {na}x{nb}")


def conditional(backend, f, na: int, nb: int, tol: float = DEFAULT_TOL) -> JointFactorization:
    """Factor ``f: X -> A⊗B`` as marginal ◁ conditional.

    Kernels are normalised by the marginal; where the marginal is at most
    ``tol`` the conditional row is all zeros, which keeps it quasi-total.
    Par and Rel return the least conditional
    ``(id_A ⊗ f) ; ((compare_A ; discard_A) ⊗ id_B)``.
    """
    b = _backend(backend)
    _check_split(b, f, na, nb)
    m = b.marginal(f, na, nb)
    if b is FINSTOCH:
        nx = b.dom(f)
        joint = f.matrix.reshape(nx, na, nb)
        mass = joint.sum(axis=2)
        safe = np.where(mass > tol, mass, 1.0)
        c = np.where((mass > tol)[:, :, None], joint / safe[:, :, None], 0.0)
        # rows indexed a * |X| + x
        c = c.transpose(1, 0, 2).reshape(na * nx, nb)
        return JointFactorization(m, _raw(c), b.name, na, nb)
    if b is PAR:
        return JointFactorization(m, par_least_conditional(f, na, nb), b.name, na, nb)
    return JointFactorization(m, least_conditional_formula(b, f, na, nb), b.name, na, nb)


def least_conditional_formula(backend, f, na: int, nb: int):
    """``(id_A ⊗ f) ; ((compare_A ; discard_A) ⊗ id_B)`` evaluated in ``backend``."""
    b = _backend(backend)
    _check_split(b, f, na, nb)
    cap = b.compose(b.compare(na), b.discard(na))
    return b.compose(b.tensor(b.identity(na), f), b.tensor(cap, b.identity(nb)))


def par_least_conditional(f: PartialFn, na: int, nb: int) -> PartialFn:
    """``c0(a, x) = b`` when ``f(x) = (a, b)``, undefined otherwise."""
    nx = f.dom_card
    table: list[int | None] = [None] * (na * nx)
    for x, v in enumerate(f.table):
        if v is not None:
            a, bb = divmod(v, nb)
            table[a * nx + x] = bb
    return PartialFn(tuple(table), nb)


def bayes_joint(backend, g, f):
    """``f ; copy_A ; (g ⊗ id_A) : X -> B⊗A`` for prior ``f: X -> A`` and channel ``g: A -> B``."""
    b = _backend(backend)
    na = b.cod(f)
    if b.dom(g) != na:
        raise DimensionMismatch(f"channel domain {b.dom(g)} does not match prior codomain {na}")
    return b.seq(f, b.copy(na), b.tensor(g, b.identity(na)))


def bayes_invert(backend, g, f, tol: float = DEFAULT_TOL):
    """Bayesian inverse ``B⊗X -> A`` of ``g: A -> B`` with respect to ``f: X -> A``."""
    b = _backend(backend)
    joint = bayes_joint(b, g, f)
    return conditional(b, joint, b.cod(g), b.cod(f), tol).conditional


def is_conditional(backend, c, f, na: int, nb: int, tol: float = DEFAULT_TOL) -> bool:
    """Whether quasi-total ``c`` recomposes ``f`` with its marginal."""
    b = _backend(backend)
    _check_split(b, f, na, nb)
    nx = b.dom(f)
    if b.dims(c) != (na * nx, nb):
        raise DimensionMismatch(f"conditional must be {na * nx}x{nb}, got {b.dims(c)}")
    if not b.is_quasi_total(c, tol):
        raise NotQuasiTotal("conditional is not quasi-total")
    return b.equal(b.cond_compose(b.marginal(f, na, nb), c), f, tol)


def is_least_conditional_sample(backend, c0, f, na: int, nb: int, trials: int, seed: int,
                                tol: float = DEFAULT_TOL):
    """Check ``c0 ⪯ c`` for ``trials`` sampled conditionals ``c`` of ``f``.

    Returns a :class:`~pmc.laws.LawReport`; any sampled ``c`` that is not a
    conditional, or that ``c0`` is not a restriction of, is a failure.
    """
    from .laws import Outcome, aggregate
    from .order import restriction_leq
    from .sampling import random_conditional, trial_rng

    b = _backend(backend)
    outcomes = []
    for i in range(trials):
        rng = trial_rng(seed, i)
        c = random_conditional(b, rng, f, na, nb, tol)
        ok = is_conditional(b, c, f, na, nb, tol)
        outcomes.append([Outcome("sample-is-conditional", ok, detail=None if ok else {"c": b.to_payload(c)})])
        v = restriction_leq(b, c0, c, tol)
        outcomes[-1].append(Outcome("least", v.holds, v.residual,
                                    detail=None if v.holds else {"c": b.to_payload(c)}))
    return aggregate("least-conditional", b.name, seed, trials, outcomes)


def copy_conditional_checks(backend, c, n: int, tol: float = DEFAULT_TOL) -> dict[str, bool]:
    """Facts about a conditional ``c: X⊗X -> X`` of ``copy_X``.

    ``copy ; c = id`` characterises such conditionals, ``c ; discard`` is
    then a conditional of the identity, and ``compare ⪯ c``.
    """
    from .order import restriction_leq

    b = _backend(backend)
    eff = b.domain_effect(c)
    return {
        "is-conditional-of-copy": is_conditional(b, c, b.copy(n), n, n, tol),
        "copy-then-c-is-id": b.equal(b.compose(b.copy(n), c), b.identity(n), tol),
        "effect-is-conditional-of-id": is_conditional(b, eff, b.identity(n), n, 1, tol),
        "copy-then-effect-is-discard": b.equal(b.compose(b.copy(n), eff), b.discard(n), tol),
        "compare-below": restriction_leq(b, b.compare(n), c, tol).holds,
        "cap-below-effect": restriction_leq(b, b.cap(n), eff, tol).holds,
    }


def caps_from_least_conditionals(backend, n: int, tol: float = DEFAULT_TOL) -> dict[str, bool]:
    """Build caps as ``(least conditional of copy) ; discard`` and test the cap axioms.

    Returns one flag per axiom plus whether the constructed multiplication
    is the comparator itself.
    """
    b = _backend(backend)
    mu = conditional(b, b.copy(n), n, n, tol).conditional
    cap = b.compose(mu, b.discard(n))
    i = b.identity(n)
    return {
        "mu-is-compare": b.equal(mu, b.compare(n), tol),
        "commutative": b.equal(b.compose(b.swap(n, n), cap), cap, tol),
        "copy-cap-is-discard": b.equal(b.compose(b.copy(n), cap), b.discard(n), tol),
        "frobenius": b.equal(
            b.compose(b.tensor(b.copy(n), i), b.tensor(i, cap)),
            b.compose(b.tensor(i, b.copy(n)), b.tensor(cap, i)),
            tol,
        ),
    }
