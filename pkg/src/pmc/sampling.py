"""Seeded random morphisms for the law suites.

Trial ``i`` of a run with seed ``s`` draws from ``default_rng([s, i])``, so
results do not depend on trial order or scheduling.

Kernel rows are Dirichlet directions scaled by a mass that is exactly 1
or exactly 0 with probability 0.1 each and uniform on ``[0, 1]``
otherwise.  Partial function entries are uniform over outputs and
"undefined"; relation entries are fair coins.
"""

from __future__ import annotations

import numpy as np

from .backend import DEFAULT_TOL, Backend
from .discrete import PAR, REL, FinRel, PartialFn, _rel
from .finstoch import FINSTOCH, _raw


def trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, i])


def _rows(rng, n, m, masses):
    if m == 0:
        return np.zeros((n, 0))
    d = rng.dirichlet(np.ones(m), size=n) if n else np.zeros((0, m))
    return d * masses[:, None]


def random_kernel(rng, n: int, m: int, kind: str = "any"):
    if kind == "any":
        u = rng.random(n)
        masses = rng.random(n)
        masses[u < 0.1] = 0.0
        masses[(u >= 0.1) & (u < 0.2)] = 1.0
    elif kind == "quasi_total":
        masses = (rng.random(n) >= 0.3).astype(float)
    elif kind == "total":
        masses = np.ones(n)
    elif kind == "deterministic":
        a = np.zeros((n, m))
        if m:
            hit = rng.random(n) >= 0.2
            a[np.arange(n)[hit], rng.integers(0, m, size=n)[hit]] = 1.0
        return _raw(a)
    else:
        raise ValueError(kind)
    if m == 0:
        masses = np.zeros(n)
    a = _rows(rng, n, m, masses)
    # Dirichlet rounding can leave a total row a hair above 1
    s = a.sum(axis=1)
    over = s > 1.0
    a[over] /= s[over][:, None]
    return _raw(a)


def random_partial_fn(rng, n: int, m: int, kind: str = "any") -> PartialFn:
    if kind == "total":
        if m == 0 and n:
            raise ValueError("no total map into an empty set")
        return PartialFn(tuple(int(v) for v in rng.integers(0, max(m, 1), size=n)), m)
    vals = rng.integers(0, m + 1, size=n)
    return PartialFn(tuple(None if v == m else int(v) for v in vals), m)


def random_relation(rng, n: int, m: int, kind: str = "any") -> FinRel:
    if kind == "deterministic":
        a = np.zeros((n, m), dtype=bool)
        if m:
            hit = rng.random(n) >= 0.3
            a[np.arange(n)[hit], rng.integers(0, m, size=n)[hit]] = True
        return _rel(a)
    a = rng.random((n, m)) < 0.5
    if kind == "total" and m:
        a[np.arange(n), rng.integers(0, m, size=n)] = True
    return _rel(a)


def random_morphism(backend: Backend, rng, n: int, m: int, kind: str = "any"):
    """Random ``n -> m`` morphism.

    ``kind`` is one of ``any``, ``quasi_total``, ``total``,
    ``deterministic``.  Every Par and Rel map is quasi-total already.
    """
    if backend is FINSTOCH:
        return random_kernel(rng, n, m, kind)
    if backend is PAR:
        return random_partial_fn(rng, n, m, "total" if kind == "total" else "any")
    if kind == "quasi_total":
        kind = "any"
    return random_relation(rng, n, m, kind)


def random_below(backend: Backend, rng, g):
    """A random ``f`` with ``f ⊑ g``, built as ``g ◁ r`` for a random effect ``r``."""
    nx, ny = backend.dims(g)
    r = random_morphism(backend, rng, ny * nx, 1)
    return backend.cond_compose(g, r)


def random_conditional(backend: Backend, rng, f, na: int, nb: int, tol: float = DEFAULT_TOL):
    """A random quasi-total conditional ``A⊗X -> B`` of ``f: X -> A⊗B``.

    Rows where the marginal is supported are forced by the recomposition
    equation; the remaining rows are arbitrary quasi-total rows.
    """
    nx = backend.dom(f)
    c = random_morphism(backend, rng, na * nx, nb, "quasi_total")
    if backend is FINSTOCH:
        joint = f.matrix.reshape(nx, na, nb)
        mass = joint.sum(axis=2)
        out = c.matrix.copy()
        for x in range(nx):
            for a in range(na):
                if mass[x, a] > tol:
                    out[a * nx + x] = joint[x, a] / mass[x, a]
        return _raw(out)
    if backend is PAR:
        table = list(c.table)
        for x, v in enumerate(f.table):
            if v is not None:
                a, b = divmod(v, nb)
                table[a * nx + x] = b
        return PartialFn(tuple(table), nb)
    joint = f.matrix.reshape(nx, na, nb)
    out = c.matrix.copy()
    for x in range(nx):
        for a in range(na):
            if joint[x, a].any():
                out[a * nx + x] = joint[x, a]
    return _rel(out)
