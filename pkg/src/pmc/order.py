"""Deciders for the restriction order and the conditional preorder.

``f ⪯ g`` holds when ``f = copy ; (g ⊗ (f ; discard))``.  ``f ⊑ g`` holds
when ``f = g ◁ r`` for some effect ``r: Y⊗X -> I``; the verdict carries
such an ``r`` whenever one is found.  Witness rows are indexed
``y * |X| + x``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any

import numpy as np

from .backend import DEFAULT_TOL, Backend, get_backend
from .discrete import PAR, REL, FinRel, PartialFn
from .errors import DimensionMismatch, NotComparable, NotQuasiTotal, TooLarge
from .finstoch import FINSTOCH, _raw

RESTRICTION = "restriction"
CONDITIONAL = "conditional"


@dataclass(frozen=True)
class OrderVerdict:
    relation: str
    holds: bool
    witness: Any = None
    residual: float = 0.0

    def to_dict(self, backend) -> dict:
        b = get_backend(backend) if isinstance(backend, str) else backend
        return {
            "relation": self.relation,
            "holds": self.holds,
            "witness": None if self.witness is None else b.to_payload(self.witness),
            "residual": self.residual,
        }


def _backend(b) -> Backend:
    return get_backend(b) if isinstance(b, str) else b


def restriction_leq(backend, f, g, tol: float = DEFAULT_TOL) -> OrderVerdict:
    """Decide ``f ⪯ g`` by evaluating both sides of the defining equation."""
    b = _backend(backend)
    res = b.residual(f, b.restriction_rhs(f, g))
    holds = res <= (0.0 if b.exact else tol)
    return OrderVerdict(RESTRICTION, holds, None, res)


def conditional_leq(backend, f, g, tol: float = DEFAULT_TOL) -> OrderVerdict:
    """Decide ``f ⊑ g`` and produce a witness.

    Kernels: pointwise domination, with witness ``f/g`` where ``g > tol``
    and 1 elsewhere.  Relations: inclusion, with witness
    ``(id ⊗ f) ; compare ; discard``.  Partial functions: the restriction
    order, witnessed by ``discard ⊗ (f ; discard)``.
    """
    b = _backend(backend)
    b.check_dims(f, g)
    if b is FINSTOCH:
        fm, gm = f.matrix, g.matrix
        holds = bool(np.all(fm <= gm + tol))
        if not holds:
            return OrderVerdict(CONDITIONAL, False, None, float(np.max(fm - gm)))
        ratio = np.where(gm > tol, fm / np.where(gm > tol, gm, 1.0), 1.0)
        r = _raw(np.clip(ratio, 0.0, 1.0).T.reshape(-1, 1))
    elif b is REL:
        r = b.seq(b.tensor(b.identity(b.cod(f)), f), b.compare(b.cod(f)), b.discard(b.cod(f)))
    else:
        v = restriction_leq(b, f, g, tol)
        if not v.holds:
            return OrderVerdict(CONDITIONAL, False, None, v.residual)
        r = b.tensor(b.discard(b.cod(f)), b.domain_effect(f))
    res = b.residual(f, b.cond_compose(g, r))
    holds = res <= (0.0 if b.exact else tol)
    return OrderVerdict(CONDITIONAL, holds, r if holds else None, res)


def witness_residual(backend, f, g, r) -> float:
    """Defect of ``f = g ◁ r``."""
    b = _backend(backend)
    return b.residual(f, b.cond_compose(g, r))


def sharp_witness(backend, f, g, tol: float = DEFAULT_TOL):
    """A deterministic effect witnessing ``f ⊑ g`` for quasi-total ``f, g``.

    For kernels ``r(y, x)`` is 0 where row ``x`` of ``f`` vanishes and 1
    otherwise.  In Par and Rel the canonical witness is already sharp.
    """
    b = _backend(backend)
    for name, h in (("f", f), ("g", g)):
        if not b.is_quasi_total(h, tol):
            raise NotQuasiTotal(f"{name} is not quasi-total")
    v = conditional_leq(b, f, g, tol)
    if not v.holds:
        raise NotComparable("f is not below g in the conditional preorder")
    if b is not FINSTOCH:
        return v.witness
    ny = b.cod(f)
    alive = (f.matrix > tol).any(axis=1).astype(float)
    r = _raw(np.tile(alive, ny)[:, None])
    if witness_residual(b, f, g, r) > tol:
        raise NotComparable("sharp witness does not recompose f")
    return r


def generic_witness_search(backend, f, g, grid: int = 64, slack: float | None = None,
                           tol: float = DEFAULT_TOL) -> OrderVerdict:
    """Brute-force witness search, used only to cross-check :func:`conditional_leq`.

    Kernels: every witness value is searched over ``{0, 1/grid, ..., 1}``
    entry by entry and the assembled effect is accepted when ``g ◁ r``
    matches ``f`` within ``slack`` (default half a grid step).  Par and
    Rel: every boolean effect ``Y⊗X -> I`` is enumerated.
    """
    b = _backend(backend)
    b.check_dims(f, g)
    nx, ny = b.dims(f)
    size = nx * ny
    if b is FINSTOCH:
        if size > 64:
            raise TooLarge(f"|X||Y| = {size} exceeds 64")
        slack = 0.5 / grid if slack is None else slack
        values = np.arange(grid + 1) / grid
        fm, gm = f.matrix, g.matrix
        r = np.empty((ny, nx))
        for x in range(nx):
            for y in range(ny):
                # first grid point minimising the entry defect
                r[y, x] = values[int(np.argmin(np.abs(gm[x, y] * values - fm[x, y])))]
        cand = _raw(r.reshape(-1, 1))
        res = witness_residual(b, f, g, cand)
        ok = res <= slack
        return OrderVerdict(CONDITIONAL, ok, cand if ok else None, res)
    if size > 16:
        raise TooLarge(f"2^{size} candidate effects is too many")
    best = float("inf")
    for bits in itertools.product((False, True), repeat=size):
        if b is REL:
            cand = FinRel(np.array(bits, dtype=bool).reshape(size, 1))
        else:
            cand = PartialFn(tuple(0 if v else None for v in bits), 1)
        res = witness_residual(b, f, g, cand)
        if res == 0:
            return OrderVerdict(CONDITIONAL, True, cand, 0.0)
        best = min(best, res)
    return OrderVerdict(CONDITIONAL, False, None, best if size else 0.0)
