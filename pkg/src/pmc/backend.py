"""Common surface of the semantic backends and the term evaluator.

A backend interprets objects as finite cardinalities and supplies the
primitive morphisms on single (base) carriers.  Everything built from
copy, discard and the monoidal structure alone, such as conditional
composition, lives here once and works in every backend.
"""

from __future__ import annotations

from functools import reduce
from typing import Any, Sequence

from .diagram import (
    Cap, Compare, Copy, Discard, Gen, Id, Par, Seq, Signature, Swap, Term, Unit, typecheck,
)
from .errors import DimensionMismatch, MissingPayload, UnsupportedStructural

DEFAULT_TOL = 1e-9

STRUCTURAL_KINDS = ("copy", "discard", "compare", "cap", "swap", "unit")


class Backend:
    name: str = ""
    supports_unit = False
    # exact backends ignore tolerances
    exact = True

    # -- primitives, overridden per backend --------------------------------

    def identity(self, n: int): raise NotImplementedError
    def compose(self, f, g): raise NotImplementedError
    def tensor(self, f, g): raise NotImplementedError
    def copy(self, n: int): raise NotImplementedError
    def discard(self, n: int): raise NotImplementedError
    def compare(self, n: int): raise NotImplementedError
    def cap(self, n: int): raise NotImplementedError
    def swap(self, m: int, n: int): raise NotImplementedError
    def dims(self, f) -> tuple[int, int]: raise NotImplementedError
    def residual(self, f, g) -> float: raise NotImplementedError
    def from_payload(self, data, n: int, m: int, tol: float = DEFAULT_TOL): raise NotImplementedError
    def to_payload(self, f) -> Any: raise NotImplementedError
    def format(self, f) -> str: raise NotImplementedError

    def unit(self, n: int):
        raise UnsupportedStructural("unit", self.name)

    # -- derived -----------------------------------------------------------

    def __repr__(self):
        return f"<backend {self.name}>"

    def check_dims(self, f, g):
        if self.dims(f) != self.dims(g):
            raise DimensionMismatch(f"{self.dims(f)} vs {self.dims(g)}")

    def equal(self, f, g, tol: float = DEFAULT_TOL) -> bool:
        return self.residual(f, g) <= (0.0 if self.exact else tol)

    def seq(self, *fs):
        return reduce(self.compose, fs)

    def par(self, *fs):
        return reduce(self.tensor, fs)

    def structural(self, kind: str, n: int, m: int | None = None):
        if kind == "swap":
            return self.swap(n, n if m is None else m)
        if kind not in STRUCTURAL_KINDS:
            raise ValueError(f"unknown structural kind {kind!r}")
        return getattr(self, kind)(n)

    def dom(self, f) -> int:
        return self.dims(f)[0]

    def cod(self, f) -> int:
        return self.dims(f)[1]

    def domain_effect(self, f):
        """``f ; discard``: the effect recording where ``f`` is defined."""
        return self.compose(f, self.discard(self.cod(f)))

    def cond_compose(self, f, g):
        """Conditional composition of ``f: X -> A`` and ``g: A⊗X -> B``.

        ``copy_X ; ((f ; copy_A) ⊗ id_X) ; (id_A ⊗ g) : X -> A⊗B``.
        """
        nx, na = self.dims(f)
        if self.dom(g) != na * nx:
            raise DimensionMismatch(f"g must have domain A⊗X of size {na * nx}, got {self.dom(g)}")
        return self.seq(
            self.copy(nx),
            self.tensor(self.compose(f, self.copy(na)), self.identity(nx)),
            self.tensor(self.identity(na), g),
        )

    def marginal(self, f, na: int, nb: int):
        """First marginal ``f ; (id_A ⊗ discard_B)`` of ``f: X -> A⊗B``."""
        if self.cod(f) != na * nb:
            raise DimensionMismatch(f"codomain {self.cod(f)} is not {na}x{nb}")
        return self.compose(f, self.tensor(self.identity(na), self.discard(nb)))

    def restriction_rhs(self, f, g):
        """``copy_X ; (g ⊗ (f ; discard_Y))``, the right side of the restriction order."""
        self.check_dims(f, g)
        nx = self.dom(f)
        return self.seq(self.copy(nx), self.tensor(g, self.domain_effect(f)))

    def is_deterministic(self, f, tol: float = DEFAULT_TOL) -> bool:
        nx, ny = self.dims(f)
        lhs = self.compose(f, self.copy(ny))
        rhs = self.compose(self.copy(nx), self.tensor(f, f))
        return self.equal(lhs, rhs, tol)

    def is_total(self, f, tol: float = DEFAULT_TOL) -> bool:
        return self.equal(self.domain_effect(f), self.discard(self.dom(f)), tol)

    def is_quasi_total(self, f, tol: float = DEFAULT_TOL) -> bool:
        return self.equal(f, self.restriction_rhs(f, f), tol)

    def scalar(self, s):
        """Native value of a scalar ``I -> I``."""
        raise NotImplementedError

    # -- words -------------------------------------------------------------

    def word_structural(self, kind: str, cards: Sequence[int]):
        """Structural morphism on a tensor word, elaborated uniformly.

        ``copy_{W⊗X} = (copy_W ⊗ copy_X) ; (id_W ⊗ swap_{W,X} ⊗ id_X)``, and
        dually for compare and cap; discard and unit are plain tensors.  The
        empty word gives the identity on the unit.
        """
        cards = list(cards)
        if not cards:
            return self.identity(1)
        if len(cards) == 1:
            return getattr(self, kind)(cards[0])
        *init, last = cards
        w = 1
        for c in init:
            w *= c
        head = self.word_structural(kind, init)
        tail = getattr(self, kind)(last)
        if kind in ("discard", "unit"):
            return self.tensor(head, tail)
        if kind == "copy":
            mid = self.par(self.identity(w), self.swap(w, last), self.identity(last))
            return self.compose(self.tensor(head, tail), mid)
        mid = self.par(self.identity(w), self.swap(last, w), self.identity(last))
        return self.compose(mid, self.tensor(head, tail))

    # -- evaluation --------------------------------------------------------

    def evaluate(self, term: Term, sig: Signature):
        typecheck(term, sig)
        return self._eval(term, sig)

    def _eval(self, term: Term, sig: Signature):
        if isinstance(term, Gen):
            decl = sig.generator(term.name)
            try:
                return decl.payloads[self.name]
            except KeyError:
                raise MissingPayload(term.name, self.name) from None
        if isinstance(term, Seq):
            return self.compose(self._eval(term.left, sig), self._eval(term.right, sig))
        if isinstance(term, Par):
            return self.tensor(self._eval(term.left, sig), self._eval(term.right, sig))
        if isinstance(term, Swap):
            return self.swap(sig.card(term.x), sig.card(term.y))
        if isinstance(term, Id):
            return self.identity(sig.card(term.obj))
        kind = {Copy: "copy", Discard: "discard", Compare: "compare", Cap: "cap", Unit: "unit"}[type(term)]
        if kind == "unit" and not self.supports_unit:
            raise UnsupportedStructural("unit", self.name)
        return self.word_structural(kind, sig.cards(term.obj))


BACKEND_NAMES = ("finstoch", "par", "rel")


def get_backend(name: str) -> Backend:
    if name == "finstoch":
        from .finstoch import FINSTOCH
        return FINSTOCH
    if name == "par":
        from .discrete import PAR
        return PAR
    if name == "rel":
        from .discrete import REL
        return REL
    raise ValueError(f"unknown backend {name!r}; expected one of {', '.join(BACKEND_NAMES)}")


def evaluate(term: Term, sig: Signature, backend: Backend | str):
    if isinstance(backend, str):
        backend = get_backend(backend)
    return backend.evaluate(term, sig)
