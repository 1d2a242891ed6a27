"""Partial functions (Par) and relations (Rel) between finite sets.

Both share the index convention of the kernel backend: element ``(x1, x2)``
of ``X1 ⊗ X2`` has index ``x1 * |X2| + x2``.  Equality is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .backend import DEFAULT_TOL, Backend
from .diagram import Signature, Term
from .errors import DimensionMismatch, UnsupportedStructural


@dataclass(frozen=True)
class PartialFn:
    """``table[x]`` is the image of ``x`` or ``None`` where undefined."""

    table: tuple[Optional[int], ...]
    cod_card: int

    @classmethod
    def of(cls, table, cod_card: int) -> "PartialFn":
        out = []
        for v in table:
            if v is None:
                out.append(None)
                continue
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ValueError(f"partial function entries must be indices or null, got {v!r}")
            if not 0 <= v < cod_card:
                raise ValueError(f"index {v} out of range for codomain of size {cod_card}")
            out.append(int(v))
        return cls(tuple(out), cod_card)

    @property
    def dom_card(self) -> int:
        return len(self.table)

    def defined(self) -> list[bool]:
        return [v is not None for v in self.table]


@dataclass(frozen=True, eq=False)
class FinRel:
    matrix: np.ndarray

    @classmethod
    def of(cls, data, n: int | None = None, m: int | None = None) -> "FinRel":
        a = np.array(data, dtype=object) if not isinstance(data, np.ndarray) else data
        if a.size == 0 and n is not None and m is not None:
            a = np.zeros((n, m), dtype=bool)
        if a.ndim != 2:
            raise ValueError(f"relation must be a matrix, got shape {a.shape}")
        for v in a.ravel():
            if not (isinstance(v, (bool, np.bool_)) or v in (0, 1)):
                raise ValueError(f"relation entries must be booleans, got {v!r}")
        a = a.astype(bool)
        if n is not None and m is not None and a.shape != (n, m):
            raise ValueError(f"expected a {n}x{m} matrix, got {a.shape[0]}x{a.shape[1]}")
        return _rel(a)

    @classmethod
    def from_pairs(cls, pairs, n: int, m: int) -> "FinRel":
        a = np.zeros((n, m), dtype=bool)
        for x, y in pairs:
            a[x, y] = True
        return _rel(a)

    @property
    def dom_card(self) -> int:
        return self.matrix.shape[0]

    @property
    def cod_card(self) -> int:
        return self.matrix.shape[1]

    def pairs(self) -> set[tuple[int, int]]:
        return {(int(x), int(y)) for x, y in zip(*np.nonzero(self.matrix))}

    def __repr__(self):
        return f"FinRel({sorted(self.pairs())}, {self.dom_card}x{self.cod_card})"


def _rel(a) -> FinRel:
    a = np.asarray(a, dtype=bool)
    a.setflags(write=False)
    return FinRel(a)


class ParBackend(Backend):
    name = "par"

    def identity(self, n):
        return PartialFn(tuple(range(n)), n)

    def compose(self, f, g):
        if f.cod_card != g.dom_card:
            raise DimensionMismatch(f"cannot compose {self.dims(f)} with {self.dims(g)}")
        return PartialFn(tuple(None if a is None else g.table[a] for a in f.table), g.cod_card)

    def tensor(self, f, g):
        m2 = g.cod_card
        table = tuple(
            None if a is None or b is None else a * m2 + b
            for a in f.table for b in g.table
        )
        return PartialFn(table, f.cod_card * m2)

    def copy(self, n):
        return PartialFn(tuple(x * n + x for x in range(n)), n * n)

    def discard(self, n):
        return PartialFn((0,) * n, 1)

    def compare(self, n):
        return PartialFn(tuple(x1 if x1 == x2 else None for x1 in range(n) for x2 in range(n)), n)

    def cap(self, n):
        return PartialFn(tuple(0 if x1 == x2 else None for x1 in range(n) for x2 in range(n)), 1)

    def swap(self, m, n):
        return PartialFn(tuple(y * m + x for x in range(m) for y in range(n)), m * n)

    def dims(self, f):
        return f.dom_card, f.cod_card

    def residual(self, f, g):
        self.check_dims(f, g)
        return float(sum(a != b for a, b in zip(f.table, g.table)))

    def from_payload(self, data, n, m, tol=DEFAULT_TOL):
        if len(data) != n:
            raise ValueError(f"expected {n} entries, got {len(data)}")
        return PartialFn.of(data, m)

    def to_payload(self, f):
        return list(f.table)

    def format(self, f):
        return "[" + ", ".join("⊥" if v is None else str(v) for v in f.table) + "]"

    def scalar(self, s):
        return s.table[0] is not None


class RelBackend(Backend):
    name = "rel"
    supports_unit = True

    def identity(self, n):
        return _rel(np.eye(n, dtype=bool))

    def compose(self, f, g):
        if f.cod_card != g.dom_card:
            raise DimensionMismatch(f"cannot compose {self.dims(f)} with {self.dims(g)}")
        return _rel((f.matrix.astype(np.int64) @ g.matrix.astype(np.int64)) > 0)

    def tensor(self, f, g):
        a, b = f.matrix, g.matrix
        out = np.einsum("ij,kl->ikjl", a, b).reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
        return _rel(out)

    def copy(self, n):
        a = np.zeros((n, n * n), dtype=bool)
        a[np.arange(n), np.arange(n) * (n + 1)] = True
        return _rel(a)

    def discard(self, n):
        return _rel(np.ones((n, 1), dtype=bool))

    def compare(self, n):
        return _rel(self.copy(n).matrix.T)

    def cap(self, n):
        return _rel(self.copy(n).matrix.any(axis=0)[:, None])

    def unit(self, n):
        return _rel(np.ones((1, n), dtype=bool))

    def swap(self, m, n):
        a = np.zeros((m * n, m * n), dtype=bool)
        x, y = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
        a[(x * n + y).ravel(), (y * m + x).ravel()] = True
        return _rel(a)

    def dims(self, f):
        return f.matrix.shape

    def residual(self, f, g):
        self.check_dims(f, g)
        return float(np.count_nonzero(f.matrix != g.matrix))

    def from_payload(self, data, n, m, tol=DEFAULT_TOL):
        return FinRel.of(data, n, m)

    def to_payload(self, f):
        return f.matrix.tolist()

    def format(self, f):
        rows = ["".join("1" if v else "0" for v in row) for row in f.matrix]
        return "\n".join(rows) if rows else "(empty domain)"

    def scalar(self, s):
        return bool(s.matrix[0, 0])

    def included(self, f, g) -> bool:
        """``f ⊆ g`` as sets of pairs."""
        self.check_dims(f, g)
        return bool(np.all(~f.matrix | g.matrix))


PAR = ParBackend()
REL = RelBackend()


def compose_par(f: PartialFn, g: PartialFn) -> PartialFn:
    return PAR.compose(f, g)


def compose_rel(f: FinRel, g: FinRel) -> FinRel:
    return REL.compose(f, g)


def structural_discrete(kind: str, n: int, backend: str = "rel", m: int | None = None):
    b = PAR if backend == "par" else REL
    if kind == "unit" and not b.supports_unit:
        raise UnsupportedStructural("unit", b.name)
    return b.structural(kind, n, m)


def evaluate_par(term: Term, sig: Signature) -> PartialFn:
    return PAR.evaluate(term, sig)


def evaluate_rel(term: Term, sig: Signature) -> FinRel:
    return REL.evaluate(term, sig)


def predicates_discrete(f) -> dict[str, bool]:
    """Deterministic / total / quasi-total, each computed from its defining equation.

    In Par every map is deterministic and quasi-total, and in Rel every map
    is quasi-total; the equations are evaluated anyway so the shortcuts are
    checked rather than assumed.
    """
    b = PAR if isinstance(f, PartialFn) else REL
    return {
        "deterministic": b.is_deterministic(f),
        "total": b.is_total(f),
        "quasi_total": b.is_quasi_total(f),
    }
