"""Finite sets and substochastic kernels.

A kernel ``f: X -> Y`` is a ``|X| x |Y|`` matrix with ``f[x, y] = f(y|x)``,
entries in ``[0, 1]`` and row masses at most one.  Composition is matrix
product and the tensor is the Kronecker product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import DEFAULT_TOL, Backend
from .diagram import Cap, Compare, Copy, Discard, Signature, Swap, Term, Unit
from .errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class SubKernel:
    matrix: np.ndarray

    @classmethod
    def of(cls, data, n: int | None = None, m: int | None = None, tol: float = DEFAULT_TOL) -> "SubKernel":
        """Validated constructor.  Out-of-range data is rejected, never repaired."""
        a = np.array(data, dtype=float)
        if a.size == 0 and n is not None and m is not None:
            a = a.reshape(n, m)
        if a.ndim != 2:
            raise ValueError(f"kernel must be a matrix, got shape {a.shape}")
        if n is not None and m is not None and a.shape != (n, m):
            raise ValueError(f"expected a {n}x{m} matrix, got {a.shape[0]}x{a.shape[1]}")
        if not np.all(np.isfinite(a)):
            raise ValueError("kernel entries must be finite")
        if a.size and (a.min() < 0 or a.max() > 1 + tol):
            raise ValueError("kernel entries must lie in [0, 1]")
        if a.size and a.sum(axis=1).max() > 1 + tol:
            raise ValueError("row masses must not exceed 1")
        return _raw(a)

    @property
    def dom_card(self) -> int:
        return self.matrix.shape[0]

    @property
    def cod_card(self) -> int:
        return self.matrix.shape[1]

    @property
    def masses(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def __repr__(self):
        return f"SubKernel({self.matrix.tolist()!r})"


def _raw(a) -> SubKernel:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return SubKernel(a)


class FinStochBackend(Backend):
    name = "finstoch"
    exact = False

    def identity(self, n):
        return _raw(np.eye(n))

    def compose(self, f, g):
        if f.cod_card != g.dom_card:
            raise DimensionMismatch(f"cannot compose {f.matrix.shape} with {g.matrix.shape}")
        return _raw(f.matrix @ g.matrix)

    def tensor(self, f, g):
        a, b = f.matrix, g.matrix
        # np.kron mishandles zero-sized operands' shapes on some versions
        out = np.einsum("ij,kl->ikjl", a, b).reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
        return _raw(out)

    def copy(self, n):
        a = np.zeros((n, n * n))
        a[np.arange(n), np.arange(n) * (n + 1)] = 1.0
        return _raw(a)

    def discard(self, n):
        return _raw(np.ones((n, 1)))

    def compare(self, n):
        return _raw(self.copy(n).matrix.T)

    def cap(self, n):
        return _raw(self.copy(n).matrix.sum(axis=0)[:, None])

    def swap(self, m, n):
        a = np.zeros((m * n, m * n))
        x, y = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
        a[(x * n + y).ravel(), (y * m + x).ravel()] = 1.0
        return _raw(a)

    def dims(self, f):
        return f.matrix.shape

    def residual(self, f, g):
        self.check_dims(f, g)
        if f.matrix.size == 0:
            return 0.0
        return float(np.max(np.abs(f.matrix - g.matrix)))

    def from_payload(self, data, n, m, tol=DEFAULT_TOL):
        return SubKernel.of(data, n, m, tol=tol)

    def to_payload(self, f):
        return f.matrix.tolist()

    def format(self, f):
        with np.printoptions(precision=6, suppress=True):
            return np.array2string(f.matrix)

    def scalar(self, s):
        return float(s.matrix[0, 0])

    def is_total(self, f, tol=DEFAULT_TOL):
        return bool(np.all(np.abs(f.masses - 1.0) <= tol))

    def is_quasi_total(self, f, tol=DEFAULT_TOL):
        m = f.masses
        return bool(np.all((np.abs(m) <= tol) | (np.abs(m - 1.0) <= tol)))


FINSTOCH = FinStochBackend()


def compose(f: SubKernel, g: SubKernel) -> SubKernel:
    return FINSTOCH.compose(f, g)


def tensor(f: SubKernel, g: SubKernel) -> SubKernel:
    return FINSTOCH.tensor(f, g)


_KINDS = {"copy": Copy, "discard": Discard, "compare": Compare, "cap": Cap, "unit": Unit}


def structural(kind: str, obj, sig: Signature | None = None, other=None) -> SubKernel:
    """Structural kernel on a base cardinality (``int``) or on a word.

    ``swap`` takes the second factor in ``other``.
    """
    if isinstance(obj, int):
        if kind == "swap":
            return FINSTOCH.swap(obj, obj if other is None else other)
        return FINSTOCH.structural(kind, obj)
    if kind == "swap":
        term = Swap(obj, obj if other is None else other)
    else:
        term = _KINDS[kind](obj)
    return FINSTOCH.evaluate(term, sig)


def evaluate(term: Term, sig: Signature) -> SubKernel:
    return FINSTOCH.evaluate(term, sig)


def equal(f: SubKernel, g: SubKernel, tol: float = DEFAULT_TOL) -> bool:
    return FINSTOCH.equal(f, g, tol)


def is_deterministic(f: SubKernel, tol: float = DEFAULT_TOL) -> bool:
    return FINSTOCH.is_deterministic(f, tol)


def is_total(f: SubKernel, tol: float = DEFAULT_TOL) -> bool:
    return FINSTOCH.is_total(f, tol)


def is_quasi_total(f: SubKernel, tol: float = DEFAULT_TOL) -> bool:
    return FINSTOCH.is_quasi_total(f, tol)


def kernel(rows) -> SubKernel:
    """Shorthand for a validated kernel from nested lists."""
    return SubKernel.of(rows)
