"""Typed string-diagram terms over a signature of finite base objects.

Objects are tensor words of base names; the empty word is the monoidal
unit.  Cardinalities live in the :class:`Signature`, never in a term, so a
term can be re-evaluated under a resized signature.

Tensor words are indexed lexicographically with the leftmost factor most
significant, which is the Kronecker layout used by every backend.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping, Union

from .errors import SignatureError, TypeMismatch, UnknownGenerator, UnknownObject


@dataclass(frozen=True)
class ObjectType:
    word: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))

    def __matmul__(self, other: "ObjectType") -> "ObjectType":
        return ObjectType(self.word + other.word)

    def __len__(self):
        return len(self.word)

    def __str__(self):
        return "I" if not self.word else "⊗".join(self.word)


UNIT = ObjectType(())


def obj(*names: str) -> ObjectType:
    return ObjectType(names)


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Id:
    obj: ObjectType


@dataclass(frozen=True)
class Seq:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Par:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Swap:
    x: ObjectType
    y: ObjectType


@dataclass(frozen=True)
class Copy:
    obj: ObjectType


@dataclass(frozen=True)
class Discard:
    obj: ObjectType


@dataclass(frozen=True)
class Compare:
    obj: ObjectType


@dataclass(frozen=True)
class Cap:
    obj: ObjectType


@dataclass(frozen=True)
class Unit:
    obj: ObjectType


Term = Union[Gen, Id, Seq, Par, Swap, Copy, Discard, Compare, Cap, Unit]
STRUCTURAL = (Id, Swap, Copy, Discard, Compare, Cap, Unit)
RESERVED = frozenset({"id", "copy", "del", "cmp", "cap", "unit", "swap"})
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def seq(*terms: Term) -> Term:
    """Left-associated sequential composite of one or more terms."""
    out = terms[0]
    for t in terms[1:]:
        out = Seq(out, t)
    return out


def par(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = Par(out, t)
    return out


def generators_of(term: Term) -> set[str]:
    if isinstance(term, Gen):
        return {term.name}
    if isinstance(term, (Seq, Par)):
        return generators_of(term.left) | generators_of(term.right)
    return set()


# -- signatures -------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorDecl:
    name: str
    dom: ObjectType
    cod: ObjectType
    # backend name -> backend morphism (already validated)
    payloads: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "payloads", MappingProxyType(dict(self.payloads)))


@dataclass(frozen=True)
class Signature:
    objects: Mapping[str, int]
    generators: Mapping[str, GeneratorDecl] = field(default_factory=dict)

    def __post_init__(self):
        for name, card in self.objects.items():
            if not isinstance(card, int) or isinstance(card, bool) or card < 0:
                raise SignatureError(f"object {name!r} needs a non-negative integer cardinality")
        object.__setattr__(self, "objects", MappingProxyType(dict(self.objects)))
        object.__setattr__(self, "generators", MappingProxyType(dict(self.generators)))
        for name in list(self.objects) + list(self.generators):
            if not _IDENT.match(name) or name in RESERVED:
                raise SignatureError(f"{name!r} is not usable as an identifier")
        for g in self.generators.values():
            self.cards(g.dom)
            self.cards(g.cod)
            for backend_name, payload in g.payloads.items():
                from .backend import get_backend

                backend = get_backend(backend_name)
                want = (self.card(g.dom), self.card(g.cod))
                if backend.dims(payload) != want:
                    raise SignatureError(
                        f"{backend_name} payload of {g.name!r} has shape "
                        f"{backend.dims(payload)}, expected {want}"
                    )

    def cards(self, o: ObjectType) -> list[int]:
        try:
            return [self.objects[n] for n in o.word]
        except KeyError as exc:
            raise UnknownObject(exc.args[0]) from None

    def card(self, o: ObjectType) -> int:
        return math.prod(self.cards(o))

    def generator(self, name: str) -> GeneratorDecl:
        try:
            return self.generators[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def with_generator(self, name, dom, cod, **payloads) -> "Signature":
        gens = dict(self.generators)
        gens[name] = GeneratorDecl(name, dom, cod, payloads)
        return Signature(self.objects, gens)


def signature_from_dict(data: Mapping[str, Any], tol: float = 1e-9) -> Signature:
    """Build a signature from the JSON document layout.

    ``{"objects": {name: card}, "generators": {name: {"dom": [...],
    "cod": [...], "finstoch": ..., "par": ..., "rel": ...}}}``; every
    backend payload is optional.  Other top-level keys are ignored.
    """
    from .backend import get_backend

    if not isinstance(data, Mapping) or "objects" not in data:
        raise SignatureError("signature document needs an 'objects' mapping")
    objects = dict(data["objects"])
    probe = Signature(objects)
    gens = {}
    for name, spec in dict(data.get("generators", {})).items():
        try:
            dom = ObjectType(tuple(spec["dom"]))
            cod = ObjectType(tuple(spec["cod"]))
        except (KeyError, TypeError):
            raise SignatureError(f"generator {name!r} needs 'dom' and 'cod' lists") from None
        n, m = probe.card(dom), probe.card(cod)
        payloads = {}
        for backend_name in ("finstoch", "par", "rel"):
            if backend_name in spec:
                backend = get_backend(backend_name)
                try:
                    payloads[backend_name] = backend.from_payload(spec[backend_name], n, m, tol=tol)
                except (ValueError, TypeError) as exc:
                    raise SignatureError(f"bad {backend_name} payload for {name!r}: {exc}") from None
        gens[name] = GeneratorDecl(name, dom, cod, payloads)
    return Signature(objects, gens)


def signature_to_dict(sig: Signature) -> dict:
    from .backend import get_backend

    gens = {}
    for name, g in sig.generators.items():
        entry: dict[str, Any] = {"dom": list(g.dom.word), "cod": list(g.cod.word)}
        for backend_name, payload in g.payloads.items():
            entry[backend_name] = get_backend(backend_name).to_payload(payload)
        gens[name] = entry
    return {"objects": dict(sig.objects), "generators": gens}


def load_signature(path, tol: float = 1e-9) -> Signature:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SignatureError(f"{path}: not valid JSON ({exc})") from None
    return signature_from_dict(data, tol=tol)


# -- typing -----------------------------------------------------------------


def typecheck(term: Term, sig: Signature, _path: tuple[str, ...] = ()) -> tuple[ObjectType, ObjectType]:
    """Return ``(dom, cod)`` of ``term``.

    Raises :class:`UnknownGenerator`, :class:`UnknownObject` or
    :class:`TypeMismatch` (carrying the path of the offending ``Seq`` node).
    """
    if isinstance(term, Gen):
        g = sig.generator(term.name)
        return g.dom, g.cod
    if isinstance(term, Seq):
        d1, c1 = typecheck(term.left, sig, _path + ("left",))
        d2, c2 = typecheck(term.right, sig, _path + ("right",))
        if c1 != d2:
            raise TypeMismatch(_path, c1, d2)
        return d1, c2
    if isinstance(term, Par):
        d1, c1 = typecheck(term.left, sig, _path + ("left",))
        d2, c2 = typecheck(term.right, sig, _path + ("right",))
        return d1 @ d2, c1 @ c2
    if isinstance(term, Swap):
        sig.cards(term.x)
        sig.cards(term.y)
        return term.x @ term.y, term.y @ term.x
    if not isinstance(term, STRUCTURAL):
        raise TypeError(f"not a diagram term: {term!r}")
    x = term.obj
    sig.cards(x)
    if isinstance(term, Id):
        return x, x
    if isinstance(term, Copy):
        return x, x @ x
    if isinstance(term, Discard):
        return x, UNIT
    if isinstance(term, Compare):
        return x @ x, x
    if isinstance(term, Cap):
        return x @ x, UNIT
    return UNIT, x  # Unit
