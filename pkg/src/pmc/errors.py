"""Exception hierarchy.

Input errors (bad text, bad types, bad payloads) and capability errors
(a backend cannot interpret a construct) are kept apart because the CLI
maps them to different exit codes.
"""

from __future__ import annotations


class PMCError(Exception):
    """Base class for every error raised by this package."""


class InputError(PMCError):
    pass


class CapabilityError(PMCError):
    pass


class SourceError(InputError):
    """An input error that can point at a span of source text."""

    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.span = span

    def __str__(self):
        msg = super().__str__()
        if self.span is not None:
            return f"{msg} at bytes {self.span.start}..{self.span.end}"
        return msg


class DiagramSyntaxError(SourceError):
    pass


class UnknownGenerator(SourceError):
    def __init__(self, name: str, span=None):
        super().__init__(f"unknown generator {name!r}", span)
        self.name = name


class UnknownObject(InputError):
    def __init__(self, name: str):
        super().__init__(f"unknown base object {name!r}")
        self.name = name


class TypeMismatch(InputError):
    def __init__(self, path, left_cod, right_dom):
        where = "/".join(path) or "<root>"
        super().__init__(
            f"type mismatch at {where}: left codomain {left_cod} "
            f"does not match right domain {right_dom}"
        )
        self.path = tuple(path)
        self.left_cod = left_cod
        self.right_dom = right_dom


class SignatureError(InputError):
    pass


class DimensionMismatch(InputError, ValueError):
    pass


class TooLarge(InputError):
    pass


class NotQuasiTotal(InputError):
    pass


class NotComparable(InputError):
    pass


class MissingPayload(CapabilityError):
    def __init__(self, generator: str, backend: str):
        super().__init__(f"generator {generator!r} has no {backend} payload")
        self.generator = generator
        self.backend = backend


class UnsupportedStructural(CapabilityError):
    def __init__(self, kind: str, backend: str):
        super().__init__(f"structural morphism {kind!r} is not available in {backend}")
        self.kind = kind
        self.backend = backend
