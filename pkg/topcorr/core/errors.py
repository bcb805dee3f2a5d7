"""Exception hierarchy; each class carries the exit code of its category."""

from __future__ import annotations

from typing import ClassVar


class TopcorrError(Exception):
    """Base class for all errors raised by topcorr."""

    exit_code: ClassVar[int] = 1


class SchemaError(TopcorrError):
    """A document does not match its schema or references unknown ids."""

    exit_code: ClassVar[int] = 2

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path or "/"
        super().__init__(f"{self.path}: {message}")


class PreconditionError(TopcorrError):
    """A mathematical precondition of an operation does not hold."""

    exit_code: ClassVar[int] = 3


class ComplexError(PreconditionError):
    """Malformed 1-complex (duplicate ids, dangling segment endpoints)."""


class PointError(PreconditionError):
    """A point is malformed or does not lie on the expected complex."""


class InvalidMapError(PreconditionError):
    """A piecewise-linear map violates its continuity or range rules."""


class DegeneratePieceError(PreconditionError):
    """A constant piece makes a level set have positive length."""

    def __init__(self, message: str, segment: int) -> None:
        self.segment = segment
        super().__init__(message)


class InvalidGraphError(PreconditionError):
    """A graph failed validation and cannot be used downstream."""


class GraphMismatchError(PreconditionError):
    """Operands live on different graphs or complexes."""


class DegreeMismatchError(PreconditionError):
    """Tensor operands have different degrees."""


class EmptyFiberError(PreconditionError):
    """The edge fiber between two vertices is empty."""


class ZeroWeightsError(PreconditionError):
    """Nest representation weights are all zero."""


class WeightBoundError(PreconditionError):
    """Nest representation weights exceed the contraction bound."""


class NotDiscreteError(PreconditionError):
    """An operation restricted to discrete graphs got a PL graph."""


class BumpError(PreconditionError):
    """A bump family does not belong to the character's vertex."""


class CoverError(PreconditionError):
    """A family of regions does not cover the complex or has bad sheets."""


class CertificateError(PreconditionError):
    """A local conjugacy certificate does not verify."""


class PermutationMismatchError(PreconditionError):
    """Permutation data of the two sides differ where they must agree."""


class AgreementError(PreconditionError):
    """Sheets cannot be reglued because the range maps disagree."""


class FlipSpecError(PreconditionError):
    """A flip specification does not describe a single transposition."""


class TriangularizationError(PreconditionError):
    """A representation cannot be diagonalized in the given basis."""


class BudgetExceededError(TopcorrError):
    """A search or refinement loop exceeded its configured budget."""

    exit_code: ClassVar[int] = 4
