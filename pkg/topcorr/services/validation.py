"""Module to validate documents against their schemas, with JSON pointers."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from topcorr.core.errors import SchemaError
from topcorr.services.schema_loader import get_validator

if TYPE_CHECKING:
    from collections.abc import Iterable

SchemaIssue = tuple[str, str]  # (json_pointer, message)


def json_pointer(parts: Iterable[Any]) -> str:
    """
    Render a path of keys and indices as a JSON pointer.

    :param parts: Keys and list indices from the document root.
    :type parts: Iterable[Any]
    :return: The pointer, ``/`` for the root.
    :rtype: str
    """
    escaped = [str(p).replace("~", "~0").replace("/", "~1") for p in parts]
    return "/" + "/".join(escaped) if escaped else "/"


def schema_issues(document: Any, schema: str) -> list[SchemaIssue]:
    """
    Every schema violation of a document, ordered by position.

    :param document: The parsed JSON document.
    :type document: Any
    :param schema: Schema name.
    :type schema: str
    :return: ``(pointer, message)`` pairs; empty when valid.
    :rtype: list[SchemaIssue]
    """
    errors = sorted(
        get_validator(schema).iter_errors(document),
        key=lambda e: [str(p) for p in e.absolute_path],
    )
    return [(json_pointer(e.absolute_path), e.message) for e in errors]


def require_schema(document: Any, schema: str) -> None:
    """
    Raise on the first schema violation.

    :param document: The parsed JSON document.
    :type document: Any
    :param schema: Schema name.
    :type schema: str
    :raises SchemaError: Carrying the pointer of the offending node.
    """
    issues = schema_issues(document, schema)
    if issues:
        path, message = issues[0]
        raise SchemaError(message, path=path)
