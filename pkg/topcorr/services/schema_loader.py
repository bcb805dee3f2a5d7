"""Module for loading and caching the JSON schemas shipped with the package."""
from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, cast

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

_SCHEMA_DIR: Path = Path(__file__).resolve().parent.parent / "core" / "schemas"

SCHEMA_NAMES = ("graph", "certificate", "cover")


@lru_cache(maxsize=None)
def get_schema(name: str) -> dict[str, Any]:
    """
    Load and return one schema.

    :param name: ``graph``, ``certificate`` or ``cover``.
    :type name: str
    :raises KeyError: If no schema has that name.
    :return: The schema document.
    :rtype: dict[str, Any]
    """
    if name not in SCHEMA_NAMES:
        raise KeyError(name)
    path = _SCHEMA_DIR / f"{name}.schema.json"
    with path.open(encoding="utf-8") as f:
        return cast("dict[str, Any]", json.load(f))


@lru_cache(maxsize=1)
def _registry() -> Registry:
    resources = [
        (schema["$id"], Resource.from_contents(schema))
        for schema in (get_schema(name) for name in SCHEMA_NAMES)
    ]
    return Registry().with_resources(resources)


@lru_cache(maxsize=None)
def get_validator(name: str) -> Draft202012Validator:
    """
    Validator for one schema, resolving references between the schemas.

    :param name: Schema name.
    :type name: str
    :return: The validator.
    :rtype: Draft202012Validator
    """
    return Draft202012Validator(get_schema(name), registry=_registry())
