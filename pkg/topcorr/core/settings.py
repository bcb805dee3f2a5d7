"""Run-time settings read once from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

from topcorr.core.constants import (
    DEFAULT_SAMPLES_PER_SEGMENT,
    DEFAULT_SEED,
    ENV_SAMPLES,
    ENV_SEED,
)
from topcorr.core.errors import SchemaError


@dataclass(frozen=True)
class Settings:
    """Sampling resolution and default seed."""

    samples_per_segment: int = DEFAULT_SAMPLES_PER_SEGMENT
    seed: int = DEFAULT_SEED


def _int_from_env(name: str, default: int, minimum: int) -> int:
    """
    Read a positive integer from the environment.

    :param name: The environment variable.
    :type name: str
    :param default: Value used when the variable is unset or blank.
    :type default: int
    :param minimum: Smallest accepted value.
    :type minimum: int
    :raises SchemaError: If the value is not an integer >= minimum.
    :return: The parsed value.
    :rtype: int
    """
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        msg = f"{name} must be an integer, got {raw!r}"
        raise SchemaError(msg, path=f"/env/{name}") from exc
    if value < minimum:
        msg = f"{name} must be >= {minimum}, got {value}"
        raise SchemaError(msg, path=f"/env/{name}")
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Build (and cache) the settings from the environment.

    :return: The settings.
    :rtype: Settings
    """
    return Settings(
        samples_per_segment=_int_from_env(
            ENV_SAMPLES,
            DEFAULT_SAMPLES_PER_SEGMENT,
            2,
        ),
        seed=_int_from_env(ENV_SEED, DEFAULT_SEED, 0),
    )
