"""Dotted ``acsync.section.key=value`` overrides for experiment configs."""

from functools import reduce
from io import StringIO
from typing import Any, Dict, Optional

import yaml

from acsync.merge import deep_merge
from acsync.tags import ConfigLoader

PREFIX = "acsync."


class OverrideError(Exception):
    """Raised when there's an error processing an override."""


def is_override(arg: str) -> bool:
    return arg.startswith(PREFIX) and "=" in arg


def _parse_value(value: str) -> Any:
    # same loader as config files, so !extend / !patch / !snr_range work here too
    try:
        loader = ConfigLoader(StringIO(value))
        try:
            return loader.get_single_data()
        finally:
            loader.dispose()
    except Exception:
        try:
            return yaml.safe_load(value)
        except yaml.YAMLError:
            return value


def parse_overrides(overrides: list[str]) -> Dict[str, Any]:
    result: Dict[str, Any] = {}

    for override in overrides:
        if "=" not in override:
            raise OverrideError(
                f"Invalid override format: {override}. Expected key=value"
            )

        key, value = override.split("=", 1)
        if not key.startswith(PREFIX):
            continue

        parts = key[len(PREFIX) :].split(".")
        if not all(parts):
            raise OverrideError(f"Invalid override key: {key}")

        target = reduce(lambda d, k: d.setdefault(k, {}), parts[:-1], result)
        target[parts[-1]] = _parse_value(value)

    return result


def process_overrides(
    config: Dict[str, Any], overrides: Optional[list[str]] = None
) -> Dict[str, Any]:
    if not overrides:
        return config
    return deep_merge(config, parse_overrides(overrides))
