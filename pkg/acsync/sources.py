import copy
import os
from pathlib import Path
from typing import IO, Any, Sequence, Union

from acsync.merge import deep_merge
from acsync.tags import ConfigLoader

Source = Union[str, Path, IO[str], dict]

INCLUDE_KEY = "include!"


class IncludeError(Exception):
    """Problems during include! processing."""


def _load_stream(stream: IO[str]) -> Any:
    loader = ConfigLoader(stream)
    try:
        return loader.get_single_data()
    finally:
        loader.dispose()


def load_raw(path: Union[str, Path]) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            raw = _load_stream(f)
    except FileNotFoundError as e:
        raise IncludeError(f"Config file not found: '{path}'") from e
    except Exception as e:
        raise IncludeError(f"Error loading config file '{path}': {e}") from e
    return _as_mapping(raw, str(path))


def _as_mapping(raw: Any, where: str) -> dict[str, Any]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise IncludeError(f"Config '{where}' must hold a mapping at top level")
    return raw


def process_includes(raw: dict[str, Any], base_path: str | None = None) -> dict[str, Any]:
    """Merge the files listed under ``include!`` below ``raw``; nested includes recurse."""
    entries = raw.pop(INCLUDE_KEY, [])
    if isinstance(entries, (str, Path)):
        entries = [entries]
    merged: dict[str, Any] = {}
    for entry in entries:
        if not isinstance(entry, (str, Path)):
            raise IncludeError(f"Invalid include entry: {entry!r}")
        path = str(entry)
        if base_path is not None and not os.path.isabs(path):
            path = os.path.join(os.path.dirname(base_path), path)
        deep_merge(merged, process_includes(load_raw(path), path))
    return deep_merge(merged, raw)


def _process_single_source(src: Source) -> dict[str, Any]:
    if isinstance(src, dict):
        return process_includes(copy.deepcopy(src))
    if isinstance(src, (str, Path)):
        return process_includes(load_raw(src), str(src))
    raw = _as_mapping(_load_stream(src), getattr(src, "name", "<stream>"))
    base = getattr(src, "name", None)
    return process_includes(raw, base if isinstance(base, str) else None)


def get_sources(source: Union[Source, Sequence[Source]]) -> list[Source]:
    if not isinstance(source, Sequence) or isinstance(source, (str, Path)):
        return [source]
    return list(source)


def merge_all_sources(sources: list[Source]) -> dict[str, Any]:
    config: dict[str, Any] = {}
    for src in sources:
        processed = _process_single_source(src)
        if processed:
            config = deep_merge(config, processed)
    return config
