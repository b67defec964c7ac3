"""Settings loading: packaged JSON defaults from ``bubforge.data`` merged with overrides."""

import dataclasses
import hashlib
import importlib.resources as pkg_resources
import json
import types
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Type, TypeVar, Union, get_args, get_origin, get_type_hints

from bubforge.engine.errors import FormatError, ValidationError

T = TypeVar("T")

DATA_PACKAGE = "bubforge.data"


def load_resource(name: str) -> Dict[str, Any]:
    """
    Loads a JSON resource shipped in the bubforge-data package.

    Args:
        name (str): File name inside ``bubforge.data`` (e.g. ``"gan.json"``).

    Returns:
        dict: Parsed JSON object.
    """
    with pkg_resources.files(DATA_PACKAGE).joinpath(name).open("r", encoding="utf-8") as f:
        return json.load(f)


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    """Reads a JSON object from disk, raising FormatError on malformed content."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from e
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object at top level")
    return data


def _coerce(value: Any, annotation: Any) -> Any:
    # JSON has no tuples; dataclass fields typed as tuples get their lists converted.
    origin = get_origin(annotation)
    if origin in (Union, types.UnionType):
        if value is None:
            return None
        inner = [a for a in get_args(annotation) if a is not type(None)]
        return _coerce(value, inner[0]) if len(inner) == 1 else value
    if origin is tuple and isinstance(value, list):
        args = get_args(annotation)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_coerce(v, args[0]) for v in value)
        return tuple(_coerce(v, a) for v, a in zip(value, args))
    if annotation is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def build_settings(cls: Type[T], values: Mapping[str, Any]) -> T:
    """
    Builds a settings dataclass from a mapping, rejecting unknown keys.

    Args:
        cls: Dataclass type to instantiate.
        values: Field values keyed by field name.

    Returns:
        An instance of ``cls``.

    Raises:
        ValidationError: On unknown keys or when the dataclass rejects a value.
    """
    names = {f.name for f in dataclasses.fields(cls)}  # type: ignore[arg-type]
    unknown = sorted(set(values) - names)
    if unknown:
        raise ValidationError(f"unknown {cls.__name__} setting(s): {', '.join(unknown)}")
    hints = get_type_hints(cls)
    kwargs = {k: _coerce(v, hints.get(k, Any)) for k, v in values.items()}
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ValidationError(f"invalid {cls.__name__} settings: {e}") from e


def load_settings(
    cls: Type[T], resource: str, overrides: Optional[Mapping[str, Any]] = None
) -> T:
    """Packaged defaults from ``resource`` with ``overrides`` applied on top."""
    values = load_resource(resource)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return build_settings(cls, values)


def settings_to_dict(settings: Any) -> Dict[str, Any]:
    """JSON-ready dict of a settings dataclass (tuples become lists)."""
    return json.loads(json.dumps(dataclasses.asdict(settings)))


def config_hash(settings: Any) -> str:
    """Stable short hash of a settings dataclass, recorded in container headers."""
    payload = json.dumps(settings_to_dict(settings), sort_keys=True).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]
