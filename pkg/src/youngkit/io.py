"""JSON and CSV file handling with strict parsing and atomic writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import InvalidInputError
from .graph import GraphMeasure
from .measure import DiscreteMeasure
from .testfunctions import Battery
from .varifold import DiscreteVarifold, PolylineVarifold
from .young import YoungFunction


class ParseError(InvalidInputError):
    """A file could not be read or does not hold the expected record."""


def _reject_constant(name: str):
    raise ValueError(f"non-finite constant {name} is not allowed")


def loads(text: str):
    """Parse JSON, refusing ``NaN`` and ``Infinity``."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def read_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def write_text(path, text: str) -> None:
    """Write via a temporary file in the same directory and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    write_text(path, dumps(obj))


def _load(path, cls):
    data = read_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object")
    try:
        return cls.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_measure(path) -> DiscreteMeasure:
    return _load(path, DiscreteMeasure)


def load_graph(path) -> GraphMeasure:
    return _load(path, GraphMeasure)


def load_young(path) -> YoungFunction:
    return _load(path, YoungFunction)


def load_varifold(path) -> DiscreteVarifold:
    return _load(path, DiscreteVarifold)


def load_polyline(path) -> PolylineVarifold:
    return _load(path, PolylineVarifold)


def load_battery(path) -> Battery:
    """A list of test-function manifests, or an object with a ``members`` list."""
    data = read_json(path)
    if isinstance(data, dict):
        data = data.get("members")
    if not isinstance(data, list):
        raise ParseError(f"{path}: expected a list of test-function records")
    try:
        return Battery.from_manifest(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
