"""Schema validation for instance documents and CLI reports.

Validates extended-instance JSON and every report the CLI emits against
the schemas in schemas/.
"""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any

import jsonschema

from graph import ExtendedRootedGraph, GraphError, build_graph


class ValidationError(Exception):
    """Raised when validation fails."""

    pass


def _schema_dir() -> Path:
    """Return path to schemas directory."""
    return Path(__file__).resolve().parents[2] / "schemas"


@lru_cache(maxsize=None)
def _load_schema(name: str) -> dict:
    with open(_schema_dir() / name, encoding="utf-8") as f:
        return json.load(f)


def _validate(data: Any, schema_name: str) -> None:
    try:
        jsonschema.validate(data, _load_schema(schema_name))
    except jsonschema.ValidationError as e:
        field = ".".join(str(p) for p in e.absolute_path) or "document"
        raise ValidationError(f"Validation failed for {field}: {e.message}") from e


def validate_instance_doc(data: dict[str, Any]) -> None:
    """Validate an extended-instance document.

    Raises:
        ValidationError: If the document does not match the schema
    """
    _validate(data, "extended_instance.json")


def validate_report(data: dict[str, Any]) -> None:
    """Validate a CLI report before it is emitted.

    Raises:
        ValidationError: If the report does not match the schema
    """
    _validate(data, "report.json")


def instance_from_doc(data: dict[str, Any]) -> ExtendedRootedGraph:
    """Build an extended rooted graph from a validated document.

    Raises:
        ValidationError: If the document is malformed, or its graph is
    """
    validate_instance_doc(data)
    try:
        solid = build_graph(data["vertices"], [tuple(e) for e in data["solid_edges"]])
        terminals = data.get("terminals")
        return ExtendedRootedGraph(
            solid=solid,
            fictive=tuple(tuple(e) for e in data.get("fictive_edges", [])),
            roots=tuple(data.get("roots", [])),
            terminals=tuple(terminals) if terminals else None,
        )
    except GraphError as e:
        raise ValidationError(f"Validation failed for graph: {e}") from e


def instance_to_doc(instance: ExtendedRootedGraph) -> dict[str, Any]:
    """Serialize an extended rooted graph; inverse of instance_from_doc()."""
    doc: dict[str, Any] = {
        "vertices": list(instance.vertices),
        "solid_edges": [list(e) for e in instance.solid.edges],
        "fictive_edges": [list(e) for e in instance.fictive],
        "roots": list(instance.roots),
    }
    if instance.terminals is not None:
        doc["terminals"] = list(instance.terminals)
    return doc
