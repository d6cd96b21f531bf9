"""JSON document layer: parsing, validation and canonical serialization.

Documents carry either a routed circuit or an indexed graph (optionally
with an interpretation).  Structural problems raise SchemaError with a
JSON-pointer-style location; semantic problems surface the originating
error prefixed with the offending element's location.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any

from . import relations as rel
from .circuits import Box, RoutedCircuit
from .errors import ParseError, RoutedError, SchemaError
from .iodag import IODAG, Interpretation, IONode, Partition, expected_wire_labels
from .relations import IndexSet
from .routed_cpms import RoutedCPM
from .routed_maps import RoutedMap, matrix_from_json, matrix_to_json
from .spaces import PartitionedSpace, tensor_many

FORMAT_VERSION = "1"


def default_tolerance() -> float:
    """Route-following tolerance, overridable via ROUTED_TOLERANCE."""
    return float(os.environ.get("ROUTED_TOLERANCE", "1e-9"))


@dataclass(frozen=True)
class CircuitDocument:
    """A parsed and validated document."""

    format_version: str
    kind: str  # 'circuit' or 'iodag'
    payload: Any  # RoutedCircuit or IODAG
    interpretation: Interpretation | None = None
    metadata: dict = field(default_factory=dict)


def _expect(data, key: str, kind, location: str):
    if not isinstance(data, dict):
        raise SchemaError(f"expected an object, got {type(data).__name__}", location)
    if key not in data:
        raise SchemaError(f"missing required key {key!r}", location)
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(
            f"key {key!r} must be {kind.__name__}, got {type(value).__name__}",
            f"{location}/{key}",
        )
    return value


def _context(location: str):
    class _Context:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if (
                location
                and exc is not None
                and isinstance(exc, RoutedError)
                and not isinstance(exc, SchemaError)
            ):
                raise type(exc)(f"{location}: {exc}") from None
            return False

    return _Context()


# -- circuits ----------------------------------------------------------------


def _space_from_json(data, location: str) -> PartitionedSpace:
    sectors = _expect(data, "sectors", list, location)
    labels, dims = [], []
    for i, sector in enumerate(sectors):
        labels.append(rel.label_from_json(_expect(sector, "label", None, f"{location}/sectors/{i}")))
        dims.append(_expect(sector, "dim", int, f"{location}/sectors/{i}"))
    with _context(location):
        return PartitionedSpace(IndexSet(labels), dims)


def _relation_from_json(data, location: str):
    _expect(data, "domain", list, location)
    _expect(data, "codomain", list, location)
    _expect(data, "matrix", list, location)
    with _context(location):
        return rel.relation_from_json(data)


def _cp_relation_from_json(data, location: str):
    _expect(data, "base_domain", list, location)
    _expect(data, "base_codomain", list, location)
    _expect(data, "matrix", list, location)
    with _context(location):
        return rel.cp_relation_from_json(data)


def _circuit_from_json(data: dict, tolerance: float) -> RoutedCircuit:
    mode = _expect(data, "mode", str, "")
    if mode not in ("pure", "cpm"):
        raise SchemaError(f"mode must be 'pure' or 'cpm', got {mode!r}", "/mode")
    spaces: dict[str, PartitionedSpace] = {}
    for name, space_data in sorted(_expect(data, "spaces", dict, "").items()):
        spaces[name] = _space_from_json(space_data, f"/spaces/{name}")
    wires: dict[str, PartitionedSpace] = {}
    for i, wire_data in enumerate(_expect(data, "wires", list, "")):
        wire_id = _expect(wire_data, "id", str, f"/wires/{i}")
        space_name = _expect(wire_data, "space", str, f"/wires/{i}")
        if space_name not in spaces:
            raise SchemaError(f"unknown space {space_name!r}", f"/wires/{i}/space")
        wires[wire_id] = spaces[space_name]
    boxes: dict[str, Box] = {}
    for i, box_data in enumerate(_expect(data, "boxes", list, "")):
        location = f"/boxes/{i}"
        box_id = _expect(box_data, "id", str, location)
        inputs = _expect(box_data, "inputs", list, location)
        outputs = _expect(box_data, "outputs", list, location)
        for wire_id in list(inputs) + list(outputs):
            if wire_id not in wires:
                raise SchemaError(f"unknown wire {wire_id!r}", location)
        map_data = _expect(box_data, "map", dict, location)
        domain = tensor_many([wires[w] for w in inputs])
        codomain = tensor_many([wires[w] for w in outputs])
        if mode == "pure":
            route = _relation_from_json(
                _expect(map_data, "route", dict, f"{location}/map"), f"{location}/map/route"
            )
            matrix = matrix_from_json(_expect(map_data, "matrix", list, f"{location}/map"))
            with _context(f"{location}/map"):
                op: Box = Box(inputs, outputs, RoutedMap(route, matrix, domain, codomain, tolerance))
        else:
            route = _cp_relation_from_json(
                _expect(map_data, "route", dict, f"{location}/map"), f"{location}/map/route"
            )
            kraus = [
                matrix_from_json(k) for k in _expect(map_data, "kraus", list, f"{location}/map")
            ]
            with _context(f"{location}/map"):
                op = Box(inputs, outputs, RoutedCPM(route, tuple(kraus), domain, codomain, tolerance))
        boxes[box_id] = op
    inputs = _expect(data, "inputs", list, "")
    outputs = _expect(data, "outputs", list, "")
    with _context(""):
        return RoutedCircuit(wires, boxes, tuple(inputs), tuple(outputs), mode)


def _circuit_to_json(circuit: RoutedCircuit) -> dict:
    space_names: dict[PartitionedSpace, str] = {}
    spaces_json: dict[str, dict] = {}
    for wire_id in sorted(circuit.wires):
        space = circuit.wires[wire_id]
        if space not in space_names:
            name = f"space{len(space_names)}"
            space_names[space] = name
            spaces_json[name] = {
                "sectors": [
                    {"label": rel.label_to_json(label), "dim": dim}
                    for label, dim in zip(space.sector_labels, space.sector_dims)
                ]
            }
    boxes_json = []
    for box_id in sorted(circuit.boxes):
        box = circuit.boxes[box_id]
        if circuit.mode == "pure":
            map_json = {
                "route": rel.relation_to_json(box.op.route),
                "matrix": matrix_to_json(box.op.matrix),
            }
        else:
            map_json = {
                "route": rel.cp_relation_to_json(box.op.route),
                "kraus": [matrix_to_json(k) for k in box.op.kraus],
            }
        boxes_json.append(
            {
                "id": box_id,
                "inputs": list(box.inputs),
                "outputs": list(box.outputs),
                "map": map_json,
            }
        )
    return {
        "mode": circuit.mode,
        "spaces": spaces_json,
        "wires": [
            {"id": wire_id, "space": space_names[circuit.wires[wire_id]]}
            for wire_id in sorted(circuit.wires)
        ],
        "boxes": boxes_json,
        "inputs": list(circuit.input_wires),
        "outputs": list(circuit.output_wires),
    }


# -- indexed graphs ------------------------------------------------------------


def _iodag_from_json(data: dict) -> IODAG:
    inputs = _expect(data, "inputs", list, "")
    outputs = _expect(data, "outputs", list, "")
    edges = _expect(data, "edges", list, "")
    nodes: dict[str, IONode] = {}
    for i, node_data in enumerate(_expect(data, "nodes", list, "")):
        node_id = _expect(node_data, "id", str, f"/nodes/{i}")
        nodes[node_id] = IONode(
            _expect(node_data, "in", list, f"/nodes/{i}"),
            _expect(node_data, "out", list, f"/nodes/{i}"),
        )
    placement: dict[str, str] = {}
    class_tags: dict[str, str] = {}
    for i, index_data in enumerate(_expect(data, "indices", list, "")):
        name = _expect(index_data, "name", str, f"/indices/{i}")
        placement[name] = _expect(index_data, "wire", str, f"/indices/{i}")
        class_tags[name] = _expect(index_data, "class", str, f"/indices/{i}")
    blocks: dict[str, list[str]] = {}
    for name, tag in class_tags.items():
        blocks.setdefault(tag, []).append(name)
    equivalence = Partition.from_blocks(blocks.values())
    with _context(""):
        return IODAG(
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            inner_edges=tuple(edges),
            nodes=nodes,
            placement=placement,
            equivalence=equivalence,
            empty_nodes=frozenset(data.get("empty_nodes", [])),
        )


def _iodag_to_json(g: IODAG) -> dict:
    class_of = {}
    for block in g.equivalence.blocks():
        tag = sorted(block)[0]
        for name in block:
            class_of[name] = tag
    return {
        "inputs": list(g.inputs),
        "outputs": list(g.outputs),
        "edges": list(g.inner_edges),
        "nodes": [
            {"id": node_id, "in": list(node.inputs), "out": list(node.outputs)}
            for node_id, node in sorted(g.nodes.items())
        ],
        "indices": [
            {"name": name, "wire": g.placement[name], "class": class_of[name]}
            for name in sorted(g.placement)
        ],
        "empty_nodes": sorted(g.empty_nodes),
    }


def _interpretation_from_json(data: dict, g: IODAG, tolerance: float) -> Interpretation:
    lengths = {
        name: int(value)
        for name, value in _expect(data, "lengths", dict, "/interpretation").items()
    }
    spaces: dict[str, PartitionedSpace] = {}
    for wire, space_data in sorted(_expect(data, "spaces", dict, "/interpretation").items()):
        location = f"/interpretation/spaces/{wire}"
        space = _space_from_json({"sectors": space_data}, location)
        expected = expected_wire_labels(g, wire, lengths)
        if space.sector_labels.labels != expected:
            raise SchemaError(
                f"wire {wire!r} must carry sector labels {expected!r}", location
            )
        spaces[wire] = space
    morphs: dict[str, RoutedMap] = {}
    from .iodag import node_route

    pre_interp = Interpretation(lengths, spaces, {})
    for node_id, morph_data in sorted(_expect(data, "morphs", dict, "/interpretation").items()):
        location = f"/interpretation/morphs/{node_id}"
        if node_id not in g.nodes:
            raise SchemaError(f"unknown node {node_id!r}", location)
        matrix = matrix_from_json(_expect(morph_data, "matrix", list, location))
        node = g.nodes[node_id]
        domain = tensor_many([spaces[w] for w in node.inputs])
        codomain = tensor_many([spaces[w] for w in node.outputs])
        with _context(location):
            morphs[node_id] = RoutedMap(
                node_route(g, node_id, pre_interp), matrix, domain, codomain, tolerance
            )
    return Interpretation(lengths, spaces, morphs)


def _interpretation_to_json(interp: Interpretation) -> dict:
    return {
        "lengths": {name: int(v) for name, v in sorted(interp.lengths.items())},
        "spaces": {
            wire: [
                {"label": rel.label_to_json(label), "dim": dim}
                for label, dim in zip(space.sector_labels, space.sector_dims)
            ]
            for wire, space in sorted(interp.spaces.items())
        },
        "morphs": {
            node_id: {"matrix": matrix_to_json(morph.matrix)}
            for node_id, morph in sorted(interp.morphs.items())
        },
    }


# -- documents ------------------------------------------------------------------


def parse(text_or_path: str) -> CircuitDocument:
    """Parse a document from JSON text or a path to a JSON file."""
    text = text_or_path
    if not text_or_path.lstrip().startswith("{"):
        try:
            with open(text_or_path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ParseError(f"cannot read {text_or_path!r}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict) or not data:
        raise SchemaError("document must be a non-empty JSON object", "")
    version = _expect(data, "format_version", str, "")
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {version!r}", "/format_version")
    kind = _expect(data, "kind", str, "")
    metadata = data.get("metadata", {})
    tolerance = default_tolerance()
    if kind == "circuit":
        payload = _circuit_from_json(data, tolerance)
        return CircuitDocument(version, kind, payload, None, metadata)
    if kind == "iodag":
        payload = _iodag_from_json(data)
        interpretation = None
        if "interpretation" in data:
            interpretation = _interpretation_from_json(
                data["interpretation"], payload, tolerance
            )
        return CircuitDocument(version, kind, payload, interpretation, metadata)
    raise SchemaError(f"unknown document kind {kind!r}", "/kind")


def document_to_json(doc: CircuitDocument) -> dict:
    data: dict = {"format_version": doc.format_version, "kind": doc.kind}
    if doc.kind == "circuit":
        data.update(_circuit_to_json(doc.payload))
    else:
        data.update(_iodag_to_json(doc.payload))
        if doc.interpretation is not None:
            data["interpretation"] = _interpretation_to_json(doc.interpretation)
    if doc.metadata:
        data["metadata"] = doc.metadata
    return data


def serialize(doc: CircuitDocument) -> str:
    """Canonical JSON text (sorted keys, two-space indent)."""
    return json.dumps(document_to_json(doc), sort_keys=True, indent=2) + "\n"


def save(doc: CircuitDocument, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize(doc))


def routed_map_from_json(data: dict, spaces: dict[str, PartitionedSpace]) -> RoutedMap:
    """Load a standalone routed map; spaces are resolved by name."""
    route = _relation_from_json(_expect(data, "route", dict, ""), "/route")
    domain_name = _expect(data, "domain", str, "")
    codomain_name = _expect(data, "codomain", str, "")
    for name in (domain_name, codomain_name):
        if name not in spaces:
            raise SchemaError(f"unknown space {name!r}", "/domain")
    matrix = matrix_from_json(_expect(data, "matrix", list, ""))
    with _context("/matrix"):
        return RoutedMap(
            route, matrix, spaces[domain_name], spaces[codomain_name], default_tolerance()
        )


def routed_cpm_from_json(data: dict, spaces: dict[str, PartitionedSpace]) -> RoutedCPM:
    """Load a standalone routed CP map; spaces are resolved by name."""
    route = _cp_relation_from_json(_expect(data, "route", dict, ""), "/route")
    domain_name = _expect(data, "domain", str, "")
    codomain_name = _expect(data, "codomain", str, "")
    for name in (domain_name, codomain_name):
        if name not in spaces:
            raise SchemaError(f"unknown space {name!r}", "/domain")
    kraus = [matrix_from_json(k) for k in _expect(data, "kraus", list, "")]
    with _context("/kraus"):
        return RoutedCPM(
            route, tuple(kraus), spaces[domain_name], spaces[codomain_name], default_tolerance()
        )


def bundled_path(name: str) -> str:
    """Absolute path of a bundled example document (e.g. 'two_trajectories.json')."""
    return os.path.join(os.path.dirname(__file__), "data", name)


def load_bundled(name: str) -> CircuitDocument:
    return parse(bundled_path(name))
