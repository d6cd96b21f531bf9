"""Command-line front end.

Subcommands mirror the library passes: validate (properness gating or
well-indexedness linting), eval (compose and certify), accessible (slice
analysis), explain (improper-composition witnesses) and export-dot.
Reports are JSON by default; --human renders them as text.  Exit codes:
0 pass, 1 validation failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import relations as rel
from .circuits import Slice, accessible_space, check_circuit, circuit_to_dot, evaluate
from .errors import ParseError, RoutedError, SchemaError
from .io import CircuitDocument, parse
from .iodag import (
    compose_corelations,
    explain_improper,
    iodag_to_dot,
    lint,
    node_corelation,
    preprocessing,
    product_corelations,
    Corelation,
    _family,
    _node_layers,
    normalize,
)
from .routed_cpms import is_practically_trace_preserving
from .routed_maps import is_practical_isometry, is_practical_unitary


def _load(path: str) -> CircuitDocument:
    return parse(path)


def _label_json(label):
    return rel.label_to_json(label)


# -- subcommand handlers ------------------------------------------------------


def _cmd_validate(doc: CircuitDocument, args) -> tuple[int, dict]:
    mode = args.mode
    if doc.kind == "circuit":
        if mode is None:
            mode = "channel" if doc.payload.mode == "cpm" else "iso"
        mode_map = {"iso": "isometry", "uni": "unitary", "channel": "channel"}
        wanted = mode_map[mode]
        if (wanted == "channel") != (doc.payload.mode == "cpm"):
            raise SchemaError(
                f"mode {mode!r} does not apply to a {doc.payload.mode!r} circuit"
            )
        report = check_circuit(doc.payload, wanted)
        interfaces = [
            {
                "position": check.position,
                "downstream": list(check.downstream),
                "passed": check.passed,
                "escaped_inputs": [_label_json(l) for l in check.escaped_inputs],
                "escaped_outputs": [_label_json(l) for l in check.escaped_outputs],
            }
            for check in report.interfaces
        ]
        payload = {
            "command": "validate",
            "file": os.path.basename(args.file),
            "kind": "circuit",
            "mode": mode,
            "passed": report.passed,
            "interfaces": interfaces,
        }
        return (0 if report.passed else 1), payload
    if mode is None:
        mode = "iso"
    if mode == "channel":
        raise SchemaError("mode 'channel' does not apply to an indexed graph")
    report = lint(doc.payload, mode)
    payload = {
        "command": "validate",
        "file": os.path.basename(args.file),
        "kind": "iodag",
        "mode": mode,
        "passed": report.passed,
        "violations": [
            {
                "rule": violation.rule,
                "class": list(violation.class_names),
                "nodes": list(violation.nodes),
                "message": violation.render(),
            }
            for violation in report.violations
        ],
    }
    return (0 if report.passed else 1), payload


def _matrix_summary(matrix: np.ndarray) -> dict:
    summary = {
        "shape": list(matrix.shape),
        "frobenius_norm": round(float(np.linalg.norm(matrix)), 9),
    }
    if matrix.size <= 256:
        summary["matrix"] = [
            [[round(v.real, 9), round(v.imag, 9)] for v in row] for row in matrix
        ]
    return summary


def _cmd_eval(doc: CircuitDocument, args) -> tuple[int, dict]:
    if doc.kind == "iodag":
        from .iodag import interpret

        if doc.interpretation is None:
            raise SchemaError("document has no interpretation to evaluate")
        meaning = interpret(doc.payload, doc.interpretation, mode=args.iodag_mode)
        payload = {
            "command": "eval",
            "file": os.path.basename(args.file),
            "kind": "iodag",
            "result": _matrix_summary(meaning.matrix),
            "practical_isometry": is_practical_isometry(meaning),
            "practical_unitary": is_practical_unitary(meaning),
        }
        return 0, payload
    result = evaluate(doc.payload)
    if doc.payload.mode == "pure":
        payload = {
            "command": "eval",
            "file": os.path.basename(args.file),
            "kind": "circuit",
            "mode": "pure",
            "result": _matrix_summary(result.matrix),
            "practical_isometry": is_practical_isometry(result),
            "practical_unitary": is_practical_unitary(result),
        }
    else:
        payload = {
            "command": "eval",
            "file": os.path.basename(args.file),
            "kind": "circuit",
            "mode": "cpm",
            "kraus_count": len(result.kraus),
            "kraus_shape": list(result.kraus[0].shape),
            "choi_trace": round(float(result.choi().trace().real), 9),
            "practically_trace_preserving": is_practically_trace_preserving(result),
        }
    return 0, payload


def _cmd_accessible(doc: CircuitDocument, args) -> tuple[int, dict]:
    if doc.kind != "circuit":
        raise SchemaError("accessible applies to circuit documents")
    wires = tuple(w.strip() for w in args.slice.split(",") if w.strip())
    cut = Slice(wires)
    recipe = accessible_space(doc.payload, cut, algorithm="recipe")
    oracle = accessible_space(doc.payload, cut, algorithm="insertion")
    payload = {
        "command": "accessible",
        "file": os.path.basename(args.file),
        "slice": list(wires),
        "accessible": [[_label_json(l) for l in t] for t in recipe.tuples],
        "sector_dims": list(recipe.sector_dims),
        "total_dim": recipe.total_dim,
        "algorithms_agree": recipe.tuples == oracle.tuples,
    }
    return 0, payload


def _cmd_explain(doc: CircuitDocument, args) -> tuple[int, dict]:
    if doc.kind == "circuit":
        mode = "channel" if doc.payload.mode == "cpm" else "unitary"
        report = check_circuit(doc.payload, mode)
        failures = [
            {
                "position": check.position,
                "downstream": list(check.downstream),
                "escaped_inputs": [_label_json(l) for l in check.escaped_inputs],
                "escaped_outputs": [_label_json(l) for l in check.escaped_outputs],
            }
            for check in report.interfaces
            if not check.passed
        ]
        payload = {
            "command": "explain",
            "file": os.path.basename(args.file),
            "kind": "circuit",
            "mode": mode,
            "witnesses": failures,
        }
        return (0 if not failures else 1), payload
    g = normalize(doc.payload)
    lengths = dict(doc.interpretation.lengths) if doc.interpretation else None
    acc = preprocessing(g, lengths)
    frontier = list(g.inputs)
    witnesses = []
    for layer in _node_layers(g):
        consumed = [w for n in layer for w in g.nodes[n].inputs]
        passthrough = [w for w in frontier if w not in consumed]
        parts = [node_corelation(g, n, lengths) for n in layer]
        for wire in passthrough:
            parts.append(Corelation.identity(_family(g, g.indices_on(wire), lengths)))
        layer_corelation = parts[0]
        for nxt in parts[1:]:
            layer_corelation = product_corelations(layer_corelation, nxt)
        report = explain_improper(acc, layer_corelation)
        for witness in report.created_witnesses + report.deleted_witnesses:
            witnesses.append(
                {
                    "layer": list(layer),
                    "kind": witness.kind,
                    "class": sorted(f"{side}:{name}" for side, name in witness.block),
                    "pair": list(witness.pair),
                }
            )
        acc = compose_corelations(layer_corelation, acc)
        frontier = [w for n in layer for w in g.nodes[n].outputs] + passthrough
    payload = {
        "command": "explain",
        "file": os.path.basename(args.file),
        "kind": "iodag",
        "witnesses": witnesses,
    }
    return (0 if not witnesses else 1), payload


def _cmd_export_dot(doc: CircuitDocument, args) -> tuple[int, dict]:
    text = circuit_to_dot(doc.payload) if doc.kind == "circuit" else iodag_to_dot(doc.payload)
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(text)
    return 0, {
        "command": "export-dot",
        "file": os.path.basename(args.file),
        "output": args.output,
        "bytes": len(text),
    }


# -- rendering ------------------------------------------------------------------


def _render_human(payload: dict) -> str:
    lines = [f"{payload['command']}: {payload.get('file', '')}"]
    if payload["command"] == "validate":
        lines.append(f"mode: {payload['mode']}")
        lines.append("PASS" if payload["passed"] else "FAIL")
        for violation in payload.get("violations", []):
            lines.append(f"  - {violation['message']}")
        for interface in payload.get("interfaces", []):
            status = "ok" if interface["passed"] else "IMPROPER"
            lines.append(
                f"  interface before layer {interface['position']} "
                f"({','.join(interface['downstream'])}): {status}"
            )
            if interface["escaped_inputs"]:
                lines.append(f"    escaping sectors: {interface['escaped_inputs']}")
    elif payload["command"] == "accessible":
        lines.append(f"slice: {', '.join(payload['slice'])}")
        for entry in payload["accessible"]:
            lines.append("  (" + ", ".join(str(x) for x in entry) + ")")
        lines.append(f"total dimension: {payload['total_dim']}")
    elif payload["command"] == "eval":
        for key, value in sorted(payload.items()):
            if key in ("command", "file", "result"):
                continue
            lines.append(f"{key}: {value}")
        if "result" in payload:
            lines.append(f"result shape: {payload['result']['shape']}")
    elif payload["command"] == "explain":
        if not payload["witnesses"]:
            lines.append("all compositions proper")
        for witness in payload["witnesses"]:
            lines.append(f"  - {json.dumps(witness, sort_keys=True)}")
    else:
        lines.append(json.dumps(payload, sort_keys=True))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="routed-circuits",
        description="Validate, evaluate and analyse routed circuit documents.",
    )
    parser.add_argument("--human", action="store_true", help="render reports as text")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="run properness gates or linting")
    p_validate.add_argument("file")
    p_validate.add_argument("--mode", choices=["iso", "uni", "channel"], default=None)

    p_eval = sub.add_parser("eval", help="compose the document into one map")
    p_eval.add_argument("file")
    p_eval.add_argument("--iodag-mode", choices=["iso", "uni"], default="uni")

    p_accessible = sub.add_parser("accessible", help="accessible sectors of a slice")
    p_accessible.add_argument("file")
    p_accessible.add_argument("--slice", required=True, help="comma-separated wire ids")

    p_explain = sub.add_parser("explain", help="improper-composition witnesses")
    p_explain.add_argument("file")

    p_export = sub.add_parser("export-dot", help="write a Graphviz rendering")
    p_export.add_argument("file")
    p_export.add_argument("-o", "--output", required=True)

    return parser


_HANDLERS = {
    "validate": _cmd_validate,
    "eval": _cmd_eval,
    "accessible": _cmd_accessible,
    "explain": _cmd_explain,
    "export-dot": _cmd_export_dot,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        doc = _load(args.file)
        code, payload = _HANDLERS[args.command](doc, args)
    except (ParseError, SchemaError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}, sort_keys=True))
        return 2
    except RoutedError as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}, sort_keys=True))
        return 1
    if args.human:
        sys.stdout.write(_render_human(payload))
    else:
        print(json.dumps(payload, sort_keys=True, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
