"""Routed circuits: DAGs of routed maps or routed CP maps on typed wires.

Evaluation picks a topological foliation, tensors each layer (padding
pass-through wires with identity maps) and composes the layers; soundness
of the underlying frameworks makes the result independent of the chosen
foliation, which is also checked by tests.  Analysis passes work on the
routes alone: properness gating of every sequential interface, and the
accessible-space computation for slices, implemented both as the
index-summation recipe and as the insertion-of-test-relations definition
that justifies it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import relations as rel
from . import routed_cpms as rcpm
from . import routed_maps as rmap
from .errors import InvalidSlice, InvariantViolation, TypeMismatch
from .relations import Relation
from .routed_cpms import RoutedCPM
from .routed_maps import RoutedMap
from .spaces import PartitionedSpace, tensor_many

BoxOp = Union[RoutedMap, RoutedCPM]


@dataclass(frozen=True)
class Box:
    """One node of a circuit: ordered input/output wires and the map applied."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    op: BoxOp

    def __init__(self, inputs: Iterable[str], outputs: Iterable[str], op: BoxOp):
        object.__setattr__(self, "inputs", tuple(inputs))
        object.__setattr__(self, "outputs", tuple(outputs))
        object.__setattr__(self, "op", op)


@dataclass(frozen=True)
class Slice:
    """An antichain of wires: a horizontal cut through part of the circuit."""

    wires: tuple[str, ...]

    def __init__(self, wires: Iterable[str]):
        wires = tuple(wires)
        if len(set(wires)) != len(wires):
            raise InvalidSlice(f"slice repeats wires: {wires!r}")
        object.__setattr__(self, "wires", wires)


@dataclass(frozen=True)
class RoutedCircuit:
    """An immutable routed circuit; see :class:`CircuitBuilder` for assembly."""

    wires: Mapping[str, PartitionedSpace]
    boxes: Mapping[str, Box]
    input_wires: tuple[str, ...]
    output_wires: tuple[str, ...]
    mode: str = "pure"

    def __post_init__(self):
        object.__setattr__(self, "wires", dict(self.wires))
        object.__setattr__(self, "boxes", dict(self.boxes))
        object.__setattr__(self, "input_wires", tuple(self.input_wires))
        object.__setattr__(self, "output_wires", tuple(self.output_wires))
        _validate_circuit(self)

    # -- graph helpers -------------------------------------------------

    def producer_of(self, wire: str) -> str | None:
        """Box producing a wire, or None for circuit inputs."""
        for box_id, box in self.boxes.items():
            if wire in box.outputs:
                return box_id
        return None

    def consumer_of(self, wire: str) -> str | None:
        """Box consuming a wire, or None for circuit outputs."""
        for box_id, box in self.boxes.items():
            if wire in box.inputs:
                return box_id
        return None

    def wire_ancestors(self, wire: str) -> set[str]:
        """All wires strictly upstream of ``wire``."""
        seen: set[str] = set()
        stack = [wire]
        while stack:
            current = stack.pop()
            producer = self.producer_of(current)
            if producer is None:
                continue
            for upstream in self.boxes[producer].inputs:
                if upstream not in seen:
                    seen.add(upstream)
                    stack.append(upstream)
        return seen


def _validate_circuit(circuit: RoutedCircuit) -> None:
    if circuit.mode not in ("pure", "cpm"):
        raise InvariantViolation(f"unknown circuit mode {circuit.mode!r}")
    expected_type = RoutedMap if circuit.mode == "pure" else RoutedCPM
    for box_id, box in circuit.boxes.items():
        if not isinstance(box.op, expected_type):
            raise InvariantViolation(
                f"box {box_id!r} holds a {type(box.op).__name__}, but the circuit "
                f"mode is {circuit.mode!r}"
            )

    producers: dict[str, str] = {}
    consumers: dict[str, str] = {}
    for wire in circuit.input_wires:
        if wire in producers:
            raise InvariantViolation(f"wire {wire!r} listed as input twice")
        producers[wire] = "<input>"
    for wire in circuit.output_wires:
        if wire in consumers:
            raise InvariantViolation(f"wire {wire!r} listed as output twice")
        consumers[wire] = "<output>"
    for box_id, box in circuit.boxes.items():
        for wire in box.outputs:
            if wire in producers:
                raise InvariantViolation(
                    f"wire {wire!r} has two producers ({producers[wire]}, {box_id})"
                )
            producers[wire] = box_id
        for wire in box.inputs:
            if wire in consumers:
                raise InvariantViolation(
                    f"wire {wire!r} has two consumers ({consumers[wire]}, {box_id})"
                )
            consumers[wire] = box_id
    for wire in circuit.wires:
        if wire not in producers:
            raise InvariantViolation(f"wire {wire!r} has no producer")
        if wire not in consumers:
            raise InvariantViolation(f"wire {wire!r} has no consumer")
    for wire in itertools.chain(producers, consumers):
        if wire not in circuit.wires:
            raise InvariantViolation(f"wire {wire!r} has no declared space")

    # acyclicity: Kahn over boxes
    remaining = _foliation_layers(circuit, strict=False)
    placed = sum(len(layer) for layer in remaining)
    if placed != len(circuit.boxes):
        raise InvariantViolation("circuit graph contains a cycle")

    # box typing against the tensor of its wires' spaces
    for box_id, box in circuit.boxes.items():
        want_in = tensor_many([circuit.wires[w] for w in box.inputs])
        want_out = tensor_many([circuit.wires[w] for w in box.outputs])
        if box.op.domain != want_in:
            raise TypeMismatch(
                f"box {box_id!r}: map domain {box.op.domain!r} does not match the "
                f"tensor of its input wires {want_in!r}"
            )
        if box.op.codomain != want_out:
            raise TypeMismatch(
                f"box {box_id!r}: map codomain {box.op.codomain!r} does not match the "
                f"tensor of its output wires {want_out!r}"
            )


class CircuitBuilder:
    """Accumulates wires and boxes, then freezes them into a RoutedCircuit."""

    def __init__(self, mode: str = "pure"):
        self.mode = mode
        self._wires: dict[str, PartitionedSpace] = {}
        self._boxes: dict[str, Box] = {}
        self._inputs: list[str] = []
        self._outputs: list[str] = []

    def wire(self, wire_id: str, space: PartitionedSpace) -> "CircuitBuilder":
        if wire_id in self._wires:
            raise InvariantViolation(f"wire {wire_id!r} declared twice")
        self._wires[wire_id] = space
        return self

    def box(
        self, box_id: str, inputs: Iterable[str], outputs: Iterable[str], op: BoxOp
    ) -> "CircuitBuilder":
        if box_id in self._boxes:
            raise InvariantViolation(f"box {box_id!r} declared twice")
        self._boxes[box_id] = Box(inputs, outputs, op)
        return self

    def inputs(self, *wire_ids: str) -> "CircuitBuilder":
        self._inputs.extend(wire_ids)
        return self

    def outputs(self, *wire_ids: str) -> "CircuitBuilder":
        self._outputs.extend(wire_ids)
        return self

    def build(self) -> RoutedCircuit:
        return RoutedCircuit(
            self._wires, self._boxes, tuple(self._inputs), tuple(self._outputs), self.mode
        )


# -- foliation and evaluation ------------------------------------------


def _foliation_layers(
    circuit: RoutedCircuit, box_order: Sequence[str] | None = None, strict: bool = True
) -> list[list[str]]:
    """Group boxes into sequential layers (Kahn, stable box-id tiebreak).

    With ``box_order`` given, each layer holds exactly one box, in that
    order; the order must be topological.
    """
    available = set(circuit.input_wires)
    pending = dict(circuit.boxes)
    layers: list[list[str]] = []
    if box_order is not None:
        if sorted(box_order) != sorted(pending):
            raise InvariantViolation("box_order must enumerate every box exactly once")
        for box_id in box_order:
            box = pending[box_id]
            if not set(box.inputs) <= available:
                raise InvariantViolation(
                    f"box_order is not topological: {box_id!r} fires before its inputs"
                )
            layers.append([box_id])
            available |= set(box.outputs)
            available -= set(box.inputs)
            del pending[box_id]
        return layers
    while pending:
        ready = sorted(
            box_id for box_id, box in pending.items() if set(box.inputs) <= available
        )
        if not ready:
            if strict:
                raise InvariantViolation("circuit graph contains a cycle")
            break
        layers.append(ready)
        for box_id in ready:
            available |= set(pending[box_id].outputs)
            available -= set(pending[box_id].inputs)
            del pending[box_id]
    return layers


def _interface_space(circuit: RoutedCircuit, wire_ids: Sequence[str]) -> PartitionedSpace:
    return tensor_many([circuit.wires[w] for w in wire_ids])


def _coordinate_table(spaces: Sequence[PartitionedSpace]) -> list[tuple[int, ...]]:
    """Canonical tensor coordinate -> tuple of raw per-factor coordinates."""
    per_factor = []
    for space in spaces:
        coords = []
        for r in space.sector_ranges():
            coords.append(list(range(r.offset, r.offset + r.dim)))
        per_factor.append(coords)
    table: list[tuple[int, ...]] = []
    for sector_choice in itertools.product(*per_factor):
        for raw in itertools.product(*sector_choice):
            table.append(raw)
    return table


def _permutation_map(
    circuit: RoutedCircuit, current: Sequence[str], target: Sequence[str]
) -> BoxOp:
    """The wire-reordering map from interface ``current`` to ``target``."""
    spaces = [circuit.wires[w] for w in current]
    positions = [current.index(w) for w in target]
    domain = tensor_many(spaces)
    codomain = tensor_many([spaces[p] for p in positions])
    dom_table = _coordinate_table(spaces)
    cod_index = {raw: i for i, raw in enumerate(_coordinate_table([spaces[p] for p in positions]))}
    matrix = np.zeros((codomain.total_dim, domain.total_dim), dtype=complex)
    for x, raw in enumerate(dom_table):
        matrix[cod_index[tuple(raw[p] for p in positions)], x] = 1.0
    route_matrix = np.zeros((domain.sector_labels.size, codomain.sector_labels.size), dtype=bool)
    n = len(current)
    for i, label in enumerate(domain.sector_labels):
        parts = label if n != 1 else (label,)
        permuted = tuple(parts[p] for p in positions)
        target_label = permuted if n != 1 else permuted[0]
        route_matrix[i, codomain.sector_labels.position(target_label)] = True
    route = Relation(domain.sector_labels, codomain.sector_labels, route_matrix)
    pure = RoutedMap(route, matrix, domain, codomain)
    return pure if circuit.mode == "pure" else rcpm.lift_pure(pure)


def _layer_op(circuit: RoutedCircuit, layer: list[str], passthrough: list[str]) -> BoxOp:
    """Tensor the layer's boxes with identities, relabelled to wire form."""
    in_wires = [w for b in layer for w in circuit.boxes[b].inputs] + passthrough
    out_wires = [w for b in layer for w in circuit.boxes[b].outputs] + passthrough
    if circuit.mode == "pure":
        factors: list[BoxOp] = [circuit.boxes[b].op for b in layer]
        factors += [RoutedMap.identity(circuit.wires[w]) for w in passthrough]
        acc = factors[0]
        for nxt in factors[1:]:
            acc = rmap.tensor_map(acc, nxt)
        return acc.relabel(
            _interface_space(circuit, in_wires), _interface_space(circuit, out_wires)
        )
    factors = [circuit.boxes[b].op for b in layer]
    factors += [RoutedCPM.identity(circuit.wires[w]) for w in passthrough]
    acc = factors[0]
    for nxt in factors[1:]:
        acc = rcpm.tensor_cpm(acc, nxt)
    return acc.relabel(
        _interface_space(circuit, in_wires), _interface_space(circuit, out_wires)
    )


def _compose_ops(circuit: RoutedCircuit, second: BoxOp, first: BoxOp) -> BoxOp:
    if circuit.mode == "pure":
        return rmap.compose(second, first)
    return rcpm.compose(second, first)


def evaluate(circuit: RoutedCircuit, box_order: Sequence[str] | None = None) -> BoxOp:
    """Compose the whole circuit into one routed map (or routed CP map).

    The foliation is the deterministic Kahn layering unless ``box_order``
    pins an explicit topological order; the result does not depend on the
    choice.
    """
    frontier = list(circuit.input_wires)
    acc: BoxOp | None = None

    def absorb(step: BoxOp) -> None:
        nonlocal acc
        acc = step if acc is None else _compose_ops(circuit, step, acc)

    for layer in _foliation_layers(circuit, box_order):
        consumed = [w for b in layer for w in circuit.boxes[b].inputs]
        passthrough = [w for w in frontier if w not in consumed]
        target = consumed + passthrough
        if target != frontier:
            absorb(_permutation_map(circuit, frontier, target))
        absorb(_layer_op(circuit, layer, passthrough))
        frontier = [w for b in layer for w in circuit.boxes[b].outputs] + passthrough
    if frontier != list(circuit.output_wires):
        absorb(_permutation_map(circuit, frontier, circuit.output_wires))
    if acc is None:
        identity = RoutedMap.identity(_interface_space(circuit, circuit.input_wires))
        acc = identity if circuit.mode == "pure" else rcpm.lift_pure(identity)
    return acc


# -- route-level analysis ----------------------------------------------


@dataclass(frozen=True)
class InterfaceCheck:
    """Gate verdict for one sequential interface of the foliation."""

    position: int
    upstream: tuple[str, ...]
    downstream: tuple[str, ...]
    passed: bool
    escaped_inputs: tuple = ()
    escaped_outputs: tuple = ()


@dataclass(frozen=True)
class CircuitReport:
    mode: str
    interfaces: tuple[InterfaceCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.interfaces)


def _box_route(circuit: RoutedCircuit, box_id: str) -> Relation:
    op = circuit.boxes[box_id].op
    return op.route if circuit.mode == "pure" else rel.diagonal(op.route)


def _layer_route(circuit: RoutedCircuit, layer: list[str], passthrough: list[str]) -> Relation:
    in_wires = [w for b in layer for w in circuit.boxes[b].inputs] + passthrough
    out_wires = [w for b in layer for w in circuit.boxes[b].outputs] + passthrough
    parts = [_box_route(circuit, b) for b in layer]
    parts += [
        Relation.identity(circuit.wires[w].sector_labels) for w in passthrough
    ]
    acc = parts[0]
    for nxt in parts[1:]:
        acc = rel.product(acc, nxt)
    return Relation(
        _interface_space(circuit, in_wires).sector_labels,
        _interface_space(circuit, out_wires).sector_labels,
        acc.matrix,
    )


def _permutation_route(
    circuit: RoutedCircuit, current: Sequence[str], target: Sequence[str]
) -> Relation:
    spaces = [circuit.wires[w] for w in current]
    positions = [current.index(w) for w in target]
    domain = tensor_many(spaces).sector_labels
    codomain = tensor_many([spaces[p] for p in positions]).sector_labels
    matrix = np.zeros((domain.size, codomain.size), dtype=bool)
    n = len(current)
    for i, label in enumerate(domain):
        parts = label if n != 1 else (label,)
        permuted = tuple(parts[p] for p in positions)
        matrix[i, codomain.position(permuted if n != 1 else permuted[0])] = True
    return Relation(domain, codomain, matrix)


def check_circuit(circuit: RoutedCircuit, mode: str) -> CircuitReport:
    """Gate every sequential interface of the deterministic foliation.

    ``mode`` is 'isometry' or 'unitary' for pure circuits and 'channel' for
    CPM circuits (the gate then acts on the routes' diagonals).  The report
    is diagnostic: nothing is raised.
    """
    if mode not in ("isometry", "unitary", "channel"):
        raise ValueError(f"unknown mode {mode!r}")
    if (mode == "channel") != (circuit.mode == "cpm"):
        raise InvariantViolation(
            f"mode {mode!r} does not apply to a {circuit.mode!r} circuit"
        )
    frontier = list(circuit.input_wires)
    acc_route: Relation | None = None
    acc_boxes: tuple[str, ...] = ()
    checks: list[InterfaceCheck] = []
    for position, layer in enumerate(_foliation_layers(circuit)):
        consumed = [w for b in layer for w in circuit.boxes[b].inputs]
        passthrough = [w for w in frontier if w not in consumed]
        target = consumed + passthrough
        if target != frontier and acc_route is not None:
            acc_route = rel.compose(_permutation_route(circuit, frontier, target), acc_route)
        layer_route = _layer_route(circuit, layer, passthrough)
        if acc_route is None:
            acc_route = layer_route
        else:
            s = rel.practical_input_set(layer_route)
            reachable = rel.image(
                rel.compose(acc_route, rel.transpose(acc_route)), s
            )
            escaped_in = tuple(sorted(reachable - s, key=repr))
            escaped_out: tuple = ()
            if mode == "unitary":
                t = rel.practical_output_set(acc_route)
                back = rel.image(
                    rel.compose(rel.transpose(layer_route), layer_route), t
                )
                escaped_out = tuple(sorted(back - t, key=repr))
            checks.append(
                InterfaceCheck(
                    position=position,
                    upstream=acc_boxes,
                    downstream=tuple(layer),
                    passed=not escaped_in and not escaped_out,
                    escaped_inputs=escaped_in,
                    escaped_outputs=escaped_out,
                )
            )
            acc_route = rel.compose(layer_route, acc_route)
        acc_boxes += tuple(layer)
        frontier = [w for b in layer for w in circuit.boxes[b].outputs] + passthrough
    return CircuitReport(mode=mode, interfaces=tuple(checks))


# -- slices and accessible spaces ---------------------------------------


def _validate_slice(circuit: RoutedCircuit, cut: Slice) -> None:
    for wire in cut.wires:
        if wire not in circuit.wires:
            raise InvalidSlice(f"unknown wire {wire!r}")
    for wire in cut.wires:
        ancestors = circuit.wire_ancestors(wire)
        overlap = ancestors & set(cut.wires)
        if overlap:
            raise InvalidSlice(
                f"not an antichain: {sorted(overlap)!r} lie above {wire!r}"
            )


def formal_space(circuit: RoutedCircuit, cut: Slice) -> PartitionedSpace:
    """The non-contextual tensor of the slice wires' spaces."""
    _validate_slice(circuit, cut)
    return _interface_space(circuit, cut.wires)


@dataclass(frozen=True)
class AccessibleSpace:
    """Sector tuples of a slice that the circuit's routes allow to be populated."""

    wires: tuple[str, ...]
    tuples: tuple[tuple, ...]
    sector_dims: tuple[int, ...]

    @property
    def total_dim(self) -> int:
        return sum(self.sector_dims)


def _factor_tables(circuit: RoutedCircuit) -> list[tuple[tuple[str, ...], np.ndarray]]:
    """One boolean table per box, with one axis per touched wire."""
    tables = []
    for box_id in sorted(circuit.boxes):
        box = circuit.boxes[box_id]
        route = _box_route(circuit, box_id)
        shape = tuple(circuit.wires[w].sector_labels.size for w in box.inputs) + tuple(
            circuit.wires[w].sector_labels.size for w in box.outputs
        )
        table = route.matrix.reshape(shape) if shape else route.matrix.reshape(())
        tables.append((box.inputs + box.outputs, table))
    return tables


def _eliminate(
    factors: list[tuple[tuple[str, ...], np.ndarray]],
    keep: Sequence[str],
    sizes: Mapping[str, int],
) -> np.ndarray:
    """Sum a product of boolean tables over all variables not in ``keep``."""
    factors = [(vars_, table.astype(bool)) for vars_, table in factors]
    to_eliminate = sorted(
        {v for vars_, _ in factors for v in vars_ if v not in keep}
    )
    for victim in to_eliminate:
        touching = [f for f in factors if victim in f[0]]
        rest = [f for f in factors if victim not in f[0]]
        union_vars = sorted({v for vars_, _ in touching for v in vars_})
        joint = np.ones(tuple(sizes[v] for v in union_vars), dtype=bool)
        for vars_, table in touching:
            expand = table
            # move the table's axes into the union's axis order
            order = sorted(range(len(vars_)), key=lambda i: union_vars.index(vars_[i]))
            expand = np.transpose(expand, order)
            shape = [
                sizes[v] if v in vars_ else 1 for v in union_vars
            ]
            expand = expand.reshape(shape)
            joint = joint & expand
        axis = union_vars.index(victim)
        reduced = joint.any(axis=axis)
        new_vars = tuple(v for v in union_vars if v != victim)
        factors = rest + [(new_vars, reduced)]
    # join what is left onto the keep axes
    result = np.ones(tuple(sizes[v] for v in keep), dtype=bool)
    for vars_, table in factors:
        order = sorted(range(len(vars_)), key=lambda i: keep.index(vars_[i]))
        table = np.transpose(table, order)
        shape = [sizes[v] if v in vars_ else 1 for v in keep]
        result = result & table.reshape(shape)
    return result


def _slice_sizes(circuit: RoutedCircuit) -> dict[str, int]:
    return {w: circuit.wires[w].sector_labels.size for w in circuit.wires}


def _accessible_by_recipe(circuit: RoutedCircuit, cut: Slice) -> np.ndarray:
    """Index-summation recipe: contract every route transitively connected to
    the slice, summing out all indices except the slice's."""
    tables = _factor_tables(circuit)
    connected: set[str] = set(cut.wires)
    active: list[tuple[tuple[str, ...], np.ndarray]] = []
    changed = True
    remaining = list(tables)
    while changed:
        changed = False
        for factor in list(remaining):
            if set(factor[0]) & connected:
                active.append(factor)
                remaining.remove(factor)
                connected |= set(factor[0])
                changed = True
    return _eliminate(active, cut.wires, _slice_sizes(circuit))


def _accessible_by_insertion(circuit: RoutedCircuit, cut: Slice) -> np.ndarray:
    """Defining test: fix the slice sectors to a candidate tuple and ask
    whether the whole relation-level circuit still relates anything."""
    tables = _factor_tables(circuit)
    sizes = _slice_sizes(circuit)
    shape = tuple(sizes[w] for w in cut.wires)
    out = np.zeros(shape, dtype=bool)
    for candidate in itertools.product(*map(range, shape)):
        pinned: list[tuple[tuple[str, ...], np.ndarray]] = []
        for vars_, table in tables:
            picked = table
            kept_vars = []
            for axis_pos, v in enumerate(vars_):
                if v in cut.wires:
                    picked = np.take(
                        picked, candidate[cut.wires.index(v)], axis=len(kept_vars)
                    )
                else:
                    kept_vars.append(v)
            pinned.append((tuple(kept_vars), picked))
        total = _eliminate(pinned, (), sizes)
        out[candidate] = bool(total)
    return out


def accessible_space(
    circuit: RoutedCircuit, cut: Slice, algorithm: str = "recipe"
) -> AccessibleSpace:
    """Sector tuples of the slice that the circuit's routes can populate.

    ``algorithm`` 'recipe' contracts the connected routes and sums out the
    non-slice indices; 'insertion' pins each candidate tuple at the slice
    and tests the end-to-end relation for vanishing.  Both return the same
    set.  CPM circuits are analysed through the routes' diagonals.
    """
    _validate_slice(circuit, cut)
    if algorithm == "recipe":
        allowed = _accessible_by_recipe(circuit, cut)
    elif algorithm == "insertion":
        allowed = _accessible_by_insertion(circuit, cut)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    spaces = [circuit.wires[w] for w in cut.wires]
    tuples = []
    dims = []
    for idx in itertools.product(*[range(s.sector_labels.size) for s in spaces]):
        if not allowed[idx]:
            continue
        labels = tuple(s.sector_labels.labels[i] for s, i in zip(spaces, idx))
        tuples.append(labels)
        dim = 1
        for s, i in zip(spaces, idx):
            dim *= s.sector_dims[i]
        dims.append(dim)
    return AccessibleSpace(cut.wires, tuple(tuples), tuple(dims))


# -- export --------------------------------------------------------------


def circuit_to_dot(circuit: RoutedCircuit) -> str:
    """Graphviz rendering with routes summarised on boxes and spaces on wires."""
    lines = ["digraph routed_circuit {", "  rankdir=BT;"]
    for wire in circuit.input_wires:
        lines.append(f'  "in:{wire}" [shape=point, xlabel="{wire}"];')
    for wire in circuit.output_wires:
        lines.append(f'  "out:{wire}" [shape=point, xlabel="{wire}"];')
    for box_id in sorted(circuit.boxes):
        box = circuit.boxes[box_id]
        route = _box_route(circuit, box_id)
        weight = int(route.matrix.sum())
        size = route.matrix.size
        lines.append(
            f'  "{box_id}" [shape=box, label="{box_id}\\nroute {weight}/{size}"];'
        )
    for wire in sorted(circuit.wires):
        producer = circuit.producer_of(wire)
        consumer = circuit.consumer_of(wire)
        src = f'"{producer}"' if producer else f'"in:{wire}"'
        dst = f'"{consumer}"' if consumer else f'"out:{wire}"'
        dims = "+".join(str(d) for d in circuit.wires[wire].sector_dims)
        lines.append(f'  {src} -> {dst} [label="{wire} ({dims})"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
