"""Index-matching circuits: index families, corelations, and indexed DAGs.

An indexed open DAG (the abstract syntax of an index-matching circuit)
places named indices on wires and declares which names are "the same
index" through an equivalence relation.  The bar operation turns a
length-respecting corelation into the corresponding Kronecker-delta
relation between value tuples, embedding this layer into the general
routed framework.  Linting enforces the starting-point/endpoint rules
that make an interpretation compose into a practical isometry or unitary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import relations as rel
from . import routed_maps as rmap
from .circuits import CircuitBuilder, evaluate
from .errors import (
    IncompatibleRestrictions,
    InterfaceMismatch,
    InvariantViolation,
    LengthMismatch,
    LintFailure,
    NotPracticalIsometry,
    RouteViolation,
    UnknownNode,
)
from .relations import IndexSet, Relation
from .routed_maps import RoutedMap
from .spaces import PartitionedSpace, tensor_many


def _sort_key(value):
    return repr(value)


class Partition:
    """An equivalence relation over a finite universe (union-find backed)."""

    def __init__(self, universe: Iterable, pairs: Iterable[tuple] = ()):
        self._parent = {x: x for x in universe}
        for a, b in pairs:
            self.union(a, b)

    # -- construction ----------------------------------------------------

    @classmethod
    def discrete(cls, universe: Iterable) -> "Partition":
        return cls(universe)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable]) -> "Partition":
        blocks = [list(block) for block in blocks]
        part = cls(x for block in blocks for x in block)
        for block in blocks:
            for other in block[1:]:
                part.union(block[0], other)
        return part

    def copy(self) -> "Partition":
        out = Partition(self.universe)
        out._parent = dict(self._parent)
        return out

    # -- union-find core ---------------------------------------------------

    def find(self, x):
        parent = self._parent[x]
        if parent != x:
            parent = self._parent[x] = self.find(parent)
        return parent

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # keep the smaller representative canonical
        if _sort_key(rb) < _sort_key(ra):
            ra, rb = rb, ra
        self._parent[rb] = ra

    # -- queries -------------------------------------------------------------

    @property
    def universe(self) -> frozenset:
        return frozenset(self._parent)

    def related(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def block_of(self, x) -> frozenset:
        root = self.find(x)
        return frozenset(y for y in self._parent if self.find(y) == root)

    def blocks(self) -> tuple[frozenset, ...]:
        grouped: dict = {}
        for x in self._parent:
            grouped.setdefault(self.find(x), set()).add(x)
        return tuple(
            frozenset(block)
            for _, block in sorted(grouped.items(), key=lambda kv: _sort_key(kv[0]))
        )

    def restrict(self, subset: Iterable) -> "Partition":
        subset = set(subset)
        out = Partition(subset)
        for block in self.blocks():
            members = sorted(block & subset, key=_sort_key)
            for other in members[1:]:
                out.union(members[0], other)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Partition)
            and self.universe == other.universe
            and self.blocks() == other.blocks()
        )

    def __repr__(self) -> str:
        rendered = ", ".join(
            "{" + ", ".join(sorted(map(repr, block), key=_sort_key)) + "}"
            for block in self.blocks()
        )
        return f"Partition({rendered})"


def nonforgetting_compose(rel1: Partition, rel2: Partition, shared: Iterable) -> Partition:
    """Join two equivalence relations that coincide on a shared middle set.

    The result is the unique equivalence relation on the union restricting
    to ``rel1`` and ``rel2`` on their universes and to their corelation
    composition on the outer parts.
    """
    shared = set(shared)
    if not shared <= rel1.universe or not shared <= rel2.universe:
        raise IncompatibleRestrictions("shared set is not part of both universes")
    if rel1.restrict(shared) != rel2.restrict(shared):
        raise IncompatibleRestrictions(
            "equivalence relations disagree on the shared middle set"
        )
    out = Partition(rel1.universe | rel2.universe)
    for part in (rel1, rel2):
        for block in part.blocks():
            members = sorted(block, key=_sort_key)
            for other in members[1:]:
                out.union(members[0], other)
    return out


# -- index families and corelations ---------------------------------------


@dataclass(frozen=True, eq=False)
class IndexFamily:
    """A finite set of index names, each with the number of values it takes."""

    lengths: Mapping[str, int]

    def __init__(self, lengths: Mapping[str, int]):
        lengths = dict(lengths)
        for name, length in lengths.items():
            if length < 1:
                raise InvariantViolation(f"index {name!r} has length {length} < 1")
        object.__setattr__(self, "lengths", lengths)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self.lengths))

    def length(self, name: str) -> int:
        return self.lengths[name]

    def value_labels(self) -> tuple:
        """Value tuples over the names in sorted order ('*' when empty)."""
        if not self.lengths:
            return (rel.TRIVIAL_LABEL,)
        return tuple(
            itertools.product(*(range(self.lengths[name]) for name in self.names))
        )

    def index_set(self) -> IndexSet:
        return IndexSet(self.value_labels())

    def __eq__(self, other) -> bool:
        return isinstance(other, IndexFamily) and dict(self.lengths) == dict(other.lengths)

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}:{self.lengths[n]}" for n in self.names)
        return f"IndexFamily({inner})"


def _tag(side: str, names: Iterable[str]) -> list[tuple[str, str]]:
    return [(side, name) for name in names]


@dataclass(frozen=True, eq=False)
class Corelation:
    """An equivalence relation on the disjoint union of two index families.

    Related names must have equal lengths; the blocks say which indices are
    matched (forced to carry the same value).
    """

    domain: IndexFamily
    codomain: IndexFamily
    partition: Partition

    def __init__(self, domain: IndexFamily, codomain: IndexFamily, partition: Partition):
        universe = frozenset(_tag("in", domain.names)) | frozenset(_tag("out", codomain.names))
        if partition.universe != universe:
            raise InvariantViolation(
                "corelation partition universe does not match the tagged families"
            )
        for block in partition.blocks():
            lengths = {
                (domain if side == "in" else codomain).length(name)
                for side, name in block
            }
            if len(lengths) > 1:
                raise LengthMismatch(
                    f"matched indices {sorted(block, key=_sort_key)!r} have lengths {sorted(lengths)}"
                )
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "partition", partition)

    @classmethod
    def from_pairs(
        cls,
        domain: IndexFamily,
        codomain: IndexFamily,
        pairs: Iterable[tuple[tuple[str, str], tuple[str, str]]] = (),
    ) -> "Corelation":
        universe = _tag("in", domain.names) + _tag("out", codomain.names)
        return cls(domain, codomain, Partition(universe, pairs))

    @classmethod
    def identity(cls, family: IndexFamily) -> "Corelation":
        pairs = [(("in", name), ("out", name)) for name in family.names]
        return cls.from_pairs(family, family, pairs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Corelation)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.partition == other.partition
        )

    def __repr__(self) -> str:
        return f"Corelation({self.domain!r} -> {self.codomain!r}, {self.partition!r})"

    def length_of_block(self, block: frozenset) -> int:
        side, name = next(iter(block))
        return (self.domain if side == "in" else self.codomain).length(name)

    def created_blocks(self) -> tuple[frozenset, ...]:
        """Blocks containing output names only (indices born here)."""
        return tuple(
            block
            for block in self.partition.blocks()
            if all(side == "out" for side, _ in block)
        )

    def deleted_blocks(self) -> tuple[frozenset, ...]:
        """Blocks containing input names only (indices ending here)."""
        return tuple(
            block
            for block in self.partition.blocks()
            if all(side == "in" for side, _ in block)
        )


def bar(matching: Corelation) -> Relation:
    """The Kronecker-delta relation between value tuples of the two families.

    Two value tuples are unrelated exactly when some matched pair of names
    carries different values.
    """
    domain_names = matching.domain.names
    codomain_names = matching.codomain.names
    dom_labels = matching.domain.value_labels()
    cod_labels = matching.codomain.value_labels()

    def value_column(tagged) -> np.ndarray:
        """Values of one name across labels, broadcast over (domain, codomain)."""
        side, name = tagged
        if side == "in":
            pos = domain_names.index(name)
            column = np.array([0 if l == rel.TRIVIAL_LABEL else l[pos] for l in dom_labels])
            return column[:, None]
        pos = codomain_names.index(name)
        column = np.array([0 if l == rel.TRIVIAL_LABEL else l[pos] for l in cod_labels])
        return column[None, :]

    matrix = np.ones((len(dom_labels), len(cod_labels)), dtype=bool)
    for block in matching.partition.blocks():
        members = sorted(block, key=_sort_key)
        if len(members) < 2:
            continue
        first = value_column(members[0])
        for member in members[1:]:
            matrix &= first == value_column(member)
    return Relation(IndexSet(dom_labels), IndexSet(cod_labels), matrix)


def compose_corelations(second: Corelation, first: Corelation) -> Corelation:
    """Corelation composition: relate outer names joined by a zigzag path
    through the shared middle family, then forget the middle."""
    if first.codomain != second.domain:
        raise InterfaceMismatch(
            f"cannot compose corelations: {first.codomain!r} != {second.domain!r}"
        )
    universe = (
        _tag("A", first.domain.names)
        + _tag("B", first.codomain.names)
        + _tag("C", second.codomain.names)
    )
    joined = Partition(universe)
    for block in first.partition.blocks():
        members = [
            ("A", name) if side == "in" else ("B", name) for side, name in block
        ]
        for other in members[1:]:
            joined.union(members[0], other)
    for block in second.partition.blocks():
        members = [
            ("B", name) if side == "in" else ("C", name) for side, name in block
        ]
        for other in members[1:]:
            joined.union(members[0], other)
    def retag(element):
        zone, name = element
        return ("in", name) if zone == "A" else ("out", name)

    pairs = []
    outer = _tag("A", first.domain.names) + _tag("C", second.codomain.names)
    for x, y in itertools.combinations(outer, 2):
        if joined.related(x, y):
            pairs.append((retag(x), retag(y)))
    return Corelation.from_pairs(first.domain, second.codomain, pairs)


def product_corelations(left: Corelation, right: Corelation) -> Corelation:
    """Parallel composition; the families must not share names."""
    overlap = set(left.domain.names + left.codomain.names) & set(
        right.domain.names + right.codomain.names
    )
    if overlap:
        raise InvariantViolation(f"parallel corelations share names {sorted(overlap)!r}")
    domain = IndexFamily({**left.domain.lengths, **right.domain.lengths})
    codomain = IndexFamily({**left.codomain.lengths, **right.codomain.lengths})
    pairs = []
    for part in (left.partition, right.partition):
        for block in part.blocks():
            members = sorted(block, key=_sort_key)
            for other in members[1:]:
                pairs.append((members[0], other))
    return Corelation.from_pairs(domain, codomain, pairs)


def transpose_corelation(matching: Corelation) -> Corelation:
    flipped = [
        tuple(("out" if side == "in" else "in", name) for side, name in pair)
        for pair in _partition_pairs(matching.partition)
    ]
    return Corelation.from_pairs(matching.codomain, matching.domain, flipped)


def _partition_pairs(partition: Partition) -> list[tuple]:
    pairs = []
    for block in partition.blocks():
        members = sorted(block, key=_sort_key)
        pairs.extend((members[0], other) for other in members[1:])
    return pairs


# -- improper-composition witnesses ----------------------------------------


@dataclass(frozen=True)
class MatchWitness:
    """Why a corelation composition breaks a properness gate."""

    kind: str  # 'created' or 'deleted'
    block: frozenset
    pair: tuple[str, str]


@dataclass(frozen=True)
class ImproperMatchReport:
    created_witnesses: tuple[MatchWitness, ...]
    deleted_witnesses: tuple[MatchWitness, ...]

    @property
    def proper_for_isometries(self) -> bool:
        return not self.created_witnesses

    @property
    def proper_for_unitaries(self) -> bool:
        return not self.created_witnesses and not self.deleted_witnesses


def explain_improper(first: Corelation, second: Corelation) -> ImproperMatchReport:
    """Name-level witnesses for gate failures of ``second ∘ first``.

    The composition is improper for isometries exactly when ``first``
    creates an index of length at least 2 whose representatives ``second``
    matches with an outside name; improper for unitaries additionally when
    ``second`` deletes such an index that ``first`` matches outside.
    """
    if first.codomain != second.domain:
        raise InterfaceMismatch(
            f"cannot compose corelations: {first.codomain!r} != {second.domain!r}"
        )
    middle = first.codomain.names
    created: list[MatchWitness] = []
    for block in first.created_blocks():
        if first.length_of_block(block) < 2:
            continue
        reps = {name for _, name in block}
        for x in sorted(reps):
            for y in sorted(set(middle) - reps):
                if second.partition.related(("in", x), ("in", y)):
                    created.append(MatchWitness("created", block, (x, y)))
                    break
            else:
                continue
            break
    deleted: list[MatchWitness] = []
    for block in second.deleted_blocks():
        if second.length_of_block(block) < 2:
            continue
        reps = {name for _, name in block}
        for x in sorted(reps):
            for y in sorted(set(middle) - reps):
                if first.partition.related(("out", x), ("out", y)):
                    deleted.append(MatchWitness("deleted", block, (x, y)))
                    break
            else:
                continue
            break
    return ImproperMatchReport(tuple(created), tuple(deleted))


# -- indexed open DAGs -------------------------------------------------------


@dataclass(frozen=True)
class IONode:
    """A node with its ordered incoming and outgoing wires."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __init__(self, inputs: Iterable[str], outputs: Iterable[str]):
        object.__setattr__(self, "inputs", tuple(inputs))
        object.__setattr__(self, "outputs", tuple(outputs))


@dataclass(frozen=True, eq=False)
class IODAG:
    """An indexed open DAG: wires, nodes, index placements, matched classes.

    Every index name sits on exactly one wire; the equivalence relation over
    names says which placements are the same index.  Input wires are each
    consumed by a node and output wires produced by one; empty nodes stand
    for identity strands and are removed where possible by normalisation.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    inner_edges: tuple[str, ...]
    nodes: Mapping[str, IONode]
    placement: Mapping[str, str]
    equivalence: Partition
    empty_nodes: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "inner_edges", tuple(self.inner_edges))
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "placement", dict(self.placement))
        object.__setattr__(self, "empty_nodes", frozenset(self.empty_nodes))
        _validate_iodag(self)

    # -- lookups --------------------------------------------------------

    @property
    def wire_ids(self) -> tuple[str, ...]:
        return self.inputs + self.inner_edges + self.outputs

    def indices_on(self, wire: str) -> tuple[str, ...]:
        return tuple(sorted(n for n, w in self.placement.items() if w == wire))

    def incoming_indices(self, node: str) -> tuple[str, ...]:
        spec = self.nodes[node]
        return tuple(n for wire in spec.inputs for n in self.indices_on(wire))

    def outgoing_indices(self, node: str) -> tuple[str, ...]:
        spec = self.nodes[node]
        return tuple(n for wire in spec.outputs for n in self.indices_on(wire))

    def input_index_names(self) -> tuple[str, ...]:
        return tuple(n for wire in self.inputs for n in self.indices_on(wire))

    def output_index_names(self) -> tuple[str, ...]:
        return tuple(n for wire in self.outputs for n in self.indices_on(wire))

    def producer_of(self, wire: str) -> str | None:
        for node_id, node in self.nodes.items():
            if wire in node.outputs:
                return node_id
        return None

    def consumer_of(self, wire: str) -> str | None:
        for node_id, node in self.nodes.items():
            if wire in node.inputs:
                return node_id
        return None

    def __eq__(self, other) -> bool:
        """Structural equality on the nose; see :func:`iodag_isomorphic`."""
        return (
            isinstance(other, IODAG)
            and self.inputs == other.inputs
            and self.outputs == other.outputs
            and sorted(self.inner_edges) == sorted(other.inner_edges)
            and dict(self.nodes) == dict(other.nodes)
            and dict(self.placement) == dict(other.placement)
            and self.equivalence == other.equivalence
            and self.empty_nodes == other.empty_nodes
        )

    def __repr__(self) -> str:
        return (
            f"IODAG({len(self.nodes)} nodes, {len(self.wire_ids)} wires, "
            f"{len(self.placement)} indices)"
        )


def _validate_iodag(g: IODAG) -> None:
    wire_list = list(g.inputs) + list(g.inner_edges) + list(g.outputs)
    if len(set(wire_list)) != len(wire_list):
        raise InvariantViolation("wire ids are not pairwise distinct")
    wires = set(wire_list)
    consumers: dict[str, str] = {}
    producers: dict[str, str] = {}
    for node_id, node in g.nodes.items():
        for wire in node.inputs:
            if wire in consumers:
                raise InvariantViolation(
                    f"wire {wire!r} consumed twice ({consumers[wire]}, {node_id})"
                )
            consumers[wire] = node_id
        for wire in node.outputs:
            if wire in producers:
                raise InvariantViolation(
                    f"wire {wire!r} produced twice ({producers[wire]}, {node_id})"
                )
            producers[wire] = node_id
        for wire in node.inputs + node.outputs:
            if wire not in wires:
                raise InvariantViolation(f"node {node_id!r} uses undeclared wire {wire!r}")
    for wire in list(g.inputs) + list(g.inner_edges):
        if wire not in consumers:
            raise InvariantViolation(f"wire {wire!r} enters no node")
    for wire in list(g.inner_edges) + list(g.outputs):
        if wire not in producers:
            raise InvariantViolation(f"wire {wire!r} leaves no node")
    for wire in g.inputs:
        if wire in producers:
            raise InvariantViolation(f"input wire {wire!r} is produced by {producers[wire]!r}")
    for wire in g.outputs:
        if wire in consumers:
            raise InvariantViolation(f"output wire {wire!r} is consumed by {consumers[wire]!r}")

    # acyclicity (Kahn over nodes)
    available = set(g.inputs)
    pending = dict(g.nodes)
    while pending:
        ready = [n for n, node in pending.items() if set(node.inputs) <= available]
        if not ready:
            raise InvariantViolation("indexed graph contains a cycle")
        for node_id in ready:
            available |= set(pending[node_id].outputs)
            del pending[node_id]

    for name, wire in g.placement.items():
        if wire not in wires:
            raise InvariantViolation(f"index {name!r} placed on unknown wire {wire!r}")
    if g.equivalence.universe != set(g.placement):
        raise InvariantViolation("equivalence universe differs from the placed index names")

    for node_id in g.empty_nodes:
        if node_id not in g.nodes:
            raise InvariantViolation(f"empty node {node_id!r} is not a node")
        node = g.nodes[node_id]
        if len(node.inputs) != 1 or len(node.outputs) != 1:
            raise InvariantViolation(
                f"empty node {node_id!r} must have exactly one input and one output wire"
            )
        if _empty_node_pairing(g, node_id) is None:
            raise InvariantViolation(
                f"empty node {node_id!r} has no index bijection between its wires"
            )


def _empty_node_pairing(g: IODAG, node_id: str) -> list[tuple[str, str]] | None:
    """Pair up the in-wire and out-wire indices of an empty node classwise."""
    node = g.nodes[node_id]
    incoming = g.indices_on(node.inputs[0])
    outgoing = g.indices_on(node.outputs[0])
    by_class_in: dict = {}
    by_class_out: dict = {}
    for name in incoming:
        by_class_in.setdefault(g.equivalence.find(name), []).append(name)
    for name in outgoing:
        by_class_out.setdefault(g.equivalence.find(name), []).append(name)
    if set(by_class_in) != set(by_class_out):
        return None
    pairs: list[tuple[str, str]] = []
    for root, members in sorted(by_class_in.items(), key=lambda kv: _sort_key(kv[0])):
        partners = by_class_out[root]
        if len(members) != len(partners):
            return None
        pairs.extend(zip(sorted(members), sorted(partners)))
    return pairs


# -- normalisation -----------------------------------------------------------


def normalize(g: IODAG) -> IODAG:
    """Remove empty nodes whose two wires can be identified.

    Strands running directly from a global input to a global output keep
    their empty node (there is nothing to merge them into).
    """
    current = g
    while True:
        candidate = None
        for node_id in sorted(current.empty_nodes):
            node = current.nodes[node_id]
            a, b = node.inputs[0], node.outputs[0]
            if a in current.inputs and b in current.outputs:
                continue
            candidate = (node_id, a, b)
            break
        if candidate is None:
            return current
        node_id, a, b = candidate
        keep, drop = (a, b) if (a in current.inputs or b not in current.outputs) else (b, a)
        pairs = _empty_node_pairing(current, node_id) or []
        dropped_names = set(current.indices_on(drop))
        keep_placement = {
            name: (keep if wire == drop else wire)
            for name, wire in current.placement.items()
            if name not in dropped_names
        }
        new_equivalence = current.equivalence.restrict(set(keep_placement))
        nodes = {}
        for other_id, other in current.nodes.items():
            if other_id == node_id:
                continue
            nodes[other_id] = IONode(
                tuple(keep if w == drop else w for w in other.inputs),
                tuple(keep if w == drop else w for w in other.outputs),
            )
        current = IODAG(
            inputs=current.inputs,
            outputs=tuple(keep if w == drop else w for w in current.outputs),
            inner_edges=tuple(w for w in current.inner_edges if w not in (drop, keep))
            + ((keep,) if keep in current.inner_edges else ()),
            nodes=nodes,
            placement=keep_placement,
            equivalence=new_equivalence,
            empty_nodes=current.empty_nodes - {node_id},
        )


# -- linting ------------------------------------------------------------------


@dataclass(frozen=True)
class LintViolation:
    rule: str
    class_names: tuple[str, ...]
    nodes: tuple[str, ...]

    def render(self) -> str:
        cls = "/".join(self.class_names)
        if self.rule == "multiple-starting-points":
            return (
                f"{len(self.nodes)} starting points for the index {cls}: "
                + ", ".join(self.nodes)
            )
        if self.rule == "starting-point-for-input-index":
            return (
                f"the index {cls} is present in the global inputs and has a "
                f"starting point: " + ", ".join(self.nodes)
            )
        if self.rule == "multiple-endpoints":
            return f"{len(self.nodes)} endpoints for the index {cls}: " + ", ".join(self.nodes)
        return (
            f"the index {cls} is present in the global outputs and has an "
            f"endpoint: " + ", ".join(self.nodes)
        )


@dataclass(frozen=True)
class LintReport:
    mode: str
    violations: tuple[LintViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def lint(g: IODAG, mode: str) -> LintReport:
    """Check the well-indexedness rules for an interpretation mode.

    'iso': every index class has at most one starting point, and none at
    all if the class reaches a global input wire.  'uni' adds the mirrored
    endpoint rules against global outputs.
    """
    if mode not in ("iso", "uni"):
        raise ValueError(f"unknown mode {mode!r}")
    g = normalize(g)
    input_names = set(g.input_index_names())
    output_names = set(g.output_index_names())
    violations: list[LintViolation] = []
    for block in g.equivalence.blocks():
        class_names = tuple(sorted(block))
        starting = []
        ending = []
        for node_id in sorted(g.nodes):
            incoming = set(g.incoming_indices(node_id)) & block
            outgoing = set(g.outgoing_indices(node_id)) & block
            if outgoing and not incoming:
                starting.append(node_id)
            if incoming and not outgoing:
                ending.append(node_id)
        if len(starting) > 1:
            violations.append(
                LintViolation("multiple-starting-points", class_names, tuple(starting))
            )
        if starting and block & input_names:
            violations.append(
                LintViolation("starting-point-for-input-index", class_names, tuple(starting))
            )
        if mode == "uni":
            if len(ending) > 1:
                violations.append(
                    LintViolation("multiple-endpoints", class_names, tuple(ending))
                )
            if ending and block & output_names:
                violations.append(
                    LintViolation("endpoint-for-output-index", class_names, tuple(ending))
                )
    return LintReport(mode=mode, violations=tuple(violations))


# -- composition --------------------------------------------------------------


def _fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    n = 2
    while f"{base}#{n}" in taken:
        n += 1
    return f"{base}#{n}"


def _relabel(g: IODAG, wire_map: dict, node_map: dict, name_map: dict) -> IODAG:
    def w(x):
        return wire_map.get(x, x)

    def n(x):
        return node_map.get(x, x)

    def i(x):
        return name_map.get(x, x)

    placement = {i(name): w(wire) for name, wire in g.placement.items()}
    pairs = [
        (i(a), i(b))
        for block in g.equivalence.blocks()
        for a, b in zip(sorted(block), sorted(block)[1:])
    ]
    return IODAG(
        inputs=tuple(w(x) for x in g.inputs),
        outputs=tuple(w(x) for x in g.outputs),
        inner_edges=tuple(w(x) for x in g.inner_edges),
        nodes={
            n(node_id): IONode(tuple(w(x) for x in node.inputs), tuple(w(x) for x in node.outputs))
            for node_id, node in g.nodes.items()
        },
        placement=placement,
        equivalence=Partition(placement, pairs),
        empty_nodes=frozenset(n(x) for x in g.empty_nodes),
    )


def _avoid_collisions(
    second: IODAG, first: IODAG, protected_wires: set[str], protected_names: set[str]
) -> IODAG:
    """Deterministically rename second's private ids away from first's."""
    wire_taken = set(first.wire_ids) | set(second.wire_ids)
    node_taken = set(first.nodes) | set(second.nodes)
    name_taken = set(first.placement) | set(second.placement)
    wire_map = {}
    for wire in second.wire_ids:
        if wire in protected_wires:
            continue
        if wire in set(first.wire_ids):
            wire_map[wire] = _fresh_name(wire, wire_taken)
            wire_taken.add(wire_map[wire])
    node_map = {}
    for node_id in second.nodes:
        if node_id in first.nodes:
            node_map[node_id] = _fresh_name(node_id, node_taken)
            node_taken.add(node_map[node_id])
    name_map = {}
    for name in second.placement:
        if name in protected_names:
            continue
        if name in set(first.placement):
            name_map[name] = _fresh_name(name, name_taken)
            name_taken.add(name_map[name])
    if not (wire_map or node_map or name_map):
        return second
    return _relabel(second, wire_map, node_map, name_map)


def seq_compose_iodag(second: IODAG, first: IODAG) -> IODAG:
    """Sequential composition along ``first``'s outputs.

    The interface must agree exactly: same wires, same index placements,
    and the same matched classes among those indices.  Interface wires
    become inner edges; the equivalences join by non-forgetting
    composition; clashing private names are renamed ('x#2', 'x#3', ...).
    """
    if set(first.outputs) != set(second.inputs):
        missing = sorted(set(first.outputs) ^ set(second.inputs))
        raise InterfaceMismatch(
            f"interface wires differ: {missing!r} not shared by both graphs"
        )
    interface = set(first.outputs)
    first_names = {n for n, w in first.placement.items() if w in interface}
    second_names = {n for n, w in second.placement.items() if w in interface}
    if first_names != second_names or any(
        first.placement[n] != second.placement[n] for n in first_names
    ):
        raise InterfaceMismatch(
            "interface index placements differ: "
            f"{sorted(first_names)!r} (upstream) vs {sorted(second_names)!r} (downstream)"
        )
    if first.equivalence.restrict(first_names) != second.equivalence.restrict(second_names):
        up = first.equivalence.restrict(first_names).blocks()
        down = second.equivalence.restrict(second_names).blocks()
        raise InterfaceMismatch(
            f"interface index classes differ: {up!r} (upstream) vs {down!r} (downstream)"
        )
    second = _avoid_collisions(second, first, interface, first_names)
    placement = {**first.placement, **second.placement}
    equivalence = nonforgetting_compose(
        first.equivalence, second.equivalence, first_names
    )
    return IODAG(
        inputs=first.inputs,
        outputs=second.outputs,
        inner_edges=first.inner_edges + tuple(first.outputs) + second.inner_edges,
        nodes={**first.nodes, **second.nodes},
        placement=placement,
        equivalence=equivalence,
        empty_nodes=first.empty_nodes | second.empty_nodes,
    )


def par_compose_iodag(first: IODAG, second: IODAG) -> IODAG:
    """Parallel composition: disjoint union, renaming clashes in ``second``."""
    second = _avoid_collisions(second, first, set(), set())
    placement = {**first.placement, **second.placement}
    pairs = [
        (a, b)
        for g in (first, second)
        for block in g.equivalence.blocks()
        for a, b in zip(sorted(block), sorted(block)[1:])
    ]
    return IODAG(
        inputs=first.inputs + second.inputs,
        outputs=first.outputs + second.outputs,
        inner_edges=first.inner_edges + second.inner_edges,
        nodes={**first.nodes, **second.nodes},
        placement=placement,
        equivalence=Partition(placement, pairs),
        empty_nodes=first.empty_nodes | second.empty_nodes,
    )


# -- corelations of a graph -----------------------------------------------------


DEFAULT_STRUCTURAL_LENGTH = 2


def _family(g: IODAG, names: Iterable[str], lengths: Mapping[str, int] | None) -> IndexFamily:
    if lengths is None:
        return IndexFamily({n: DEFAULT_STRUCTURAL_LENGTH for n in names})
    return IndexFamily({n: lengths[n] for n in names})


def node_corelation(
    g: IODAG, node_id: str, lengths: Mapping[str, int] | None = None
) -> Corelation:
    """The corelation between a node's incoming and outgoing index families.

    Names are related exactly when the graph's equivalence matches them.
    Without explicit lengths every index gets length 2, the smallest size
    at which matching is a real constraint.
    """
    if node_id not in g.nodes:
        raise UnknownNode(f"no node {node_id!r}")
    incoming = g.incoming_indices(node_id)
    outgoing = g.outgoing_indices(node_id)
    domain = _family(g, incoming, lengths)
    codomain = _family(g, outgoing, lengths)
    tagged = _tag("in", incoming) + _tag("out", outgoing)
    pairs = [
        (x, y)
        for x, y in itertools.combinations(tagged, 2)
        if g.equivalence.related(x[1], y[1])
    ]
    return Corelation.from_pairs(domain, codomain, pairs)


def preprocessing(g: IODAG, lengths: Mapping[str, int] | None = None) -> Corelation:
    """The input-matching corelation: names related whenever the graph's
    equivalence relates them among the global inputs."""
    names = g.input_index_names()
    family = _family(g, names, lengths)
    tagged = _tag("in", names) + _tag("out", names)
    pairs = [
        (x, y)
        for x, y in itertools.combinations(tagged, 2)
        if g.equivalence.related(x[1], y[1])
    ]
    return Corelation.from_pairs(family, family, pairs)


def total_corelation(g: IODAG, lengths: Mapping[str, int] | None = None) -> Corelation:
    """The boundary-to-boundary corelation induced by the graph's classes."""
    in_names = g.input_index_names()
    out_names = g.output_index_names()
    tagged = _tag("in", in_names) + _tag("out", out_names)
    pairs = [
        (x, y)
        for x, y in itertools.combinations(tagged, 2)
        if g.equivalence.related(x[1], y[1])
    ]
    return Corelation.from_pairs(
        _family(g, in_names, lengths), _family(g, out_names, lengths), pairs
    )


def _node_layers(g: IODAG) -> list[list[str]]:
    available = set(g.inputs)
    pending = dict(g.nodes)
    layers = []
    while pending:
        ready = sorted(n for n, node in pending.items() if set(node.inputs) <= available)
        layers.append(ready)
        for node_id in ready:
            available |= set(pending[node_id].outputs)
            available -= set(pending[node_id].inputs)
            del pending[node_id]
    return layers


def compose_corelations_by_layers(
    g: IODAG, lengths: Mapping[str, int] | None = None, mode: str = "iso"
) -> tuple[Corelation, list[bool]]:
    """Fold the node corelations along the graph, pre-composing the
    input-matching corelation, and gate every sequential step.

    Returns the folded corelation (equal to :func:`total_corelation` for a
    well-indexed graph) and the per-step gate verdicts at the bar level.
    """
    g = normalize(g)
    frontier = list(g.inputs)
    acc = preprocessing(g, lengths)
    gates: list[bool] = []
    for layer in _node_layers(g):
        consumed = [w for n in layer for w in g.nodes[n].inputs]
        passthrough = [w for w in frontier if w not in consumed]
        parts = [node_corelation(g, n, lengths) for n in layer]
        for wire in passthrough:
            family = _family(g, g.indices_on(wire), lengths)
            parts.append(Corelation.identity(family))
        layer_corelation = parts[0]
        for nxt in parts[1:]:
            layer_corelation = product_corelations(layer_corelation, nxt)
        gate = (
            rel.is_proper_for_isometries(bar(acc), bar(layer_corelation))
            if mode == "iso"
            else rel.is_proper_for_unitaries(bar(acc), bar(layer_corelation))
        )
        gates.append(gate)
        acc = compose_corelations(layer_corelation, acc)
        frontier = [w for n in layer for w in g.nodes[n].outputs] + passthrough
    return acc, gates


# -- interpretation ---------------------------------------------------------


@dataclass(frozen=True)
class Interpretation:
    """Concrete spaces and maps for an indexed graph.

    ``lengths`` fixes the value count of every index name (constant on
    classes); ``spaces`` assigns each wire a partitioned space whose sector
    labels are the value tuples of the wire's names in sorted name order
    ('*' for unindexed wires); ``morphs`` assigns each non-empty node a
    routed map following the node's matching route.
    """

    lengths: Mapping[str, int]
    spaces: Mapping[str, PartitionedSpace]
    morphs: Mapping[str, RoutedMap]

    def __post_init__(self):
        object.__setattr__(self, "lengths", dict(self.lengths))
        object.__setattr__(self, "spaces", dict(self.spaces))
        object.__setattr__(self, "morphs", dict(self.morphs))


def expected_wire_labels(g: IODAG, wire: str, lengths: Mapping[str, int]) -> tuple:
    """Sector labels an interpreted wire must carry."""
    return _family(g, g.indices_on(wire), lengths).value_labels()


def wire_space(
    g: IODAG, wire: str, lengths: Mapping[str, int], dims: Mapping | int = 1
) -> PartitionedSpace:
    """Build a wire space with the mandatory labels and chosen sector dims.

    ``dims`` may be a single int for uniform sector dimensions or a mapping
    from label to dimension.
    """
    labels = expected_wire_labels(g, wire, lengths)
    if isinstance(dims, int):
        dim_list = [dims] * len(labels)
    else:
        dim_list = [dims[label] for label in labels]
    return PartitionedSpace(IndexSet(labels), dim_list)


def node_route(g: IODAG, node_id: str, interp: Interpretation) -> Relation:
    """The node's matching route over the tensor labels of its wire spaces."""
    if node_id not in g.nodes:
        raise UnknownNode(f"no node {node_id!r}")
    node = g.nodes[node_id]
    domain = tensor_many([interp.spaces[w] for w in node.inputs]).sector_labels
    codomain = tensor_many([interp.spaces[w] for w in node.outputs]).sector_labels
    matrix = np.zeros((domain.size, codomain.size), dtype=bool)
    names = set(g.incoming_indices(node_id)) | set(g.outgoing_indices(node_id))
    groups = [
        sorted(block & names)
        for block in g.equivalence.blocks()
        if len(block & names) > 1
    ]
    for i, dom_label in enumerate(domain):
        dom_values = _assignment(g, node.inputs, dom_label)
        for j, cod_label in enumerate(codomain):
            values = {**dom_values, **_assignment(g, node.outputs, cod_label)}
            matrix[i, j] = all(
                len({values[name] for name in group}) == 1 for group in groups
            )
    return Relation(domain, codomain, matrix)


def _assignment(g: IODAG, wires: Sequence[str], label) -> dict[str, int]:
    """Decode a tensor interface label into per-index values."""
    components = label if len(wires) > 1 else (label,) if len(wires) == 1 else ()
    values: dict[str, int] = {}
    for wire, component in zip(wires, components):
        names = g.indices_on(wire)
        if not names:
            continue
        for name, value in zip(names, component):
            values[name] = value
    return values


def preprocessing_map(g: IODAG, interp: Interpretation) -> RoutedMap:
    """The index-matching projector on the tensor of the input wire spaces.

    Its route is the partial identity on the tuples whose matched input
    indices carry equal values; the matrix is the projector onto the
    corresponding sectors.
    """
    space = tensor_many([interp.spaces[w] for w in g.inputs])
    labels = space.sector_labels
    input_names = set(g.input_index_names())
    classes = [
        sorted(block & input_names)
        for block in g.equivalence.blocks()
        if len(block & input_names) > 1
    ]
    route = np.zeros((labels.size, labels.size), dtype=bool)
    diag = np.zeros(space.total_dim)
    for i, label in enumerate(labels):
        values = _assignment(g, g.inputs, label)
        if all(len({values[n] for n in group}) == 1 for group in classes):
            route[i, i] = True
            diag[space.sector_slice(label)] = 1.0
    matrix = np.diag(diag).astype(complex)
    return RoutedMap(Relation(labels, labels, route), matrix, space, space)


def interpret(g: IODAG, interp: Interpretation, mode: str = "iso") -> RoutedMap:
    """Compose an interpretation into its overall routed map.

    Requires the graph to pass :func:`lint` for ``mode``, every morph to
    follow its node's matching route, and every morph to be a practical
    isometry ('iso') or practical unitary ('uni').  The result is the
    graph-wise composition pre-composed with the input-matching projector;
    the well-indexedness rules guarantee it is itself a practical isometry
    (resp. unitary).
    """
    if mode not in ("iso", "uni"):
        raise ValueError(f"unknown mode {mode!r}")
    g = normalize(g)
    report = lint(g, mode)
    if not report.passed:
        raise LintFailure(
            "graph is not well-indexed for mode "
            + mode
            + ": "
            + "; ".join(v.render() for v in report.violations)
        )
    for name in g.placement:
        if name not in interp.lengths:
            raise InvariantViolation(f"no length for index {name!r}")
    for block in g.equivalence.blocks():
        if len({interp.lengths[n] for n in block}) > 1:
            raise LengthMismatch(
                f"lengths differ on matched indices {sorted(block)!r}"
            )
    for wire in g.wire_ids:
        if wire not in interp.spaces:
            raise InvariantViolation(f"no space for wire {wire!r}")
        expected = expected_wire_labels(g, wire, interp.lengths)
        if interp.spaces[wire].sector_labels.labels != expected:
            raise InvariantViolation(
                f"wire {wire!r} must carry sector labels {expected!r}, got "
                f"{interp.spaces[wire].sector_labels.labels!r}"
            )

    builder = CircuitBuilder(mode="pure")
    for wire in g.wire_ids:
        builder.wire(wire, interp.spaces[wire])
    builder.inputs(*g.inputs)
    builder.outputs(*g.outputs)
    for node_id, node in g.nodes.items():
        route = node_route(g, node_id, interp)
        if node_id in g.empty_nodes and node_id not in interp.morphs:
            space_in = tensor_many([interp.spaces[w] for w in node.inputs])
            space_out = tensor_many([interp.spaces[w] for w in node.outputs])
            if space_in != space_out or route != Relation.identity(space_in.sector_labels):
                raise InvariantViolation(
                    f"empty node {node_id!r} cannot be interpreted as an identity"
                )
            morph = RoutedMap.identity(space_in)
        else:
            if node_id not in interp.morphs:
                raise InvariantViolation(f"no morphism for node {node_id!r}")
            morph = interp.morphs[node_id]
            if morph.route != route:
                raise RouteViolation(
                    f"morphism of node {node_id!r} does not carry the node's matching route"
                )
            check = (
                rmap.is_practical_isometry if mode == "iso" else rmap.is_practical_unitary
            )
            if not check(morph):
                raise NotPracticalIsometry(
                    f"morphism of node {node_id!r} is not a practical "
                    + ("isometry" if mode == "iso" else "unitary")
                )
        builder.box(node_id, node.inputs, node.outputs, morph)
    composed = evaluate(builder.build())
    return rmap.compose(composed, preprocessing_map(g, interp))


# -- isomorphism ---------------------------------------------------------------


def iodag_isomorphic(g1: IODAG, g2: IODAG) -> bool:
    """Equality up to renaming of nodes, inner edges and inner index names.

    Boundary wires and the index names placed on them stay fixed, matching
    the notion of isomorphism the composition theorems work up to.
    """
    if (
        set(g1.inputs) != set(g2.inputs)
        or set(g1.outputs) != set(g2.outputs)
        or len(g1.inner_edges) != len(g2.inner_edges)
        or len(g1.nodes) != len(g2.nodes)
        or len(g1.placement) != len(g2.placement)
        or len(g1.empty_nodes) != len(g2.empty_nodes)
    ):
        return False
    for wire in g1.inputs + g1.outputs:
        if g1.indices_on(wire) and set(g1.indices_on(wire)) != set(g2.indices_on(wire)):
            return False

    nodes1 = sorted(g1.nodes)
    inner1, inner2 = set(g1.inner_edges), set(g2.inner_edges)

    def extend_wires(pairs: list[tuple[str, str]], wire_map: dict) -> Iterable[dict]:
        if not pairs:
            yield wire_map
            return
        (w1, w2), rest = pairs[0], pairs[1:]
        if w1 in wire_map:
            if wire_map[w1] == w2:
                yield from extend_wires(rest, wire_map)
            return
        if w2 in wire_map.values():
            return
        if (w1 in inner1) != (w2 in inner2):
            return
        if w1 not in inner1 and w1 != w2:
            return
        if len(g1.indices_on(w1)) != len(g2.indices_on(w2)):
            return
        yield from extend_wires(rest, {**wire_map, w1: w2})

    def match_nodes(i: int, node_map: dict, wire_map: dict) -> bool:
        if i == len(nodes1):
            return _match_names(g1, g2, wire_map)
        n1 = nodes1[i]
        spec1 = g1.nodes[n1]
        for n2 in sorted(set(g2.nodes) - set(node_map.values())):
            spec2 = g2.nodes[n2]
            if (n1 in g1.empty_nodes) != (n2 in g2.empty_nodes):
                continue
            if len(spec1.inputs) != len(spec2.inputs) or len(spec1.outputs) != len(
                spec2.outputs
            ):
                continue
            for in_perm in itertools.permutations(spec2.inputs):
                for out_perm in itertools.permutations(spec2.outputs):
                    pairs = list(zip(spec1.inputs, in_perm)) + list(
                        zip(spec1.outputs, out_perm)
                    )
                    for new_map in extend_wires(pairs, wire_map):
                        if match_nodes(i + 1, {**node_map, n1: n2}, new_map):
                            return True
        return False

    return match_nodes(0, {}, {})


def _match_names(g1: IODAG, g2: IODAG, wire_map: dict) -> bool:
    """Find a name bijection consistent with the wire map and the classes."""
    full_wire_map = dict(wire_map)
    for wire in g1.wire_ids:
        full_wire_map.setdefault(wire, wire)
    per_wire: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    for w1 in sorted(g1.wire_ids):
        names1 = g1.indices_on(w1)
        names2 = g2.indices_on(full_wire_map[w1])
        if len(names1) != len(names2):
            return False
        boundary = w1 in g1.inputs or w1 in g1.outputs
        if boundary and set(names1) != set(names2):
            return False
        per_wire.append((names1, names2))

    def assign(i: int, name_map: dict) -> bool:
        if i == len(per_wire):
            items = list(name_map.items())
            for (a1, a2), (b1, b2) in itertools.combinations(items, 2):
                if g1.equivalence.related(a1, b1) != g2.equivalence.related(a2, b2):
                    return False
            return True
        names1, names2 = per_wire[i]
        for perm in itertools.permutations(names2):
            candidate = dict(zip(names1, perm))
            boundary_ok = all(
                candidate[n] == n
                for n in names1
                if g1.placement[n] in g1.inputs or g1.placement[n] in g1.outputs
            )
            if not boundary_ok:
                continue
            if assign(i + 1, {**name_map, **candidate}):
                return True
        return False

    return assign(0, {})


# -- export ---------------------------------------------------------------------


def iodag_to_dot(g: IODAG) -> str:
    """Graphviz rendering; wires show their index names with class markers."""
    class_rep = {
        name: sorted(g.equivalence.block_of(name))[0] for name in g.placement
    }
    lines = ["digraph indexed_graph {", "  rankdir=BT;"]
    for wire in g.inputs:
        lines.append(f'  "in:{wire}" [shape=point, xlabel="{wire}"];')
    for wire in g.outputs:
        lines.append(f'  "out:{wire}" [shape=point, xlabel="{wire}"];')
    for node_id in sorted(g.nodes):
        shape = "circle" if node_id in g.empty_nodes else "box"
        lines.append(f'  "{node_id}" [shape={shape}, label="{node_id}"];')
    for wire in sorted(g.wire_ids):
        producer = g.producer_of(wire)
        consumer = g.consumer_of(wire)
        src = f'"{producer}"' if producer else f'"in:{wire}"'
        dst = f'"{consumer}"' if consumer else f'"out:{wire}"'
        decorations = ",".join(
            f"{name}~{class_rep[name]}" for name in g.indices_on(wire)
        )
        label = wire if not decorations else f"{wire}^{{{decorations}}}"
        lines.append(f'  {src} -> {dst} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
