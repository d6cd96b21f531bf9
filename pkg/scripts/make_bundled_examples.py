"""Regenerate the bundled example documents under src/routedcircuits/data/.

Everything is seeded, so reruns reproduce the committed files byte for
byte.  The documents cover the two- and three-trajectory superposition
circuits, the copy-then-discard decoherence circuit, the diamond
index-matching graph with a unitary interpretation, the well-indexedness
counterexamples, and the four composition test graphs.
"""

from __future__ import annotations

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from routedcircuits import (
    CircuitBuilder,
    CircuitDocument,
    Interpretation,
    IODAG,
    IONode,
    PartitionedSpace,
    Relation,
    RoutedCPM,
    RoutedMap,
    lift_pure,
    tensor,
    tensor_many,
)
from routedcircuits import relations as rel
from routedcircuits import routed_maps as rmap
from routedcircuits.io import save
from routedcircuits.iodag import Partition, node_route, wire_space
from routedcircuits.routed_cpms import discard
from routedcircuits.sampling import (
    random_block_diagonal_unitary,
    random_practical_unitary,
    random_sector_preserving_channel,
)

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "routedcircuits", "data")


def save_doc(name: str, kind: str, payload, interpretation=None, metadata=None):
    doc = CircuitDocument("1", kind, payload, interpretation, metadata or {})
    path = os.path.join(DATA_DIR, name)
    save(doc, path)
    print(f"wrote {path}")


# -- two trajectories (pure) ----------------------------------------------------


def two_trajectories() -> None:
    rng = np.random.default_rng(2020)
    message = PartitionedSpace.trivial(2)
    control = PartitionedSpace.trivial(2)
    line = PartitionedSpace.from_dims([0, 1], [1, 2])  # vacuum + message sectors
    mc = tensor(message, control)
    ab = tensor(line, line)
    omega = Relation.from_pairs(
        mc.sector_labels, ab.sector_labels, [(("*", "*"), (0, 1)), (("*", "*"), (1, 0))]
    )
    encode_matrix = np.zeros((9, 4), dtype=complex)
    for m in range(2):
        encode_matrix[ab.sector_range((1, 0)).offset + m, 2 * m + 0] = 1.0
        encode_matrix[ab.sector_range((0, 1)).offset + m, 2 * m + 1] = 1.0
    encode = RoutedMap(omega, encode_matrix, mc, ab)
    alice = random_block_diagonal_unitary(line, rng)
    bob = random_block_diagonal_unitary(line, rng)
    decode = rmap.dagger(encode)

    builder = CircuitBuilder("pure")
    for wire, space in [
        ("M", message), ("C", control), ("A", line), ("B", line),
        ("A2", line), ("B2", line), ("M2", message), ("C2", control),
    ]:
        builder.wire(wire, space)
    builder.inputs("M", "C").outputs("M2", "C2")
    builder.box("encode", ["M", "C"], ["A", "B"], encode)
    builder.box("alice", ["A"], ["A2"], alice)
    builder.box("bob", ["B"], ["B2"], bob)
    builder.box("decode", ["A2", "B2"], ["M2", "C2"], decode)
    save_doc(
        "two_trajectories.json",
        "circuit",
        builder.build(),
        metadata={"description": "one particle sent through two lines in superposition"},
    )


# -- three trajectories (cpm) ----------------------------------------------------


def three_trajectories() -> None:
    rng = np.random.default_rng(2021)
    message = PartitionedSpace.trivial(2)
    control = PartitionedSpace.trivial(3)
    line = PartitionedSpace.from_dims([0, 1], [1, 2])
    mc = tensor(message, control)
    abc = tensor_many([line, line, line])
    one_particle = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    omega = Relation.from_pairs(
        mc.sector_labels, abc.sector_labels, [(("*", "*"), t) for t in one_particle]
    )
    encode_matrix = np.zeros((27, 6), dtype=complex)
    for m in range(2):
        for c in range(3):
            sector = one_particle[c]
            encode_matrix[abc.sector_range(sector).offset + m, 3 * m + c] = 1.0
    encode = lift_pure(RoutedMap(omega, encode_matrix, mc, abc))
    decode = lift_pure(rmap.dagger(RoutedMap(omega, encode_matrix, mc, abc)))

    builder = CircuitBuilder("cpm")
    for wire, space in [
        ("M", message), ("C", control), ("A", line), ("B", line), ("Cq", line),
        ("A2", line), ("B2", line), ("Cq2", line), ("M2", message), ("C2", control),
    ]:
        builder.wire(wire, space)
    builder.inputs("M", "C").outputs("M2", "C2")
    builder.box("encode", ["M", "C"], ["A", "B", "Cq"], encode)
    builder.box("alice", ["A"], ["A2"], random_sector_preserving_channel(line, rng))
    builder.box("bob", ["B"], ["B2"], random_sector_preserving_channel(line, rng))
    builder.box("charlie", ["Cq"], ["Cq2"], random_sector_preserving_channel(line, rng))
    builder.box("decode", ["A2", "B2", "Cq2"], ["M2", "C2"], decode)
    save_doc(
        "three_trajectories.json",
        "circuit",
        builder.build(),
        metadata={"description": "one particle sent through three lines in superposition"},
    )


# -- copy then discard (cpm) ------------------------------------------------------


def copy_discard() -> None:
    source = PartitionedSpace.trivial(2)
    bit = PartitionedSpace.from_dims([0, 1], [1, 1])
    bc = tensor(bit, bit)
    copy_rel = Relation.from_pairs(
        source.sector_labels, bc.sector_labels, [("*", (0, 0)), ("*", (1, 1))]
    )
    kraus = np.zeros((4, 2), dtype=complex)
    kraus[bc.sector_range((0, 0)).offset, 0] = 1.0
    kraus[bc.sector_range((1, 1)).offset, 1] = 1.0
    copier = RoutedCPM(rel.full_coherence(copy_rel), (kraus,), source, bc)

    builder = CircuitBuilder("cpm")
    builder.wire("X", source).wire("B", bit).wire("Cc", bit)
    builder.inputs("X").outputs("Cc")
    builder.box("copy", ["X"], ["B", "Cc"], copier)
    builder.box("dropB", ["B"], [], discard(bit))
    save_doc(
        "copy_discard.json",
        "circuit",
        builder.build(),
        metadata={"description": "copying into two sectors, then discarding one copy"},
    )


# -- index-matching graphs ---------------------------------------------------------


def diamond_graph() -> IODAG:
    return IODAG(
        inputs=("AI", "EI", "BI"),
        outputs=("AO", "EO", "BO"),
        inner_edges=("L", "R", "L2", "R2"),
        nodes={
            "u1": IONode(("EI",), ("L", "R")),
            "u2": IONode(("AI", "L"), ("AO", "L2")),
            "u3": IONode(("R", "BI"), ("R2", "BO")),
            "u4": IONode(("L2", "R2"), ("EO",)),
        },
        placement={"kL": "L", "kR": "R", "kL2": "L2", "kR2": "R2"},
        equivalence=Partition.from_blocks([["kL", "kR", "kL2", "kR2"]]),
    )


def diamond() -> None:
    rng = np.random.default_rng(2022)
    graph = diamond_graph()
    lengths = {"kL": 2, "kR": 2, "kL2": 2, "kR2": 2}
    spaces = {
        "AI": wire_space(graph, "AI", lengths, 2),
        "EI": wire_space(graph, "EI", lengths, 4),
        "BI": wire_space(graph, "BI", lengths, 2),
        "AO": wire_space(graph, "AO", lengths, 2),
        "EO": wire_space(graph, "EO", lengths, 4),
        "BO": wire_space(graph, "BO", lengths, 2),
        "L": wire_space(graph, "L", lengths, {(0,): 1, (1,): 2}),
        "L2": wire_space(graph, "L2", lengths, {(0,): 1, (1,): 2}),
        "R": wire_space(graph, "R", lengths, {(0,): 2, (1,): 1}),
        "R2": wire_space(graph, "R2", lengths, {(0,): 2, (1,): 1}),
    }
    partial = Interpretation(lengths, spaces, {})
    morphs = {}
    for node_id, node in graph.nodes.items():
        route = node_route(graph, node_id, partial)
        domain = tensor_many([spaces[w] for w in node.inputs])
        codomain = tensor_many([spaces[w] for w in node.outputs])
        morph = random_practical_unitary(route, domain, codomain, rng)
        assert morph is not None
        morphs[node_id] = morph
    save_doc(
        "diamond.json",
        "iodag",
        graph,
        interpretation=Interpretation(lengths, spaces, morphs),
        metadata={"description": "unitary with no influence from AI to BO nor BI to AO"},
    )


def figure1() -> None:
    # (b): one sector-preserving box; well-indexed for both modes
    fig_b = IODAG(
        inputs=("X",),
        outputs=("Y",),
        inner_edges=(),
        nodes={"u": IONode(("X",), ("Y",))},
        placement={"kX": "X", "kY": "Y"},
        equivalence=Partition.from_blocks([["kX", "kY"]]),
    )
    save_doc("figure1b.json", "iodag", fig_b)

    # (c): the index reaches a global output but also has an endpoint
    fig_c = IODAG(
        inputs=("X",),
        outputs=("A", "D"),
        inner_edges=("B",),
        nodes={"v1": IONode(("X",), ("A", "B")), "v2": IONode(("B",), ("D",))},
        placement={"kA": "A", "kB": "B"},
        equivalence=Partition.from_blocks([["kA", "kB"]]),
    )
    save_doc("figure1c.json", "iodag", fig_c)

    # (d): two starting points for the same index
    fig_d = IODAG(
        inputs=("X", "Y"),
        outputs=("Z",),
        inner_edges=("A", "B"),
        nodes={
            "w1": IONode(("X",), ("A",)),
            "w2": IONode(("Y",), ("B",)),
            "w3": IONode(("A", "B"), ("Z",)),
        },
        placement={"kA": "A", "kB": "B"},
        equivalence=Partition.from_blocks([["kA", "kB"]]),
    )
    save_doc("figure1d.json", "iodag", fig_d)


def composition_examples() -> None:
    # (e): creates a matched pair of indices on its two output wires
    graph_e = IODAG(
        inputs=("X",),
        outputs=("P", "Q"),
        inner_edges=(),
        nodes={"m": IONode(("X",), ("P", "Q"))},
        placement={"kP": "P", "kQ": "Q"},
        equivalence=Partition.from_blocks([["kP", "kQ"]]),
    )
    save_doc("iodag_e.json", "iodag", graph_e)

    # (f1): same wires and placements, but the indices are unmatched
    graph_f1 = IODAG(
        inputs=("P", "Q"),
        outputs=("Z",),
        inner_edges=(),
        nodes={"n": IONode(("P", "Q"), ("Z",))},
        placement={"kP": "P", "kQ": "Q"},
        equivalence=Partition.from_blocks([["kP"], ["kQ"]]),
    )
    save_doc("iodag_f1.json", "iodag", graph_f1)

    # (f2): only one of the two wires carries an index
    graph_f2 = IODAG(
        inputs=("P", "Q"),
        outputs=("Z",),
        inner_edges=(),
        nodes={"n": IONode(("P", "Q"), ("Z",))},
        placement={"kP": "P"},
        equivalence=Partition.from_blocks([["kP"]]),
    )
    save_doc("iodag_f2.json", "iodag", graph_f2)

    # (f3): matched pair on the two input wires, as (e) produces
    graph_f3 = IODAG(
        inputs=("P", "Q"),
        outputs=("Z",),
        inner_edges=(),
        nodes={"n": IONode(("P", "Q"), ("Z",))},
        placement={"kP": "P", "kQ": "Q"},
        equivalence=Partition.from_blocks([["kP", "kQ"]]),
    )
    save_doc("iodag_f3.json", "iodag", graph_f3)


def main() -> None:
    os.makedirs(DATA_DIR, exist_ok=True)
    two_trajectories()
    three_trajectories()
    copy_discard()
    diamond()
    figure1()
    composition_examples()


if __name__ == "__main__":
    main()
