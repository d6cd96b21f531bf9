"""Interpret the diamond index-matching graph and probe its causal shape.

Samples interpretations with random practical unitaries on the four nodes,
composes them into the overall map, and verifies numerically that the two
side inputs cannot influence each other's outputs: the marginal channel to
the far output is independent of the near input.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from routedcircuits import (
    Interpretation,
    IODAG,
    IONode,
    Partition,
    PartitionedSpace,
    interpret,
    is_practical_unitary,
    tensor_many,
)
from routedcircuits.iodag import node_route, wire_space
from routedcircuits.sampling import random_practical_unitary


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


def sample_interpretation(rng):
    graph = diamond_graph()
    lengths = {name: 2 for name in graph.placement}
    dims_l = {(0,): int(rng.integers(1, 3)), (1,): int(rng.integers(1, 3))}
    dims_r = {(0,): int(rng.integers(1, 3)), (1,): int(rng.integers(1, 3))}
    matched = dims_l[(0,)] * dims_r[(0,)] + dims_l[(1,)] * dims_r[(1,)]
    dim_a = int(rng.integers(1, 3))
    dim_b = int(rng.integers(1, 3))
    spaces = {
        "AI": PartitionedSpace.trivial(dim_a), "AO": PartitionedSpace.trivial(dim_a),
        "BI": PartitionedSpace.trivial(dim_b), "BO": PartitionedSpace.trivial(dim_b),
        "EI": PartitionedSpace.trivial(matched), "EO": PartitionedSpace.trivial(matched),
        "L": wire_space(graph, "L", lengths, dims_l),
        "L2": wire_space(graph, "L2", lengths, dims_l),
        "R": wire_space(graph, "R", lengths, dims_r),
        "R2": wire_space(graph, "R2", lengths, dims_r),
    }
    partial = Interpretation(lengths, spaces, {})
    morphs = {}
    for node_id, node in graph.nodes.items():
        route = node_route(graph, node_id, partial)
        domain = tensor_many([spaces[w] for w in node.inputs])
        codomain = tensor_many([spaces[w] for w in node.outputs])
        morphs[node_id] = random_practical_unitary(route, domain, codomain, rng)
    return graph, Interpretation(lengths, spaces, morphs), (dim_a, matched, dim_b)


def marginal_choi(matrix, in_dims, out_dims, keep_axis):
    keep = out_dims[keep_axis]
    total_in = int(np.prod(in_dims))
    letters = "abcdefgh"
    n = len(out_dims)
    left = "".join(letters[i] for i in range(n))
    right = "".join(letters[i] if i != keep_axis else letters[n] for i in range(n))
    spec = f"{left}{right}->{letters[keep_axis]}{letters[n]}"
    choi = np.zeros((keep, total_in, keep, total_in), dtype=complex)
    for i in range(total_in):
        for j in range(total_in):
            op = np.outer(matrix[:, i], matrix[:, j].conj()).reshape(*out_dims, *out_dims)
            choi[:, i, :, j] = np.einsum(spec, op)
    return choi


def influence_deviation(matrix, dims, in_axis, out_axis):
    """How far the marginal to ``out_axis`` is from ignoring ``in_axis``."""
    choi = marginal_choi(matrix, dims, dims, out_axis)
    keep = dims[out_axis]
    d = dims[in_axis]
    rest = int(np.prod(dims)) // d
    blocks = choi.reshape([keep] + list(dims) + [keep] + list(dims))
    blocks = np.moveaxis(blocks, 1 + in_axis, 1)
    blocks = np.moveaxis(blocks, 2 + len(dims) + in_axis, 2 + len(dims))
    flat = blocks.reshape(keep, d, rest, keep, d, rest)
    worst = 0.0
    for x in range(d):
        for y in range(d):
            if x != y:
                worst = max(worst, float(abs(flat[:, x, :, :, y, :]).max()))
    for x in range(1, d):
        worst = max(
            worst, float(abs(flat[:, x, :, :, x, :] - flat[:, 0, :, :, 0, :]).max())
        )
    return worst


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    for trial in range(args.trials):
        graph, interpretation, dims = sample_interpretation(rng)
        meaning = interpret(graph, interpretation, mode="uni")
        unitary = is_practical_unitary(meaning, 1e-9)
        forward = influence_deviation(meaning.matrix, dims, in_axis=0, out_axis=2)
        backward = influence_deviation(meaning.matrix, dims, in_axis=2, out_axis=0)
        print(
            f"trial {trial}: dims {dims}, unitary={unitary}, "
            f"first-input->last-output leakage {forward:.2e}, "
            f"last-input->first-output leakage {backward:.2e}"
        )


if __name__ == "__main__":
    main()
