"""Shared fixtures: the worked-example circuits and random circuit generators."""

from __future__ import annotations

import numpy as np
import pytest

from routedcircuits import (
    CircuitBuilder,
    PartitionedSpace,
    Relation,
    RoutedMap,
    tensor,
    tensor_many,
)
from routedcircuits import routed_maps as rmap
from routedcircuits.sampling import (
    random_block_diagonal_unitary,
    random_practical_isometry,
    random_relation,
    random_space,
)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def make_two_trajectory_parts(rng):
    """Spaces and maps of the one-particle-in-two-lines circuit (d = 2)."""
    message = PartitionedSpace.trivial(2)
    control = PartitionedSpace.trivial(2)
    line = PartitionedSpace.from_dims([0, 1], [1, 2])
    mc = tensor(message, control)
    ab = tensor(line, line)
    omega = Relation.from_pairs(
        mc.sector_labels, ab.sector_labels, [(("*", "*"), (0, 1)), (("*", "*"), (1, 0))]
    )
    matrix = np.zeros((9, 4), dtype=complex)
    for m in range(2):
        matrix[ab.sector_range((1, 0)).offset + m, 2 * m + 0] = 1.0
        matrix[ab.sector_range((0, 1)).offset + m, 2 * m + 1] = 1.0
    encode = RoutedMap(omega, matrix, mc, ab)
    alice = random_block_diagonal_unitary(line, rng)
    bob = random_block_diagonal_unitary(line, rng)
    return {
        "message": message,
        "control": control,
        "line": line,
        "mc": mc,
        "ab": ab,
        "omega": omega,
        "encode": encode,
        "alice": alice,
        "bob": bob,
        "decode": rmap.dagger(encode),
    }


def make_two_trajectory_circuit(rng):
    parts = make_two_trajectory_parts(rng)
    builder = CircuitBuilder("pure")
    for wire, space in [
        ("M", parts["message"]), ("C", parts["control"]),
        ("A", parts["line"]), ("B", parts["line"]),
        ("A2", parts["line"]), ("B2", parts["line"]),
        ("M2", parts["message"]), ("C2", parts["control"]),
    ]:
        builder.wire(wire, space)
    builder.inputs("M", "C").outputs("M2", "C2")
    builder.box("encode", ["M", "C"], ["A", "B"], parts["encode"])
    builder.box("alice", ["A"], ["A2"], parts["alice"])
    builder.box("bob", ["B"], ["B2"], parts["bob"])
    builder.box("decode", ["A2", "B2"], ["M2", "C2"], parts["decode"])
    return builder.build(), parts


@pytest.fixture
def two_trajectory(rng):
    return make_two_trajectory_circuit(rng)


def sample_routed_map(domain, codomain, rng, density=0.6):
    """A random routed map with a random (nonzero) route."""
    from routedcircuits.sampling import random_matrix_following

    while True:
        route = random_relation(domain.sector_labels, codomain.sector_labels, rng, density)
        if route.matrix.any():
            break
    return RoutedMap(route, random_matrix_following(route, domain, codomain, rng), domain, codomain)


def sample_practical_isometry(rng, max_sectors=3, max_dim=2, density=0.6):
    """Sample (route, spaces, practical isometry) by rejection."""
    while True:
        domain = random_space(rng, max_sectors, max_dim)
        codomain = random_space(rng, max_sectors, max_dim)
        route = random_relation(domain.sector_labels, codomain.sector_labels, rng, density)
        candidate = random_practical_isometry(route, domain, codomain, rng)
        if candidate is not None and route.matrix.any():
            return candidate


def random_circuit(rng, n_boxes=5, mode="pure", max_open=3):
    """A connected random circuit of route-following practical isometries.

    The number of simultaneously open wires is capped so interface tensors
    stay small; box codomains are resampled until the route admits a
    practical isometry.
    """
    from routedcircuits.sampling import random_matrix_following, random_practical_isometry

    builder = CircuitBuilder(mode)
    counter = [0]

    def new_wire(space):
        counter[0] += 1
        wire_id = f"w{counter[0]}"
        builder.wire(wire_id, space)
        return wire_id

    spaces = {}
    open_wires = []
    for _ in range(2):
        space = random_space(rng, max_sectors=2, max_dim=2)
        wire = new_wire(space)
        spaces[wire] = space
        open_wires.append(wire)
    inputs = list(open_wires)
    for b in range(n_boxes):
        k = int(rng.integers(1, min(2, len(open_wires)) + 1))
        picked = list(rng.choice(len(open_wires), size=k, replace=False))
        in_wires = [open_wires[i] for i in sorted(picked)]
        for wire in in_wires:
            open_wires.remove(wire)
        domain = tensor_many([spaces[w] for w in in_wires])
        n_out = 1 if len(open_wires) >= max_open - 1 else int(rng.integers(1, 3))
        while True:
            out_spaces = [random_space(rng, max_sectors=2, max_dim=2) for _ in range(n_out)]
            codomain = tensor_many(out_spaces)
            route = random_relation(domain.sector_labels, codomain.sector_labels, rng, 0.7)
            if not route.matrix.any():
                continue
            op = random_practical_isometry(route, domain, codomain, rng)
            if op is not None:
                break
        out_wires = []
        for space in out_spaces:
            wire = new_wire(space)
            spaces[wire] = space
            out_wires.append(wire)
        if mode == "cpm":
            from routedcircuits.routed_cpms import lift_pure

            builder.box(f"b{b}", in_wires, out_wires, lift_pure(op))
        else:
            builder.box(f"b{b}", in_wires, out_wires, op)
        open_wires.extend(out_wires)
    builder.inputs(*inputs).outputs(*open_wires)
    return builder.build()
