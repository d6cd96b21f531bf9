"""Decoherence from discarding a copy, derived on the routes alone.

A channel writes the same sector index into two subsystems; discarding one
of them forces the survivor to decohere between those sectors.  The route
calculus proves this without looking at the channel's matrices; the script
also confirms it numerically on random channels.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from routedcircuits import (
    PartitionedSpace,
    Relation,
    RoutedCPM,
    discard,
    full_coherence,
    full_decoherence,
    tensor,
    tensor_cpm,
)
from routedcircuits import relations as rel
from routedcircuits import routed_cpms as rc
from routedcircuits.sampling import random_matrix_following


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sectors", type=int, default=2, help="copied sector count")
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    n = args.sectors
    source = PartitionedSpace.trivial(n)
    copy_wire = PartitionedSpace.from_dims(list(range(n)), [1] * n)
    both = tensor(copy_wire, copy_wire)
    copy_rel = Relation.from_pairs(
        source.sector_labels, both.sector_labels, [("*", (k, k)) for k in range(n)]
    )
    second = tensor_cpm(discard(copy_wire), RoutedCPM.identity(copy_wire))

    sample_route = None
    worst = 0.0
    for _ in range(args.trials):
        kraus = tuple(
            random_matrix_following(copy_rel, source, both, rng)
            for _ in range(int(rng.integers(1, 4)))
        )
        copier = RoutedCPM(full_coherence(copy_rel), kraus, source, both)
        composed = rc.compose(second, copier)
        sample_route = composed.route
        choi = composed.choi().reshape(n, n, n, n)
        for l in range(n):
            for l2 in range(n):
                if l != l2:
                    worst = max(worst, float(abs(choi[l, :, l2, :]).max()))

    expected = full_decoherence(
        Relation.full(source.sector_labels, sample_route.base_codomain)
    )
    print(f"composite route equals the fully decohered one: {sample_route == expected}")
    print(f"surviving route diagonal: {rel.diagonal(sample_route).matrix.astype(int).tolist()}")
    print(f"largest cross-sector Choi entry over {args.trials} random channels: {worst:.3e}")


if __name__ == "__main__":
    main()
