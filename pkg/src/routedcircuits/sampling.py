"""Random generators for routed maps and channels.

Used by the test suite and the demo scripts.  The practical-isometry
sampler builds columns sector by sector inside the allowed output
subspaces, orthogonal to everything already placed; it returns None when
the route and dimensions admit no such map (the caller resamples).
"""

from __future__ import annotations

import numpy as np

from . import relations as rel
from .relations import IndexSet, Relation
from .routed_cpms import RoutedCPM
from .routed_maps import RoutedMap
from .spaces import PartitionedSpace


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition of a complex Gaussian."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_relation(
    domain: IndexSet,
    codomain: IndexSet,
    rng: np.random.Generator,
    density: float = 0.5,
) -> Relation:
    matrix = rng.random((domain.size, codomain.size)) < density
    return Relation(domain, codomain, matrix)


def random_space(
    rng: np.random.Generator, max_sectors: int = 3, max_dim: int = 2, labels=None
) -> PartitionedSpace:
    n = int(rng.integers(1, max_sectors + 1)) if labels is None else len(labels)
    labels = list(range(n)) if labels is None else list(labels)
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(n)]
    return PartitionedSpace(IndexSet(labels), dims)


def random_matrix_following(
    route: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    rng: np.random.Generator,
    scale: float = 1.0,
) -> np.ndarray:
    """Gaussian matrix supported on the allowed sector blocks only."""
    matrix = np.zeros((codomain.total_dim, domain.total_dim), dtype=complex)
    for k in domain.sector_labels:
        cols = domain.sector_slice(k)
        for l in codomain.sector_labels:
            if not route.relates(k, l):
                continue
            rows = codomain.sector_slice(l)
            shape = (rows.stop - rows.start, cols.stop - cols.start)
            matrix[rows, cols] = scale * (
                rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            )
    return matrix


def _null_space(matrix: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the kernel, as columns."""
    if matrix.shape[0] == 0:
        return np.eye(matrix.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(matrix)
    rank = int(np.sum(s > tol * max(matrix.shape)))
    return vh[rank:].conj().T


def random_practical_isometry(
    route: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    rng: np.random.Generator,
) -> RoutedMap | None:
    """A route-following partial isometry with initial domain the practical
    input space, or None when none exists for these dimensions."""
    dim_b = codomain.total_dim
    matrix = np.zeros((dim_b, domain.total_dim), dtype=complex)
    placed = np.zeros((dim_b, 0), dtype=complex)
    practical = rel.practical_input_set(route)
    for k in domain.sector_labels:
        if k not in practical:
            continue
        allowed_coords = []
        for l in codomain.sector_labels:
            if route.relates(k, l):
                block = codomain.sector_slice(l)
                allowed_coords.extend(range(block.start, block.stop))
        basis = np.zeros((dim_b, len(allowed_coords)), dtype=complex)
        for column, coord in enumerate(allowed_coords):
            basis[coord, column] = 1.0
        kernel = _null_space(placed.conj().T @ basis)
        need = domain.dim_of(k)
        if kernel.shape[1] < need:
            return None
        gaussian = rng.standard_normal((kernel.shape[1], need)) + 1j * rng.standard_normal(
            (kernel.shape[1], need)
        )
        q, _ = np.linalg.qr(gaussian)
        columns = basis @ kernel @ q[:, :need]
        matrix[:, domain.sector_slice(k)] = columns
        placed = np.hstack([placed, columns])
    return RoutedMap(route, matrix, domain, codomain)


def random_practical_unitary(
    route: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    rng: np.random.Generator,
) -> RoutedMap | None:
    """A route-following practical unitary, or None when dimensions forbid it."""
    s_dim = sum(domain.dim_of(k) for k in rel.practical_input_set(route))
    t_dim = sum(codomain.dim_of(l) for l in rel.practical_output_set(route))
    if s_dim != t_dim:
        return None
    candidate = random_practical_isometry(route, domain, codomain, rng)
    if candidate is None:
        return None
    from .routed_maps import is_practical_unitary

    return candidate if is_practical_unitary(candidate) else None


def random_block_diagonal_unitary(
    space: PartitionedSpace, rng: np.random.Generator
) -> RoutedMap:
    """A sector-preserving unitary (identity route)."""
    matrix = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for label in space.sector_labels:
        block = space.sector_slice(label)
        matrix[block, block] = random_unitary(space.dim_of(label), rng)
    return RoutedMap(Relation.identity(space.sector_labels), matrix, space, space)


def random_kraus_following(
    connectivity: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    rng: np.random.Generator,
    count: int = 3,
    scale: float = 0.5,
) -> list[np.ndarray]:
    """Random Kraus operators each following the given plain route."""
    return [
        random_matrix_following(connectivity, domain, codomain, rng, scale)
        for _ in range(count)
    ]


def random_coherent_cpm(
    connectivity: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    rng: np.random.Generator,
    count: int = 3,
) -> RoutedCPM:
    """A CP map following the fully coherent route over ``connectivity``."""
    kraus = random_kraus_following(connectivity, domain, codomain, rng, count)
    return RoutedCPM(rel.full_coherence(connectivity), tuple(kraus), domain, codomain)


def random_decohered_cpm(
    connectivity: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    rng: np.random.Generator,
    ops_per_block: int = 2,
    trace_preserving: bool = False,
) -> RoutedCPM:
    """A CP map following the fully decohering route over ``connectivity``.

    Each Kraus operator is confined to a single allowed (input, output)
    sector pair.  With ``trace_preserving`` the per-input-sector blocks are
    rescaled so the channel preserves trace on its practical input space.
    """
    kraus: list[np.ndarray] = []
    for k in domain.sector_labels:
        cols = domain.sector_slice(k)
        dim_k = domain.dim_of(k)
        block_ops: list[tuple[slice, np.ndarray]] = []
        for l in codomain.sector_labels:
            if not connectivity.relates(k, l):
                continue
            rows = codomain.sector_slice(l)
            for _ in range(ops_per_block):
                shape = (rows.stop - rows.start, dim_k)
                block_ops.append(
                    (rows, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
                )
        if not block_ops:
            continue
        if trace_preserving:
            gram = sum(b.conj().T @ b for _, b in block_ops)
            eigvals, eigvecs = np.linalg.eigh(gram)
            inv_sqrt = eigvecs @ np.diag(eigvals**-0.5) @ eigvecs.conj().T
            block_ops = [(rows, b @ inv_sqrt) for rows, b in block_ops]
        for rows, b in block_ops:
            full = np.zeros((codomain.total_dim, domain.total_dim), dtype=complex)
            full[rows, cols] = b
            kraus.append(full)
    if not kraus:  # empty connectivity: the zero channel
        kraus.append(np.zeros((codomain.total_dim, domain.total_dim), dtype=complex))
    return RoutedCPM(rel.full_decoherence(connectivity), tuple(kraus), domain, codomain)


def random_sector_preserving_channel(
    space: PartitionedSpace, rng: np.random.Generator, count: int = 2
) -> RoutedCPM:
    """A trace-preserving channel with block-diagonal Kraus operators.

    Follows the fully coherent route over the identity connectivity (each
    sector maps to itself, coherence between sectors is kept).
    """
    dim = space.total_dim
    kraus = [np.zeros((dim, dim), dtype=complex) for _ in range(count)]
    for label in space.sector_labels:
        block = space.sector_slice(label)
        d = space.dim_of(label)
        raw = [
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            for _ in range(count)
        ]
        gram = sum(b.conj().T @ b for b in raw)
        eigvals, eigvecs = np.linalg.eigh(gram)
        inv_sqrt = eigvecs @ np.diag(eigvals**-0.5) @ eigvecs.conj().T
        for op, b in zip(kraus, raw):
            op[block, block] = b @ inv_sqrt
    route = rel.full_coherence(Relation.identity(space.sector_labels))
    return RoutedCPM(route, tuple(kraus), space, space)


def random_density(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = z @ z.conj().T
    return rho / np.trace(rho)
