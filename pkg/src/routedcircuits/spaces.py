"""Partitioned finite-dimensional Hilbert spaces.

A partitioned space is a direct sum of sectors, one per label of an index
set.  The canonical basis keeps sectors contiguous and in label order, so
sector projectors are 0/1 diagonal matrices and coordinate bookkeeping is
exact.  Tensor products therefore come with an explicit permutation from
the raw Kronecker basis to the sector-contiguous one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvariantViolation, UnknownLabel
from .relations import IndexSet, Label


@dataclass(frozen=True)
class SectorRange:
    """Coordinate range of one sector in its parent space."""

    label: Label
    offset: int
    dim: int


@dataclass(frozen=True, eq=False)
class PartitionedSpace:
    """A Hilbert space with a hardcoded ordered orthogonal sector split."""

    sector_labels: IndexSet
    sector_dims: tuple[int, ...]

    def __init__(self, sector_labels: IndexSet, sector_dims: Iterable[int]):
        sector_dims = tuple(int(d) for d in sector_dims)
        if len(sector_dims) != sector_labels.size:
            raise InvariantViolation(
                f"{sector_labels.size} labels but {len(sector_dims)} sector dims"
            )
        if any(d < 1 for d in sector_dims):
            raise InvariantViolation(f"sector dims must be >= 1, got {sector_dims}")
        object.__setattr__(self, "sector_labels", sector_labels)
        object.__setattr__(self, "sector_dims", sector_dims)

    @classmethod
    def trivial(cls, dim: int = 1) -> "PartitionedSpace":
        """A single-sector space (an unpartitioned wire)."""
        return cls(IndexSet.trivial(), (dim,))

    @classmethod
    def from_dims(cls, labels: Iterable[Label], dims: Iterable[int]) -> "PartitionedSpace":
        return cls(IndexSet(labels), dims)

    @property
    def total_dim(self) -> int:
        return sum(self.sector_dims)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PartitionedSpace)
            and self.sector_labels == other.sector_labels
            and self.sector_dims == other.sector_dims
        )

    def __hash__(self) -> int:
        return hash((self.sector_labels, self.sector_dims))

    def __repr__(self) -> str:
        pairs = ", ".join(
            f"{label!r}:{dim}" for label, dim in zip(self.sector_labels, self.sector_dims)
        )
        return f"PartitionedSpace({pairs})"

    def dim_of(self, label: Label) -> int:
        return self.sector_dims[self.sector_labels.position(label)]

    def sector_range(self, label: Label) -> SectorRange:
        pos = self.sector_labels.position(label)
        return SectorRange(label, sum(self.sector_dims[:pos]), self.sector_dims[pos])

    def sector_ranges(self) -> list[SectorRange]:
        out, offset = [], 0
        for label, dim in zip(self.sector_labels, self.sector_dims):
            out.append(SectorRange(label, offset, dim))
            offset += dim
        return out

    def sector_slice(self, label: Label) -> slice:
        r = self.sector_range(label)
        return slice(r.offset, r.offset + r.dim)

    def sector_of_coordinate(self, coord: int) -> Label:
        for r in self.sector_ranges():
            if r.offset <= coord < r.offset + r.dim:
                return r.label
        raise UnknownLabel(f"coordinate {coord} outside space of dim {self.total_dim}")


def projector(space: PartitionedSpace, label: Label) -> np.ndarray:
    """The 0/1 diagonal projector onto one sector."""
    diag = np.zeros(space.total_dim)
    diag[space.sector_slice(label)] = 1.0
    return np.diag(diag).astype(complex)


def subset_projector(space: PartitionedSpace, labels: Iterable[Label]) -> np.ndarray:
    """Projector onto the direct sum of the given sectors."""
    diag = np.zeros(space.total_dim)
    for label in labels:
        diag[space.sector_slice(label)] = 1.0
    return np.diag(diag).astype(complex)


def operator_partition_projector(
    space: PartitionedSpace, row_label: Label, col_label: Label
) -> Callable[[np.ndarray], np.ndarray]:
    """The superoperator ``rho -> P_row @ rho @ P_col``.

    Over all label pairs these tile the operator space into blocks that are
    orthogonal under the Hilbert-Schmidt inner product and sum to the
    identity map.
    """
    rows = space.sector_slice(row_label)
    cols = space.sector_slice(col_label)

    def apply(rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho, dtype=complex)
        out[rows, cols] = rho[rows, cols]
        return out

    return apply


# -- tensor products ---------------------------------------------------


def tensor(left: PartitionedSpace, right: PartitionedSpace) -> PartitionedSpace:
    """Tensor product with sectors re-sorted to contiguous row-major order.

    The sector of pair label (k, l) has dimension dim(k) * dim(l); its
    projector equals the Kronecker product of the component projectors once
    coordinates are passed through :func:`kron_to_canonical`.
    """
    labels = left.sector_labels.product(right.sector_labels)
    dims = tuple(
        dl * dr for dl in left.sector_dims for dr in right.sector_dims
    )
    return PartitionedSpace(labels, dims)


def kron_to_canonical(left: PartitionedSpace, right: PartitionedSpace) -> np.ndarray:
    """Index map sending raw Kronecker coordinates to tensor(left, right) ones.

    ``perm[i * dim(right) + j]`` is the canonical coordinate of basis vector
    ``e_i (x) e_j``.
    """
    dim_r = right.total_dim
    perm = np.empty(left.total_dim * dim_r, dtype=np.intp)
    offset = 0
    for lrange in left.sector_ranges():
        for rrange in right.sector_ranges():
            for a in range(lrange.dim):
                row = (lrange.offset + a) * dim_r + rrange.offset
                perm[row : row + rrange.dim] = offset + a * rrange.dim + np.arange(rrange.dim)
            offset += lrange.dim * rrange.dim
    return perm


def tensor_matrix(
    matrix_left: np.ndarray,
    matrix_right: np.ndarray,
    domain_left: PartitionedSpace,
    domain_right: PartitionedSpace,
    codomain_left: PartitionedSpace,
    codomain_right: PartitionedSpace,
) -> np.ndarray:
    """Kronecker product of two maps, in the canonical tensor bases."""
    kron = np.kron(matrix_left, matrix_right)
    out_perm = kron_to_canonical(codomain_left, codomain_right)
    in_perm = kron_to_canonical(domain_left, domain_right)
    result = np.empty_like(kron)
    result[np.ix_(out_perm, in_perm)] = kron
    return result


def flatten_product_labels(labels: Sequence[Label], arity: int) -> tuple[Label, ...]:
    """Flatten left-fold pair labels ((a, b), c) into flat tuples (a, b, c).

    ``arity`` is the number of factors the fold combined; component labels
    are kept opaque (a component may itself be a tuple-valued user label).
    """
    if arity == 1:
        return tuple(labels)

    def flatten(label: Label) -> tuple:
        parts = [label]
        for _ in range(arity - 1):
            head = parts.pop(0)
            parts = list(head) + parts
        return tuple(parts)

    return tuple(flatten(label) for label in labels)


def tensor_many(spaces: Sequence[PartitionedSpace]) -> PartitionedSpace:
    """n-ary tensor with flat per-factor label tuples.

    Returns the trivial space for no factors and the factor itself for one;
    otherwise sector labels are tuples with one component per factor, in
    row-major order, matching a left fold of :func:`tensor` coordinatewise.
    """
    if not spaces:
        return PartitionedSpace.trivial()
    if len(spaces) == 1:
        return spaces[0]
    acc = spaces[0]
    for nxt in spaces[1:]:
        acc = tensor(acc, nxt)
    labels = flatten_product_labels(acc.sector_labels.labels, len(spaces))
    return PartitionedSpace(IndexSet(labels), acc.sector_dims)


def space_to_json(space: PartitionedSpace, name: str = "") -> dict:
    from .relations import label_to_json

    data = {
        "sectors": [
            {"label": label_to_json(label), "dim": dim}
            for label, dim in zip(space.sector_labels, space.sector_dims)
        ]
    }
    if name:
        data["name"] = name
    return data


def space_from_json(data: dict) -> PartitionedSpace:
    from .relations import label_from_json

    sectors = data["sectors"]
    return PartitionedSpace(
        IndexSet(label_from_json(s["label"]) for s in sectors),
        (s["dim"] for s in sectors),
    )
