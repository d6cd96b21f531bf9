"""Boolean relation algebra over finite sector index sets.

Relations between index sets encode which input sector of a partitioned
space may connect to which output sector.  Everything here is dense and
eager: the index sets in play are tiny, so exhaustive checks beat sparse
cleverness.  All values are immutable after construction and all
operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import DomainMismatch, InvariantViolation, ShapeMismatch, UnknownLabel

# Atomic sector labels: strings, ints, or (nested) tuples of those.
Label = Union[str, int, tuple]

TRIVIAL_LABEL: Label = "*"


def _freeze_bool(array) -> np.ndarray:
    out = np.array(array, dtype=bool)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class IndexSet:
    """An ordered finite set of distinct sector labels."""

    labels: tuple[Label, ...]

    def __init__(self, labels: Iterable[Label]):
        labels = tuple(labels)
        if len(labels) < 1:
            raise InvariantViolation("an index set needs at least one label")
        if len(set(labels)) != len(labels):
            raise InvariantViolation(f"labels are not pairwise distinct: {labels!r}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def trivial(cls) -> "IndexSet":
        """The singleton indexing used for unpartitioned wires."""
        return cls((TRIVIAL_LABEL,))

    @property
    def size(self) -> int:
        return len(self.labels)

    def position(self, label: Label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"label {label!r} not in {self.labels!r}") from None

    def __contains__(self, label: Label) -> bool:
        return label in self.labels

    def __iter__(self):
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, IndexSet) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"IndexSet({list(self.labels)!r})"

    def product(self, other: "IndexSet") -> "IndexSet":
        """Row-major (left-then-right) pairing of labels."""
        return IndexSet(tuple((k, l) for k in self.labels for l in other.labels))


@dataclass(frozen=True, eq=False)
class Relation:
    """A boolean relation, stored as a matrix indexed (input, output).

    ``matrix[k, l]`` is True when input label ``k`` may connect to output
    label ``l``.
    """

    domain: IndexSet
    codomain: IndexSet
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze_bool(self.matrix))
        if self.matrix.shape != (self.domain.size, self.codomain.size):
            raise ShapeMismatch(
                f"relation matrix has shape {self.matrix.shape}, expected "
                f"{(self.domain.size, self.codomain.size)}"
            )

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, index_set: IndexSet) -> "Relation":
        return cls(index_set, index_set, np.eye(index_set.size, dtype=bool))

    @classmethod
    def full(cls, domain: IndexSet, codomain: IndexSet) -> "Relation":
        return cls(domain, codomain, np.ones((domain.size, codomain.size), dtype=bool))

    @classmethod
    def zero(cls, domain: IndexSet, codomain: IndexSet) -> "Relation":
        return cls(domain, codomain, np.zeros((domain.size, codomain.size), dtype=bool))

    @classmethod
    def from_pairs(
        cls, domain: IndexSet, codomain: IndexSet, pairs: Iterable[tuple[Label, Label]]
    ) -> "Relation":
        matrix = np.zeros((domain.size, codomain.size), dtype=bool)
        for k, l in pairs:
            matrix[domain.position(k), codomain.position(l)] = True
        return cls(domain, codomain, matrix)

    # -- basic protocol -----------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Relation)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.matrix, other.matrix)
        )

    def __repr__(self) -> str:
        return (
            f"Relation({list(self.domain.labels)!r} -> {list(self.codomain.labels)!r}, "
            f"{self.matrix.astype(int).tolist()!r})"
        )

    def relates(self, k: Label, l: Label) -> bool:
        return bool(self.matrix[self.domain.position(k), self.codomain.position(l)])

    def is_zero(self) -> bool:
        return not self.matrix.any()

    def pairs(self) -> list[tuple[Label, Label]]:
        return [
            (self.domain.labels[i], self.codomain.labels[j])
            for i, j in zip(*np.nonzero(self.matrix))
        ]


# -- relation algebra -------------------------------------------------


def compose(second: Relation, first: Relation) -> Relation:
    """Sequential composition ``second ∘ first`` (boolean matrix product).

    Requires the interface index sets to be equal, including label order;
    there is no implicit reordering.
    """
    if first.codomain != second.domain:
        raise DomainMismatch(
            f"cannot compose: interface {first.codomain!r} != {second.domain!r}"
        )
    matrix = (first.matrix[:, :, None] & second.matrix[None, :, :]).any(axis=1)
    return Relation(first.domain, second.codomain, matrix)


def product(left: Relation, right: Relation) -> Relation:
    """Parallel composition on the cartesian product of the index sets."""
    matrix = np.kron(left.matrix, right.matrix)
    return Relation(
        left.domain.product(right.domain),
        left.codomain.product(right.codomain),
        matrix,
    )


def transpose(relation: Relation) -> Relation:
    """The opposite relation (matrix transposition)."""
    return Relation(relation.codomain, relation.domain, relation.matrix.T)


def practical_input_set(relation: Relation) -> frozenset:
    """Input labels related to at least one output label."""
    mask = relation.matrix.any(axis=1)
    return frozenset(l for l, keep in zip(relation.domain.labels, mask) if keep)


def practical_output_set(relation: Relation) -> frozenset:
    """Output labels related to at least one input label."""
    return practical_input_set(transpose(relation))


def image(relation: Relation, subset: Iterable[Label]) -> frozenset:
    """Labels reachable from ``subset`` through the relation."""
    subset = list(subset)
    rows = [relation.domain.position(k) for k in subset]
    if not rows:
        return frozenset()
    mask = relation.matrix[rows].any(axis=0)
    return frozenset(l for l, hit in zip(relation.codomain.labels, mask) if hit)


def is_proper_for_isometries(first: Relation, second: Relation) -> bool:
    """Route-level gate for composing isometry-like maps, ``second ∘ first``.

    The practical input set of the downstream route must absorb its own
    image under ``first ∘ firstᵀ``.
    """
    if first.codomain != second.domain:
        raise DomainMismatch(
            f"cannot gate: interface {first.codomain!r} != {second.domain!r}"
        )
    s = practical_input_set(second)
    return image(compose(first, transpose(first)), s) <= s


def is_proper_for_unitaries(first: Relation, second: Relation) -> bool:
    """Route-level gate for unitary-like maps: the isometry condition plus
    the mirror condition on the upstream practical output set."""
    if not is_proper_for_isometries(first, second):
        return False
    t = practical_output_set(first)
    return image(compose(transpose(second), second), t) <= t


# -- completely positive relations ------------------------------------


@dataclass(frozen=True, eq=False)
class CPRelation:
    """A symmetric, diagonally dominant relation between doubled index sets.

    ``matrix[k, k2, l, l2]`` says whether the (k -> l) connection may be
    coherent with the (k2 -> l2) connection.  Non-symmetric or non-dominant
    arrays express nothing a valid one cannot, so construction rejects them
    instead of normalising.
    """

    base_domain: IndexSet
    base_codomain: IndexSet
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze_bool(self.matrix))
        expected = (
            self.base_domain.size,
            self.base_domain.size,
            self.base_codomain.size,
            self.base_codomain.size,
        )
        if self.matrix.shape != expected:
            raise ShapeMismatch(
                f"coherence route has shape {self.matrix.shape}, expected {expected}"
            )
        witness = _cp_violation(self.matrix)
        if witness is not None:
            kind, (k, k2, l, l2) = witness
            raise InvariantViolation(
                f"not a completely positive relation ({kind} fails at "
                f"(k={k}, k'={k2}, l={l}, l'={l2}))"
            )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CPRelation)
            and self.base_domain == other.base_domain
            and self.base_codomain == other.base_codomain
            and np.array_equal(self.matrix, other.matrix)
        )

    def __repr__(self) -> str:
        return (
            f"CPRelation({list(self.base_domain.labels)!r} -> "
            f"{list(self.base_codomain.labels)!r}, weight={int(self.matrix.sum())})"
        )


def _cp_violation(matrix: np.ndarray):
    """Return ('symmetry'|'diagonal dominance', witness) or None."""
    swapped = matrix.transpose(1, 0, 3, 2)
    bad = matrix != swapped
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        return "symmetry", idx
    diag = np.einsum("kkll->kl", matrix)
    allowed = diag[:, None, :, None] & diag[None, :, None, :]
    bad = matrix & ~allowed
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        return "diagonal dominance", idx
    return None


def is_completely_positive(matrix) -> bool:
    """Whether a raw 4-D boolean array is symmetric and diagonally dominant.

    These two properties characterise the relations obtainable by doubling
    a plain relation and tracing out an environment, i.e. the ones worth
    using as coherence routes.
    """
    matrix = np.asarray(matrix, dtype=bool)
    if matrix.ndim != 4 or matrix.shape[0] != matrix.shape[1] or matrix.shape[2] != matrix.shape[3]:
        raise ShapeMismatch(f"expected a (k, k', l, l') boolean array, got shape {matrix.shape}")
    return _cp_violation(matrix) is None


def diagonal(route: CPRelation) -> Relation:
    """The plain relation formed by the (k, k, l, l) entries."""
    return Relation(
        route.base_domain, route.base_codomain, np.einsum("kkll->kl", route.matrix)
    )


def full_coherence(connectivity: Relation) -> CPRelation:
    """The coherence route allowing every coherence its diagonal allows."""
    m = connectivity.matrix
    matrix = m[:, None, :, None] & m[None, :, None, :]
    return CPRelation(connectivity.domain, connectivity.codomain, matrix)


def full_decoherence(connectivity: Relation) -> CPRelation:
    """The coherence route forbidding all coherence between connections."""
    nk, nl = connectivity.matrix.shape
    matrix = (
        np.eye(nk, dtype=bool)[:, :, None, None]
        & np.eye(nl, dtype=bool)[None, None, :, :]
        & connectivity.matrix[:, None, :, None]
    )
    return CPRelation(connectivity.domain, connectivity.codomain, matrix)


def cp_compose(second: CPRelation, first: CPRelation) -> CPRelation:
    """Sequential composition of coherence routes (4-D boolean product)."""
    if first.base_codomain != second.base_domain:
        raise DomainMismatch(
            f"cannot compose: interface {first.base_codomain!r} != {second.base_domain!r}"
        )
    matrix = (
        first.matrix[:, :, :, :, None, None] & second.matrix[None, None, :, :, :, :]
    ).any(axis=(2, 3))
    return CPRelation(first.base_domain, second.base_codomain, matrix)


def cp_product(left: CPRelation, right: CPRelation) -> CPRelation:
    """Parallel composition, reshuffled to the tensor convention.

    Base labels pair row-major; entry ((k,m), (k2,m2), (l,n), (l2,n2)) is
    left[k,k2,l,l2] AND right[m,m2,n,n2].
    """
    a = left.matrix
    b = right.matrix
    # outer product with axes (k,k2,l,l2,m,m2,n,n2) -> (k,m,k2,m2,l,n,l2,n2)
    joined = np.multiply.outer(a, b).transpose(0, 4, 1, 5, 2, 6, 3, 7)
    dk = left.base_domain.size * right.base_domain.size
    dl = left.base_codomain.size * right.base_codomain.size
    matrix = joined.reshape(dk, dk, dl, dl)
    return CPRelation(
        left.base_domain.product(right.base_domain),
        left.base_codomain.product(right.base_codomain),
        matrix,
    )


def cp_transpose(route: CPRelation) -> CPRelation:
    """The opposite coherence route (used by adjoints)."""
    return CPRelation(
        route.base_codomain, route.base_domain, route.matrix.transpose(2, 3, 0, 1)
    )


def is_proper_for_channels(first: CPRelation, second: CPRelation) -> bool:
    """Route-level gate for composing channel-like maps, ``second ∘ first``.

    Applies the isometry-style condition to the routes' diagonals: the
    practical input set of the downstream diagonal must absorb its own
    image under the upstream ``diag ∘ diagᵀ``.
    """
    if first.base_codomain != second.base_domain:
        raise DomainMismatch(
            f"cannot gate: interface {first.base_codomain!r} != {second.base_domain!r}"
        )
    return is_proper_for_isometries(diagonal(first), diagonal(second))


# -- serialization ----------------------------------------------------


def label_to_json(label: Label):
    if isinstance(label, tuple):
        return [label_to_json(part) for part in label]
    return label


def label_from_json(value) -> Label:
    if isinstance(value, list):
        return tuple(label_from_json(part) for part in value)
    return value


def index_set_to_json(index_set: IndexSet) -> list:
    return [label_to_json(label) for label in index_set.labels]


def index_set_from_json(values) -> IndexSet:
    return IndexSet(label_from_json(v) for v in values)


def relation_to_json(relation: Relation) -> dict:
    return {
        "domain": index_set_to_json(relation.domain),
        "codomain": index_set_to_json(relation.codomain),
        "matrix": relation.matrix.astype(int).tolist(),
    }


def relation_from_json(data: dict) -> Relation:
    return Relation(
        index_set_from_json(data["domain"]),
        index_set_from_json(data["codomain"]),
        np.array(data["matrix"], dtype=bool),
    )


def cp_relation_to_json(route: CPRelation) -> dict:
    return {
        "base_domain": index_set_to_json(route.base_domain),
        "base_codomain": index_set_to_json(route.base_codomain),
        "matrix": route.matrix.astype(int).tolist(),
    }


def cp_relation_from_json(data: dict) -> CPRelation:
    return CPRelation(
        index_set_from_json(data["base_domain"]),
        index_set_from_json(data["base_codomain"]),
        np.array(data["matrix"], dtype=bool),
    )
