"""Routed linear maps: a dense complex matrix paired with the relation it follows.

The route of a map whitelists sector-to-sector blocks; construction rejects
matrices with weight on forbidden blocks instead of projecting it away.
Composition, tensoring and adjoints act pairwise on (route, matrix) and
stay inside the class.  Gated composition additionally enforces the
route-level properness conditions that make isometry/unitary behaviour
compose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import relations as rel
from .errors import DomainMismatch, ImproperComposition, RouteViolation, ShapeMismatch
from .relations import IndexSet, Relation
from .spaces import PartitionedSpace, flatten_product_labels, subset_projector, tensor, tensor_matrix

DEFAULT_TOLERANCE = 1e-9


def _forbidden_block_excess(
    matrix: np.ndarray, route: Relation, domain: PartitionedSpace, codomain: PartitionedSpace
) -> float:
    """Largest entry magnitude sitting on a block the route forbids."""
    worst = 0.0
    for k in domain.sector_labels:
        cols = domain.sector_slice(k)
        for l in codomain.sector_labels:
            if route.relates(k, l):
                continue
            block = matrix[codomain.sector_slice(l), cols]
            if block.size:
                worst = max(worst, float(np.abs(block).max()))
    return worst


def follows(
    matrix: np.ndarray,
    route: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    tol: float = DEFAULT_TOLERANCE,
) -> bool:
    """Whether every forbidden sector block of ``matrix`` is within ``tol`` of zero."""
    matrix = np.asarray(matrix)
    if matrix.shape != (codomain.total_dim, domain.total_dim):
        raise ShapeMismatch(
            f"matrix shape {matrix.shape} does not match spaces "
            f"({codomain.total_dim}, {domain.total_dim})"
        )
    if route.domain != domain.sector_labels or route.codomain != codomain.sector_labels:
        raise ShapeMismatch("route is not typed by the given spaces' sector labels")
    return _forbidden_block_excess(matrix, route, domain, codomain) <= tol


def follows_by_reconstruction(
    matrix: np.ndarray,
    route: Relation,
    domain: PartitionedSpace,
    codomain: PartitionedSpace,
    tol: float = DEFAULT_TOLERANCE,
) -> bool:
    """Equivalent route check: summing the allowed blocks rebuilds the matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    rebuilt = np.zeros_like(matrix)
    for k in domain.sector_labels:
        cols = domain.sector_slice(k)
        for l in codomain.sector_labels:
            if route.relates(k, l):
                rows = codomain.sector_slice(l)
                rebuilt[rows, cols] = matrix[rows, cols]
    return float(np.abs(rebuilt - matrix).max(initial=0.0)) <= tol


@dataclass(frozen=True, eq=False)
class RoutedMap:
    """A linear map together with the route it follows."""

    route: Relation
    matrix: np.ndarray = field(repr=False)
    domain: PartitionedSpace
    codomain: PartitionedSpace
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        if matrix.shape != (self.codomain.total_dim, self.domain.total_dim):
            raise ShapeMismatch(
                f"matrix shape {matrix.shape} does not match spaces "
                f"({self.codomain.total_dim}, {self.domain.total_dim})"
            )
        if (
            self.route.domain != self.domain.sector_labels
            or self.route.codomain != self.codomain.sector_labels
        ):
            raise ShapeMismatch("route is not typed by the given spaces' sector labels")
        excess = _forbidden_block_excess(matrix, self.route, self.domain, self.codomain)
        if excess > self.tolerance:
            raise RouteViolation(
                f"matrix has weight {excess:.3e} on a forbidden sector block "
                f"(tolerance {self.tolerance:.1e})"
            )

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, space: PartitionedSpace, tolerance: float = DEFAULT_TOLERANCE) -> "RoutedMap":
        """The identity map with the diagonal route."""
        return cls(
            Relation.identity(space.sector_labels),
            np.eye(space.total_dim, dtype=complex),
            space,
            space,
            tolerance,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RoutedMap)
            and self.route == other.route
            and self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.matrix, other.matrix)
        )

    def __repr__(self) -> str:
        return (
            f"RoutedMap({self.domain!r} -> {self.codomain!r}, "
            f"route weight {int(self.route.matrix.sum())})"
        )

    def relabel(
        self,
        domain: PartitionedSpace | None = None,
        codomain: PartitionedSpace | None = None,
    ) -> "RoutedMap":
        """Rename sector labels without touching coordinates.

        The replacement spaces must have the same sector dimension lists.
        """
        domain = domain if domain is not None else self.domain
        codomain = codomain if codomain is not None else self.codomain
        if domain.sector_dims != self.domain.sector_dims:
            raise ShapeMismatch("relabelled domain changes sector dimensions")
        if codomain.sector_dims != self.codomain.sector_dims:
            raise ShapeMismatch("relabelled codomain changes sector dimensions")
        route = Relation(domain.sector_labels, codomain.sector_labels, self.route.matrix)
        return RoutedMap(route, self.matrix, domain, codomain, self.tolerance)


def compose(second: RoutedMap, first: RoutedMap) -> RoutedMap:
    """Pairwise sequential composition; the result follows the composed route."""
    if first.codomain != second.domain:
        raise DomainMismatch(
            f"cannot compose maps: {first.codomain!r} != {second.domain!r}"
        )
    return RoutedMap(
        rel.compose(second.route, first.route),
        second.matrix @ first.matrix,
        first.domain,
        second.codomain,
        max(first.tolerance, second.tolerance),
    )


def tensor_map(left: RoutedMap, right: RoutedMap) -> RoutedMap:
    """Pairwise parallel composition in the canonical tensor bases."""
    matrix = tensor_matrix(
        left.matrix, right.matrix, left.domain, right.domain, left.codomain, right.codomain
    )
    return RoutedMap(
        rel.product(left.route, right.route),
        matrix,
        tensor(left.domain, right.domain),
        tensor(left.codomain, right.codomain),
        max(left.tolerance, right.tolerance),
    )


def tensor_maps_flat(maps: list[RoutedMap]) -> RoutedMap:
    """Left-fold tensor with labels flattened to one component per factor."""
    if not maps:
        return RoutedMap.identity(PartitionedSpace.trivial())
    acc = maps[0]
    for nxt in maps[1:]:
        acc = tensor_map(acc, nxt)
    if len(maps) == 1:
        return acc
    dom_labels = flatten_product_labels(acc.domain.sector_labels.labels, len(maps))
    cod_labels = flatten_product_labels(acc.codomain.sector_labels.labels, len(maps))
    return acc.relabel(
        PartitionedSpace(IndexSet(dom_labels), acc.domain.sector_dims),
        PartitionedSpace(IndexSet(cod_labels), acc.codomain.sector_dims),
    )


def dagger(routed: RoutedMap) -> RoutedMap:
    """Adjoint: conjugate-transposed matrix with the transposed route."""
    return RoutedMap(
        rel.transpose(routed.route),
        routed.matrix.conj().T,
        routed.codomain,
        routed.domain,
        routed.tolerance,
    )


def practical_input_projector(routed: RoutedMap) -> np.ndarray:
    return subset_projector(routed.domain, rel.practical_input_set(routed.route))


def is_practical_isometry(routed: RoutedMap, tol: float | None = None) -> bool:
    """Whether the matrix is a partial isometry with initial domain the
    practical input space (the sectors the route relates to anything)."""
    tol = routed.tolerance if tol is None else tol
    p = practical_input_projector(routed)
    gram = p @ routed.matrix.conj().T @ routed.matrix @ p
    return float(np.abs(gram - p).max(initial=0.0)) <= tol


def is_practical_unitary(routed: RoutedMap, tol: float | None = None) -> bool:
    """Practical isometry in both directions."""
    return is_practical_isometry(routed, tol) and is_practical_isometry(dagger(routed), tol)


def checked_compose(second: RoutedMap, first: RoutedMap, mode: str = "none") -> RoutedMap:
    """Compose with the properness gate of the requested mode.

    mode 'isometry' guarantees that practical isometries compose to a
    practical isometry, 'unitary' likewise for practical unitaries, 'none'
    skips the gate.  The gate looks only at the two routes; on failure the
    raised error carries the escaping labels.
    """
    if mode not in ("none", "isometry", "unitary"):
        raise ValueError(f"unknown mode {mode!r}")
    if first.codomain != second.domain:
        raise DomainMismatch(
            f"cannot compose maps: {first.codomain!r} != {second.domain!r}"
        )
    if mode in ("isometry", "unitary"):
        s = rel.practical_input_set(second.route)
        escaped = (
            rel.image(rel.compose(first.route, rel.transpose(first.route)), s) - s
        )
        if escaped:
            raise ImproperComposition(
                f"composition is improper for {mode} maps: labels {sorted(escaped, key=repr)} "
                "escape the downstream practical input set",
                side="input",
                witness=sorted(escaped, key=repr),
            )
    if mode == "unitary":
        t = rel.practical_output_set(first.route)
        escaped = (
            rel.image(rel.compose(rel.transpose(second.route), second.route), t) - t
        )
        if escaped:
            raise ImproperComposition(
                f"composition is improper for unitary maps: labels {sorted(escaped, key=repr)} "
                "escape the upstream practical output set",
                side="output",
                witness=sorted(escaped, key=repr),
            )
    return compose(second, first)


def routed_map_to_json(routed: RoutedMap, domain_name: str, codomain_name: str) -> dict:
    return {
        "route": rel.relation_to_json(routed.route),
        "domain": domain_name,
        "codomain": codomain_name,
        "matrix": matrix_to_json(routed.matrix),
    }


def matrix_to_json(matrix: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(matrix, dtype=complex)]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)
