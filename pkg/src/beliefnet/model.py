"""Core graph and distribution types for discrete belief networks.

A network is a directed acyclic graph over discrete variables together with
one conditional probability table per variable; the network represents the
joint distribution obtained by multiplying, for every variable, the table
entry selected by the variable's own value and its parents' values.

Parent-configuration indexing convention, used everywhere in this package:
parents are listed in ascending variable-index order and the *last* parent
varies fastest, i.e. configuration ``j`` of parents ``p_1 < ... < p_m`` is

    j = sum_t value(p_t) * prod_{s > t} arity(p_s)

and ``j = 0`` for an empty parent set.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import CycleError, DisjointnessError, SizeError

#: Refuse full joint-space enumeration beyond this many assignments.
JOINT_ENUM_LIMIT = 2**22

#: A complete assignment: one 0-based value index per variable.
Assignment = Sequence[int]


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with ``arity`` possible values (0-based)."""

    name: str
    arity: int

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name.isidentifier():
            raise ValueError(f"variable name must be an identifier, got {self.name!r}")
        if self.arity < 2:
            raise ValueError(f"variable {self.name!r} needs arity >= 2, got {self.arity}")


@dataclass(frozen=True)
class NetworkStructure:
    """A DAG over an ordered variable list.

    ``parents[i]`` is the set of variable indices that are parents of
    variable ``i``.  Acyclicity, index validity and name uniqueness are
    checked at construction; instances are immutable afterwards.
    """

    variables: tuple[Variable, ...]
    parents: tuple[frozenset[int], ...]

    def __init__(self, variables: Iterable[Variable], parents: Iterable[Iterable[int]]):
        variables = tuple(variables)
        parents = tuple(frozenset(p) for p in parents)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        if len(parents) != len(variables):
            raise ValueError("need exactly one parent set per variable")
        n = len(variables)
        for i, pset in enumerate(parents):
            for p in pset:
                if not 0 <= p < n:
                    raise ValueError(f"parent index {p} of variable {i} out of range")
            if i in pset:
                raise ValueError(f"variable {i} cannot be its own parent")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "parents", parents)
        topological_order(self)  # raises CycleError on a cyclic parent relation

    @property
    def n(self) -> int:
        return len(self.variables)

    def arity(self, i: int) -> int:
        return self.variables[i].arity

    def sorted_parents(self, i: int) -> tuple[int, ...]:
        """Parents of variable ``i`` in canonical (ascending index) order."""
        return tuple(sorted(self.parents[i]))

    def parent_config_count(self, i: int) -> int:
        """Number of parent configurations q_i (1 for an empty parent set)."""
        q = 1
        for p in self.parents[i]:
            q *= self.variables[p].arity
        return q

    def arcs(self) -> tuple[tuple[int, int], ...]:
        """All arcs as (parent, child) pairs, sorted."""
        return tuple(sorted((p, i) for i in range(self.n) for p in self.parents[i]))

    def children(self, i: int) -> tuple[int, ...]:
        return tuple(c for c in range(self.n) if i in self.parents[c])


@dataclass(frozen=True, eq=False)
class Cpt:
    """A conditional probability table: one distribution row per parent configuration.

    ``rows`` has shape (q, r) where q is the number of parent configurations
    and r the variable's arity.  Every row must sum to 1 within 1e-9 and every
    entry must lie in [0, 1].
    """

    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 2:
            raise ValueError(f"CPT needs shape (q, r>=2), got {rows.shape}")
        if np.any(rows < 0.0) or np.any(rows > 1.0):
            raise ValueError("CPT entries must lie in [0, 1]")
        sums = rows.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            raise ValueError("every CPT row must sum to 1 within 1e-9")
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def q(self) -> int:
        return self.rows.shape[0]

    @property
    def r(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True, eq=False)
class BayesNet:
    """A network structure plus one CPT per variable."""

    structure: NetworkStructure
    cpts: tuple[Cpt, ...]

    def __init__(self, structure: NetworkStructure, cpts: Iterable[Cpt]):
        cpts = tuple(cpts)
        if len(cpts) != structure.n:
            raise ValueError("need exactly one CPT per variable")
        for i, cpt in enumerate(cpts):
            q = structure.parent_config_count(i)
            r = structure.arity(i)
            if cpt.rows.shape != (q, r):
                raise ValueError(
                    f"CPT of variable {i} has shape {cpt.rows.shape}, expected {(q, r)}"
                )
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "cpts", cpts)


def topological_order(structure: NetworkStructure) -> tuple[int, ...]:
    """Order variable indices so that every parent precedes its children.

    Among all valid orders, returns the one whose index sequence is
    lexicographically smallest (ties go to the lowest original index).

    Raises CycleError when the parent relation contains a directed cycle.
    """
    n = structure.n
    remaining = [len(structure.parents[i]) for i in range(n)]
    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for p in structure.parents[i]:
            children[p].append(i)
    ready = [i for i in range(n) if remaining[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for c in children[i]:
            remaining[c] -= 1
            if remaining[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != n:
        raise CycleError("parent relation contains a directed cycle")
    return tuple(order)


def _ancestors_of_set(structure: NetworkStructure, nodes: Iterable[int]) -> set[int]:
    """Nodes with a directed path into ``nodes``, including ``nodes`` themselves."""
    seen = set(nodes)
    stack = list(seen)
    while stack:
        i = stack.pop()
        for p in structure.parents[i]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def d_separated(
    structure: NetworkStructure,
    x: Iterable[int],
    z: Iterable[int],
    y: Iterable[int],
) -> bool:
    """Decide whether every trail between X and Y is blocked by Z.

    A trail is blocked if it contains a head-to-head node that is outside Z
    with no descendant in Z, or a non-head-to-head node inside Z.  Computed
    with the standard reachability scheme over (node, entry direction) states
    rather than by enumerating trails; the two agree on all DAGs.

    X and Y must be nonempty and X, Y, Z pairwise disjoint.
    """
    xs, zs, ys = set(x), set(z), set(y)
    if not xs or not ys:
        raise ValueError("X and Y must be nonempty")
    if xs & ys or xs & zs or ys & zs:
        raise DisjointnessError("X, Z and Y must be pairwise disjoint")
    n = structure.n
    for i in xs | ys | zs:
        if not 0 <= i < n:
            raise ValueError(f"node index {i} out of range")

    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for p in structure.parents[i]:
            children[p].append(i)
    # Nodes that are in Z or have a descendant in Z: these open head-to-head nodes.
    z_or_above = _ancestors_of_set(structure, zs)

    UP, DOWN = 0, 1  # direction the node was entered from: child side / parent side
    stack = [(s, UP) for s in xs]
    visited: set[tuple[int, int]] = set()
    while stack:
        node, direction = stack.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in zs and node in ys:
            return False
        if direction == UP and node not in zs:
            for p in structure.parents[node]:
                stack.append((p, UP))
            for c in children[node]:
                stack.append((c, DOWN))
        elif direction == DOWN:
            if node not in zs:
                for c in children[node]:
                    stack.append((c, DOWN))
            if node in z_or_above:
                for p in structure.parents[node]:
                    stack.append((p, UP))
    return True


def parent_config_index(structure: NetworkStructure, i: int, a: Assignment) -> int:
    """Index of the parent configuration of variable ``i`` under assignment ``a``.

    Follows the package-wide convention (ascending parent order, last parent
    fastest); returns 0 for an empty parent set.
    """
    j = 0
    for p in structure.sorted_parents(i):
        j = j * structure.arity(p) + a[p]
    return j


def _check_assignment(structure: NetworkStructure, a: Assignment) -> None:
    if len(a) != structure.n:
        raise ValueError(f"assignment has {len(a)} values, expected {structure.n}")
    for i, v in enumerate(a):
        if not 0 <= v < structure.arity(i):
            raise ValueError(f"value {v} out of range for variable {i}")


def joint_probability(net: BayesNet, a: Assignment) -> float:
    """Probability of a complete assignment: the product of one CPT entry per variable."""
    _check_assignment(net.structure, a)
    p = 1.0
    for i in range(net.structure.n):
        j = parent_config_index(net.structure, i, a)
        p *= net.cpts[i].rows[j, a[i]]
    return p


def all_assignments(variables: Sequence[Variable]) -> Iterable[tuple[int, ...]]:
    """Iterate every complete assignment, last variable fastest.

    Refuses state spaces larger than JOINT_ENUM_LIMIT.
    """
    size = 1
    for v in variables:
        size *= v.arity
    if size > JOINT_ENUM_LIMIT:
        raise SizeError(f"joint space of {size} assignments exceeds {JOINT_ENUM_LIMIT}")
    return product(*(range(v.arity) for v in variables))


def joint_table(net: BayesNet) -> np.ndarray:
    """The full joint distribution as an array with one axis per variable.

    ``joint_table(net)[a]`` equals ``joint_probability(net, a)``.  Refuses
    state spaces larger than JOINT_ENUM_LIMIT.
    """
    structure = net.structure
    shape = tuple(v.arity for v in structure.variables)
    size = 1
    for s in shape:
        size *= s
    if size > JOINT_ENUM_LIMIT:
        raise SizeError(f"joint space of {size} assignments exceeds {JOINT_ENUM_LIMIT}")
    joint = np.ones(shape)
    n = structure.n
    for i in range(n):
        ps = structure.sorted_parents(i)
        axes = list(ps) + [i]
        factor = net.cpts[i].rows.reshape([shape[p] for p in ps] + [shape[i]])
        factor = np.transpose(factor, np.argsort(axes))
        full_shape = [1] * n
        for ax in axes:
            full_shape[ax] = shape[ax]
        joint = joint * factor.reshape(full_shape)
    return joint
