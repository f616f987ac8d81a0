"""Sufficient statistics: contingency counts for (variable, parent-set) pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import SelfParentError
from .model import Variable


@dataclass(frozen=True, eq=False)
class Database:
    """N complete discrete cases over an ordered variable list.

    ``cases`` is an (N, n) integer array; ``cases[c, i]`` is the 0-based value
    of variable ``i`` in case ``c``.  Values are range-checked at construction
    and the array is frozen afterwards.
    """

    variables: tuple[Variable, ...]
    cases: np.ndarray

    def __init__(self, variables: Iterable[Variable], cases) -> None:
        variables = tuple(variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        arr = np.array(cases, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, len(variables))
        if arr.ndim != 2 or arr.shape[1] != len(variables):
            raise ValueError(
                f"cases must be an (N, {len(variables)}) array, got shape {arr.shape}"
            )
        for i, v in enumerate(variables):
            if arr.shape[0] and (arr[:, i].min() < 0 or arr[:, i].max() >= v.arity):
                raise ValueError(f"value out of range for variable {v.name!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "cases", arr)

    @property
    def n_cases(self) -> int:
        return self.cases.shape[0]

    @property
    def n_variables(self) -> int:
        return len(self.variables)


@dataclass(frozen=True, eq=False)
class CountTable:
    """Counts of one variable's values against its parent configurations.

    ``nijk[j, k]`` is the number of cases where the variable has value ``k``
    and the parents are in configuration ``j`` (package-wide indexing
    convention).  ``nij`` holds the row sums and ``n_total`` the database
    size; both are redundant but kept explicit and verified.
    """

    variable: int
    parent_set: frozenset[int]
    nijk: np.ndarray
    nij: np.ndarray
    n_total: int

    def __post_init__(self) -> None:
        nijk = np.array(self.nijk, dtype=np.int64)
        nij = np.array(self.nij, dtype=np.int64)
        if nijk.ndim != 2:
            raise ValueError("nijk must be a q x r matrix")
        if np.any(nijk < 0):
            raise ValueError("counts must be nonnegative")
        if not np.array_equal(nijk.sum(axis=1), nij):
            raise ValueError("nij must equal the row sums of nijk")
        if int(nij.sum()) != self.n_total:
            raise ValueError("row sums must add up to the database size")
        nijk.flags.writeable = False
        nij.flags.writeable = False
        object.__setattr__(self, "nijk", nijk)
        object.__setattr__(self, "nij", nij)

    @property
    def q(self) -> int:
        return self.nijk.shape[0]

    @property
    def r(self) -> int:
        return self.nijk.shape[1]


def count(db: Database, i: int, parent_set: Iterable[int]) -> CountTable:
    """Tally the cases of ``db`` into a CountTable for (variable ``i``, parents).

    Cost is O(N * |parents|); case order never affects the result.
    """
    parents = frozenset(parent_set)
    if i in parents:
        raise SelfParentError(f"variable {i} cannot be its own parent")
    n = db.n_variables
    if not 0 <= i < n:
        raise ValueError(f"variable index {i} out of range")
    for p in parents:
        if not 0 <= p < n:
            raise ValueError(f"parent index {p} out of range")

    ps = sorted(parents)
    r = db.variables[i].arity
    q = 1
    for p in ps:
        q *= db.variables[p].arity
    if db.n_cases == 0:
        nijk = np.zeros((q, r), dtype=np.int64)
        return CountTable(i, parents, nijk, nijk.sum(axis=1), 0)

    # Mixed-radix parent configuration per case, last parent fastest.
    config = np.zeros(db.n_cases, dtype=np.int64)
    for p in ps:
        config = config * db.variables[p].arity + db.cases[:, p]
    flat = config * r + db.cases[:, i]
    nijk = np.bincount(flat, minlength=q * r).reshape(q, r)
    return CountTable(i, parents, nijk, nijk.sum(axis=1), db.n_cases)
