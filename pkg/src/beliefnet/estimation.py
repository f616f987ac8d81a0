"""Probability-table estimation: direct expected values and weighted mixtures.

The direct estimate of a table cell is ``(N_jk + 1) / (N_j + r)``, the
expected value under a uniform prior; it is strictly positive and every row
sums to exactly 1 as a rational identity.

The weighted estimate mixes the direct estimates of several nested parent
sets of the same variable, each weighted by ``2**score`` where ``score`` is
the parent set's node score.  Mixing happens over the configuration space of
the union parent set: an estimate for a smaller parent set applies to every
union configuration that is consistent with it.  Weights are shifted by the
maximum score before exponentiating, so the mixture is invariant under adding
a constant to all scores and never underflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyFamilyError
from .model import Cpt, Variable
from .stats import CountTable


def direct_estimate(c: CountTable) -> Cpt:
    """Expected-value table for one (variable, parent-set) pair.

    An unobserved configuration row (N_j = 0) comes out uniform.
    """
    rows = (c.nijk + 1.0) / (c.nij[:, None] + float(c.r))
    return Cpt(rows)


class ParentSetEntry(NamedTuple):
    parent_set: frozenset[int]
    score: float
    counts: CountTable


@dataclass(frozen=True)
class WeightedParentSetFamily:
    """A collection of scored parent sets of one variable, ready for mixing.

    ``variables`` is the full domain (needed to size union configurations),
    ``variable`` the child index, and each entry pairs a parent set with its
    node score and count table.
    """

    variables: tuple[Variable, ...]
    variable: int
    entries: tuple[ParentSetEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise EmptyFamilyError("weighted mixture needs at least one parent set")
        for entry in self.entries:
            if not np.isfinite(entry.score):
                raise ValueError("parent-set scores must be finite")
            if entry.counts.variable != self.variable:
                raise ValueError("count table belongs to a different variable")
            if entry.counts.parent_set != entry.parent_set:
                raise ValueError("count table was built for a different parent set")

    @property
    def union_parents(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for entry in self.entries:
            out |= entry.parent_set
        return out


def weighted_estimate(f: WeightedParentSetFamily) -> Cpt:
    """Score-weighted mixture of the family's direct estimates.

    Returns a table over the union parent set whose rows sum to 1.
    """
    union = sorted(f.union_parents)
    arities = [f.variables[p].arity for p in union]
    q_union = 1
    for a in arities:
        q_union *= a
    r = f.variables[f.variable].arity

    # Per-parent value of every union configuration, last parent fastest.
    if union:
        coords = dict(zip(union, np.unravel_index(np.arange(q_union), arities)))
    else:
        coords = {}

    max_score = max(entry.score for entry in f.entries)
    acc = np.zeros((q_union, r))
    for parent_set, score, counts in f.entries:
        weight = 2.0 ** (score - max_score)
        theta = direct_estimate(counts).rows
        sub_config = np.zeros(q_union, dtype=np.int64)
        for p in sorted(parent_set):
            sub_config = sub_config * f.variables[p].arity + coords[p]
        acc += weight * theta[sub_config, :]
    return Cpt(acc / acc.sum(axis=1, keepdims=True))
