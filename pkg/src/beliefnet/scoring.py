"""Decomposable quality measures for network structures.

Two measures are provided, both returned as base-2 log quantities:

* the Bayesian measure: per variable, the log of
  ``prod_j (r-1)! / (N_j + r - 1)! * prod_k N_jk!`` evaluated in log-gamma
  form so it never overflows;
* the description-length measure: per variable, the conditional
  log-likelihood of the data minus ``0.5 * q * (r - 1) * log2(N)`` for the
  table's parameter cost.

Both decompose over variables, so a whole-network score is the sum of one
node score per variable, and editing one parent set changes one summand.
The structure prior is taken as uniform and dropped as a constant.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .errors import SchemaMismatchError, ZeroCasesError
from .model import NetworkStructure
from .stats import CountTable, Database, count

_LN2 = math.log(2.0)


class Measure(Enum):
    """Which quality measure a score or search should use."""

    BAYESIAN = "bayes"
    MDL = "mdl"


def bayes_node_score(c: CountTable) -> float:
    """Bayesian contribution of one (variable, parent-set) pair, in log2 units.

    Sum over parent configurations j of
    ``lgamma(r) - lgamma(N_j + r) + sum_k lgamma(N_jk + 1)``, divided by ln 2.
    An all-zero table scores exactly 0.
    """
    r = c.r
    per_row = gammaln(r) - gammaln(c.nij + r) + gammaln(c.nijk + 1.0).sum(axis=1)
    return float(per_row.sum()) / _LN2


def mdl_node_score(c: CountTable) -> float:
    """Description-length contribution of one (variable, parent-set) pair.

    The data term is ``sum_jk N_jk * log2(N_jk / N_j)`` with the convention
    that empty cells (and whole rows with N_j = 0) contribute nothing; the
    penalty ``0.5 * q * (r - 1) * log2(N)`` always uses the full table size q,
    regardless of which configurations were observed.
    """
    if c.n_total == 0:
        raise ZeroCasesError("description-length score needs at least one case")
    nijk = c.nijk
    nij = c.nij
    positive = nijk > 0
    ratio = np.ones_like(nijk, dtype=float)
    np.divide(nijk, nij[:, None], out=ratio, where=positive)
    data_term = float((nijk * np.log2(ratio, where=positive, out=np.zeros_like(ratio))).sum())
    penalty = 0.5 * c.q * (c.r - 1) * math.log2(c.n_total)
    return data_term - penalty


def node_score(c: CountTable, measure: Measure) -> float:
    """Dispatch to the node score of the chosen measure."""
    if measure is Measure.BAYESIAN:
        return bayes_node_score(c)
    return mdl_node_score(c)


def parameter_count(structure: NetworkStructure) -> int:
    """Number of independent probabilities needed for all tables of the structure.

    ``sum_i (r_i - 1) * prod_{p in parents(i)} r_p``; an empty parent set
    contributes ``r_i - 1``.
    """
    total = 0
    for i in range(structure.n):
        total += (structure.arity(i) - 1) * structure.parent_config_count(i)
    return total


def _check_schema(db: Database, structure: NetworkStructure) -> None:
    if db.variables != structure.variables:
        raise SchemaMismatchError("database and structure declare different variables")


def network_score(db: Database, structure: NetworkStructure, measure: Measure) -> float:
    """Whole-network score: the sum of per-variable node scores."""
    _check_schema(db, structure)
    return sum(
        node_score(count(db, i, structure.parents[i]), measure)
        for i in range(structure.n)
    )
