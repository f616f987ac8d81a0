"""Structure search: greedy parent growth, greedy arc addition, and an exact oracle.

All searches share one memoizing node-score cache per call, so the number of
actual score evaluations stays within the expected bounds (at most on the
order of n^2 * u for the greedy searches, u being the largest parent-set
size, and n * 2^(n-1) for the exhaustive oracle).  Parent sets are handled
as bitmasks internally.

Every tie is broken deterministically: candidate parents by lowest variable
index, arc choices by smallest child then smallest parent index, orderings
lexicographically, and equal-scoring parent sets by size then sorted indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import NamedTuple, Sequence

import numpy as np

from .errors import TooManyVariablesError, ZeroCasesError
from .estimation import ParentSetEntry, WeightedParentSetFamily, weighted_estimate
from .model import BayesNet, NetworkStructure
from .scoring import Measure, node_score
from .stats import Database, count

#: Exhaustive search refuses more variables than this.
EXHAUSTIVE_LIMIT = 8

Ordering = Sequence[int]


class ArcAddition(NamedTuple):
    """One accepted arc (parent -> child) and the score gain it delivered."""

    parent: int
    child: int
    delta: float


@dataclass(frozen=True)
class SearchResult:
    """A searched structure, its score, the addition trace, and the number
    of distinct node-score evaluations the search performed."""

    structure: NetworkStructure
    score: float
    trace: tuple[ArcAddition, ...]
    evaluations: int


class _ScoreCache:
    """Memoizes node scores per (variable, parent bitmask) and counts misses."""

    def __init__(self, db: Database, measure: Measure):
        self._db = db
        self._measure = measure
        self._memo: dict[tuple[int, int], float] = {}
        self.evaluations = 0

    def score(self, i: int, mask: int) -> float:
        key = (i, mask)
        found = self._memo.get(key)
        if found is None:
            found = node_score(count(self._db, i, _bits(mask)), self._measure)
            self._memo[key] = found
            self.evaluations += 1
        return found


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _check_ordering(db: Database, ordering: Ordering) -> tuple[int, ...]:
    ordering = tuple(ordering)
    if sorted(ordering) != list(range(db.n_variables)):
        raise ValueError(f"ordering must be a permutation of 0..{db.n_variables - 1}")
    return ordering


def _require_cases(db: Database) -> None:
    if db.n_cases == 0:
        raise ZeroCasesError("structure search needs at least one case")


def _structure_from_masks(db: Database, masks: Sequence[int]) -> NetworkStructure:
    return NetworkStructure(db.variables, [frozenset(_bits(m)) for m in masks])


def _k2_schedule(
    db: Database,
    ordering: tuple[int, ...],
    measure: Measure,
    max_parents: int | None,
) -> tuple[list[int], list[list[tuple[int, float]]], list[ArcAddition], _ScoreCache]:
    """Greedy per-node parent growth along a fixed ordering.

    Returns final parent masks, the per-variable chain of accepted parent
    sets (starting at the empty set) with their scores, the arc trace, and
    the score cache.
    """
    cache = _ScoreCache(db, measure)
    n = db.n_variables
    masks = [0] * n
    chains: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    trace: list[ArcAddition] = []
    cap = n if max_parents is None else max_parents

    for pos, child in enumerate(ordering):
        current = 0
        current_score = cache.score(child, 0)
        chains[child].append((0, current_score))
        candidates = sorted(ordering[:pos])
        while len(chains[child]) - 1 < cap:
            best_gain = None
            best_y = None
            for y in candidates:
                if current & (1 << y):
                    continue
                g = cache.score(child, current | (1 << y))
                if best_gain is None or g > best_gain:
                    best_gain, best_y = g, y
            if best_y is None:
                break
            delta = best_gain - current_score
            if delta <= 0:
                break
            current |= 1 << best_y
            current_score = best_gain
            chains[child].append((current, current_score))
            trace.append(ArcAddition(best_y, child, delta))
        masks[child] = current
    return masks, chains, trace, cache


def k2(
    db: Database,
    ordering: Ordering,
    measure: Measure,
    max_parents: int | None = None,
) -> SearchResult:
    """Greedy parent selection under a fixed variable ordering.

    For each variable in ordering position i, grows its parent set from the
    empty set, at every step adding the ordering-predecessor that maximizes
    the node score, and stopping as soon as the best addition no longer
    improves it (or the predecessor pool or the optional cap is exhausted).
    """
    ordering = _check_ordering(db, ordering)
    _require_cases(db)
    masks, _, trace, cache = _k2_schedule(db, ordering, measure, max_parents)
    structure = _structure_from_masks(db, masks)
    score = sum(cache.score(i, masks[i]) for i in range(db.n_variables))
    return SearchResult(structure, score, tuple(trace), cache.evaluations)


def weighted_k2(
    db: Database,
    ordering: Ordering,
    measure: Measure,
    max_parents: int | None = None,
) -> BayesNet:
    """K2's arc schedule plus score-weighted mixing of the table estimates.

    The structure is exactly the one ``k2`` returns.  Each variable's table
    is the weighted mixture of the direct estimates of every parent set that
    arose during its greedy growth (the empty set included), weighted by two
    to the power of each parent set's node score.
    """
    ordering = _check_ordering(db, ordering)
    _require_cases(db)
    masks, chains, _, _ = _k2_schedule(db, ordering, measure, max_parents)
    structure = _structure_from_masks(db, masks)
    return BayesNet(structure, _mix_chains(db, chains))


def _mix_chains(db: Database, chains: list[list[tuple[int, float]]]) -> list:
    cpts = []
    for i, chain in enumerate(chains):
        entries = tuple(
            ParentSetEntry(frozenset(_bits(mask)), score, count(db, i, _bits(mask)))
            for mask, score in chain
        )
        family = WeightedParentSetFamily(db.variables, i, entries)
        cpts.append(weighted_estimate(family))
    return cpts


def _reachable(adjacency: list[set[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nxt in adjacency[node]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def _b_schedule(
    db: Database,
    measure: Measure,
    max_parents: int | None,
    debug_invariants: bool,
) -> tuple[list[int], list[list[tuple[int, float]]], list[ArcAddition], _ScoreCache]:
    """Ordering-free greedy arc addition with a global gain matrix.

    ``A[i, j]`` holds the gain of adding the arc x_j -> x_i, or -inf once the
    pair is obstructed.  After each accepted arc the matrix is obstructed on
    the full (ancestors-and-self) x (descendants-and-self) rectangle of the
    child, which keeps every remaining candidate acyclic, and the child's row
    is refreshed against its new parent set.
    """
    cache = _ScoreCache(db, measure)
    n = db.n_variables
    masks = [0] * n
    chains: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    trace: list[ArcAddition] = []
    cap = n if max_parents is None else max_parents

    empty_scores = [cache.score(i, 0) for i in range(n)]
    for i in range(n):
        chains[i].append((0, empty_scores[i]))

    A = np.full((n, n), -np.inf)
    for i in range(n):
        for j in range(n):
            if i != j:
                A[i, j] = cache.score(i, 1 << j) - empty_scores[i]

    children: list[set[int]] = [set() for _ in range(n)]
    parents_adj: list[set[int]] = [set() for _ in range(n)]

    while True:
        if debug_invariants:
            _assert_delta_matrix(A, masks, cache)
        flat = int(np.argmax(A))  # first maximum in row-major order: smallest i, then j
        i, j = divmod(flat, n)
        if not A[i, j] > 0.0:
            break
        old_score = cache.score(i, masks[i])
        masks[i] |= 1 << j
        new_score = cache.score(i, masks[i])
        chains[i].append((masks[i], new_score))
        trace.append(ArcAddition(j, i, new_score - old_score))
        children[j].add(i)
        parents_adj[i].add(j)

        ancestors = _reachable(parents_adj, i)  # includes i
        descendants = _reachable(children, i)  # includes i
        A[np.ix_(sorted(ancestors), sorted(descendants))] = -np.inf
        if len(chains[i]) - 1 >= cap:
            A[i, :] = -np.inf
        else:
            for k in range(n):
                if A[i, k] > -np.inf:
                    A[i, k] = cache.score(i, masks[i] | (1 << k)) - new_score
    return masks, chains, trace, cache


def _assert_delta_matrix(A: np.ndarray, masks: Sequence[int], cache: _ScoreCache) -> None:
    n = A.shape[0]
    for i in range(n):
        for j in range(n):
            if A[i, j] == -np.inf:
                continue
            expected = cache.score(i, masks[i] | (1 << j)) - cache.score(i, masks[i])
            assert abs(A[i, j] - expected) < 1e-9, (i, j, A[i, j], expected)


def algorithm_b(
    db: Database,
    measure: Measure,
    max_parents: int | None = None,
    debug_invariants: bool = False,
) -> SearchResult:
    """Greedy arc addition without a variable ordering.

    Starts from the arcless structure and repeatedly adds the globally
    best-gain arc until no addition improves the score or every candidate is
    obstructed.  The result is always acyclic.
    """
    _require_cases(db)
    masks, _, trace, cache = _b_schedule(db, measure, max_parents, debug_invariants)
    structure = _structure_from_masks(db, masks)
    score = sum(cache.score(i, masks[i]) for i in range(db.n_variables))
    return SearchResult(structure, score, tuple(trace), cache.evaluations)


def weighted_b(
    db: Database,
    measure: Measure,
    max_parents: int | None = None,
) -> BayesNet:
    """Greedy arc addition plus the same table mixing as ``weighted_k2``.

    The structure is exactly the one ``algorithm_b`` returns.
    """
    _require_cases(db)
    masks, chains, _, _ = _b_schedule(db, measure, max_parents, False)
    structure = _structure_from_masks(db, masks)
    return BayesNet(structure, _mix_chains(db, chains))


def _mask_key(mask: int) -> tuple[int, tuple[int, ...]]:
    bits = tuple(_bits(mask))
    return (len(bits), bits)


def exhaustive_best(db: Database, measure: Measure) -> SearchResult:
    """Globally optimal structure by ordering decomposition.

    Scores decompose over variables and every DAG obeys some ordering, so the
    optimum is found by, for every ordering, giving each variable the best
    subset of its predecessors, then taking the best ordering.  Node scores
    are memoized per (variable, parent set), so at most n * 2^(n-1) are ever
    evaluated; per (variable, predecessor set) the best subset is tabulated
    once and shared by all orderings.

    Ties prefer the lexicographically smallest ordering, then smaller parent
    sets (by size, then sorted indices).
    """
    _require_cases(db)
    n = db.n_variables
    if n > EXHAUSTIVE_LIMIT:
        raise TooManyVariablesError(
            f"exhaustive search supports at most {EXHAUSTIVE_LIMIT} variables, got {n}"
        )
    cache = _ScoreCache(db, measure)

    # best_score[i][S], best_mask[i][S]: optimum over parent sets P <= S,
    # for every candidate set S not containing i.  Submasks of S are strictly
    # smaller integers, so ascending mask order is a valid evaluation order.
    size = 1 << n
    best_score = [[0.0] * size for _ in range(n)]
    best_mask = [[0] * size for _ in range(n)]
    for i in range(n):
        own_bit = 1 << i
        for s in range(size):
            if s & own_bit:
                continue
            top_score = cache.score(i, s)
            top_mask = s
            rest = s
            while rest:
                low = rest & -rest
                rest ^= low
                sub = s ^ low
                cand_score = best_score[i][sub]
                cand_mask = best_mask[i][sub]
                if cand_score > top_score or (
                    cand_score == top_score and _mask_key(cand_mask) < _mask_key(top_mask)
                ):
                    top_score, top_mask = cand_score, cand_mask
            best_score[i][s] = top_score
            best_mask[i][s] = top_mask

    best_total = None
    best_masks: list[int] | None = None
    for ordering in permutations(range(n)):
        total = 0.0
        pred = 0
        masks = []
        for child in ordering:
            total += best_score[child][pred]
            masks.append(best_mask[child][pred])
            pred |= 1 << child
        if best_total is None or total > best_total:
            best_total = total
            best_masks = [0] * n
            for child, mask in zip(ordering, masks):
                best_masks[child] = mask

    assert best_masks is not None
    structure = _structure_from_masks(db, best_masks)
    score = sum(cache.score(i, best_masks[i]) for i in range(n))
    return SearchResult(structure, score, (), cache.evaluations)
