"""Divergence and structural comparison of learned vs. reference networks,
plus the grid experiment harness that aggregates divergences over many
generated networks and database sizes."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from . import datagen, search
from .errors import ParseError, SchemaError, SchemaMismatchError, SupportError
from .estimation import direct_estimate
from .model import BayesNet, NetworkStructure, joint_table, topological_order
from .scoring import Measure
from .stats import Database, count

ALGORITHMS = ("k2", "b")
ESTIMATORS = ("direct", "weighted")


def kl_divergence(gold: BayesNet, learned: BayesNet) -> float:
    """Divergence sum_u P(u) * log2(P(u) / Phat(u)) over the full joint.

    Requires matching variable lists.  Zero-probability assignments of the
    reference contribute nothing; a reference-positive assignment with zero
    estimated probability raises SupportError.
    """
    if gold.structure.variables != learned.structure.variables:
        raise SchemaMismatchError("networks declare different variables")
    p = joint_table(gold)
    q = joint_table(learned)
    mask = p > 0.0
    if np.any(q[mask] == 0.0):
        raise SupportError("estimated distribution has zero mass on the reference support")
    return float((p[mask] * np.log2(p[mask] / q[mask])).sum())


@dataclass(frozen=True)
class StructuralDiff:
    """Arc and skeleton-edge disagreement counts between two structures."""

    extra_arcs: int
    missing_arcs: int
    extra_edges: int
    missing_edges: int


def structural_diff(gold: NetworkStructure, learned: NetworkStructure) -> StructuralDiff:
    """Count misplaced arcs, and misplaced edges in the undirected skeletons."""
    if gold.variables != learned.variables:
        raise SchemaMismatchError("structures declare different variables")
    gold_arcs = set(gold.arcs())
    learned_arcs = set(learned.arcs())
    gold_edges = {frozenset(a) for a in gold_arcs}
    learned_edges = {frozenset(a) for a in learned_arcs}
    return StructuralDiff(
        extra_arcs=len(learned_arcs - gold_arcs),
        missing_arcs=len(gold_arcs - learned_arcs),
        extra_edges=len(learned_edges - gold_edges),
        missing_edges=len(gold_edges - learned_edges),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid settings for a divergence experiment."""

    n_networks: int = 10
    n_variables: int = 10
    arity: int = 2
    max_parents: int = 3
    case_counts: tuple[int, ...] = (100, 200, 300, 400, 500)
    algorithms: tuple[str, ...] = ALGORITHMS
    measures: tuple[Measure, ...] = (Measure.BAYESIAN, Measure.MDL)
    estimators: tuple[str, ...] = ESTIMATORS
    seed: int = 42
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.n_networks < 1 or self.n_variables < 1:
            raise ValueError("need at least one network and one variable")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        for e in self.estimators:
            if e not in ESTIMATORS:
                raise ValueError(f"unknown estimator {e!r}")
        if any(n < 1 for n in self.case_counts):
            raise ValueError("case counts must be positive")


CellKey = tuple[int, Measure, str, str]  # (N, measure, algorithm, estimator)


@dataclass(frozen=True)
class CellReport:
    """Aggregates for one (N, measure, algorithm, estimator) cell."""

    n_cases: int
    measure: Measure
    algorithm: str
    estimator: str
    divergences: tuple[float, ...]  # one per generated network, in network order
    mean: float
    variance: float  # population variance over the generated networks


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    cells: tuple[CellReport, ...]
    _by_key: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for cell in self.cells:
            key = (cell.n_cases, cell.measure, cell.algorithm, cell.estimator)
            self._by_key[key] = cell

    def cell(self, n_cases: int, measure: Measure, algorithm: str, estimator: str) -> CellReport:
        return self._by_key[(n_cases, measure, algorithm, estimator)]


def _gold_network(cfg: ExperimentConfig, net_index: int) -> BayesNet:
    structure = datagen.random_structure(
        cfg.n_variables,
        cfg.max_parents,
        datagen.derive_seed(cfg.seed, datagen.SEED_STRUCTURE, net_index),
        arity=cfg.arity,
    )
    return datagen.random_cpts(
        structure, datagen.derive_seed(cfg.seed, datagen.SEED_CPT, net_index)
    )


def learn_cell(
    db: Database,
    ordering: Iterable[int],
    measure: Measure,
    algorithm: str,
    estimator: str,
) -> BayesNet:
    """Run one (algorithm, measure, estimator) combination on a database."""
    ordering = tuple(ordering)
    if algorithm == "k2":
        if estimator == "weighted":
            return search.weighted_k2(db, ordering, measure)
        result = search.k2(db, ordering, measure)
    elif algorithm == "b":
        if estimator == "weighted":
            return search.weighted_b(db, measure)
        result = search.algorithm_b(db, measure)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    structure = result.structure
    cpts = [direct_estimate(count(db, i, structure.parents[i])) for i in range(structure.n)]
    return BayesNet(structure, cpts)


def _run_block(cfg: ExperimentConfig, net_index: int, n_cases: int) -> dict:
    """All cells that share one (gold network, database size) pair.

    The database is sampled once and fed to every cell, so cross-cell
    comparisons see identical data.
    """
    gold = _gold_network(cfg, net_index)
    ordering = topological_order(gold.structure)
    db = datagen.forward_sample(
        gold, n_cases, datagen.derive_seed(cfg.seed, datagen.SEED_DATABASE, net_index, n_cases)
    )
    out = {}
    for measure in cfg.measures:
        for algorithm in cfg.algorithms:
            for estimator in cfg.estimators:
                try:
                    learned = learn_cell(db, ordering, measure, algorithm, estimator)
                    key = (n_cases, measure, algorithm, estimator)
                    out[key] = kl_divergence(gold, learned)
                except Exception as exc:
                    raise type(exc)(
                        f"cell net={net_index} N={n_cases} measure={measure.value} "
                        f"algorithm={algorithm} estimator={estimator}: {exc}"
                    ) from exc
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run the full grid and aggregate per-cell divergence mean and variance.

    Fully deterministic for a given config: per-network and per-database
    seeds are derived from the base seed, and the block schedule never
    affects any result, so ``jobs > 1`` only changes the wall clock.
    """
    blocks = [(idx, n) for idx in range(cfg.n_networks) for n in cfg.case_counts]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_block_star, [(cfg, idx, n) for idx, n in blocks]))
    else:
        results = [_run_block(cfg, idx, n) for idx, n in blocks]

    values: dict[CellKey, list[float]] = {}
    for (net_index, _), block in zip(blocks, results):
        for key, div in block.items():
            values.setdefault(key, []).append(div)

    cells = []
    for n_cases in cfg.case_counts:
        for measure in cfg.measures:
            for algorithm in cfg.algorithms:
                for estimator in cfg.estimators:
                    key = (n_cases, measure, algorithm, estimator)
                    divs = values[key]
                    arr = np.asarray(divs)
                    cells.append(
                        CellReport(
                            n_cases,
                            measure,
                            algorithm,
                            estimator,
                            tuple(divs),
                            float(arr.mean()),
                            float(arr.var()),
                        )
                    )
    return ExperimentReport(cfg, tuple(cells))


def _run_block_star(args) -> dict:
    return _run_block(*args)


# ---------------------------------------------------------------------------
# Report and config files
# ---------------------------------------------------------------------------


def write_report_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("N,measure,algorithm,estimator,mean_divergence,var_divergence\n")
        for cell in report.cells:
            fh.write(
                f"{cell.n_cases},{cell.measure.value},{cell.algorithm},{cell.estimator},"
                f"{cell.mean:.17g},{cell.variance:.17g}\n"
            )


def write_raw_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("net_index,N,measure,algorithm,estimator,divergence\n")
        for cell in report.cells:
            for net_index, div in enumerate(cell.divergences):
                fh.write(
                    f"{net_index},{cell.n_cases},{cell.measure.value},{cell.algorithm},"
                    f"{cell.estimator},{div:.17g}\n"
                )


_CONFIG_FIELDS = {
    "n_networks": int,
    "n_variables": int,
    "arity": int,
    "max_parents": int,
    "case_counts": lambda v: tuple(int(x) for x in v),
    "algorithms": lambda v: tuple(str(x) for x in v),
    "measures": lambda v: tuple(Measure(str(x)) for x in v),
    "estimators": lambda v: tuple(str(x) for x in v),
    "seed": int,
    "jobs": int,
}


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file; absent fields keep defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise SchemaError("experiment config must be a JSON object")
    kwargs = {}
    for key, value in raw.items():
        if key not in _CONFIG_FIELDS:
            raise SchemaError(f"unknown config field {key!r}")
        try:
            kwargs[key] = _CONFIG_FIELDS[key](value)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad value for config field {key!r}: {exc}") from None
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def override_config(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """A copy of ``cfg`` with any non-None overrides applied."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **updates) if updates else cfg
