"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 guard
violation (too many variables for exhaustive search, joint space too large).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import datagen, evaluation, search
from .errors import (
    BeliefNetError,
    SizeError,
    TooManyVariablesError,
)
from .estimation import direct_estimate
from .evaluation import ExperimentConfig, load_config, override_config
from .model import BayesNet
from .scoring import Measure, network_score
from .stats import count


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems as exit code 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _measure(text: str) -> Measure:
    return Measure(text)


def _build_parser() -> _Parser:
    parser = _Parser(prog="beliefnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-net", help="generate a random connected network")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--max-parents", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("sample", help="sample cases from a network file")
    p.add_argument("--net", required=True)
    p.add_argument("-n", "--cases", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("learn", help="learn a network from a database")
    p.add_argument("--data", required=True)
    p.add_argument("--algo", choices=["k2", "b", "wk2", "wb", "exhaustive"], required=True)
    p.add_argument("--measure", type=_measure, choices=list(Measure), required=True)
    p.add_argument("--ordering", help="comma-separated variable names, or 'file-order'")
    p.add_argument("--max-parents", type=int)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("score", help="score a network against a database")
    p.add_argument("--data", required=True)
    p.add_argument("--net", required=True)
    p.add_argument("--measure", type=_measure, choices=list(Measure), required=True)

    p = sub.add_parser("eval", help="compare a learned network against a reference")
    p.add_argument("--true", dest="true_net", required=True)
    p.add_argument("--learned", required=True)

    p = sub.add_parser("adversarial", help="write a pathological two-cases-per-level database")
    p.add_argument("-j", "--level", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("experiment", help="run a divergence experiment grid")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--networks", type=int, dest="n_networks")
    p.add_argument("--nodes", type=int, dest="n_variables")
    p.add_argument("--arity", type=int)
    p.add_argument("--max-parents", type=int, dest="max_parents")
    p.add_argument("--cases", help="comma-separated database sizes")
    p.add_argument("--algos", help="comma-separated subset of k2,b")
    p.add_argument("--measures", help="comma-separated subset of bayes,mdl")
    p.add_argument("--estimators", help="comma-separated subset of direct,weighted")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("-o", "--output", required=True, help="directory for report.csv and raw.csv")
    return parser


def _parse_ordering(text: str, db) -> tuple[int, ...]:
    if text == "file-order":
        return tuple(range(db.n_variables))
    by_name = {v.name: i for i, v in enumerate(db.variables)}
    ordering = []
    for name in text.split(","):
        name = name.strip()
        if name not in by_name:
            raise ValueError(f"unknown variable {name!r} in --ordering")
        ordering.append(by_name[name])
    if sorted(ordering) != list(range(db.n_variables)):
        raise ValueError("--ordering must list every variable exactly once")
    return tuple(ordering)


def _attach_direct_cpts(db, structure) -> BayesNet:
    cpts = [direct_estimate(count(db, i, structure.parents[i])) for i in range(structure.n)]
    return BayesNet(structure, cpts)


def _cmd_gen_net(args) -> int:
    structure = datagen.random_structure(
        args.nodes, args.max_parents, args.seed, arity=args.arity
    )
    net = datagen.random_cpts(structure, datagen.derive_seed(args.seed, datagen.SEED_CPT))
    datagen.write_network(net, args.output)
    return 0


def _cmd_sample(args) -> int:
    net = datagen.read_network(args.net)
    db = datagen.forward_sample(net, args.cases, args.seed)
    datagen.write_database(db, args.output)
    return 0


def _cmd_learn(args) -> int:
    db = datagen.read_database(args.data)
    if args.algo in ("k2", "wk2"):
        if args.ordering is None:
            raise UsageError("--ordering is required for k2 and wk2 (use 'file-order' to take the database column order)")
        ordering = _parse_ordering(args.ordering, db)

    if args.algo == "k2":
        result = search.k2(db, ordering, args.measure, args.max_parents)
        net = _attach_direct_cpts(db, result.structure)
    elif args.algo == "b":
        result = search.algorithm_b(db, args.measure, args.max_parents)
        net = _attach_direct_cpts(db, result.structure)
    elif args.algo == "exhaustive":
        result = search.exhaustive_best(db, args.measure)
        net = _attach_direct_cpts(db, result.structure)
    elif args.algo == "wk2":
        net = search.weighted_k2(db, ordering, args.measure, args.max_parents)
    else:  # wb
        net = search.weighted_b(db, args.measure, args.max_parents)

    datagen.write_network(net, args.output)
    score = network_score(db, net.structure, args.measure)
    print(f"{args.measure.value} score (log2): {score:.6f}")
    return 0


def _cmd_score(args) -> int:
    db = datagen.read_database(args.data)
    net = datagen.read_network(args.net)
    score = network_score(db, net.structure, args.measure)
    print(f"{args.measure.value} score (log2): {score:.6f}")
    return 0


def _cmd_eval(args) -> int:
    gold = datagen.read_network(args.true_net)
    learned = datagen.read_network(args.learned)
    divergence = evaluation.kl_divergence(gold, learned)
    diff = evaluation.structural_diff(gold.structure, learned.structure)
    print(f"divergence (log2): {divergence:.6f}")
    print(f"extra_arcs: {diff.extra_arcs}")
    print(f"missing_arcs: {diff.missing_arcs}")
    print(f"extra_edges: {diff.extra_edges}")
    print(f"missing_edges: {diff.missing_edges}")
    return 0


def _cmd_adversarial(args) -> int:
    db = datagen.adversarial_db(args.level)
    datagen.write_database(db, args.output)
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cases = tuple(int(x) for x in args.cases.split(",")) if args.cases else None
    algos = tuple(args.algos.split(",")) if args.algos else None
    measures = tuple(Measure(m) for m in args.measures.split(",")) if args.measures else None
    estimators = tuple(args.estimators.split(",")) if args.estimators else None
    cfg = override_config(
        cfg,
        n_networks=args.n_networks,
        n_variables=args.n_variables,
        arity=args.arity,
        max_parents=args.max_parents,
        case_counts=cases,
        algorithms=algos,
        measures=measures,
        estimators=estimators,
        seed=args.seed,
        jobs=args.jobs,
    )
    report = evaluation.run_experiment(cfg)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    evaluation.write_report_csv(report, out / "report.csv")
    evaluation.write_raw_csv(report, out / "raw.csv")
    for cell in report.cells:
        print(
            f"N={cell.n_cases} measure={cell.measure.value} algo={cell.algorithm} "
            f"est={cell.estimator} mean={cell.mean:.6f} var={cell.variance:.6f}"
        )
    return 0


_COMMANDS = {
    "gen-net": _cmd_gen_net,
    "sample": _cmd_sample,
    "learn": _cmd_learn,
    "score": _cmd_score,
    "eval": _cmd_eval,
    "adversarial": _cmd_adversarial,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (TooManyVariablesError, SizeError) as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return 3
    except (BeliefNetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
