"""Score-based structure and parameter learning for discrete belief networks."""

from .errors import (
    BeliefNetError,
    CycleError,
    DisjointnessError,
    EmptyFamilyError,
    ParseError,
    SchemaError,
    SchemaMismatchError,
    SelfParentError,
    SizeError,
    SupportError,
    TooManyVariablesError,
    ZeroCasesError,
)
from .model import (
    BayesNet,
    Cpt,
    NetworkStructure,
    Variable,
    all_assignments,
    d_separated,
    joint_probability,
    joint_table,
    parent_config_index,
    topological_order,
)
from .stats import CountTable, Database, count
from .scoring import (
    Measure,
    bayes_node_score,
    mdl_node_score,
    network_score,
    node_score,
    parameter_count,
)
from .estimation import (
    ParentSetEntry,
    WeightedParentSetFamily,
    direct_estimate,
    weighted_estimate,
)
from .search import (
    ArcAddition,
    SearchResult,
    algorithm_b,
    exhaustive_best,
    k2,
    weighted_b,
    weighted_k2,
)
from .datagen import (
    adversarial_db,
    derive_seed,
    forward_sample,
    random_cpts,
    random_structure,
    read_database,
    read_network,
    write_database,
    write_network,
)
from .evaluation import (
    CellReport,
    ExperimentConfig,
    ExperimentReport,
    StructuralDiff,
    kl_divergence,
    run_experiment,
    structural_diff,
)

__version__ = "0.1.0"

__all__ = [
    "ArcAddition",
    "BayesNet",
    "BeliefNetError",
    "CellReport",
    "CountTable",
    "Cpt",
    "CycleError",
    "Database",
    "DisjointnessError",
    "EmptyFamilyError",
    "ExperimentConfig",
    "ExperimentReport",
    "Measure",
    "NetworkStructure",
    "ParentSetEntry",
    "ParseError",
    "SchemaError",
    "SchemaMismatchError",
    "SearchResult",
    "SelfParentError",
    "SizeError",
    "StructuralDiff",
    "SupportError",
    "TooManyVariablesError",
    "Variable",
    "WeightedParentSetFamily",
    "ZeroCasesError",
    "adversarial_db",
    "algorithm_b",
    "all_assignments",
    "bayes_node_score",
    "count",
    "d_separated",
    "derive_seed",
    "direct_estimate",
    "exhaustive_best",
    "forward_sample",
    "joint_probability",
    "joint_table",
    "k2",
    "kl_divergence",
    "mdl_node_score",
    "network_score",
    "node_score",
    "parameter_count",
    "parent_config_index",
    "random_cpts",
    "random_structure",
    "read_database",
    "read_network",
    "run_experiment",
    "structural_diff",
    "topological_order",
    "weighted_b",
    "weighted_estimate",
    "weighted_k2",
    "write_database",
    "write_network",
]
