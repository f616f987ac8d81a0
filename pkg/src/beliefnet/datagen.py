"""Gold-standard generation, forward sampling, adversarial databases, file I/O.

All generators are pure functions of a 64-bit seed, driven by numpy's
default PCG64 bit generator, so identical seeds reproduce identical output
on every platform.  Derived seeds for sub-tasks come from
:func:`derive_seed`, which feeds the base seed and integer tags through
numpy's documented SeedSequence mixing.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError, SchemaError
from .model import BayesNet, Cpt, NetworkStructure, Variable, topological_order
from .stats import Database

#: Lowest probability a generated table entry may take.  Keeps divergences
#: against generated networks finite.
CPT_FLOOR = 0.01

# Tag values for derive_seed, one per generation purpose.
SEED_STRUCTURE = 1
SEED_CPT = 2
SEED_DATABASE = 3


def derive_seed(base: int, *tags: int) -> int:
    """Mix a base seed and integer tags into a fresh 64-bit seed."""
    state = np.random.SeedSequence([int(base), *(int(t) for t in tags)]).generate_state(2)
    return int(state[0]) | (int(state[1]) << 32)


def random_structure(n: int, max_parents: int, seed: int, arity: int = 2) -> NetworkStructure:
    """A random acyclic, weakly connected structure over ``n`` variables.

    Draws a uniform random ordering, then gives each non-root node each of
    its ordering-predecessors as a parent independently with probability
    ``min(1, 2 / (n - 1))``, truncated to ``max_parents``; finally links any
    disconnected component to an earlier-ordered node, which costs that
    component's first node exactly one parent.
    """
    if n < 1:
        raise ValueError("need at least one variable")
    if max_parents < 1:
        raise ValueError("max_parents must be at least 1")
    rng = np.random.default_rng(seed)
    variables = [Variable(f"v{i}", arity) for i in range(n)]
    if n == 1:
        return NetworkStructure(variables, [frozenset()])

    order = [int(v) for v in rng.permutation(n)]
    position = {node: pos for pos, node in enumerate(order)}
    p_arc = min(1.0, 2.0 / (n - 1))
    parents: list[set[int]] = [set() for _ in range(n)]
    for pos in range(1, n):
        child = order[pos]
        draws = rng.random(pos)
        chosen = [order[t] for t in range(pos) if draws[t] < p_arc]
        parents[child] = set(chosen[:max_parents])

    # Union-find over the undirected skeleton to locate components.
    root = list(range(n))

    def find(a: int) -> int:
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    for child in range(n):
        for par in parents[child]:
            root[find(child)] = find(par)

    components: dict[int, list[int]] = {}
    for node in range(n):
        components.setdefault(find(node), []).append(node)
    # Components keyed by the ordering position of their earliest node; the
    # one holding the ordering root comes first and needs no link.
    keyed = sorted(components.values(), key=lambda ns: min(position[v] for v in ns))
    for comp in keyed[1:]:
        entry = min(comp, key=lambda v: position[v])
        pick = int(rng.integers(0, position[entry]))
        parents[entry].add(order[pick])
    return NetworkStructure(variables, parents)


def _floor_row(row: np.ndarray, floor: float) -> np.ndarray:
    """Renormalize a nonnegative row to sum 1 with every entry >= floor.

    Entries that would fall below the floor are pinned at it and the leftover
    mass is spread over the rest proportionally, repeating until stable.
    """
    r = len(row)
    if floor * r > 1.0:
        raise ValueError("floor too large for this arity")
    pinned = np.zeros(r, dtype=bool)
    out = np.empty(r)
    for _ in range(r):
        free = ~pinned
        leftover = 1.0 - floor * pinned.sum()
        total = row[free].sum()
        if total <= 0.0:
            out[free] = leftover / free.sum()
        else:
            out[free] = row[free] * (leftover / total)
        out[pinned] = floor
        sinking = free & (out < floor)
        if not sinking.any():
            return out
        pinned |= sinking
    return np.full(r, 1.0 / r)


def random_cpts(structure: NetworkStructure, seed: int) -> BayesNet:
    """Attach random tables to a structure.

    Each row normalizes independent uniform draws, then is floored at
    CPT_FLOOR so every entry stays strictly positive.
    """
    rng = np.random.default_rng(seed)
    cpts = []
    for i in range(structure.n):
        q = structure.parent_config_count(i)
        r = structure.arity(i)
        rows = np.empty((q, r))
        for j in range(q):
            draws = rng.random(r)
            rows[j] = _floor_row(draws, CPT_FLOOR)
        cpts.append(Cpt(rows))
    return BayesNet(structure, cpts)


def forward_sample(net: BayesNet, n_cases: int, seed: int) -> Database:
    """Sample complete cases from a network by ancestral simulation."""
    rng = np.random.default_rng(seed)
    structure = net.structure
    n = structure.n
    out = np.zeros((n_cases, n), dtype=np.int64)
    for i in topological_order(structure):
        config = np.zeros(n_cases, dtype=np.int64)
        for p in structure.sorted_parents(i):
            config = config * structure.arity(p) + out[:, p]
        cum = np.cumsum(net.cpts[i].rows, axis=1)[config]
        u = rng.random(n_cases)
        # Number of cumulative thresholds below u = sampled value index.
        out[:, i] = np.minimum((u[:, None] >= cum).sum(axis=1), structure.arity(i) - 1)
    return Database(structure.variables, out)


def adversarial_db(j: int) -> Database:
    """The recursive two-cases-per-level database over x_1..x_j and y.

    Level 1 contributes the cases (x_1=0, y=0) and (x_1=1, y=1); every later
    level ``m`` fills the new column x_m with 1 in all earlier cases and adds
    two identical cases that are all-zero on the x's with y = (m+1) mod 2.
    Rows are ordered newest level first.
    """
    if j < 1:
        raise ValueError("level must be at least 1")
    variables = [Variable(f"x{t}", 2) for t in range(1, j + 1)] + [Variable("y", 2)]
    rows = []
    for level in range(j, 1, -1):
        case = [0] * (j + 1)
        for t in range(level, j):  # columns x_{level+1}..x_j were filled with 1s
            case[t] = 1
        case[j] = (level + 1) % 2
        rows.append(list(case))
        rows.append(list(case))
    first = [0] + [1] * (j - 1) + [0]
    second = [1] * j + [1]
    rows.append(first)
    rows.append(second)
    return Database(variables, rows)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

_NETWORK_MAGIC = "bn 1"


def write_database(db: Database, path) -> None:
    """Comma-separated text: a ``name:arity`` header, then one case per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"{v.name}:{v.arity}" for v in db.variables) + "\n")
        for case in db.cases:
            fh.write(",".join(str(int(x)) for x in case) + "\n")


def read_database(path) -> Database:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("missing header line", line=1)
    variables = []
    for token in lines[0].split(","):
        name, sep, arity_text = token.strip().partition(":")
        if not sep:
            raise ParseError(f"header token {token!r} is not name:arity", line=1)
        try:
            arity = int(arity_text)
        except ValueError:
            raise ParseError(f"bad arity in header token {token!r}", line=1) from None
        try:
            variables.append(Variable(name, arity))
        except ValueError as exc:
            raise SchemaError(str(exc)) from None
    cases = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(variables):
            raise ParseError(
                f"expected {len(variables)} values, got {len(fields)}", line=lineno
            )
        try:
            case = [int(f) for f in fields]
        except ValueError:
            raise ParseError("case values must be integers", line=lineno) from None
        for value, var in zip(case, variables):
            if not 0 <= value < var.arity:
                raise SchemaError(
                    f"line {lineno}: value {value} out of range for {var.name!r}"
                )
        cases.append(case)
    return Database(variables, cases)


def write_network(net: BayesNet, path) -> None:
    """Line-oriented text: version line, then var / parents / cpt directives.

    Probabilities are written with 17 significant digits, enough to
    round-trip doubles exactly.
    """
    structure = net.structure
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_NETWORK_MAGIC + "\n")
        for v in structure.variables:
            fh.write(f"var {v.name} {v.arity}\n")
        for i, v in enumerate(structure.variables):
            names = " ".join(structure.variables[p].name for p in structure.sorted_parents(i))
            fh.write(f"parents {v.name}{' ' + names if names else ''}\n")
        for i, v in enumerate(structure.variables):
            for j, row in enumerate(net.cpts[i].rows):
                probs = " ".join(f"{p:.17g}" for p in row)
                fh.write(f"cpt {v.name} {j} {probs}\n")


def read_network(path) -> BayesNet:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != _NETWORK_MAGIC:
        raise ParseError(f"first line must be {_NETWORK_MAGIC!r}", line=1)

    variables: list[Variable] = []
    index: dict[str, int] = {}
    parent_lines: dict[int, list[int]] = {}
    cpt_rows: dict[int, dict[int, list[float]]] = {}

    def var_index(name: str, lineno: int) -> int:
        if name not in index:
            raise ParseError(f"unknown variable {name!r}", line=lineno)
        return index[name]

    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        directive = fields[0]
        if directive == "var":
            if len(fields) != 3:
                raise ParseError("var takes a name and an arity", line=lineno)
            name = fields[1]
            try:
                arity = int(fields[2])
            except ValueError:
                raise ParseError("arity must be an integer", line=lineno) from None
            if name in index:
                raise SchemaError(f"line {lineno}: duplicate variable {name!r}")
            try:
                variables.append(Variable(name, arity))
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from None
            index[name] = len(variables) - 1
        elif directive == "parents":
            if len(fields) < 2:
                raise ParseError("parents needs a variable name", line=lineno)
            i = var_index(fields[1], lineno)
            if i in parent_lines:
                raise SchemaError(f"line {lineno}: duplicate parents for {fields[1]!r}")
            parent_lines[i] = [var_index(nm, lineno) for nm in fields[2:]]
        elif directive == "cpt":
            if len(fields) < 4:
                raise ParseError("cpt needs a name, a row index and probabilities", line=lineno)
            i = var_index(fields[1], lineno)
            try:
                j = int(fields[2])
            except ValueError:
                raise ParseError("cpt row index must be an integer", line=lineno) from None
            try:
                probs = [float(p) for p in fields[3:]]
            except ValueError:
                raise ParseError("cpt probabilities must be numbers", line=lineno) from None
            if len(probs) != variables[i].arity:
                raise SchemaError(
                    f"line {lineno}: cpt row for {fields[1]!r} has {len(probs)} entries, "
                    f"expected {variables[i].arity}"
                )
            cpt_rows.setdefault(i, {})
            if j in cpt_rows[i]:
                raise SchemaError(f"line {lineno}: duplicate cpt row {j} for {fields[1]!r}")
            cpt_rows[i][j] = probs
        else:
            raise ParseError(f"unknown directive {directive!r}", line=lineno)

    if not variables:
        raise SchemaError("network file declares no variables")
    n = len(variables)
    for i in range(n):
        if i not in parent_lines:
            raise SchemaError(f"missing parents line for {variables[i].name!r}")
    try:
        structure = NetworkStructure(variables, [frozenset(parent_lines[i]) for i in range(n)])
    except ValueError as exc:
        raise SchemaError(str(exc)) from None

    cpts = []
    for i in range(n):
        q = structure.parent_config_count(i)
        rows_map = cpt_rows.get(i, {})
        if sorted(rows_map) != list(range(q)):
            raise SchemaError(
                f"variable {variables[i].name!r} needs cpt rows 0..{q - 1}, "
                f"got {sorted(rows_map)}"
            )
        rows = np.array([rows_map[j] for j in range(q)])
        try:
            cpts.append(Cpt(rows))
        except ValueError as exc:
            raise SchemaError(f"variable {variables[i].name!r}: {exc}") from None
    return BayesNet(structure, cpts)
