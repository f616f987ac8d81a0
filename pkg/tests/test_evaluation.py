import numpy as np
import pytest

from beliefnet.datagen import random_cpts, random_structure
from beliefnet.errors import SchemaMismatchError, SizeError, SupportError
from beliefnet.evaluation import (
    ExperimentConfig,
    StructuralDiff,
    kl_divergence,
    load_config,
    run_experiment,
    structural_diff,
    write_raw_csv,
    write_report_csv,
)
from beliefnet.errors import ParseError, SchemaError
from beliefnet.model import BayesNet, Cpt, NetworkStructure, Variable
from beliefnet.scoring import Measure


def binvars(n):
    return [Variable(f"v{i}", 2) for i in range(n)]


def single_var_net(p0):
    st = NetworkStructure([Variable("a", 2)], [set()])
    return BayesNet(st, [Cpt([[p0, 1.0 - p0]])])


class TestKlDivergence:
    def test_identity_is_zero(self):
        for seed in range(10):
            net = random_cpts(random_structure(4, 3, seed), seed + 100)
            assert kl_divergence(net, net) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value(self):
        got = kl_divergence(single_var_net(0.5), single_var_net(0.75))
        expected = 0.5 * np.log2(0.5 / 0.75) + 0.5 * np.log2(0.5 / 0.25)
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(0.2075, abs=1e-4)

    def test_nonnegative(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            st = random_structure(4, 3, int(rng.integers(2**32)))
            a = random_cpts(st, int(rng.integers(2**32)))
            b = random_cpts(st, int(rng.integers(2**32)))
            assert kl_divergence(a, b) >= -1e-12

    def test_support_error(self):
        with pytest.raises(SupportError):
            kl_divergence(single_var_net(0.5), single_var_net(0.0))

    def test_zero_reference_mass_ignored(self):
        assert kl_divergence(single_var_net(0.0), single_var_net(0.5)) == pytest.approx(1.0)

    def test_schema_mismatch(self):
        other = BayesNet(
            NetworkStructure([Variable("b", 2)], [set()]), [Cpt([[0.5, 0.5]])]
        )
        with pytest.raises(SchemaMismatchError):
            kl_divergence(single_var_net(0.5), other)

    def test_size_guard(self):
        n = 23
        st = NetworkStructure(binvars(n), [set()] * n)
        net = BayesNet(st, [Cpt([[0.5, 0.5]])] * n)
        with pytest.raises(SizeError):
            kl_divergence(net, net)


class TestStructuralDiff:
    def test_identical(self):
        st = NetworkStructure(binvars(3), [set(), {0}, {1}])
        assert structural_diff(st, st) == StructuralDiff(0, 0, 0, 0)

    def test_reversed_arc_keeps_skeleton(self):
        gold = NetworkStructure(binvars(2), [set(), {0}])
        learned = NetworkStructure(binvars(2), [{1}, set()])
        assert structural_diff(gold, learned) == StructuralDiff(1, 1, 0, 0)

    def test_missing_arc(self):
        gold = NetworkStructure(binvars(2), [set(), {0}])
        learned = NetworkStructure(binvars(2), [set(), set()])
        assert structural_diff(gold, learned) == StructuralDiff(0, 1, 0, 1)

    def test_edge_errors_never_exceed_arc_errors(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            a = random_structure(5, 3, int(rng.integers(2**32)))
            b = random_structure(5, 3, int(rng.integers(2**32)))
            d = structural_diff(a, b)
            assert d.extra_edges <= d.extra_arcs
            assert d.missing_edges <= d.missing_arcs


def tiny_config(**overrides):
    base = dict(
        n_networks=2,
        n_variables=4,
        arity=2,
        max_parents=2,
        case_counts=(30,),
        algorithms=("k2",),
        measures=(Measure.MDL,),
        estimators=("direct",),
        seed=5,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestRunExperiment:
    def test_single_cell_single_network(self):
        report = run_experiment(tiny_config(n_networks=1))
        assert len(report.cells) == 1
        cell = report.cells[0]
        assert cell.variance == 0.0
        assert len(cell.divergences) == 1

    def test_deterministic(self):
        a = run_experiment(tiny_config())
        b = run_experiment(tiny_config())
        assert a == b

    def test_parallel_matches_serial(self):
        serial = run_experiment(tiny_config())
        parallel = run_experiment(tiny_config(jobs=2))
        for c1, c2 in zip(serial.cells, parallel.cells):
            assert c1.divergences == c2.divergences

    def test_aggregates_match_raw_values(self):
        cfg = tiny_config(
            n_networks=3,
            algorithms=("k2", "b"),
            measures=(Measure.BAYESIAN, Measure.MDL),
            estimators=("direct", "weighted"),
            case_counts=(20, 40),
        )
        report = run_experiment(cfg)
        assert len(report.cells) == 2 * 2 * 2 * 2
        for cell in report.cells:
            values = np.asarray(cell.divergences)
            assert len(values) == 3
            assert cell.mean == pytest.approx(values.mean(), abs=1e-12)
            assert cell.variance == pytest.approx(values.var(), abs=1e-12)
            assert np.isfinite(values).all()

    def test_cell_lookup(self):
        report = run_experiment(tiny_config())
        cell = report.cell(30, Measure.MDL, "k2", "direct")
        assert cell.n_cases == 30

    def test_cell_failure_names_the_cell(self, monkeypatch):
        import beliefnet.evaluation as evaluation

        def explode(*args, **kwargs):
            raise ValueError("boom")

        monkeypatch.setattr(evaluation, "learn_cell", explode)
        with pytest.raises(ValueError, match=r"net=0 N=30 measure=mdl algorithm=k2"):
            run_experiment(tiny_config())


class TestReportFiles:
    def test_csv_layout(self, tmp_path):
        report = run_experiment(tiny_config())
        report_path = tmp_path / "report.csv"
        raw_path = tmp_path / "raw.csv"
        write_report_csv(report, report_path)
        write_raw_csv(report, raw_path)
        lines = report_path.read_text().splitlines()
        assert lines[0] == "N,measure,algorithm,estimator,mean_divergence,var_divergence"
        assert len(lines) == 2
        assert lines[1].startswith("30,mdl,k2,direct,")
        raw_lines = raw_path.read_text().splitlines()
        assert raw_lines[0] == "net_index,N,measure,algorithm,estimator,divergence"
        assert len(raw_lines) == 3  # two networks


class TestConfigFile:
    def test_load_valid(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(
            '{"n_networks": 3, "case_counts": [10, 20], "measures": ["mdl"], "seed": 7}'
        )
        cfg = load_config(path)
        assert cfg.n_networks == 3
        assert cfg.case_counts == (10, 20)
        assert cfg.measures == (Measure.MDL,)
        assert cfg.arity == 2  # default preserved

    def test_unknown_field(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"bogus": 1}')
        with pytest.raises(SchemaError):
            load_config(path)

    def test_bad_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_config(path)
