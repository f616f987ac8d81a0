import subprocess
import sys

import numpy as np
import pytest

from beliefnet.cli import main
from beliefnet.datagen import adversarial_db, read_database, read_network, write_database
from beliefnet.model import Variable
from beliefnet.stats import Database


PAIR_CSV = "x:2,y:2\n0,0\n0,0\n1,1\n1,1\n"


@pytest.fixture
def pair_csv(tmp_path):
    path = tmp_path / "pair.csv"
    path.write_text(PAIR_CSV)
    return path


def test_gen_net_output_reparses(tmp_path):
    out = tmp_path / "net.bn"
    assert main(["gen-net", "--nodes", "6", "--arity", "2", "--max-parents", "3",
                 "--seed", "11", "-o", str(out)]) == 0
    net = read_network(out)
    assert net.structure.n == 6


def test_sample_round_trip(tmp_path):
    net_path = tmp_path / "net.bn"
    db_path = tmp_path / "db.csv"
    assert main(["gen-net", "--nodes", "4", "--max-parents", "2",
                 "--seed", "3", "-o", str(net_path)]) == 0
    assert main(["sample", "--net", str(net_path), "-n", "25",
                 "--seed", "8", "-o", str(db_path)]) == 0
    db = read_database(db_path)
    assert db.n_cases == 25
    assert db.n_variables == 4


def test_learn_k2_pair(tmp_path, pair_csv, capsys):
    out = tmp_path / "learned.bn"
    code = main(["learn", "--data", str(pair_csv), "--algo", "k2",
                 "--measure", "mdl", "--ordering", "x,y", "-o", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "-7.000000" in printed
    net = read_network(out)
    assert net.structure.arcs() == ((0, 1),)


def test_learn_file_order(tmp_path, pair_csv):
    out = tmp_path / "learned.bn"
    assert main(["learn", "--data", str(pair_csv), "--algo", "wk2",
                 "--measure", "mdl", "--ordering", "file-order", "-o", str(out)]) == 0
    net = read_network(out)
    assert net.cpts[1].rows[0, 0] == pytest.approx(13 / 18, abs=1e-12)


def test_learn_missing_ordering_is_usage_error(tmp_path, pair_csv, capsys):
    out = tmp_path / "learned.bn"
    code = main(["learn", "--data", str(pair_csv), "--algo", "k2",
                 "--measure", "mdl", "-o", str(out)])
    assert code == 1
    assert "--ordering" in capsys.readouterr().err


def test_learn_all_algorithms(tmp_path, pair_csv):
    for algo in ("k2", "b", "wk2", "wb", "exhaustive"):
        out = tmp_path / f"{algo}.bn"
        argv = ["learn", "--data", str(pair_csv), "--algo", algo,
                "--measure", "bayes", "-o", str(out)]
        if algo in ("k2", "wk2"):
            argv += ["--ordering", "file-order"]
        assert main(argv) == 0
        read_network(out)


def test_exhaustive_guard_exit_code(tmp_path, capsys):
    vs = [Variable(f"v{i}", 2) for i in range(9)]
    db = Database(vs, np.zeros((4, 9), dtype=int))
    path = tmp_path / "nine.csv"
    write_database(db, path)
    code = main(["learn", "--data", str(path), "--algo", "exhaustive",
                 "--measure", "mdl", "-o", str(tmp_path / "out.bn")])
    assert code == 3


def test_unknown_algo_is_usage_error(tmp_path, pair_csv):
    code = main(["learn", "--data", str(pair_csv), "--algo", "magic",
                 "--measure", "mdl", "-o", str(tmp_path / "x.bn")])
    assert code == 1


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("definitely not a database\n")
    code = main(["learn", "--data", str(bad), "--algo", "b",
                 "--measure", "mdl", "-o", str(tmp_path / "x.bn")])
    assert code == 2


def test_score_command(tmp_path, pair_csv, capsys):
    out = tmp_path / "learned.bn"
    main(["learn", "--data", str(pair_csv), "--algo", "k2", "--measure", "mdl",
          "--ordering", "x,y", "-o", str(out)])
    capsys.readouterr()
    assert main(["score", "--data", str(pair_csv), "--net", str(out),
                 "--measure", "mdl"]) == 0
    assert "-7.000000" in capsys.readouterr().out


def test_eval_identity(tmp_path, capsys):
    net_path = tmp_path / "net.bn"
    main(["gen-net", "--nodes", "5", "--max-parents", "2", "--seed", "6",
          "-o", str(net_path)])
    capsys.readouterr()
    code = main(["eval", "--true", str(net_path), "--learned", str(net_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "divergence (log2): 0.000000" in out
    assert "extra_arcs: 0" in out
    assert "missing_edges: 0" in out


def test_adversarial_writes_level_one(tmp_path):
    out = tmp_path / "d1.csv"
    assert main(["adversarial", "-j", "1", "-o", str(out)]) == 0
    assert out.read_text() == "x1:2,y:2\n0,0\n1,1\n"


def test_adversarial_matches_library(tmp_path):
    out = tmp_path / "d7.csv"
    assert main(["adversarial", "-j", "7", "-o", str(out)]) == 0
    db = read_database(out)
    assert np.array_equal(db.cases, adversarial_db(7).cases)


def test_outputs_byte_identical_across_runs(tmp_path, pair_csv):
    a = tmp_path / "a.bn"
    b = tmp_path / "b.bn"
    argv = ["learn", "--data", str(pair_csv), "--algo", "wb", "--measure", "bayes"]
    assert main(argv + ["-o", str(a)]) == 0
    assert main(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_experiment_writes_reports(tmp_path, capsys):
    out_dir = tmp_path / "exp"
    code = main(["experiment", "-o", str(out_dir), "--networks", "2", "--nodes", "4",
                 "--max-parents", "2", "--cases", "20", "--algos", "k2",
                 "--measures", "mdl", "--estimators", "direct", "--seed", "9",
                 "--jobs", "1"])
    assert code == 0
    report_lines = (out_dir / "report.csv").read_text().splitlines()
    assert report_lines[0] == "N,measure,algorithm,estimator,mean_divergence,var_divergence"
    assert len(report_lines) == 2
    assert (out_dir / "raw.csv").exists()
    assert "N=20" in capsys.readouterr().out


def test_experiment_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"n_networks": 2, "n_variables": 4, "max_parents": 2, '
                   '"case_counts": [15], "algorithms": ["k2"], "measures": ["mdl"], '
                   '"estimators": ["direct"], "seed": 4}')
    out_dir = tmp_path / "exp"
    code = main(["experiment", "--config", str(cfg), "-o", str(out_dir),
                 "--cases", "25", "--jobs", "1"])
    assert code == 0
    lines = (out_dir / "report.csv").read_text().splitlines()
    assert lines[1].startswith("25,")


def test_module_entry_point(tmp_path):
    out = tmp_path / "d2.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "beliefnet.cli", "adversarial", "-j", "2", "-o", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert out.exists()
