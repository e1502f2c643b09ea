import json
from pathlib import Path

import pytest

from seedwalk.cli import main

from conftest import FIG_EDGES, FIG_SEEDS

PATH_EDGES = "s v1\nv1 v2\nv2 v3\nv3 t\n"
PATH_SEEDS = "s 0 1\nt 0 0\n"


@pytest.fixture
def fig_files(tmp_path):
    edges = tmp_path / "fig.edges"
    seeds = tmp_path / "fig.seeds"
    edges.write_text(FIG_EDGES)
    seeds.write_text(FIG_SEEDS)
    return edges, seeds


@pytest.fixture
def path_files(tmp_path):
    edges = tmp_path / "path.edges"
    seeds = tmp_path / "path.seeds"
    edges.write_text(PATH_EDGES)
    seeds.write_text(PATH_SEEDS)
    return edges, seeds


def test_detect_path_fixture(path_files, tmp_path):
    edges, seeds = path_files
    out = tmp_path / "run"
    assert main(["detect", str(edges), str(seeds), "--out", str(out)]) == 0
    affinity = (tmp_path / "run.affinity.csv").read_text()
    assert "0.75" in affinity
    assert "0.5" in affinity
    assert "0.25" in affinity
    assert (tmp_path / "run.crisp.csv").exists()
    manifest = json.loads((tmp_path / "run.manifest.json").read_text())
    assert manifest["subcommand"] == "detect"


def test_detect_fig_fixture(fig_files, tmp_path):
    edges, seeds = fig_files
    out = tmp_path / "fig"
    assert main(["detect", str(edges), str(seeds), "--out", str(out)]) == 0
    lines = (tmp_path / "fig.affinity.csv").read_text().splitlines()
    v_row = next(line for line in lines if line.startswith("v,"))
    assert v_row == "v,0.333333333,0.666666667"


def test_detect_disconnected_exit_2(tmp_path):
    edges = tmp_path / "two.edges"
    seeds = tmp_path / "two.seeds"
    edges.write_text("a b\nc d\n")
    seeds.write_text("a 0 1\n")
    assert main(["detect", str(edges), str(seeds), "--out", str(tmp_path / "x")]) == 2


def test_detect_parse_error_exit_1(tmp_path):
    edges = tmp_path / "bad.edges"
    seeds = tmp_path / "bad.seeds"
    edges.write_text("a a\n")
    seeds.write_text("a 0 1\n")
    assert main(["detect", str(edges), str(seeds), "--out", str(tmp_path / "x")]) == 1
    edges.write_text("a b\n")
    seeds.write_text("a zero 1\n")
    assert main(["detect", str(edges), str(seeds), "--out", str(tmp_path / "x")]) == 1


def test_verify_fig_node(fig_files):
    edges, seeds = fig_files
    assert main(["verify", str(edges), str(seeds), "--node", "v",
                 "--walks", "100000", "--rng-seed", "3"]) == 0


def test_verify_seed_node_is_usage_error(fig_files):
    edges, seeds = fig_files
    assert main(["verify", str(edges), str(seeds), "--node", "s1", "--walks", "100"]) == 64


def test_verify_single_walk_runs_vacuously(fig_files):
    edges, seeds = fig_files
    # the 4*sqrt(0.25/walks) threshold exceeds any possible gap at walks=1,
    # so the check is vacuous but must still run cleanly
    assert main(["verify", str(edges), str(seeds), "--node", "v",
                 "--walks", "1", "--rng-seed", "0"]) == 0


def test_verify_gap_violation_exit_5(fig_files, monkeypatch):
    edges, seeds = fig_files
    # the gap check is a tripwire for solver/walker inconsistencies, which a
    # correct build cannot produce; fake a broken walker to cover the path
    import numpy as np

    from seedwalk import cli
    from seedwalk.walker import WalkStats

    def broken_walks(chain, start, walks, rng_seed, step_cap=0):
        counts = np.zeros(chain.sigma, dtype=np.int64)
        counts[0] = walks  # everything to the first seed, regardless of structure
        return WalkStats(start=start, seed_ids=chain.seeds.copy(), counts=counts, walks=walks)

    monkeypatch.setattr(cli.walker, "run_walks", broken_walks)
    assert main(["verify", str(edges), str(seeds), "--node", "v",
                 "--walks", "100000", "--rng-seed", "0"]) == 5


def test_generate_outputs(tmp_path):
    out = tmp_path / "bench"
    code = main(["generate", "--n", "400", "--avg-k", "15", "--gamma", "2",
                 "--beta-exp", "2", "--mu", "0.2", "--rng-seed", "1", "--out", str(out)])
    assert code == 0
    edges = (tmp_path / "bench.edges").read_text().splitlines()
    truth = (tmp_path / "bench.truth").read_text().splitlines()
    assert len(truth) == 400
    assert len(edges) > 1000
    manifest = json.loads((tmp_path / "bench.manifest.json").read_text())
    assert manifest["realized"]["n"] == 400


def test_generate_infeasible_exit_4(tmp_path):
    code = main(["generate", "--n", "100", "--avg-k", "15", "--gamma", "2",
                 "--beta-exp", "2", "--mu", "0.2", "--k-max", "200",
                 "--out", str(tmp_path / "x")])
    assert code == 4


def test_sweep_zero_trials_usage_error(tmp_path):
    code = main(["sweep", "--n", "200", "--avg-k", "10", "--mu", "0.1",
                 "--sigma", "0.2", "--trials", "0", "--out", str(tmp_path / "s.csv")])
    assert code == 64


def test_sweep_single_cell(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--n", "200", "--avg-k", "10", "--mu", "0.0",
                 "--sigma", "0.25", "--trials", "3", "--rng-seed", "5",
                 "--jobs", "1", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("N,avg_k,gamma")
    assert lines[1].split(",")[7] == "1.000000"  # q_mean at mu=0


def test_histogram_command(tmp_path):
    gen = tmp_path / "g"
    assert main(["generate", "--n", "250", "--avg-k", "12", "--gamma", "2",
                 "--beta-exp", "2", "--mu", "0.0", "--rng-seed", "2", "--out", str(gen)]) == 0
    out = tmp_path / "hist.csv"
    code = main(["histogram", str(tmp_path / "g.edges"), str(tmp_path / "g.truth"),
                 "--sigma", "0.2", "--runs", "6", "--bins", "10",
                 "--rng-seed", "4", "--jobs", "1", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "bin_lo,bin_hi,freq"
    freqs = [float(line.split(",")[2]) for line in lines[1:]]
    assert sum(1 for f in freqs if f > 0) == 1  # constant Q at mu=0


def test_histogram_usage_errors(tmp_path):
    gen = tmp_path / "g"
    main(["generate", "--n", "250", "--avg-k", "12", "--gamma", "2",
          "--beta-exp", "2", "--mu", "0.0", "--rng-seed", "2", "--out", str(gen)])
    args = ["histogram", str(tmp_path / "g.edges"), str(tmp_path / "g.truth"),
            "--out", str(tmp_path / "h.csv")]
    assert main(args + ["--sigma", "0.2", "--runs", "0"]) == 64
    assert main(args + ["--sigma", "1.5", "--runs", "5"]) == 64


def _read_bytes(path: Path) -> bytes:
    return path.read_bytes()


def test_detect_rerun_is_byte_identical(fig_files, tmp_path):
    edges, seeds = fig_files
    a, b = tmp_path / "a", tmp_path / "b"
    main(["detect", str(edges), str(seeds), "--out", str(a)])
    main(["detect", str(edges), str(seeds), "--out", str(b)])
    assert _read_bytes(tmp_path / "a.affinity.csv") == _read_bytes(tmp_path / "b.affinity.csv")
    assert _read_bytes(tmp_path / "a.crisp.csv") == _read_bytes(tmp_path / "b.crisp.csv")


def test_detect_nonconvergence_exit_3(fig_files, tmp_path, monkeypatch):
    edges, seeds = fig_files
    from seedwalk import cli
    from seedwalk.errors import ConvergenceError
    from seedwalk.solver import SolveReport

    def never_converges(*args, **kwargs):
        raise ConvergenceError([SolveReport(5, 0.5, False)])

    monkeypatch.setattr(cli, "detect_multi", never_converges)
    assert main(["detect", str(edges), str(seeds), "--out", str(tmp_path / "x")]) == 3


def test_detect_direct_over_cap_is_usage_error(tmp_path):
    # 2100-node path exceeds the dense cap; forcing --solver direct must fail cleanly
    n = 2102
    lines = [f"n{i} n{i+1}" for i in range(n - 1)]
    edges = tmp_path / "long.edges"
    seeds = tmp_path / "long.seeds"
    edges.write_text("\n".join(lines) + "\n")
    seeds.write_text(f"n0 0 1\nn{n-1} 0 0\n")
    assert main(["detect", str(edges), str(seeds), "--solver", "direct",
                 "--out", str(tmp_path / "x")]) == 64
    # default auto mode handles it via the iterative path
    assert main(["detect", str(edges), str(seeds), "--out", str(tmp_path / "ok")]) == 0
