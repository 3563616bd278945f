import os

import pandas as pd
import pytest

import pareto_cli
from conftest import fixture_path

LAPTOP_INPUTS = [
    "--schema", fixture_path("laptop_schema.yaml"),
    "--prefs", fixture_path("laptop_prefs.csv"),
]


@pytest.fixture
def cli(tmp_path):
    """Run the CLI quietly against an empty params file."""
    params = str(tmp_path / "missing-params.yaml")

    def invoke(*argv):
        return pareto_cli.main(["--params", params, "--quiet", *argv])

    return invoke


def test_oracle_subcommand(cli, tmp_path):
    out = str(tmp_path / "oracle.csv")
    code = cli("oracle", *LAPTOP_INPUTS, "--objects", fixture_path("laptop_objects.csv"), "--out", out)
    assert code == 0
    frame = pd.read_csv(out).set_index("user_id")
    assert frame.loc["c1", "frontier"] == "o2"
    assert frame.loc["c2", "frontier"] == "o2 o3 o15"


def test_windowed_oracle_subcommand(cli, tmp_path):
    out = str(tmp_path / "oracle.csv")
    code = cli("oracle", *LAPTOP_INPUTS, "--objects", fixture_path("window_objects.csv"),
               "--window", "6", "--out", out)
    assert code == 0
    frame = pd.read_csv(out)
    last = frame[frame["step"] == 7].set_index("user_id")
    assert last.loc["c1", "frontier"] == "o7"
    assert set(last.loc["c2", "frontier"].split()) == {"o4", "o6", "o7"}


def test_run_with_oracle_assertions(cli, tmp_path):
    out = str(tmp_path / "run")
    code = cli("run", *LAPTOP_INPUTS, "--objects", fixture_path("laptop_objects.csv"),
               "--algo", "ftv", "--clusters", fixture_path("laptop_clusters.csv"),
               "--assert-oracle", "--out", out)
    assert code == 0
    assert {"steps.csv", "frontiers.json", "summary.json"} <= set(os.listdir(out))


def test_windowed_run_writes_trace(cli, tmp_path):
    out = str(tmp_path / "run")
    code = cli("run", *LAPTOP_INPUTS, "--objects", fixture_path("window_objects.csv"),
               "--algo", "baseline-sw", "--window", "6", "--trace", "--out", out)
    assert code == 0
    trace = pd.read_csv(os.path.join(out, "trace.csv"), keep_default_na=False)
    row = trace[(trace["step"] == 6) & (trace["holder"] == "c1")].iloc[0]
    assert row["frontier"] == "o3"
    assert set(row["buffer"].split()) == {"o3", "o4", "o5", "o6"}


def test_evaluate_exact_against_approximate(cli, tmp_path):
    common = [*LAPTOP_INPUTS, "--objects", fixture_path("laptop_objects.csv"),
              "--clusters", fixture_path("laptop_clusters.csv")]
    assert cli("run", *common, "--algo", "ftv", "--out", str(tmp_path / "exact")) == 0
    assert cli("run", *common, "--algo", "ftv-approx", "--theta2", "0.3", "--out", str(tmp_path / "approx")) == 0
    out = str(tmp_path / "accuracy.csv")
    assert cli("evaluate", str(tmp_path / "exact"), str(tmp_path / "approx"), "--out", out) == 0
    frame = pd.read_csv(out)
    assert list(frame["user_id"]) == ["c1", "c2", "ALL"]
    assert 0 <= frame.iloc[-1]["precision"] <= 1


def test_cluster_subcommand(cli, tmp_path):
    out = str(tmp_path / "clusters")
    code = cli("cluster", "--schema", fixture_path("brand_schema.yaml"), "--prefs", fixture_path("customer_prefs.csv"),
               "--sim", "weighted-jaccard", "--h", "0.25", "--out", out)
    assert code == 0
    clusters = pd.read_csv(os.path.join(out, "clusters.csv"))
    assert clusters.groupby("cluster_id")["user_id"].apply(list).to_dict() == {
        "U1": ["c1", "c2", "c5", "c6"],
        "U2": ["c3", "c4"],
    }
    with open(os.path.join(out, "dendrogram.txt"), encoding="utf-8") as f:
        assert len(f.read().splitlines()) == 5


def test_gen_subcommand(cli, tmp_path):
    out = str(tmp_path / "workload")
    code = cli("gen", "--seed", "3", "--users", "6", "--archetypes", "2", "--objects", "20", "--out", out)
    assert code == 0
    assert len(pd.read_csv(os.path.join(out, "objects.csv"))) == 20


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--algo", "quantum"],
        ["run", *LAPTOP_INPUTS, "--objects", fixture_path("laptop_objects.csv"), "--algo", "baseline-sw",
         "--window", "0"],
        ["run", *LAPTOP_INPUTS, "--objects", fixture_path("laptop_objects.csv"), "--algo", "ftv-sw"],
        ["run", *LAPTOP_INPUTS, "--objects", fixture_path("laptop_objects.csv"), "--theta2", "1.5"],
    ],
)
def test_configuration_errors_exit_1(cli, argv):
    assert cli(*argv) == 1


def test_data_errors_exit_2(cli, tmp_path):
    bad = tmp_path / "objects.csv"
    bad.write_text("o1,12,Dell,single\n", encoding="utf-8")
    assert cli("run", *LAPTOP_INPUTS, "--objects", str(bad)) == 2
    assert cli("run", *LAPTOP_INPUTS, "--objects", str(tmp_path / "nope.csv")) == 2
    assert cli("evaluate", str(tmp_path / "a"), str(tmp_path / "b")) == 2


def test_undecodable_input_exits_2(cli, tmp_path):
    with open(fixture_path("laptop_objects.csv"), "rb") as f:
        content = f.read()
    bad = tmp_path / "objects.csv"
    bad.write_bytes(content.rstrip(b"\n") + b"\no99,\xff\xfe,Apple,dual\n")
    assert cli("oracle", *LAPTOP_INPUTS, "--objects", str(bad)) == 2
