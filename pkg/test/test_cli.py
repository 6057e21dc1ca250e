from pathlib import Path
from unittest.mock import patch

import pytest

from averaged_shelling.cli import RunConfig, main, run
from averaged_shelling.modelsets import AMMANN, SILVER, modelSet
from averaged_shelling.shelling_results import COLUMNS, ConsistencyError, shellingResults


@pytest.fixture(autouse=True)
def home(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.setenv("USERPROFILE", str(tmp_path))
    return tmp_path


def test_central_to_stdout(capsys):
    assert main(["central", "--mmax", "16"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert len(lines) == 10
    assert lines[1].startswith("central,rational,1,0,")


def test_settings_supply_missing_flags(capsys):
    assert main(["central"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 10


def test_csv_file_reads_back(tmp_path):
    path = tmp_path / "ammann.csv"
    assert main(["ammann", "--rmax", "2.0", "--out", str(path)]) == 0
    results = shellingResults.from_csv(str(path))
    assert len(results) == 7
    assert results.to_csv() == path.read_text()


def test_svg_to_stdout(capsys):
    assert main(["chain", "--rmax", "3", "--format", "svg"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("<?xml")
    assert "Silver mean chain" in out


def test_both_formats(tmp_path):
    path = tmp_path / "chain.csv"
    assert main(["chain", "--rmax", "3", "--format", "both", "--out", str(path)]) == 0
    assert path.read_text().startswith("kind,")
    assert (tmp_path / "chain.svg").read_text().startswith("<?xml")


@pytest.mark.parametrize(
    "argv",
    [
        ["hexagonal"],
        ["ammann", "--rmax", "-1"],
        ["central", "--mmax", "0"],
        ["ammann-random", "--order", "12"],
        ["ammann-random", "--replicas", "0"],
        ["chain", "--format", "both"],
        ["penrose", "--format", "pdf"],
    ],
)
def test_bad_flags_exit_with_2(argv):
    with pytest.raises(SystemExit) as error:
        main(argv)
    assert error.value.code == 2


def test_radius_beyond_the_torus_returns_2():
    assert main(["ammann-random", "--order", "1", "--rmax", "2.0", "--flips-per-vertex", "0"]) == 2


def test_inconsistent_table_returns_1(capsys):
    with patch.object(shellingResults, "check", side_effect=ConsistencyError("broken")):
        assert main(["central", "--mmax", "4"]) == 1
    assert capsys.readouterr().out == ""


def test_random_tiling_run(tmp_path):
    path = tmp_path / "random.csv"
    config = RunConfig(
        "ammann-random", rmax=2.0, order=3, seed=5, flips_per_vertex=1, output=path
    )
    assert run(config) == 0
    results = shellingResults.from_csv(str(path))
    assert results.seed == 5
    assert results.kind == "ammann-random"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"subcommand": "hexagonal"},
        {"subcommand": "central", "mmax": 0},
        {"subcommand": "chain", "format": "both"},
        {"subcommand": "ammann-random", "seed": -1},
        {"subcommand": "ammann-random", "flips_per_vertex": -1},
        {"subcommand": "central", "dump_points": Path("points.txt")},
        {"subcommand": "ammann", "dump_points": Path("points.svg")},
    ],
)
def test_run_config_validation(kwargs):
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


@pytest.mark.parametrize("subcommand, kind", [("chain", SILVER), ("ammann", AMMANN)])
def test_point_dump_is_written_and_plotted(tmp_path, subcommand, kind):
    dump = tmp_path / "points.txt"
    argv = [subcommand, "--rmax", "3.0", "--dump-points", str(dump), "--out", str(tmp_path / "t.csv")]
    assert main(argv) == 0
    points = modelSet(kind).enumerate_points(3.0)
    assert len(dump.read_text().splitlines()) == len(points)
    svg = (tmp_path / "points.svg").read_text()
    assert svg.startswith("<?xml")
    assert svg.count('class="point"') == len(points)


def test_point_dump_is_not_offered_for_tables_without_a_model_set():
    with pytest.raises(SystemExit) as error:
        main(["central", "--dump-points", "points.txt"])
    assert error.value.code == 2
