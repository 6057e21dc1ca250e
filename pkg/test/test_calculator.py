import pytest

from averaged_shelling.calculator import shellingCalculator
from averaged_shelling.exactnum import quadVal
from averaged_shelling.shelling_results import RATIONAL, shellingResults


@pytest.fixture(autouse=True)
def home(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.setenv("USERPROFILE", str(tmp_path))
    return tmp_path


@pytest.fixture
def calculator():
    return shellingCalculator()


def test_default_initialization(calculator):
    assert calculator.settings["central"]["mmax"] == 16
    assert calculator.settings["ammann_random"]["seed"] == 1


def test_custom_initialization(home):
    sc = shellingCalculator(custom_settings={"ammann": {"rmax": 1.5}})
    assert sc.settings["ammann"]["rmax"] == 1.5
    assert len(sc.ammann()) == 4
    assert not (home / ".shelling").exists()


def test_update_settings_unknown_key(calculator):
    with pytest.raises(ValueError):
        calculator.update_settings({"hexagonal": {"rmax": 2.0}}, save_changes=False)


def test_update_settings_saves_changes(calculator, home):
    calculator.update_settings({"chain": {"rmax": 2.0}})
    assert (home / ".shelling" / "parameters.yaml").is_file()
    assert calculator.settings["chain"]["rmax"] == 2.0
    assert shellingCalculator().settings["chain"]["rmax"] == 2.0


def test_central(calculator):
    results = calculator.central()
    assert isinstance(results, shellingResults)
    assert results.basis == RATIONAL
    table = results.get_results()
    assert table["r2_a"].tolist() == ["1", "2", "4", "5", "8", "9", "10", "13", "16"]
    assert table["sigma_a"].tolist() == ["4", "4", "4", "8", "4", "4", "8", "8", "4"]
    results.check()
    with pytest.raises(ValueError):
        calculator.central(0)


def test_exact_tables(calculator):
    chain = calculator.chain(3.0)
    assert chain.kind == "chain" and chain.basis == "sqrt2"
    assert chain.sigma(quadVal(1, 0, "sqrt2")) == pytest.approx(0.5857864376269049)
    penrose = calculator.penrose(1.0)
    assert [r.r2 for r in penrose.records] == [
        quadVal(0, 0, "tau"),
        quadVal(2, -1, "tau"),
        quadVal(1, 0, "tau"),
    ]
    with pytest.raises(ValueError):
        calculator.ammann(-1.0)


def test_ammann_perfect(calculator):
    results = calculator.ammann_perfect(2.0, order=3)
    assert results.kind == "ammann-perfect"
    assert results.records[0].sigma_float == 1.0
    assert results.sigma(quadVal(1, 0, "sqrt2")) == pytest.approx(4.0)


def test_ammann_random(calculator):
    results = calculator.ammann_random(rmax=2.0, order=3, seed=4, flips_per_vertex=1)
    assert results.seed == 4
    assert all(r.source == "empirical" for r in results.records)
    assert results.sigma(quadVal(1, 0, "sqrt2")) == pytest.approx(4.0)
    results.check()


def test_compare_perfect_random(calculator):
    table = calculator.compare_perfect_random(rmax=2.0, order=3, seed=1, flips_per_vertex=1)
    assert list(table.columns) == [
        "r2_a",
        "r2_b",
        "r_float",
        "sigma_exact",
        "sigma_perfect",
        "sigma_random",
    ]
    assert table["r_float"].is_monotonic_increasing
    unit = table[(table["r2_a"] == "1") & (table["r2_b"] == "0")].iloc[0]
    assert unit["sigma_exact"] == pytest.approx(4.0)
    assert unit["sigma_perfect"] == pytest.approx(4.0)
    assert unit["sigma_random"] == pytest.approx(4.0)
    assert not table.isna().any().any()
