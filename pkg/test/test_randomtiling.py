import math

import pytest

from averaged_shelling.exactnum import quadVal
from averaged_shelling.modelsets import AMMANN, modelSet
from averaged_shelling.randomtiling import (
    MAX_ORDER,
    build_approximant,
    empirical_shelling,
    pell_convergent,
    random_tiling_shelling,
    tilingState,
)
from averaged_shelling.shelling import averaged_shelling


def s2(a, b=0):
    return quadVal(a, b, "sqrt2")


@pytest.fixture(scope="module")
def order3():
    return build_approximant(3)


@pytest.fixture(scope="module")
def order5():
    return build_approximant(5)


@pytest.mark.parametrize(
    "order, pq", [(1, (1, 1)), (2, (3, 2)), (3, (7, 5)), (4, (17, 12)), (5, (41, 29)), (6, (99, 70))]
)
def test_pell_convergents(order, pq):
    assert pell_convergent(order) == pq


@pytest.mark.parametrize("order", [0, MAX_ORDER + 1])
def test_order_out_of_range(order):
    with pytest.raises(ValueError):
        pell_convergent(order)


@pytest.mark.parametrize("order, count", [(1, 7), (2, 41), (3, 239), (4, 1393)])
def test_vertex_counts(order, count):
    base = build_approximant(order)
    p, q = base.p, base.q
    assert base.vertex_count == count == p * p + 4 * p * q + 2 * q * q
    assert len(base.tiles) == count


@pytest.mark.slow
@pytest.mark.parametrize("order, count", [(5, 8119), (6, 47321)])
def test_large_vertex_counts(order, count):
    assert build_approximant(order).vertex_count == count


def test_vertex_count_recurrence():
    counts = [build_approximant(k).vertex_count for k in range(1, 5)]
    for a, b, c in zip(counts, counts[1:], counts[2:]):
        assert c == 6 * b - a


def test_keys_and_lifts(order3):
    assert order3.key((0, 0, 0, 0)) == 0
    for code in range(4):
        unit = [0, 0, 0, 0]
        unit[code] = 1
        assert order3.key(unit) == order3.delta(code)
        assert order3.delta(code + 4) == -order3.delta(code)
    for key in order3.vertices[:50]:
        assert order3.key(order3.lift(key)) == key
    for vector in order3.period_lattice:
        assert order3.key(vector) == 0


def test_perfect_approximant_has_flippable_sites(order3):
    state = tilingState(order3)
    assert state.flippable_sites()
    assert state.vertex_count == order3.vertex_count


def test_flip_is_an_involution(order3):
    state = tilingState(order3)
    tiles = state.tiles
    key = state.flippable_sites()[0]
    partner = state.flip(key)
    assert partner != key
    assert key not in state.vertices and partner in state.vertices
    assert partner in state.flippable_sites()
    assert state.flip(partner) == key
    assert state.tiles == tiles
    assert state.flip_count == 2


def test_flip_of_a_fixed_vertex_raises(order3):
    state = tilingState(order3)
    flippable = set(state.flippable_sites())
    fixed = next(k for k in sorted(state.vertices) if k not in flippable)
    with pytest.raises(ValueError):
        state.flip(fixed)


def test_thermalize_conserves_the_tile_counts(order3):
    state = tilingState(order3, seed=3)
    counts = state.tile_counts()
    state.thermalize(5)
    assert state.tile_counts() == counts
    assert state.vertex_count == order3.vertex_count
    assert len(state.tiles) == order3.vertex_count
    assert state.flip_count == 5 * order3.vertex_count
    assert state.tiles != set(order3.tiles)


@pytest.mark.slow
def test_a_million_flips_conserve_the_tiling():
    base = build_approximant(4)
    state = tilingState(base, seed=8)
    counts = state.tile_counts()
    flips_per_vertex = -(-1_000_000 // base.vertex_count)
    state.thermalize(flips_per_vertex)
    assert state.flip_count == flips_per_vertex * base.vertex_count >= 1_000_000
    assert state.tile_counts() == counts
    assert state.vertex_count == len(state.tiles) == base.vertex_count
    tiles = state.tiles
    for key in state.flippable_sites()[:200]:
        assert state.flip(state.flip(key)) == key
    assert state.tiles == tiles


def test_zero_flips_leave_the_tiling(order3):
    state = tilingState(order3, seed=3)
    state.thermalize(0)
    assert state.tiles == set(order3.tiles)
    with pytest.raises(ValueError):
        state.thermalize(-1)


def test_thermalize_is_deterministic(order3):
    first = tilingState(order3, seed=11)
    second = tilingState(order3, seed=11)
    other = tilingState(order3, seed=12)
    for state in (first, second, other):
        state.thermalize(2)
    assert first.tiles == second.tiles
    assert first.tiles != other.tiles


def test_detailed_balance_keeps_the_flip_budget(order3):
    state = tilingState(order3, seed=5)
    counts = state.tile_counts()
    state.thermalize(3, detailed_balance=True)
    assert state.flip_count == 3 * order3.vertex_count
    assert state.tile_counts() == counts


def test_unit_shell_is_four(order3):
    state = tilingState(order3, seed=2)
    state.thermalize(4)
    records = empirical_shelling(state, 1.2)
    assert records[0].r2 == 0 and records[0].sigma_float == 1.0
    assert {r.r2: r.sigma_float for r in records}[s2(1)] == pytest.approx(4.0)


def test_radius_must_stay_below_half_the_period():
    base = build_approximant(1)
    with pytest.raises(ValueError):
        empirical_shelling(tilingState(base), base.period / 2)


def test_radii_nest(order3):
    state = tilingState(order3, seed=9)
    state.thermalize(2)
    small = empirical_shelling(state, 2.0)
    large = empirical_shelling(state, 3.0)
    assert large[: len(small)] == small


def test_perfect_approximant_against_the_exact_values(order5):
    exact = averaged_shelling(modelSet(AMMANN), 3.0)
    perfect = {r.r2: r.sigma_float for r in empirical_shelling(tilingState(order5), 3.0)}
    for record in exact:
        assert perfect[record.r2] == pytest.approx(record.sigma_float, rel=1e-2)
    # shells the approximant adds carry little weight
    extra = set(perfect) - {r.r2 for r in exact}
    assert all(perfect[r2] < 0.1 for r2 in extra)


@pytest.mark.slow
def test_order_six_approximant_against_the_exact_values():
    exact = averaged_shelling(modelSet(AMMANN), 3.0)
    perfect = {
        r.r2: r.sigma_float for r in empirical_shelling(tilingState(build_approximant(6)), 3.0)
    }
    for record in exact:
        assert perfect[record.r2] == pytest.approx(record.sigma_float, rel=1e-6)


def test_snapshot_round_trip(order3, tmp_path):
    state = tilingState(order3, seed=21)
    state.thermalize(3)
    path = tmp_path / "snapshot.txt"
    state.save(path)
    restored = tilingState.load(path)
    assert restored.tiles == state.tiles
    assert restored.vertices == state.vertices
    assert restored.seed == 21
    assert restored.flip_count == state.flip_count
    assert restored.approximant.order == 3
    restored.thermalize(1)
    assert restored.tile_counts() == state.tile_counts()


def test_snapshot_with_foreign_vertices_is_rejected(order3, tmp_path):
    path = tmp_path / "snapshot.txt"
    tilingState(order3).save(path)
    lines = path.read_text().splitlines()
    vertex = next(i for i, line in enumerate(lines) if len(line.split()) == 4 and line[0] != "o")
    lines[vertex] = "100 100 100 100"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError):
        tilingState.load(path)


def test_replicas_average(order3):
    single = random_tiling_shelling(order3, 2.0, seed=1, flips_per_vertex=2)
    averaged = random_tiling_shelling(order3, 2.0, seed=1, flips_per_vertex=2, replicas=3)
    assert single[0].sigma_float == averaged[0].sigma_float == 1.0
    assert {r.r2: r.sigma_float for r in averaged}[s2(1)] == pytest.approx(4.0)
    assert all(r.source == "empirical" for r in averaged)
    with pytest.raises(ValueError):
        random_tiling_shelling(order3, 2.0, seed=1, replicas=0)


@pytest.mark.slow
def test_random_tiling_values(order5):
    records = random_tiling_shelling(order5, 3.0, seed=1, flips_per_vertex=1000)
    sigma = {r.r2: r.sigma_float for r in records}
    assert sigma[s2(2, -1)] == pytest.approx(4 - 2 * math.sqrt(2), abs=0.03)
    assert sigma[s2(5, -2)] == pytest.approx(0.407, abs=0.05)
    assert sigma[s2(3)] == pytest.approx(2.815, abs=0.05)
    assert sigma[s2(1)] == pytest.approx(4.0)


@pytest.mark.slow
def test_perfect_radii_are_a_subset_of_the_random_radii(order5):
    perfect = {r.r2 for r in empirical_shelling(tilingState(order5), 3.0)}
    state = tilingState(order5, seed=1)
    state.thermalize(100)
    random = {r.r2 for r in empirical_shelling(state, 3.0)}
    assert perfect < random
