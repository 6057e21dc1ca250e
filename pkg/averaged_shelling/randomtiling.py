"""
Periodic approximants of the Ammann-Beenker tiling and simpleton flips.

Vertices of an approximant of order k live on the torus Z^4/K, K the kernel
of the rational star map obtained by replacing sqrt2 with the Pell
convergent p/q. A class is identified by the integer key

    u = 2q*n0 + p*(n3 - n1),    v = p*(n1 + n3) - 2q*n2,

which is 2q times the rational internal image; u and v always share their
parity, and the pair is packed into one Python int. The unit vectors e_0..e_3
become the key offsets (2q, 0), (-p, p), (0, -2q) and (p, p).
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .exactnum import SQRT2, quadVal
from .modelsets import ammann_r2
from .parallel import _parallel_map
from .read_data import _load_snapshot
from .shelling import shellRecord

logger = logging.getLogger(__name__)

MAX_ORDER = 8

_SHIFT = 32
_HALF = 1 << 31
_MASK = (1 << 32) - 1
_H = math.sqrt(2.0) / 2.0

# signed generator codes: s in 0..3 is +e_s, s + 4 is -e_s
_CODES = range(8)


def _axis(code: int) -> int:
    return code % 4


def _opposite(code: int) -> int:
    return (code + 4) % 8


def _pack(u: int, v: int) -> int:
    return (u << _SHIFT) + v


def _unpack(key: int) -> tuple[int, int]:
    v = ((key + _HALF) & _MASK) - _HALF
    return (key - v) >> _SHIFT, v


def pell_convergent(order: int) -> tuple[int, int]:
    """
    The convergent p/q of sqrt2 used at a given order: 1/1, 3/2, 7/5, 17/12, ...

    Examples
    --------
    >>> pell_convergent(5)
    (41, 29)
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"approximant order must be between 1 and {MAX_ORDER}, got {order}")
    p, q = 1, 1
    for _ in range(order - 1):
        p, q = p + 2 * q, p + q
    return p, q


def _inside_window(u: np.ndarray, v: np.ndarray, p: int, q: int) -> np.ndarray:
    """
    Keys whose internal image lies in the deformed octagon shifted by
    (1/7, 2/7) key units; sevenfold scaling keeps everything integral and
    no key falls on the boundary.
    """
    big = 7 * (p + q)
    diagonal = 7 * (2 * q + p)
    return (
        (np.abs(7 * u - 1) < big)
        & (np.abs(7 * v - 2) < big)
        & (np.abs(7 * (u + v) - 3) < diagonal)
        & (np.abs(7 * (u - v) + 1) < diagonal)
    )


@dataclass(frozen=True)
class approximant:
    """
    A periodic approximant: vertex keys of one unit cell and its rhombi.

    Tiles are triples (base key, i, j) with i < j: the rhombus with corners
    base, base + e_i, base + e_j and base + e_i + e_j.
    """

    order: int
    p: int
    q: int
    vertices: tuple[int, ...] = field(repr=False)
    tiles: frozenset = field(repr=False)

    @property
    def pell(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def period(self) -> float:
        """Side length p + q*sqrt2 of the square unit cell."""
        return self.p + self.q * math.sqrt(2.0)

    @property
    def period_lattice(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Kernel vectors with physical images (period, 0) and (0, period)."""
        p, q = self.p, self.q
        return (p, q, 0, -q), (0, q, p, q)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def key(self, n: Sequence[int]) -> int:
        n0, n1, n2, n3 = (int(c) for c in n)
        p, q = self.p, self.q
        return _pack(2 * q * n0 + p * (n3 - n1), p * (n1 + n3) - 2 * q * n2)

    def delta(self, code: int) -> int:
        """Key offset of the signed generator `code`."""
        p, q = self.p, self.q
        offsets = ((2 * q, 0), (-p, p), (0, -2 * q), (p, p))
        u, v = offsets[_axis(code)]
        return _pack(u, v) if code < 4 else _pack(-u, -v)

    def lift(self, key: int) -> tuple[int, int, int, int]:
        """An integer 4-vector in the class of `key`."""
        return tuple(int(c) for c in self.lift_many(np.array([key], dtype=np.int64))[0])

    def lift_many(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        v = ((keys + _HALF) & _MASK) - _HALF
        u = (keys - v) >> _SHIFT
        p, q = self.p, self.q
        modulus = 2 * q
        inverse = pow(p, -1, modulus)
        d = (inverse * u) % modulus
        e = (inverse * v) % modulus
        n0 = (u - p * d) // modulus
        n2 = (p * e - v) // modulus
        n1 = (e - d) // 2
        n3 = (e + d) // 2
        return np.stack([n0, n1, n2, n3], axis=1)


def build_approximant(order: int) -> approximant:
    """
    Build the periodic approximant of a given order.

    Parameters
    ----------
    order : int
        Approximant order k, 1 <= k <= 8. Orders 4, 5 and 6 give 1393, 8119
        and 47321 vertices per unit cell.

    Returns
    -------
    approximant
        Vertex keys inside the deformed window and all rhombi whose four
        corners are vertices.

    Raises
    ------
    ValueError
        For an order out of range, or if the tiles do not match the vertices
        one to one (a degenerate window).
    """
    p, q = pell_convergent(order)
    grid = np.arange(-(p + q), p + q + 1, dtype=np.int64)
    u, v = (a.ravel() for a in np.meshgrid(grid, grid, indexing="ij"))
    keep = ((u - v) % 2 == 0) & _inside_window(u, v, p, q)
    keys = np.sort(u[keep] * (1 << _SHIFT) + v[keep])

    offsets = [
        _pack(2 * q, 0),
        _pack(-p, p),
        _pack(0, -2 * q),
        _pack(p, p),
    ]
    tiles = set()
    for i in range(4):
        for j in range(i + 1, 4):
            present = (
                np.isin(keys + offsets[i], keys)
                & np.isin(keys + offsets[j], keys)
                & np.isin(keys + offsets[i] + offsets[j], keys)
            )
            tiles.update((int(k), i, j) for k in keys[present])
    # on a torus V - E + F = 0 and E = 2F for rhombi
    if len(tiles) != len(keys):
        raise ValueError(
            f"degenerate approximant window at order {order}: "
            f"{len(keys)} vertices but {len(tiles)} tiles"
        )
    logger.info("approximant of order %d (p/q = %d/%d): %d vertices", order, p, q, len(keys))
    return approximant(order, p, q, tuple(int(k) for k in keys), frozenset(tiles))


class tilingState:
    """
    A rhombus tiling of the approximant torus that can be randomised by
    simpleton flips.

    Parameters
    ----------
    base : approximant
        The approximant supplying the torus and the starting tiling.
    seed : int | numpy.random.SeedSequence, optional
        Seed of the PCG64 generator.
        default = 0
    tiles : iterable of (int, int, int) | None, optional
        Start from these tiles instead of the perfect approximant.
        default = None
    """

    def __init__(self, base: approximant, seed=0, tiles=None) -> None:
        self._approximant = base
        self.seed = seed if isinstance(seed, int) else None
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._deltas = [base.delta(code) for code in _CODES]
        self._tiles = set(base.tiles if tiles is None else tiles)
        self._adjacency = self._build_adjacency()
        self._vertices = set(self._adjacency)
        self.flip_count = 0
        self._flippable: list[int] = []
        self._index: dict[int, int] = {}
        for key in sorted(self._vertices):
            self._refresh(key)

    @property
    def approximant(self) -> approximant:
        return self._approximant

    @property
    def vertices(self) -> set[int]:
        return set(self._vertices)

    @property
    def tiles(self) -> set[tuple[int, int, int]]:
        return set(self._tiles)

    @property
    def vertex_count(self) -> int:
        return len(self._vertices)

    def tile_counts(self) -> dict[tuple[int, int], int]:
        """Number of tiles per direction pair (i, j)."""
        counts: dict[tuple[int, int], int] = defaultdict(int)
        for _, i, j in self._tiles:
            counts[(i, j)] += 1
        return dict(counts)

    def _build_adjacency(self) -> dict[int, set[int]]:
        adjacency: dict[int, set[int]] = defaultdict(set)
        for base, i, j in self._tiles:
            di, dj = self._deltas[i], self._deltas[j]
            for corner, code in ((base, i), (base + dj, i), (base, j), (base + di, j)):
                adjacency[corner].add(code)
                adjacency[corner + self._deltas[code]].add(_opposite(code))
        return dict(adjacency)

    def _tile(self, corner: int, s: int, t: int) -> tuple[int, int, int]:
        """The tile spanned by signed generators s, t at `corner`, in base form."""
        base = corner
        if s >= 4:
            base += self._deltas[s]
        if t >= 4:
            base += self._deltas[t]
        i, j = sorted((_axis(s), _axis(t)))
        return base, i, j

    def _is_flippable(self, key: int) -> bool:
        codes = self._adjacency.get(key, ())
        return len(codes) == 3 and len({_axis(c) for c in codes}) == 3

    def _refresh(self, key: int) -> None:
        flippable = key in self._vertices and self._is_flippable(key)
        position = self._index.get(key)
        if flippable and position is None:
            self._index[key] = len(self._flippable)
            self._flippable.append(key)
        elif not flippable and position is not None:
            last = self._flippable.pop()
            if last != key:
                self._flippable[position] = last
                self._index[last] = position
            del self._index[key]

    def flippable_sites(self) -> list[int]:
        """Vertex keys with three incident rhombi forming a hexagon, sorted."""
        return sorted(self._flippable)

    def partner(self, key: int) -> int:
        """The interior vertex of the hexagon after flipping `key`."""
        if key not in self._index:
            raise ValueError(f"vertex {_unpack(key)} is not flippable")
        return key + sum(self._deltas[c] for c in self._adjacency[key])

    def flip(self, key: int) -> int:
        """
        Flip the hexagon around `key`.

        Returns
        -------
        int
            The new interior vertex, whose flip undoes this one.

        Raises
        ------
        ValueError
            If `key` is not a flippable vertex.
        """
        partner = self.partner(key)
        codes = sorted(self._adjacency[key])
        d = [self._deltas[c] for c in codes]
        for a, b, c in ((0, 1, 2), (1, 2, 0), (0, 2, 1)):
            self._tiles.remove(self._tile(key, codes[a], codes[b]))
            self._tiles.add(self._tile(key + d[c], codes[a], codes[b]))

        for code, offset in zip(codes, d):
            self._adjacency[key + offset].discard(_opposite(code))
        for a, b, c in ((0, 1, 2), (1, 2, 0), (0, 2, 1)):
            self._adjacency[key + d[a] + d[b]].add(codes[c])
        del self._adjacency[key]
        self._adjacency[partner] = {_opposite(c) for c in codes}
        self._vertices.remove(key)
        self._vertices.add(partner)

        touched = [key, partner] + [key + x for x in d] + [
            key + d[a] + d[b] for a, b in ((0, 1), (1, 2), (0, 2))
        ]
        for vertex in touched:
            self._refresh(vertex)
        self.flip_count += 1
        return partner

    def thermalize(
        self,
        flips_per_vertex: float = 1000,
        detailed_balance: bool = False,
        batch: int = 1 << 16,
    ) -> None:
        """
        Randomise the tiling by flips_per_vertex * vertex_count accepted flips.

        Each step picks a site uniformly from the current flippable set.

        Parameters
        ----------
        flips_per_vertex : float, optional
            default = 1000
        detailed_balance : bool, optional
            If True a flip that grows the flippable set from F to F' is undone
            with probability 1 - F/F', which makes the uniform measure on
            tilings stationary.
            default = False
        batch : int, optional
            Number of random draws generated at once.
            default = 65536
        """
        if flips_per_vertex < 0:
            raise ValueError("flips_per_vertex must be nonnegative")
        target = int(round(flips_per_vertex * len(self._vertices)))
        report = max(1, target // 10)
        done = 0
        while done < target:
            for x in self._rng.random(batch):
                if done >= target:
                    break
                n_old = len(self._flippable)
                if n_old == 0:
                    raise ValueError("the tiling has no flippable vertex")
                partner = self.flip(self._flippable[int(x * n_old)])
                if detailed_balance:
                    n_new = len(self._flippable)
                    if n_new > n_old and self._rng.random() * n_new >= n_old:
                        self.flip(partner)
                        self.flip_count -= 2
                        continue
                done += 1
                if done % report == 0:
                    logger.info("%d of %d flips done", done, target)
        logger.debug("thermalisation finished after %d flips", self.flip_count)

    def save(self, path) -> None:
        """Write a snapshot: header, vertex lines, then `tile` lines."""
        base = self._approximant
        lines = [
            f"order {base.order}",
            f"pell {base.p}/{base.q}",
            f"seed {'' if self.seed is None else self.seed}".rstrip(),
            f"flips {self.flip_count}",
        ]
        for key in sorted(self._vertices):
            lines.append(" ".join(str(c) for c in base.lift(key)))
        for key, i, j in sorted(self._tiles):
            lines.append("tile " + " ".join(str(c) for c in base.lift(key)) + f" {i} {j}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> tilingState:
        """
        Read a snapshot written by `save`.

        The generator of the resumed state is seeded with (seed, flips), so a
        resumed run is reproducible but does not continue the saved stream.
        """
        snapshot = _load_snapshot(path)
        base = build_approximant(snapshot["order"])
        if (base.p, base.q) != snapshot["pell"]:
            raise ValueError(
                f"snapshot pell {snapshot['pell']} does not match order {snapshot['order']}"
            )
        tiles = [(base.key(n), i, j) for n, i, j in snapshot["tiles"]]
        seed = snapshot["seed"]
        state = cls(
            base,
            seed=np.random.SeedSequence([seed or 0, snapshot["flips"]]),
            tiles=tiles,
        )
        state.seed = seed
        state.flip_count = snapshot["flips"]
        vertices = {base.key(n) for n in snapshot["vertices"]}
        if vertices != state._vertices:
            raise ValueError("snapshot vertices do not match the corners of its tiles")
        return state


def _phys_float(coeffs: np.ndarray) -> np.ndarray:
    c = coeffs.astype(float)
    return np.stack(
        [c[:, 0] + _H * (c[:, 1] - c[:, 3]), c[:, 2] + _H * (c[:, 1] + c[:, 3])], axis=1
    )


def empirical_shelling(state: tilingState, radius: float) -> list[shellRecord]:
    """
    Averaged shelling of the current tiling, keyed by exact ideal r2.

    Parameters
    ----------
    state : tilingState
        The tiling.
    radius : float
        Cut-off, less than half the period.

    Returns
    -------
    list of shellRecord
        Empirical records sorted by exact r2, starting with r2 = 0.

    Notes
    -----
    Pairs are found on the torus with a periodic k-d tree. The displacement
    of each pair is turned back into the integer 4-vector of its minimal
    image, whose squared length |sum n_k zeta^k|^2 uses the true sqrt2.
    """
    base = state.approximant
    period = base.period
    if radius >= period / 2:
        raise ValueError(
            f"radius {radius} must be less than half the period {period / 2:.6g}"
        )
    keys = np.array(sorted(state.vertices), dtype=np.int64)
    coeffs = base.lift_many(keys)
    phys = _phys_float(coeffs)
    wrapped = np.mod(phys, period)
    wrapped[wrapped >= period] = 0.0
    tree = cKDTree(wrapped, boxsize=period)
    pairs = tree.query_pairs(radius + 1e-9, output_type="ndarray")
    logger.info("%d vertex pairs within %.4g", len(pairs), radius)

    first, second = pairs[:, 0], pairs[:, 1]
    images = np.rint((phys[second] - phys[first]) / period).astype(np.int64)
    kernel = np.array(base.period_lattice, dtype=np.int64)
    displacement = coeffs[second] - coeffs[first] - images @ kernel
    rows, counts = np.unique(displacement, axis=0, return_counts=True)

    bound = Fraction(radius) ** 2
    shells: dict[quadVal, int] = defaultdict(int)
    for row, count in zip(rows.tolist(), counts.tolist()):
        r2 = ammann_r2(row)
        if r2 <= bound:
            # each unordered pair contributes y and -y
            shells[r2] += 2 * count
    n = len(keys)
    records = [shellRecord.empirical(quadVal(0, 0, SQRT2), 1.0)]
    records += [shellRecord.empirical(r2, shells[r2] / n) for r2 in sorted(shells)]
    return records


def _replica_run(job: tuple) -> list[shellRecord]:
    base, seed, flips_per_vertex, radius, detailed_balance = job
    state = tilingState(base, seed=seed)
    state.thermalize(flips_per_vertex, detailed_balance=detailed_balance)
    return empirical_shelling(state, radius)


def random_tiling_shelling(
    base: approximant,
    radius: float,
    seed: int,
    flips_per_vertex: float = 1000,
    replicas: int = 1,
    detailed_balance: bool = False,
    workers: int = 1,
) -> list[shellRecord]:
    """
    Empirical shelling of thermalised tilings, averaged over replicas.

    A single replica uses `seed` directly; several replicas use independent
    streams spawned from it with numpy.random.SeedSequence. A shell missing
    from a replica counts as zero there.
    """
    if replicas < 1:
        raise ValueError("replicas must be at least 1")
    if replicas == 1:
        seeds = [seed]
    else:
        seeds = np.random.SeedSequence(seed).spawn(replicas)
    jobs = [(base, s, flips_per_vertex, radius, detailed_balance) for s in seeds]
    runs = _parallel_map(_replica_run, jobs, workers)

    totals: dict[quadVal, float] = defaultdict(float)
    for records in runs:
        for record in records:
            totals[record.r2] += record.sigma_float
    return [shellRecord.empirical(r2, totals[r2] / replicas) for r2 in sorted(totals)]
