from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np
from scipy.spatial import cKDTree

from .exactnum import SQRT2, quadVal
from .geom2d import area2, intersect, overlap_fraction
from .modelsets import PENROSE, SQUARE, diffVector, latticePoint, modelSet
from .parallel import _parallel_map

logger = logging.getLogger(__name__)

EXACT = "exact"
EMPIRICAL = "empirical"


@dataclass(frozen=True)
class shellRecord:
    """
    One shell of an averaged (or central) shelling table.

    Attributes
    ----------
    r2 : quadVal
        Exact squared radius.
    r, r_int : float
        Physical radius sqrt(r2) and internal radius sqrt(conj(r2)).
    sigma_exact : quadVal | None
        Exact shelling number; None for empirical rows.
    sigma_float : float
        Float value of the shelling number.
    source : str
        "exact" or "empirical".
    """

    r2: quadVal
    r: float
    r_int: float
    sigma_exact: quadVal | None
    sigma_float: float
    source: str = EXACT

    @classmethod
    def exact(cls, r2: quadVal, sigma: quadVal) -> shellRecord:
        return cls(
            r2,
            math.sqrt(float(r2)),
            math.sqrt(max(0.0, float(r2.conj()))),
            sigma,
            float(sigma),
            EXACT,
        )

    @classmethod
    def empirical(cls, r2: quadVal, sigma: float) -> shellRecord:
        return cls(
            r2,
            math.sqrt(float(r2)),
            math.sqrt(max(0.0, float(r2.conj()))),
            None,
            float(sigma),
            EMPIRICAL,
        )


def nu(model: modelSet, y: diffVector) -> quadVal:
    """
    Autocorrelation coefficient of a difference vector, normalised per point.

    Parameters
    ----------
    model : modelSet
        The model set.
    y : diffVector
        A difference vector of the model set.

    Returns
    -------
    quadVal
        The exact frequency in [0, 1]. One-window sets give the normalised
        overlap of the window with its translate by -y*; for Penrose it is
        sum_i vol(P_i & (P_(i+c) - y*)) / sum_i vol(P_i), c the class shift.
    """
    if model.kind == SQUARE:
        return quadVal(1, 0, SQRT2)
    star = model.int_star(y.point)
    if model.kind != PENROSE:
        return overlap_fraction(model.window_for(0), star)
    windows = model.windows
    total = sum((area2(w) for w in windows.values()), quadVal(0, 0, model.basis))
    overlap = quadVal(0, 0, model.basis)
    for i, window in windows.items():
        partner = windows.get((i + y.class_shift) % 5)
        if partner is None:
            continue
        common = intersect(window, partner.translate(-star))
        if common is not None:
            overlap = overlap + area2(common)
    return overlap / total


def _representative(y: diffVector) -> tuple[int, ...]:
    return min(y.point.coeffs, (-y.point).coeffs)


def averaged_shelling(model: modelSet, radius: float, workers: int = 1) -> list[shellRecord]:
    """
    Exact averaged shelling numbers sigma(r) = sum_{|y| = r} nu(y).

    Parameters
    ----------
    model : modelSet
        The model set.
    radius : float
        Physical cut-off R > 0.
    workers : int, optional
        Number of worker processes for the overlap computations.
        default = 1

    Returns
    -------
    list of shellRecord
        Sorted by exact r2, starting with the record r = 0, sigma = 1;
        shells are grouped by exact equality of r2.
    """
    differences = model.enumerate_differences(radius)
    representatives = {}
    for y in differences:
        representatives.setdefault(_representative(y), y)
    # nu(y) = nu(-y): one overlap computation per pair
    keys = list(representatives)
    values = _parallel_map(partial(nu, model), [representatives[k] for k in keys], workers)
    cache = dict(zip(keys, values))

    shells: dict[quadVal, quadVal] = defaultdict(lambda: quadVal(0, 0, model.basis))
    for y in differences:
        shells[y.r2] = shells[y.r2] + cache[_representative(y)]

    one = quadVal(1, 0, model.basis)
    records = [shellRecord.exact(quadVal(0, 0, model.basis), one)]
    for r2 in sorted(shells):
        sigma = shells[r2]
        if sigma.sign() > 0:
            records.append(shellRecord.exact(r2, sigma))
    logger.info("%s: %d shells up to radius %.4g", model.kind, len(records), radius)
    return records


def silver_mean_sigma_closed_form(y: quadVal) -> quadVal:
    """
    Closed form of the silver mean chain shelling.

    sigma(0) = 1 and sigma(y) = 2 * max(0, 1 - |y'|/sqrt2) for y > 0.

    Examples
    --------
    >>> silver_mean_sigma_closed_form(quadVal(1, 0, "sqrt2"))
    quadVal(2, -1, 'sqrt2')
    """
    if y.basis != SQRT2 or not y.is_integral():
        raise ValueError(f"{y} is not an element of Z[sqrt2]")
    if y.sign() < 0:
        raise ValueError("the silver mean shelling needs y >= 0")
    if not y:
        return quadVal(1, 0, SQRT2)
    f = 1 - abs(y.conj()) * quadVal(0, Fraction(1, 2), SQRT2)
    if f.sign() <= 0:
        return quadVal(0, 0, SQRT2)
    return 2 * f


def _factorize(n: int) -> Counter:
    """Prime factorisation by trial division."""
    factors: Counter = Counter()
    while n % 2 == 0:
        factors[2] += 1
        n //= 2
    p = 3
    while p * p <= n:
        while n % p == 0:
            factors[p] += 1
            n //= p
        p += 2
    if n > 1:
        factors[n] += 1
    return factors


def central_square_lattice(m: int) -> int:
    """
    Number of points of Z^2 on the circle of squared radius m.

    sigma = 4*a(m) with a multiplicative: a(2^l) = 1, a(p^l) = l + 1 for
    p = 1 mod 4, and for p = 3 mod 4 a(p^l) = 1 if l is even, else 0.

    Examples
    --------
    >>> [central_square_lattice(m) for m in (1, 2, 4, 5, 8, 9, 10, 13, 16)]
    [4, 4, 4, 8, 4, 4, 8, 8, 4]
    """
    if m < 1:
        raise ValueError(f"the squared radius must be at least 1, got {m}")
    a = 1
    for p, power in _factorize(m).items():
        if p % 4 == 1:
            a *= power + 1
        elif p % 4 == 3 and power % 2:
            return 0
    return 4 * a


def central_shelling(model: modelSet, radius: float) -> list[shellRecord]:
    """Shell counts around the origin of physical space, grouped by exact r2."""
    counts: Counter = Counter(model.r2(p) for p in model.enumerate_points(radius))
    return [shellRecord.exact(r2, quadVal(counts[r2], 0, model.basis)) for r2 in sorted(counts)]


def patch_average_shelling(model: modelSet, radius: float, patch: float) -> list[shellRecord]:
    """
    Shelling averaged over the centres of a finite patch.

    Every point within `patch - radius` of the origin is used as a centre;
    its neighbours within `radius` come from the patch of radius `patch`,
    so no centre sees the patch boundary.

    Parameters
    ----------
    model : modelSet
        The model set.
    radius : float
        Shell cut-off R.
    patch : float
        Patch radius S > R.

    Returns
    -------
    list of shellRecord
        Empirical records keyed by exact r2, including r2 = 0.
    """
    if patch <= radius:
        raise ValueError("the patch radius must exceed the shell radius")
    points = model.enumerate_points(patch)
    coeffs = np.array([p.coeffs for p in points], dtype=np.int64)
    positions = np.array([model.float_phys(p) for p in points], dtype=float)
    inner = Fraction(patch - radius) ** 2
    centres = np.array([i for i, p in enumerate(points) if model.r2(p) <= inner], dtype=np.int64)
    if len(centres) == 0:
        raise ValueError("the patch holds no centre; increase the patch radius")
    logger.info("%s: averaging over %d centres of %d points", model.kind, len(centres), len(points))

    tree = cKDTree(positions)
    neighbours = tree.query_ball_point(positions[centres], r=radius + 1e-9)
    sizes = np.fromiter((len(n) for n in neighbours), dtype=np.int64, count=len(centres))
    first = np.repeat(centres, sizes)
    second = np.concatenate([np.asarray(n, dtype=np.int64) for n in neighbours])
    differences, counts = np.unique(coeffs[second] - coeffs[first], axis=0, return_counts=True)

    bound = Fraction(radius) ** 2
    shells: Counter = Counter()
    for row, count in zip(differences.tolist(), counts.tolist()):
        r2 = model.r2(latticePoint(tuple(row), model.kind))
        if r2 <= bound:
            shells[r2] += count
    return [shellRecord.empirical(r2, shells[r2] / len(centres)) for r2 in sorted(shells)]


def silver_mean_word(n: int) -> str:
    """
    The substitution word a -> aba, b -> a iterated n times from "a".

    Examples
    --------
    >>> silver_mean_word(2)
    'abaaaba'
    """
    if n < 0:
        raise ValueError("the number of iterations must be nonnegative")
    word = "a"
    for _ in range(n):
        word = "".join("aba" if letter == "a" else "a" for letter in word)
    return word


def silver_mean_positions(word: str, symmetric: bool = False) -> list[quadVal]:
    """
    Tile endpoints of a silver mean word, a of length 1 + sqrt2 and b of
    length 1, starting at 0.

    Parameters
    ----------
    word : str
        Word in the letters a and b.
    symmetric : bool, optional
        If True, also mirror the points to the left of 0; for the fixed
        point words this is the two-sided fixed point seeded with a|a,
        a model set with window [-sqrt2/2, sqrt2/2].
        default = False

    Returns
    -------
    list of quadVal
        Sorted exact positions.
    """
    lengths = {"a": quadVal(1, 1, SQRT2), "b": quadVal(1, 0, SQRT2)}
    position = quadVal(0, 0, SQRT2)
    positions = [position]
    for letter in word:
        try:
            position = position + lengths[letter]
        except KeyError:
            raise ValueError(f"unexpected letter {letter!r} in silver mean word") from None
        positions.append(position)
    if symmetric:
        positions = [-x for x in reversed(positions[1:])] + positions
    return positions
