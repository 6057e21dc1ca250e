from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .exactnum import SQRT2, TAU, quadVal
from .geom2d import (
    Window,
    convex_hull,
    convexWindow,
    exactPoint2,
    intervalWindow,
    minkowski_difference,
)

logger = logging.getLogger(__name__)

SQUARE = "square"
SILVER = "silver"
AMMANN = "ammann"
PENROSE = "penrose"
KINDS = (SQUARE, SILVER, AMMANN, PENROSE)

COEFFICIENT_LENGTH = {SQUARE: 2, SILVER: 2, AMMANN: 4, PENROSE: 5}
BASIS = {SQUARE: SQRT2, SILVER: SQRT2, AMMANN: SQRT2, PENROSE: TAU}

_EPS = 1e-9
_H = math.sqrt(2.0) / 2.0

# xi^k = cos(2 pi k/5) + i sin(2 pi k/5), second coordinate in units of sin(2 pi/5)
_HALF = Fraction(1, 2)
_PENTAGON = (
    (quadVal(1, 0, TAU), quadVal(0, 0, TAU)),
    (quadVal(-_HALF, _HALF, TAU), quadVal(1, 0, TAU)),
    (quadVal(0, -_HALF, TAU), quadVal(-1, 1, TAU)),
    (quadVal(0, -_HALF, TAU), quadVal(1, -1, TAU)),
    (quadVal(-_HALF, _HALF, TAU), quadVal(-1, 0, TAU)),
)
_PENTAGON_FLOAT = np.array(
    [[math.cos(2 * math.pi * k / 5), math.sin(2 * math.pi * k / 5)] for k in range(5)]
)
SIN72 = math.sin(2 * math.pi / 5)

Point = Union[exactPoint2, quadVal]


@dataclass(frozen=True)
class latticePoint:
    """
    Integer coefficient vector of a point of the underlying lattice.

    Penrose vectors are stored in the canonical form with last coefficient 0;
    (1, 1, 1, 1, 1) is a relation of the fifth roots of unity, so this loses
    nothing and keeps equality and hashing well defined.
    """

    coeffs: tuple[int, ...]
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown model set kind {self.kind!r}")
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) != COEFFICIENT_LENGTH[self.kind]:
            raise ValueError(
                f"{self.kind} points need {COEFFICIENT_LENGTH[self.kind]} "
                f"coefficients, got {len(coeffs)}"
            )
        if self.kind == PENROSE:
            coeffs = tuple(c - coeffs[4] for c in coeffs)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def klass(self) -> int:
        """Translation class sum(coeffs) mod 5 (Penrose), 0 otherwise."""
        if self.kind != PENROSE:
            return 0
        return sum(self.coeffs) % 5

    def __neg__(self) -> latticePoint:
        return latticePoint(tuple(-c for c in self.coeffs), self.kind)

    def __add__(self, other: latticePoint) -> latticePoint:
        return latticePoint(
            tuple(c + d for c, d in zip(self.coeffs, other.coeffs)), self.kind
        )

    def __sub__(self, other: latticePoint) -> latticePoint:
        return self + (-other)


@dataclass(frozen=True)
class diffVector:
    """A difference vector with its exact squared length and class shift."""

    point: latticePoint
    r2: quadVal
    class_shift: int = 0


def _ammann_phys(n: Sequence) -> exactPoint2:
    n0, n1, n2, n3 = (Fraction(c) for c in n)
    return exactPoint2(
        quadVal(n0, (n1 - n3) / 2, SQRT2), quadVal(n2, (n1 + n3) / 2, SQRT2)
    )


def _ammann_star(n: Sequence) -> exactPoint2:
    n0, n1, n2, n3 = (Fraction(c) for c in n)
    return exactPoint2(
        quadVal(n0, (n3 - n1) / 2, SQRT2), quadVal(-n2, (n1 + n3) / 2, SQRT2)
    )


def _penrose_embed(n: Sequence, step: int) -> exactPoint2:
    x = quadVal(0, 0, TAU)
    y = quadVal(0, 0, TAU)
    for k, c in enumerate(n):
        if c:
            px, py = _PENTAGON[(step * k) % 5]
            x = x + px * Fraction(c)
            y = y + py * Fraction(c)
    return exactPoint2(x, y)


def ammann_r2(n: Sequence[int]) -> quadVal:
    """|sum n_k zeta^k|^2 in Z[sqrt2], zeta = exp(i pi/4)."""
    n0, n1, n2, n3 = n
    return quadVal(
        n0 * n0 + n1 * n1 + n2 * n2 + n3 * n3,
        n0 * n1 + n1 * n2 + n2 * n3 - n3 * n0,
        SQRT2,
    )


def penrose_r2(n: Sequence[int]) -> quadVal:
    """|sum n_k xi^k|^2 in Z[tau], xi = exp(2 pi i/5)."""
    squares = sum(c * c for c in n)
    near = far = 0
    for j in range(5):
        for k in range(j + 1, 5):
            if (k - j) in (1, 4):
                near += n[j] * n[k]
            else:
                far += n[j] * n[k]
    # 2 cos(72) = tau - 1, 2 cos(144) = -tau
    return quadVal(squares - near, near - far, TAU)


class modelSet:
    """
    Cut-and-project data of one of the four point sets: lattice, star map,
    windows and translation classes.

    Parameters
    ----------
    kind : str
        One of "square", "silver", "ammann" or "penrose".

    Notes
    -----
    Windows are open. The silver mean window is [-sqrt2/2, sqrt2/2]; the
    Ammann-Beenker window is the regular octagon of side 1 obtained as the
    internal projection of the centred unit 4-cube (two horizontal edges);
    the Penrose windows P_1..P_4 are the hulls of the internal images of the
    0/1-vectors of Z^5 with coordinate sum j.
    """

    def __init__(self, kind: str) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown model set kind {kind!r}, expected one of {KINDS}")
        self._kind = kind
        self._basis = BASIS[kind]
        self._windows: dict[int, Window] = self._build_windows()
        self._difference_windows: dict[int, list[tuple[int, Window]]] = (
            self._build_difference_windows()
        )

    def __repr__(self) -> str:
        return f"modelSet({self._kind!r})"

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def basis(self) -> str:
        return self._basis

    @property
    def windows(self) -> dict[int, Window]:
        """Windows keyed by translation class (class 0 for one-window sets)."""
        return dict(self._windows)

    def point(self, coeffs: Sequence[int]) -> latticePoint:
        return latticePoint(tuple(coeffs), self._kind)

    def _build_windows(self) -> dict[int, Window]:
        if self._kind == SQUARE:
            return {}
        if self._kind == SILVER:
            half = quadVal(0, _HALF, SQRT2)
            return {0: intervalWindow(-half, half)}
        if self._kind == AMMANN:
            corners = itertools.product((-_HALF, _HALF), repeat=4)
            return {0: convex_hull(_ammann_star(c) for c in corners)}
        windows = {}
        for j in range(1, 5):
            corners = [c for c in itertools.product((0, 1), repeat=5) if sum(c) == j]
            windows[j] = convex_hull(_penrose_embed(c, 2) for c in corners)
        return windows

    def _build_difference_windows(self) -> dict[int, list[tuple[int, Window]]]:
        """For each class shift c, the windows P_(i+c) - P_i keyed by class i."""
        if self._kind == SQUARE:
            return {}
        if self._kind != PENROSE:
            window = self._windows[0]
            return {0: [(0, minkowski_difference(window, window))]}
        result = {}
        for shift in range(5):
            result[shift] = [
                (i, minkowski_difference(self._windows[(i + shift) % 5], self._windows[i]))
                for i in range(1, 5)
                if (i + shift) % 5 != 0
            ]
        return result

    def window_for(self, klass: int) -> Window | None:
        return self._windows.get(klass % 5 if self._kind == PENROSE else 0)

    def difference_windows(self, class_shift: int = 0) -> list[tuple[int, Window]]:
        """
        The windows of the difference set for one class shift.

        Returns
        -------
        list of (int, Window)
            Pairs (class i, window P_(i+c) - P_i); a single pair with class
            0 for one-window sets.
        """
        if self._kind == PENROSE:
            return list(self._difference_windows[class_shift % 5])
        return list(self._difference_windows.get(0, []))

    def _check(self, p: latticePoint) -> None:
        if p.kind != self._kind:
            raise ValueError(f"point of kind {p.kind} used with a {self._kind} model set")

    def phys(self, p: latticePoint) -> Point:
        """
        Exact physical position of a lattice point.

        Silver mean points are scalars a + b*sqrt2; planar points are
        exactPoint2 (Penrose second coordinate in units of sin(2*pi/5)).
        """
        self._check(p)
        if self._kind == SILVER:
            a, b = p.coeffs
            return quadVal(a, b, SQRT2)
        if self._kind == SQUARE:
            m, n = p.coeffs
            return exactPoint2(quadVal(m, 0, SQRT2), quadVal(n, 0, SQRT2))
        if self._kind == AMMANN:
            return _ammann_phys(p.coeffs)
        return _penrose_embed(p.coeffs, 1)

    def int_star(self, p: latticePoint) -> Point:
        """Exact internal image (star map) of a lattice point."""
        self._check(p)
        if self._kind == SILVER:
            a, b = p.coeffs
            return quadVal(a, -b, SQRT2)
        if self._kind == SQUARE:
            return exactPoint2(quadVal(0, 0, SQRT2), quadVal(0, 0, SQRT2))
        if self._kind == AMMANN:
            return _ammann_star(p.coeffs)
        return _penrose_embed(p.coeffs, 2)

    def r2(self, p: latticePoint) -> quadVal:
        """Exact squared physical length |phys(p)|^2."""
        self._check(p)
        if self._kind == SILVER:
            x = quadVal(p.coeffs[0], p.coeffs[1], SQRT2)
            return x * x
        if self._kind == SQUARE:
            m, n = p.coeffs
            return quadVal(m * m + n * n, 0, SQRT2)
        if self._kind == AMMANN:
            return ammann_r2(p.coeffs)
        return penrose_r2(p.coeffs)

    def int_r2(self, p: latticePoint) -> quadVal:
        """Exact squared internal length, the algebraic conjugate of r2."""
        return self.r2(p).conj()

    def membership(self, p: latticePoint) -> bool:
        """True iff the star image lies in the open window of the point's class."""
        self._check(p)
        if self._kind == SQUARE:
            return True
        window = self.window_for(p.klass)
        if window is None:
            return False
        return window.contains(self.int_star(p))

    def difference_support(self, p: latticePoint) -> bool:
        """True iff the star image lies inside the open difference window."""
        if self._kind == SQUARE:
            return True
        star = self.int_star(p)
        return any(w.contains(star) for _, w in self.difference_windows(p.klass))

    # float helpers used to prefilter candidate vectors

    def _float_phys(self, coeffs: np.ndarray) -> np.ndarray:
        c = coeffs.astype(float)
        if self._kind == SILVER:
            return (c[:, 0] + math.sqrt(2.0) * c[:, 1])[:, None]
        if self._kind == SQUARE:
            return c
        if self._kind == AMMANN:
            return np.stack(
                [c[:, 0] + _H * (c[:, 1] - c[:, 3]), c[:, 2] + _H * (c[:, 1] + c[:, 3])],
                axis=1,
            )
        return c @ _PENTAGON_FLOAT

    def _float_star(self, coeffs: np.ndarray) -> np.ndarray:
        c = coeffs.astype(float)
        if self._kind == SILVER:
            return (c[:, 0] - math.sqrt(2.0) * c[:, 1])[:, None]
        if self._kind == SQUARE:
            return np.zeros_like(c)
        if self._kind == AMMANN:
            return np.stack(
                [c[:, 0] + _H * (c[:, 3] - c[:, 1]), _H * (c[:, 1] + c[:, 3]) - c[:, 2]],
                axis=1,
            )
        return c @ _PENTAGON_FLOAT[[(2 * k) % 5 for k in range(5)]]

    def float_phys(self, p: latticePoint) -> tuple[float, ...]:
        return tuple(self._float_phys(np.array([p.coeffs]))[0])

    def _window_radius(self, windows: list[Window]) -> float:
        radius = 0.0
        for window in windows:
            if isinstance(window, intervalWindow):
                radius = max(radius, abs(float(window.lo)), abs(float(window.hi)))
                continue
            for v in window.vertices:
                x = float(v.x)
                y = float(v.y) * (SIN72 if self._basis == TAU else 1.0)
                radius = max(radius, math.hypot(x, y))
        return radius + _EPS

    def _candidates(self, radius: float, internal: float) -> np.ndarray:
        """
        All coefficient vectors with |phys| <= radius and |star| <= internal,
        up to the float tolerance; complete by construction.
        """
        if self._kind == SQUARE:
            bound = int(math.floor(radius + _EPS))
            grid = np.arange(-bound, bound + 1)
            m, n = np.meshgrid(grid, grid, indexing="ij")
            rows = np.stack([m.ravel(), n.ravel()], axis=1)
        elif self._kind == SILVER:
            rows = _silver_strip(radius, internal)
        elif self._kind == AMMANN:
            rows = _ammann_strips(radius, internal)
        else:
            # 2|phys|^2 + 2|star|^2 = sum_{i<j} (n_i - n_j)^2 >= n_i^2 with n_4 = 0
            bound = math.isqrt(int(math.floor(2 * (radius**2 + internal**2) + _EPS))) + 1
            grid = np.arange(-bound, bound + 1)
            mesh = np.meshgrid(grid, grid, grid, indexing="ij")
            tail = np.stack([m.ravel() for m in mesh], axis=1)
            zeros = np.zeros((len(tail), 1), dtype=tail.dtype)
            slices = []
            for n0 in grid:
                block = np.hstack([np.full((len(tail), 1), n0), tail, zeros])
                slices.append(self._keep_within(block, radius, internal))
            return np.concatenate(slices)
        return self._keep_within(rows, radius, internal)

    def _keep_within(self, rows: np.ndarray, radius: float, internal: float) -> np.ndarray:
        phys = self._float_phys(rows)
        star = self._float_star(rows)
        keep = (np.sum(phys**2, axis=1) <= radius**2 + _EPS * max(1.0, radius**2)) & (
            np.sum(star**2, axis=1) <= internal**2 + _EPS
        )
        return rows[keep]

    def _within(self, r2: quadVal, radius: float) -> bool:
        return r2 <= Fraction(radius) ** 2

    def enumerate_points(self, radius: float) -> list[latticePoint]:
        """
        All points of the model set with |phys| <= radius.

        Parameters
        ----------
        radius : float
            Physical cut-off R > 0.

        Returns
        -------
        list of latticePoint
            Complete and duplicate free, sorted by exact r2 and then by
            coefficients.
        """
        if radius <= 0:
            raise ValueError("radius must be positive")
        windows = list(self._windows.values())
        internal = self._window_radius(windows) if windows else 0.0
        rows = self._candidates(radius, internal)
        logger.info("%s: %d candidate points within %.4g", self._kind, len(rows), radius)
        inside, undecided = self._float_membership(rows)
        points = []
        for row, sure, unsure in zip(rows.tolist(), inside, undecided):
            if not (sure or unsure):
                continue
            p = latticePoint(tuple(row), self._kind)
            if unsure and not self.membership(p):
                continue
            points.append(p)
        keyed = [(self.r2(p), p.coeffs, p) for p in points]
        keyed = [k for k in keyed if self._within(k[0], radius)]
        keyed.sort(key=lambda k: (k[0], k[1]))
        return [k[2] for k in keyed]

    def _float_membership(self, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split candidates into surely inside and undecided (near a boundary)."""
        n = len(rows)
        if self._kind == SQUARE:
            return np.ones(n, bool), np.zeros(n, bool)
        star = self._float_star(rows)
        if self._kind == PENROSE:
            classes = np.sum(rows, axis=1) % 5
        else:
            classes = np.zeros(n, int)
        distance = np.full(n, -np.inf)
        for klass, window in self._windows.items():
            mask = classes == klass
            if mask.any():
                distance[mask] = self._float_depth(window, star[mask])
        return distance > _EPS, np.abs(distance) <= _EPS

    def _float_depth(self, window: Window, star: np.ndarray) -> np.ndarray:
        """Signed distance of float points to the window boundary (positive inside)."""
        if isinstance(window, intervalWindow):
            lo, hi = float(window.lo), float(window.hi)
            return np.minimum(star[:, 0] - lo, hi - star[:, 0])
        yscale = SIN72 if self._basis == TAU else 1.0
        verts = np.array([[float(v.x), float(v.y) * yscale] for v in window.vertices])
        depth = np.full(len(star), np.inf)
        for a, b in zip(verts, np.roll(verts, -1, axis=0)):
            edge = b - a
            cross = edge[0] * (star[:, 1] - a[1]) - edge[1] * (star[:, 0] - a[0])
            depth = np.minimum(depth, cross / np.hypot(*edge))
        return depth

    def enumerate_differences(self, radius: float) -> list[diffVector]:
        """
        Candidate difference vectors y with 0 < |y| <= radius whose star
        image lies in the open difference window Omega - Omega (for Penrose,
        in some P_(i+c) - P_i with c the class shift of y).

        Returns
        -------
        list of diffVector
            Sorted by exact r2, then by coefficients.
        """
        if radius <= 0:
            raise ValueError("radius must be positive")
        windows = [w for ws in self._difference_windows.values() for _, w in ws]
        internal = self._window_radius(windows) if windows else 0.0
        rows = self._candidates(radius, internal)
        logger.info(
            "%s: %d candidate difference vectors within %.4g", self._kind, len(rows), radius
        )
        result = []
        for row in rows.tolist():
            if not any(row):
                continue
            p = latticePoint(tuple(row), self._kind)
            r2 = self.r2(p)
            if not self._within(r2, radius) or not self.difference_support(p):
                continue
            result.append(diffVector(p, r2, p.klass))
        result.sort(key=lambda d: (d.r2, d.point.coeffs))
        logger.info("%s: %d difference vectors kept", self._kind, len(result))
        return result

    def dump_points(self, radius: float, path) -> int:
        """
        Write the point-set dump: integer coefficients, then float physical
        coordinates, one point per line.

        Returns
        -------
        int
            Number of points written.
        """
        points = self.enumerate_points(radius)
        with open(path, "w") as dump:
            for p in points:
                coords = self.float_phys(p)
                dump.write(
                    " ".join(str(c) for c in p.coeffs)
                    + " "
                    + " ".join(repr(float(x)) for x in coords)
                    + "\n"
                )
        return len(points)


def _strip_pairs(radius: float, internal: float) -> np.ndarray:
    """
    Integer pairs (m, k) with |m + k*sqrt2/2| <= radius and
    |m - k*sqrt2/2| <= internal.
    """
    k_bound = int(math.floor((radius + internal) / (2 * _H) + _EPS))
    ks = np.arange(-k_bound, k_bound + 1)
    width = int(math.ceil(2 * internal)) + 2
    base = np.ceil(_H * ks - internal - _EPS).astype(int)
    m = base[:, None] + np.arange(width)[None, :]
    k = np.broadcast_to(ks[:, None], m.shape)
    phys = m + _H * k
    star = m - _H * k
    keep = (np.abs(phys) <= radius + _EPS) & (np.abs(star) <= internal + _EPS)
    return np.stack([m[keep], k[keep]], axis=1)


def _silver_strip(radius: float, internal: float) -> np.ndarray:
    # x = a + b*sqrt2 = a + (2b)*sqrt2/2: reuse the strip with even k
    pairs = _strip_pairs(radius, internal)
    pairs = pairs[pairs[:, 1] % 2 == 0]
    return np.stack([pairs[:, 0], pairs[:, 1] // 2], axis=1)


def _ammann_strips(radius: float, internal: float) -> np.ndarray:
    # x axis pairs (n0, n1 - n3), y axis pairs (n2, n1 + n3); both strips
    # have the form |m + k*sqrt2/2| <= R, |m - k*sqrt2/2| <= rho
    pairs = _strip_pairs(radius, internal)
    xi = np.repeat(np.arange(len(pairs)), len(pairs))
    yi = np.tile(np.arange(len(pairs)), len(pairs))
    xs = ys = pairs
    u = xs[xi, 1]
    w = ys[yi, 1]
    same = (u - w) % 2 == 0
    xi, yi, u, w = xi[same], yi[same], u[same], w[same]
    n0 = xs[xi, 0]
    n2 = ys[yi, 0]
    n1 = (w + u) // 2
    n3 = (w - u) // 2
    return np.stack([n0, n1, n2, n3], axis=1)
