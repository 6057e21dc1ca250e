from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .exactnum import BasisMismatchError, quadVal


@dataclass(frozen=True)
class exactPoint2:
    """
    Point of the internal plane with exact quadratic coordinates.

    For pentagonal windows the second coordinate is stored in units of
    sin(2*pi/5), so both coordinates stay in Q(tau). The scaling is a
    positive linear map; orientations, convexity and area ratios are
    unaffected by it.
    """

    x: quadVal
    y: quadVal

    def __post_init__(self) -> None:
        if self.x.basis != self.y.basis:
            raise BasisMismatchError("point coordinates must share a basis")

    @property
    def basis(self) -> str:
        return self.x.basis

    def __add__(self, other: exactPoint2) -> exactPoint2:
        return exactPoint2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: exactPoint2) -> exactPoint2:
        return exactPoint2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> exactPoint2:
        return exactPoint2(-self.x, -self.y)

    def scale(self, factor: quadVal | int) -> exactPoint2:
        return exactPoint2(self.x * factor, self.y * factor)

    def cross(self, other: exactPoint2) -> quadVal:
        return self.x * other.y - self.y * other.x

    def key(self) -> tuple:
        return (self.x, self.y)


def orient(a: exactPoint2, b: exactPoint2, c: exactPoint2) -> quadVal:
    """Twice the signed area of the triangle abc (positive if counterclockwise)."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _simplify(vertices: Sequence[exactPoint2]) -> list[exactPoint2]:
    """Drop repeated and collinear vertices of a convex cycle."""
    points = list(vertices)
    changed = True
    while changed and len(points) >= 3:
        changed = False
        kept = []
        n = len(points)
        for i in range(n):
            prev, cur, nxt = points[i - 1], points[i], points[(i + 1) % n]
            if cur == prev or orient(prev, cur, nxt).sign() == 0:
                changed = True
                continue
            kept.append(cur)
        if changed:
            points = kept
    return points


@dataclass(frozen=True)
class convexWindow:
    """
    Strictly convex polygon with counterclockwise vertices and positive area.

    Use `convex_hull` to build one from an arbitrary point cloud.
    """

    vertices: tuple[exactPoint2, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError("a convex window needs at least 3 vertices")
        bases = {v.basis for v in self.vertices}
        if len(bases) != 1:
            raise BasisMismatchError("window vertices must share a basis")

    @property
    def basis(self) -> str:
        return self.vertices[0].basis

    def area2(self) -> quadVal:
        return area2(self)

    def translate(self, offset: exactPoint2) -> convexWindow:
        return convexWindow(tuple(v + offset for v in self.vertices))

    def reflect(self) -> convexWindow:
        """The point reflection -P, still counterclockwise."""
        return convexWindow(tuple(-v for v in self.vertices))

    def edges(self) -> list[tuple[exactPoint2, exactPoint2]]:
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def contains(self, point: exactPoint2, strict: bool = True) -> bool:
        """
        Exact point-in-polygon test.

        Parameters
        ----------
        point : exactPoint2
            The point to test.
        strict : bool, optional
            If True the boundary counts as outside (open window).
            default = True
        """
        for a, b in self.edges():
            s = orient(a, b, point).sign()
            if s < 0 or (strict and s == 0):
                return False
        return True


@dataclass(frozen=True)
class intervalWindow:
    """One-dimensional window [lo, hi] with hi > lo."""

    lo: quadVal
    hi: quadVal

    def __post_init__(self) -> None:
        if self.hi <= self.lo:
            raise ValueError("an interval window needs hi > lo")

    @property
    def basis(self) -> str:
        return self.lo.basis

    def length(self) -> quadVal:
        return self.hi - self.lo

    def contains(self, value: quadVal, strict: bool = True) -> bool:
        if strict:
            return self.lo < value < self.hi
        return self.lo <= value <= self.hi

    def translate(self, offset: quadVal) -> intervalWindow:
        return intervalWindow(self.lo + offset, self.hi + offset)

    def reflect(self) -> intervalWindow:
        return intervalWindow(-self.hi, -self.lo)


Window = Union[convexWindow, intervalWindow]


def convex_hull(points: Iterable[exactPoint2]) -> convexWindow:
    """
    Exact convex hull (monotone chain), counterclockwise, collinear points
    removed.

    Raises
    ------
    ValueError
        If the points do not span a polygon of positive area.
    """
    unique = sorted(set(points), key=lambda p: p.key())
    if len(unique) < 3:
        raise ValueError("convex hull needs at least 3 distinct points")

    def half(chain_points: list[exactPoint2]) -> list[exactPoint2]:
        chain: list[exactPoint2] = []
        for p in chain_points:
            while len(chain) >= 2 and orient(chain[-2], chain[-1], p).sign() <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(unique)
    upper = half(unique[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise ValueError("points are collinear")
    return convexWindow(tuple(hull))


def area2(polygon: convexWindow) -> quadVal:
    """
    Twice the signed shoelace area of a polygon, exact.

    For pentagonal windows the value is the coefficient of the fixed unit
    sin(2*pi/5), which cancels in every ratio.

    Raises
    ------
    ValueError
        If the polygon has fewer than 3 vertices.
    """
    vertices = polygon.vertices
    if len(vertices) < 3:
        raise ValueError("area needs at least 3 vertices")
    total = quadVal(0, 0, vertices[0].basis)
    n = len(vertices)
    for i in range(n):
        total = total + vertices[i].cross(vertices[(i + 1) % n])
    return total


def _clip(
    vertices: list[exactPoint2], a: exactPoint2, b: exactPoint2
) -> list[exactPoint2]:
    """Keep the part of a convex polygon on the left of the directed line ab."""
    out: list[exactPoint2] = []
    n = len(vertices)
    sides = [orient(a, b, v) for v in vertices]
    signs = [s.sign() for s in sides]
    for i in range(n):
        j = (i + 1) % n
        if signs[i] >= 0:
            out.append(vertices[i])
        if signs[i] * signs[j] < 0:
            t = sides[i] / (sides[i] - sides[j])
            cur, nxt = vertices[i], vertices[j]
            out.append(cur + (nxt - cur).scale(t))
    return out


def intersect(p: convexWindow, q: convexWindow) -> convexWindow | None:
    """
    Exact intersection of two convex windows by successive half-plane
    clipping of `p` with the edges of `q`.

    Returns
    -------
    convexWindow | None
        The intersection, or None when it has zero area (disjoint or only
        touching).
    """
    if p.basis != q.basis:
        raise BasisMismatchError("cannot intersect windows of different bases")
    vertices = list(p.vertices)
    for a, b in q.edges():
        vertices = _clip(vertices, a, b)
        if len(vertices) < 3:
            return None
    vertices = _simplify(vertices)
    if len(vertices) < 3:
        return None
    return convexWindow(tuple(vertices))


def intersect_intervals(p: intervalWindow, q: intervalWindow) -> intervalWindow | None:
    lo = max(p.lo, q.lo)
    hi = min(p.hi, q.hi)
    if hi <= lo:
        return None
    return intervalWindow(lo, hi)


def overlap_area2(window: convexWindow, other: convexWindow) -> quadVal:
    """Twice the area of the intersection, zero when empty."""
    common = intersect(window, other)
    if common is None:
        return quadVal(0, 0, window.basis)
    return area2(common)


def overlap_fraction(window: Window, t: exactPoint2 | quadVal) -> quadVal:
    """
    Normalised overlap vol(W & (W - t)) / vol(W), exact.

    Parameters
    ----------
    window : convexWindow | intervalWindow
        The window W.
    t : exactPoint2 | quadVal
        The translation, a point for polygons and a scalar for intervals.

    Returns
    -------
    quadVal
        A value in [0, 1]; 1 at t = 0 and 0 once t leaves W - W.

    Examples
    --------
    >>> half = quadVal(0, 1, "sqrt2") / 2
    >>> overlap_fraction(intervalWindow(-half, half), quadVal(1))
    quadVal(1, -1/2, 'sqrt2')
    """
    if isinstance(window, intervalWindow):
        common = intersect_intervals(window, window.translate(-t))
        if common is None:
            return quadVal(0, 0, window.basis)
        return common.length() / window.length()
    shifted = window.translate(-t)
    return overlap_area2(window, shifted) / area2(window)


def minkowski_difference(p: Window, q: Window) -> Window:
    """The window P - Q = {a - b : a in P, b in Q}."""
    if isinstance(p, intervalWindow):
        return intervalWindow(p.lo - q.hi, p.hi - q.lo)
    return convex_hull(a - b for a in p.vertices for b in q.vertices)
