"""Loops in the plane with exact rational vertices.

All user-facing coordinates are ``fractions.Fraction``, so point equality,
segment intersection and signed areas are decided exactly, with no epsilon.
Floating point enters only through lengths (which are genuinely irrational)
and through the dyadic arclength sampler, whose sample parameters are
snapped back onto a rational grid along each segment.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterator, Sequence

Point2 = tuple[Fraction, Fraction]

ORIGIN: Point2 = (Fraction(0), Fraction(0))


class LoopError(ValueError):
    """Raised for malformed loop input or unusable loop parameters."""


def pt(x, y) -> Point2:
    return (Fraction(x), Fraction(y))


def seg_length(a: Point2, b: Point2) -> float:
    dx = float(b[0] - a[0])
    dy = float(b[1] - a[1])
    return math.hypot(dx, dy)


class Loop:
    """A closed polyline based at the origin.

    ``vertices`` lists the corners starting at (0,0); the closing segment
    back to the origin is implicit.  A single-vertex loop is the constant
    loop (zero segments); two vertices give the degenerate out-and-back
    chord, which occurs as a dyadic approximation.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Point2]):
        verts = tuple((Fraction(x), Fraction(y)) for x, y in vertices)
        if not verts:
            raise LoopError("loop needs at least one vertex")
        if verts[0] != ORIGIN:
            raise LoopError(f"loop not based at origin: starts at {verts[0]}")
        n = len(verts)
        for i in range(n - 1):
            if verts[i] == verts[i + 1]:
                raise LoopError(f"repeated consecutive vertex {verts[i]}")
        if n >= 2 and verts[-1] == verts[0]:
            raise LoopError("closing vertex must be left implicit")
        self.vertices = verts

    def __eq__(self, other):
        return isinstance(other, Loop) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        pts = " ".join(f"({v[0]},{v[1]})" for v in self.vertices)
        return f"Loop[{pts}]"

    @property
    def is_constant(self) -> bool:
        return len(self.vertices) == 1

    def segments(self) -> Iterator[tuple[Point2, Point2]]:
        verts = self.vertices
        n = len(verts)
        if n == 1:
            return
        for i in range(n - 1):
            yield verts[i], verts[i + 1]
        yield verts[-1], verts[0]

    @property
    def length(self) -> float:
        return sum(seg_length(a, b) for a, b in self.segments())

    def reversed(self) -> "Loop":
        if self.is_constant:
            return self
        return Loop((self.vertices[0],) + tuple(reversed(self.vertices[1:])))

    def concat(self, other: "Loop") -> "Loop":
        """Geometric concatenation: trace self, return to 0, trace other."""
        if self.is_constant:
            return other
        if other.is_constant:
            return self
        return Loop(self.vertices + other.vertices)

    def power(self, k: int) -> "Loop":
        if k == 0:
            return Loop([ORIGIN])
        base = self if k > 0 else self.reversed()
        out = base
        for _ in range(abs(k) - 1):
            out = out.concat(base)
        return out


_POINT_RE = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def _parse_coord(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise LoopError(f"non-rational coordinate {tok!r}") from None


def parse_loop(text: str) -> Loop:
    """Parse ``"(0,0) (1,0) (1,1) (0,1)"`` into a Loop.

    The trailing segment back to (0,0) is implicit; a final explicit
    ``(0,0)`` is accepted and stripped.  Coordinates may be integers,
    fractions like ``3/4``, or decimal strings, all parsed exactly.
    """
    body = text.strip()
    if not body:
        raise LoopError("empty loop description")
    matches = list(_POINT_RE.finditer(body))
    leftover = _POINT_RE.sub("", body).strip()
    if leftover:
        raise LoopError(f"unparseable token {leftover.split()[0]!r}")
    points = [(_parse_coord(m.group(1)), _parse_coord(m.group(2))) for m in matches]
    if not points:
        raise LoopError("no vertices found")
    if points[0] != ORIGIN:
        raise LoopError(f"loop not based at origin: starts at ({points[0][0]},{points[0][1]})")
    if len(points) >= 2 and points[-1] == points[0]:
        points = points[:-1]
    if len(points) < 3:
        raise LoopError("loop not closed")
    for i in range(len(points) - 1):
        if points[i] == points[i + 1]:
            raise LoopError(f"repeated consecutive vertex ({points[i][0]},{points[i][1]})")
    return Loop(points)


def dyadic_approx(loop: Loop, n: int, grid_denominator: int = 2**64) -> Loop:
    """Piecewise-affine loop through the 2^n arclength samples of ``loop``.

    Sample j sits at arclength j * len/2^n.  The position parameter along
    the containing segment is computed in floating point and snapped to a
    rational multiple of 1/grid_denominator, so every sample point lies
    exactly on the original polyline and downstream arrangements stay
    exact (no spurious micro-faces along the loop).
    """
    if n < 0:
        raise LoopError("dyadic order must be nonnegative")
    if loop.is_constant:
        return loop
    segs = list(loop.segments())
    lens = [seg_length(a, b) for a, b in segs]
    total = sum(lens)
    cum = [0.0]
    for ln in lens:
        cum.append(cum[-1] + ln)
    npts = 2**n
    samples: list[Point2] = []
    j_seg = 0
    for j in range(npts):
        target = total * j / npts
        while j_seg + 1 < len(segs) and cum[j_seg + 1] <= target:
            j_seg += 1
        a, b = segs[j_seg]
        ln = lens[j_seg]
        u = (target - cum[j_seg]) / ln if ln > 0 else 0.0
        u_snap = Fraction(round(u * grid_denominator), grid_denominator)
        if u_snap < 0:
            u_snap = Fraction(0)
        if u_snap > 1:
            u_snap = Fraction(1)
        p = (a[0] + u_snap * (b[0] - a[0]), a[1] + u_snap * (b[1] - a[1]))
        samples.append(p)
    if all(p == samples[0] for p in samples):
        return Loop([ORIGIN])
    for i in range(len(samples)):
        if samples[i] == samples[(i + 1) % len(samples)]:
            raise LoopError("grid too coarse: consecutive dyadic samples coincide after snapping")
    return Loop(samples)
