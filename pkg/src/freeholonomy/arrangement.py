"""Planar arrangements of origin-based loops, with exact rational arithmetic.

The pipeline: pairwise-intersect all loop segments, split them into atomic
pieces, dissolve inessential degree-2 vertices into polyline edges, then
read the faces off the rotation system (darts sorted by angle around each
vertex; the successor of a dart is the clockwise neighbour of its reverse,
which traces every face boundary with bounded faces counterclockwise).

On top of the graph: spanning trees rooted at the origin, the facial lasso
basis of the fundamental group, and the rewriting of any drawn loop as a
reduced word in the facial generators (via the dual spanning tree carried
by the non-tree edges).
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Iterable, Sequence

from .braids import FreeWord
from .geometry import ORIGIN, Loop, Point2


class ArrangementError(ValueError):
    pass


def cross(d1: Point2, d2: Point2) -> Fraction:
    return d1[0] * d2[1] - d1[1] * d2[0]


def _sub(a: Point2, b: Point2) -> Point2:
    return (a[0] - b[0], a[1] - b[1])


def _param_on(seg: tuple[Point2, Point2], p: Point2) -> Fraction | None:
    """Parameter t in [0,1] with p = a + t(b-a), or None if p is off the segment."""
    a, b = seg
    d = _sub(b, a)
    r = _sub(p, a)
    if cross(d, r) != 0:
        return None
    dd = d[0] * d[0] + d[1] * d[1]
    t = (r[0] * d[0] + r[1] * d[1]) / dd
    if 0 <= t <= 1:
        return t
    return None


class EdgeWord:
    """A path in the graph: sequence of (edge id, sign) letters.

    Not reduced by default -- the geometric word of a loop keeps retraced
    edges.  ``reduced()`` cancels e e^-1 factors for fundamental-group work.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[tuple[int, int]] = ()):
        self.letters = tuple(letters)

    def reduced(self) -> "EdgeWord":
        out: list[tuple[int, int]] = []
        for e, s in self.letters:
            if out and out[-1][0] == e and out[-1][1] == -s:
                out.pop()
            else:
                out.append((e, s))
        return EdgeWord(out)

    def inverse(self) -> "EdgeWord":
        return EdgeWord((e, -s) for e, s in reversed(self.letters))

    def __mul__(self, other: "EdgeWord") -> "EdgeWord":
        return EdgeWord(self.letters + other.letters)

    def __eq__(self, other):
        return isinstance(other, EdgeWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        if not self.letters:
            return "<empty path>"
        return " ".join(f"E{e}" if s > 0 else f"E{e}^-1" for e, s in self.letters)


class Edge:
    """Undirected polyline edge; interior points all had degree 2."""

    __slots__ = ("id", "points")

    def __init__(self, eid: int, points: tuple[Point2, ...]):
        self.id = eid
        self.points = points

    @property
    def ends(self) -> tuple[Point2, Point2]:
        return self.points[0], self.points[-1]

    def chain(self, sign: int) -> tuple[Point2, ...]:
        return self.points if sign > 0 else tuple(reversed(self.points))

    def __repr__(self):
        return f"Edge{self.id}({self.points[0]}..{self.points[-1]}, {len(self.points)-1} pieces)"


class Face:
    __slots__ = ("id", "boundary", "area", "probe")

    def __init__(self, fid: int, boundary: EdgeWord, area: Fraction, probe: Point2):
        self.id = fid
        self.boundary = boundary
        self.area = area
        self.probe = probe

    def __repr__(self):
        return f"Face{self.id}(area={self.area})"


def _angle_cmp(d1: Point2, d2: Point2) -> int:
    """Order direction vectors by counterclockwise angle from the +x axis."""

    def half(d: Point2) -> int:
        return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1

    h1, h2 = half(d1), half(d2)
    if h1 != h2:
        return -1 if h1 < h2 else 1
    c = cross(d1, d2)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


class PlanarGraph:
    """Embedded planar multigraph produced by ``build_arrangement``."""

    def __init__(self, edges: list[Edge]):
        self.edges = edges
        verts: set[Point2] = {ORIGIN}
        for e in edges:
            verts.add(e.points[0])
            verts.add(e.points[-1])
        self.vertices = sorted(verts)
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        # darts: (edge id, sign); rotation system per vertex, CCW by angle
        self._rotation: dict[Point2, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        for e in edges:
            self._rotation[e.points[0]].append((e.id, 1))
            self._rotation[e.points[-1]].append((e.id, -1))
        for v, darts in self._rotation.items():
            keyed = []
            for d in darts:
                ch = self.edges[d[0]].chain(d[1])
                keyed.append((_sub(ch[1], ch[0]), d))
            keyed.sort(key=functools.cmp_to_key(lambda a, b: _angle_cmp(a[0], b[0])))
            for i in range(len(keyed) - 1):
                if _angle_cmp(keyed[i][0], keyed[i + 1][0]) == 0:
                    raise ArrangementError(f"coincident dart directions at {v}")
            self._rotation[v] = [d for _, d in keyed]
        self._dart_pos = {
            (d, v_i): i
            for v_i, v in enumerate(self.vertices)
            for i, d in enumerate(self._rotation[v])
        }
        self.bounded_faces: list[Face] = []
        self.unbounded_boundary = EdgeWord()
        self._face_of_dart: dict[tuple[int, int], int | None] = {}
        self._atomic: dict[tuple[Point2, Point2], tuple[int, int]] = {}
        for e in edges:
            for i in range(len(e.points) - 1):
                a, b = e.points[i], e.points[i + 1]
                key = (a, b) if a < b else (b, a)
                self._atomic[key] = (e.id, i)
        self._build_faces()

    # -- face construction -------------------------------------------------

    def _dart_head(self, dart: tuple[int, int]) -> Point2:
        e, s = dart
        return self.edges[e].points[-1] if s > 0 else self.edges[e].points[0]

    def _next_dart(self, dart: tuple[int, int]) -> tuple[int, int]:
        head = self._dart_head(dart)
        rev = (dart[0], -dart[1])
        rot = self._rotation[head]
        idx = rot.index(rev)
        return rot[(idx - 1) % len(rot)]

    def _walk_points(self, darts: Sequence[tuple[int, int]]) -> list[Point2]:
        pts: list[Point2] = []
        for e, s in darts:
            ch = self.edges[e].chain(s)
            pts.extend(ch[:-1])
        return pts

    def _build_faces(self):
        all_darts = [d for v in self.vertices for d in self._rotation[v]]
        seen: set[tuple[int, int]] = set()
        orbits: list[list[tuple[int, int]]] = []
        for d0 in all_darts:
            if d0 in seen:
                continue
            orbit = [d0]
            seen.add(d0)
            d = self._next_dart(d0)
            while d != d0:
                orbit.append(d)
                seen.add(d)
                d = self._next_dart(d)
            orbits.append(orbit)
        bounded: list[tuple[Fraction, EdgeWord, Point2, list[tuple[int, int]]]] = []
        negative = 0
        for orbit in orbits:
            pts = self._walk_points(orbit)
            area = Fraction(0)
            n = len(pts)
            for i in range(n):
                area += cross(pts[i], pts[(i + 1) % n])
            area /= 2
            if area > 0:
                probe = self._probe_point(orbit)
                bounded.append((area, EdgeWord(orbit), probe, orbit))
            else:
                negative += 1
                self.unbounded_boundary = EdgeWord(orbit)
                for d in orbit:
                    self._face_of_dart[d] = None
        if self.edges and negative != 1:
            raise ArrangementError(f"expected exactly one unbounded face, got {negative}")
        # canonical enumeration: lowest, then leftmost probe point
        bounded.sort(key=lambda rec: (rec[2][1], rec[2][0]))
        for fid, (area, word, probe, orbit) in enumerate(bounded):
            self.bounded_faces.append(Face(fid, word, area, probe))
            for d in orbit:
                self._face_of_dart[d] = fid
        n_faces = len(self.bounded_faces) + 1
        if len(self.vertices) - len(self.edges) + n_faces != 2:
            raise ArrangementError("Euler formula violated")

    def _probe_point(self, orbit: Sequence[tuple[int, int]]) -> Point2:
        """Exact interior point: offset from a boundary midpoint to half the
        distance of the first boundary crossing along the inward normal."""
        dart = min(orbit)
        ch = self.edges[dart[0]].chain(dart[1])
        a, b = ch[0], ch[1]
        m = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        d = _sub(b, a)
        nrm = (-d[1], d[0])  # left of travel = face side
        best: Fraction | None = None
        for (p, q) in self._atomic:
            dp = _sub(q, p)
            delta = _sub(p, m)
            den = cross(nrm, dp)
            if den == 0:
                if cross(delta, nrm) == 0:  # collinear with the ray
                    nn = nrm[0] * nrm[0] + nrm[1] * nrm[1]
                    for endp in (p, q):
                        s = ((endp[0] - m[0]) * nrm[0] + (endp[1] - m[1]) * nrm[1]) / nn
                        if s > 0 and (best is None or s < best):
                            best = s
                continue
            s = cross(delta, dp) / den
            u = cross(delta, nrm) / den
            if s > 0 and 0 <= u <= 1 and (best is None or s < best):
                best = s
        if best is None:
            raise ArrangementError("probe ray escaped: face is not bounded")
        h = best / 2
        return (m[0] + h * nrm[0], m[1] + h * nrm[1])

    # -- queries ------------------------------------------------------------

    def degree(self, v: Point2) -> int:
        return len(self._rotation[v])

    def face_of_dart(self, dart: tuple[int, int]) -> int | None:
        return self._face_of_dart[dart]

    def realize(self, word: EdgeWord, base: Point2 = ORIGIN) -> list[Point2]:
        """Vertex chain of the path, starting at ``base``."""
        pts = [base]
        for e, s in word.letters:
            ch = self.edges[e].chain(s)
            if ch[0] != pts[-1]:
                raise ArrangementError(f"path discontinuous at {pts[-1]}")
            pts.extend(ch[1:])
        return pts

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.bounded_faces) + 1


def winding_number(walk: Sequence[Point2], p: Point2) -> int:
    """Winding of a closed polyline around p (p must avoid the polyline)."""
    w = 0
    n = len(walk)
    py = p[1]
    for i in range(n):
        a, b = walk[i], walk[(i + 1) % n]
        if a == b:
            continue
        c = cross(_sub(b, a), _sub(p, a))
        if a[1] <= py < b[1] and c > 0:
            w += 1
        elif b[1] <= py < a[1] and c < 0:
            w -= 1
    return w


# -- arrangement construction ------------------------------------------------


def _intersections(segments: list[tuple[Point2, Point2]]) -> dict[tuple[Point2, Point2], set[Point2]]:
    splits: dict[tuple[Point2, Point2], set[Point2]] = {s: {s[0], s[1]} for s in segments}
    n = len(segments)
    for i in range(n):
        p1, q1 = segments[i]
        d1 = _sub(q1, p1)
        for j in range(i + 1, n):
            p2, q2 = segments[j]
            d2 = _sub(q2, p2)
            r = _sub(p2, p1)
            den = cross(d1, d2)
            if den != 0:
                t = cross(r, d2) / den
                u = cross(r, d1) / den
                if 0 <= t <= 1 and 0 <= u <= 1:
                    x = (p1[0] + t * d1[0], p1[1] + t * d1[1])
                    splits[segments[i]].add(x)
                    splits[segments[j]].add(x)
            elif cross(r, d1) == 0:  # collinear overlap: cut at each other's ends
                for endp in (p2, q2):
                    if _param_on(segments[i], endp) is not None:
                        splits[segments[i]].add(endp)
                for endp in (p1, q1):
                    if _param_on(segments[j], endp) is not None:
                        splits[segments[j]].add(endp)
    return splits


def _sorted_chain(seg: tuple[Point2, Point2], points: set[Point2]) -> list[Point2]:
    a, b = seg
    d = _sub(b, a)
    dd = d[0] * d[0] + d[1] * d[1]

    def t_of(p: Point2) -> Fraction:
        r = _sub(p, a)
        return (r[0] * d[0] + r[1] * d[1]) / dd

    return sorted(points, key=t_of)


def build_arrangement(loops: Sequence[Loop]) -> tuple[PlanarGraph, list[EdgeWord]]:
    """Arrange the loops into a planar graph; return it with one geometric
    edge word per input loop (unreduced: retracings are kept)."""
    if not loops:
        raise ArrangementError("no loops")
    canon_segs: set[tuple[Point2, Point2]] = set()
    walks_raw: list[list[tuple[Point2, Point2]]] = []
    for lp in loops:
        walk = []
        for a, b in lp.segments():
            walk.append((a, b))
            canon_segs.add((a, b) if a < b else (b, a))
        walks_raw.append(walk)
    if not canon_segs:  # all constant loops
        return PlanarGraph([]), [EdgeWord() for _ in loops]

    seg_list = sorted(canon_segs)
    splits = _intersections(seg_list)
    chains = {seg: _sorted_chain(seg, pts) for seg, pts in splits.items()}

    # atomic pieces and adjacency
    atomic: set[tuple[Point2, Point2]] = set()
    for seg, chain in chains.items():
        for i in range(len(chain) - 1):
            a, b = chain[i], chain[i + 1]
            atomic.add((a, b) if a < b else (b, a))
    adj: dict[Point2, list[Point2]] = {}
    for a, b in atomic:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    # directed atomic walk of each loop
    walks: list[list[tuple[Point2, Point2]]] = []
    for walk_raw in walks_raw:
        pieces: list[tuple[Point2, Point2]] = []
        for a, b in walk_raw:
            key = (a, b) if a < b else (b, a)
            chain = chains[key]
            if a < b:
                pairs = zip(chain[:-1], chain[1:])
            else:
                rev = list(reversed(chain))
                pairs = zip(rev[:-1], rev[1:])
            pieces.extend(pairs)
        walks.append(pieces)

    # essential vertices: origin, branch points, and reversal points of walks
    essential: set[Point2] = {ORIGIN}
    for v, nbrs in adj.items():
        if len(nbrs) != 2:
            essential.add(v)
    for pieces in walks:
        m = len(pieces)
        for i in range(m):
            nxt = pieces[(i + 1) % m]
            if pieces[i] == (nxt[1], nxt[0]):
                essential.add(pieces[i][1])

    # merge degree-2 chains into polyline edges
    claimed: set[tuple[Point2, Point2]] = set()
    polylines: list[tuple[Point2, ...]] = []
    for v in sorted(essential & set(adj.keys())):
        for w0 in sorted(adj[v]):
            key = (v, w0) if v < w0 else (w0, v)
            if key in claimed:
                continue
            pts = [v, w0]
            claimed.add(key)
            while pts[-1] not in essential:
                cur, prev = pts[-1], pts[-2]
                nbrs = adj[cur]
                nxt = nbrs[0] if nbrs[1] == prev else nbrs[1]
                k2 = (cur, nxt) if cur < nxt else (nxt, cur)
                claimed.add(k2)
                pts.append(nxt)
            tup = tuple(pts)
            rev = tuple(reversed(pts))
            polylines.append(min(tup, rev))
    if len(claimed) != len(atomic):
        raise ArrangementError("unreachable atomic pieces: arrangement not connected to origin")

    polylines.sort()
    edges = [Edge(i, pts) for i, pts in enumerate(polylines)]
    graph = PlanarGraph(edges)

    # express each loop walk as an edge word
    piece_to_edge: dict[tuple[Point2, Point2], tuple[int, int]] = {}
    for e in edges:
        for i in range(len(e.points) - 1):
            a, b = e.points[i], e.points[i + 1]
            key = (a, b) if a < b else (b, a)
            piece_to_edge[key] = (e.id, i)
    words = []
    for pieces in walks:
        words.append(_group_walk(pieces, edges, piece_to_edge))
    return graph, words


def _group_walk(
    pieces: list[tuple[Point2, Point2]],
    edges: list[Edge],
    piece_to_edge: dict[tuple[Point2, Point2], tuple[int, int]],
) -> EdgeWord:
    letters: list[tuple[int, int]] = []
    i = 0
    m = len(pieces)
    while i < m:
        a, b = pieces[i]
        key = (a, b) if a < b else (b, a)
        if key not in piece_to_edge:
            raise ArrangementError(f"segment {a}-{b} is not drawn in the graph")
        eid, idx = piece_to_edge[key]
        e = edges[eid]
        npieces = len(e.points) - 1
        if e.points[idx] == a and idx == 0:
            sign = 1
            expect = [(e.points[j], e.points[j + 1]) for j in range(npieces)]
        elif e.points[idx + 1] == a and idx == npieces - 1:
            sign = -1
            expect = [(e.points[j + 1], e.points[j]) for j in reversed(range(npieces))]
        else:
            raise ArrangementError(f"walk enters edge {eid} mid-polyline at {a}")
        if pieces[i : i + npieces] != expect:
            raise ArrangementError(f"walk does not follow edge {eid} from {a}")
        letters.append((eid, sign))
        i += npieces
    return EdgeWord(letters)


def trace_loop(graph: PlanarGraph, loop: Loop) -> EdgeWord:
    """Edge word of a loop drawn entirely in the existing graph."""
    if loop.is_constant:
        return EdgeWord()
    # candidate split points: graph vertices plus polyline interior points
    candidates: set[Point2] = set(graph.vertices)
    for key in graph._atomic:
        candidates.update(key)
    pieces: list[tuple[Point2, Point2]] = []
    for a, b in loop.segments():
        on_seg = []
        for v in candidates:
            t = _param_on((a, b), v)
            if t is not None:
                on_seg.append((t, v))
        on_seg = sorted(on_seg)
        if not on_seg or on_seg[0][1] != a or on_seg[-1][1] != b:
            raise ArrangementError(f"loop segment {a}-{b} is not drawn in the graph")
        for (t1, v1), (t2, v2) in zip(on_seg[:-1], on_seg[1:]):
            key = (v1, v2) if v1 < v2 else (v2, v1)
            if key not in graph._atomic:
                raise ArrangementError(f"loop piece {v1}-{v2} is not an edge piece of the graph")
            pieces.append((v1, v2))
    piece_to_edge = {}
    for e in graph.edges:
        for i in range(len(e.points) - 1):
            a, b = e.points[i], e.points[i + 1]
            piece_to_edge[(a, b) if a < b else (b, a)] = (e.id, i)
    return _group_walk(pieces, graph.edges, piece_to_edge)


# -- spanning trees -----------------------------------------------------------


class SpanningTree:
    """Rooted at the origin; knows the tree path between any two vertices."""

    def __init__(self, graph: PlanarGraph, parent: dict[Point2, tuple[int, int] | None]):
        self.graph = graph
        self.parent = parent  # vertex -> dart (edge, sign) traversing parent->vertex
        self.tree_edges = {d[0] for d in parent.values() if d is not None}
        self._depth: dict[Point2, int] = {}
        for v in graph.vertices:
            d = 0
            u = v
            while self.parent[u] is not None:
                e, s = self.parent[u]
                edge = graph.edges[e]
                u = edge.points[0] if s > 0 else edge.points[-1]
                d += 1
            self._depth[v] = d

    def _up(self, v: Point2) -> tuple[Point2, tuple[int, int]]:
        e, s = self.parent[v]
        edge = self.graph.edges[e]
        par = edge.points[0] if s > 0 else edge.points[-1]
        return par, (e, s)

    def tree_path(self, u: Point2, v: Point2) -> EdgeWord:
        """Reduced tree path from u to v (through their meet)."""
        up_u: list[tuple[int, int]] = []
        up_v: list[tuple[int, int]] = []
        a, b = u, v
        while self._depth[a] > self._depth[b]:
            a, d = self._up(a)
            up_u.append((d[0], -d[1]))
        while self._depth[b] > self._depth[a]:
            b, d = self._up(b)
            up_v.append(d)
        while a != b:
            a, d = self._up(a)
            up_u.append((d[0], -d[1]))
            b, d2 = self._up(b)
            up_v.append(d2)
        return EdgeWord(up_u + list(reversed(up_v)))


def spanning_tree(graph: PlanarGraph, rng=None) -> SpanningTree:
    """Breadth-first tree from the origin, neighbours in rotation order.

    With an ``rng`` (numpy Generator), edge exploration order is shuffled to
    produce varied trees for invariance audits.
    """
    if ORIGIN not in graph._vindex:
        raise ArrangementError("graph has no origin vertex")
    parent: dict[Point2, tuple[int, int] | None] = {ORIGIN: None}
    queue = [ORIGIN]
    while queue:
        v = queue.pop(0)
        darts = list(graph._rotation[v])
        if rng is not None:
            idx = rng.permutation(len(darts))
            darts = [darts[i] for i in idx]
        for e, s in darts:
            edge = graph.edges[e]
            w = edge.points[-1] if s > 0 else edge.points[0]
            if w not in parent:
                parent[w] = (e, s)
                queue.append(w)
    if len(parent) != len(graph.vertices):
        raise ArrangementError("graph is disconnected")
    return SpanningTree(graph, parent)


# -- lasso basis and loop decomposition ---------------------------------------


class LassoBasis:
    """One lasso per bounded face, free-generating the fundamental group.

    ``lassos[i]`` is the edge word tree-path + face boundary + tree-path
    back for face i of the graph's canonical enumeration.  ``edge_lasso``
    maps each non-tree edge to its expression as a free word in the facial
    generators (solved leaf-to-root along the dual spanning tree).
    """

    def __init__(self, graph: PlanarGraph, tree: SpanningTree,
                 lassos: list[EdgeWord], edge_lasso: dict[int, FreeWord]):
        self.graph = graph
        self.tree = tree
        self.lassos = lassos
        self.edge_lasso = edge_lasso
        self.rank = len(lassos)

    def decompose(self, word: EdgeWord) -> FreeWord:
        """Rewrite a closed edge word at the origin in the facial generators."""
        out = FreeWord.identity(self.rank)
        for e, s in word.reduced().letters:
            if e in self.tree.tree_edges:
                continue
            w = self.edge_lasso[e]
            out = out * (w if s > 0 else w.inverse())
        return out

    def realize(self, word: FreeWord) -> EdgeWord:
        """Edge word of a free word in the facial lassos."""
        out = EdgeWord()
        for g, s in word.letters:
            l = self.lassos[g]
            out = out * (l if s > 0 else l.inverse())
        return out.reduced()


def facial_lasso_basis(graph: PlanarGraph, tree: SpanningTree, rng=None) -> LassoBasis:
    """Build the facial lasso basis; ``rng`` randomizes each boundary's
    start vertex (default: lexicographically smallest, first occurrence)."""
    k = len(graph.bounded_faces)
    non_tree = [e.id for e in graph.edges if e.id not in tree.tree_edges]
    if len(non_tree) != k:
        raise ArrangementError("non-tree edge count does not match bounded faces")

    lassos: list[EdgeWord] = []
    rotated_boundaries: list[list[tuple[int, int]]] = []
    for face in graph.bounded_faces:
        darts = list(face.boundary.letters)
        bases = []
        for i, d in enumerate(darts):
            e, s = d
            base = graph.edges[e].points[0] if s > 0 else graph.edges[e].points[-1]
            bases.append((base, i))
        if rng is None:
            start = min(bases)[1]
        else:
            start = int(rng.integers(0, len(darts)))
        rot = darts[start:] + darts[:start]
        start_vertex = bases[start][0]
        go = tree.tree_path(ORIGIN, start_vertex)
        lasso = (go * EdgeWord(rot) * go.inverse()).reduced()
        lassos.append(lasso)
        rotated_boundaries.append(rot)

    # dual tree on faces (None = unbounded), one dual edge per non-tree edge
    dual_adj: dict[int | None, list[tuple[int | None, int]]] = {None: []}
    for f in range(k):
        dual_adj[f] = []
    for e in non_tree:
        fl = graph.face_of_dart((e, 1))
        fr = graph.face_of_dart((e, -1))
        if fl == fr:
            raise ArrangementError(f"non-tree edge {e} borders a single face")
        dual_adj[fl].append((fr, e))
        dual_adj[fr].append((fl, e))
    # BFS from the unbounded face
    dual_parent: dict[int | None, tuple[int | None, int] | None] = {None: None}
    order: list[int | None] = [None]
    qi = 0
    while qi < len(order):
        f = order[qi]
        qi += 1
        for (g, e) in dual_adj[f]:
            if g not in dual_parent:
                dual_parent[g] = (f, e)
                order.append(g)
    if len(order) != k + 1:
        raise ArrangementError("dual graph of non-tree edges is not connected")

    # peel leaf-to-root: each face's boundary has exactly one unsolved edge
    edge_lasso: dict[int, FreeWord] = {}
    for f in reversed(order):
        if f is None:
            continue
        parent_edge = dual_parent[f][1]
        rot = rotated_boundaries[f]
        restricted = [(e, s) for (e, s) in rot if e not in tree.tree_edges]
        pos = [i for i, (e, _s) in enumerate(restricted) if e == parent_edge]
        if len(pos) != 1:
            raise ArrangementError("parent dual edge should appear once on the boundary")
        i = pos[0]
        sigma = restricted[i][1]
        left = FreeWord.identity(k)
        for e, s in restricted[:i]:
            w = edge_lasso[e]
            left = left * (w if s > 0 else w.inverse())
        right = FreeWord.identity(k)
        for e, s in restricted[i + 1 :]:
            w = edge_lasso[e]
            right = right * (w if s > 0 else w.inverse())
        b_f = FreeWord.generator(k, f)
        solved = left.inverse() * b_f * right.inverse()
        edge_lasso[parent_edge] = solved if sigma > 0 else solved.inverse()
    return LassoBasis(graph, tree, lassos, edge_lasso)


def decompose_loop(word: EdgeWord, basis: LassoBasis) -> FreeWord:
    """Reduced word of a loop (based at the origin) in the facial lassos."""
    pts_start = None
    if word.letters:
        e, s = word.letters[0]
        pts_start = basis.graph.edges[e].chain(s)[0]
        e2, s2 = word.letters[-1]
        pts_end = basis.graph.edges[e2].chain(s2)[-1]
        if pts_start != ORIGIN or pts_end != ORIGIN:
            raise ArrangementError("edge word is not a loop at the origin")
    return basis.decompose(word)


# -- JSON interchange ----------------------------------------------------------


def _frac_pair(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def graph_to_json(graph: PlanarGraph) -> dict:
    verts = [_frac_pair(v[0]) + _frac_pair(v[1]) for v in graph.vertices]
    edges = []
    for e in graph.edges:
        edges.append(
            {
                "id": e.id,
                "from": graph._vindex[e.points[0]],
                "to": graph._vindex[e.points[-1]],
                "polyline": [_frac_pair(p[0]) + _frac_pair(p[1]) for p in e.points],
            }
        )
    faces = []
    for f in graph.bounded_faces:
        faces.append(
            {
                "id": f.id,
                "boundary": [(e + 1) * s for e, s in f.boundary.letters],
                "area": _frac_pair(f.area),
            }
        )
    return {"vertices": verts, "edges": edges, "faces": faces}


def graph_from_json(data: dict) -> PlanarGraph:
    edges = []
    for erec in data["edges"]:
        pts = tuple(
            (Fraction(p[0], p[1]), Fraction(p[2], p[3])) for p in erec["polyline"]
        )
        edges.append(Edge(erec["id"], pts))
    edges.sort(key=lambda e: e.id)
    graph = PlanarGraph(edges)
    for frec in data.get("faces", []):
        want = Fraction(frec["area"][0], frec["area"][1])
        have = graph.bounded_faces[frec["id"]].area
        if want != have:
            raise ArrangementError(f"face {frec['id']}: area mismatch on load")
    return graph
