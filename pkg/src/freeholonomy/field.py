"""Exact traces of the holonomy field on piecewise-affine loops.

A context bundles the arrangement of a loop family, a spanning tree, the
facial lasso basis, and one marginal moment provider per bounded face (the
increment law at that face's area).  Lassos over distinct faces are freely
independent, so the trace of any drawn loop is the mixed moment of its
reversed reduced facial word -- multiplicative functions compose holonomies
in reverse order, and we evaluate the reversed word literally.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .arrangement import (
    ArrangementError,
    EdgeWord,
    LassoBasis,
    PlanarGraph,
    SpanningTree,
    build_arrangement,
    facial_lasso_basis,
    spanning_tree,
    trace_loop,
)
from .braids import FreeWord
from .geometry import ORIGIN, Loop, Point2, dyadic_approx
from .levy import CharTriplet, first_moment
from .words import Marginals, TripletMarginal, loop_l2_distance, word_moment, word_reversed

DEFAULT_MARGINAL_DEPTH = 16


class FieldError(ValueError):
    pass


@dataclass
class HolonomyContext:
    graph: PlanarGraph
    tree: SpanningTree
    basis: LassoBasis
    triplet: CharTriplet
    areas: list[float]
    marginals: Marginals
    loops: list[Loop]
    loop_words: list[EdgeWord]
    _word_cache: dict = dc_field(default_factory=dict)

    @property
    def face_count(self) -> int:
        return len(self.areas)

    def facial_word(self, loop: Loop) -> FreeWord:
        """Reduced word of the loop in the facial lasso generators."""
        hit = self._word_cache.get(loop.vertices)
        if hit is not None:
            return hit
        try:
            idx = self.loops.index(loop)
            edge_word = self.loop_words[idx]
        except ValueError:
            edge_word = trace_loop(self.graph, loop)
        w = self.basis.decompose(edge_word)
        self._word_cache[loop.vertices] = w
        return w


def build_context(
    loops: list[Loop],
    triplet: CharTriplet,
    depth: int = DEFAULT_MARGINAL_DEPTH,
    tree_rng=None,
    basis_rng=None,
    enumeration: list[int] | None = None,
) -> HolonomyContext:
    """Arrange the loops, pick tree and lasso basis, attach increment laws.

    ``tree_rng``/``basis_rng`` randomize the spanning tree and the boundary
    start vertices (for invariance audits); ``enumeration`` permutes the
    face order used for the generators (default: the canonical order).
    """
    if not loops:
        raise FieldError("no loops")
    graph, words = build_arrangement(loops)
    tree = spanning_tree(graph, rng=tree_rng)
    basis = facial_lasso_basis(graph, tree, rng=basis_rng)
    k = len(graph.bounded_faces)
    order = list(range(k)) if enumeration is None else list(enumeration)
    if sorted(order) != list(range(k)):
        raise FieldError(f"enumeration must be a permutation of 0..{k-1}")
    ctx = HolonomyContext(
        graph=graph,
        tree=tree,
        basis=_permuted_basis(basis, order),
        triplet=triplet,
        areas=[float(graph.bounded_faces[f].area) for f in order],
        marginals=Marginals(
            [
                TripletMarginal(triplet, float(graph.bounded_faces[f].area), depth)
                for f in order
            ]
        ),
        loops=list(loops),
        loop_words=words,
    )
    return ctx


def _permuted_basis(basis: LassoBasis, order: list[int]) -> LassoBasis:
    """Relabel generators so that generator i is the face order[i]."""
    if order == list(range(basis.rank)):
        return basis
    pos = {f: i for i, f in enumerate(order)}
    relabeled = {
        e: FreeWord(basis.rank, [(pos[g], s) for g, s in w.letters])
        for e, w in basis.edge_lasso.items()
    }
    lassos = [basis.lassos[f] for f in order]
    return LassoBasis(basis.graph, basis.tree, lassos, relabeled)


def master_trace(ctx: HolonomyContext, loop: Loop) -> complex:
    """tau of the holonomy of the loop: the mixed free moment of the
    reversed facial word on the per-face increment laws."""
    w = ctx.facial_word(loop)
    rev = word_reversed([(g, s) for g, s in w.letters])
    return word_moment(rev, ctx.marginals)


def loop_distance(ctx: HolonomyContext, l1: Loop, l2: Loop) -> float:
    w1 = ctx.facial_word(l1)
    w2 = ctx.facial_word(l2)
    r1 = word_reversed([(g, s) for g, s in w1.letters])
    r2 = word_reversed([(g, s) for g, s in w2.letters])
    return loop_l2_distance(r1, r2, ctx.marginals)


@dataclass
class BoundReport:
    lhs: float
    rhs: float
    K: float
    n: int
    length: float
    approx_length: float
    satisfied: bool


def certify_sqrt_premise(triplet: CharTriplet, K: float, max_area: float,
                         grid: int = 200) -> None:
    """Check d(1, h_t) = sqrt(2 - 2 Re m_1(t)) <= K sqrt(t) on an area grid."""
    for i in range(1, grid + 1):
        t = max_area * i / grid
        d = math.sqrt(max(0.0, 2.0 - 2.0 * first_moment(triplet, t).real))
        if d > K * math.sqrt(t) + 1e-12:
            raise FieldError(
                f"premise fails at area {t}: d(1,h_t)={d:.6g} > K sqrt(t)={K*math.sqrt(t):.6g}"
            )


def extension_bound_check(
    loop: Loop, n: int, triplet: CharTriplet, K: float,
    grid_denominator: int = 2**32,
) -> BoundReport:
    """Compare d(h_l, h_{D_n l}) against K len^(3/4) (len - len(D_n))^(1/4).

    The sqrt premise for K is certified on a grid of areas up to the total
    bounded area of the joint arrangement (a stronger check than the small
    loops the extension argument needs).
    """
    approx = dyadic_approx(loop, n, grid_denominator=grid_denominator)
    ctx = build_context([loop, approx], triplet)
    total_area = sum(ctx.areas)
    certify_sqrt_premise(triplet, K, max(total_area, 1e-9))
    lhs = loop_distance(ctx, loop, approx)
    ell = loop.length
    ell_n = approx.length
    gap = max(ell - ell_n, 0.0)
    rhs = K * ell ** 0.75 * gap ** 0.25
    return BoundReport(
        lhs=lhs, rhs=rhs, K=K, n=n, length=ell, approx_length=ell_n,
        satisfied=lhs <= rhs + 1e-9,
    )


# -- invariance audits -----------------------------------------------------------


def _chord_split_loops(graph: PlanarGraph) -> list[Loop]:
    """For each bounded face, a loop through two boundary-piece midpoints,
    whose middle segment is a chord splitting the face when it stays inside
    (always the case for convex faces)."""
    out = []
    for face in graph.bounded_faces:
        pieces = []
        for e, s in face.boundary.letters:
            ch = graph.edges[e].chain(s)
            pieces.extend(zip(ch[:-1], ch[1:]))
        if len(pieces) < 2:
            continue
        a0, b0 = pieces[0]
        a1, b1 = pieces[len(pieces) // 2]
        m1 = ((a0[0] + b0[0]) / 2, (a0[1] + b0[1]) / 2)
        m2 = ((a1[0] + b1[0]) / 2, (a1[1] + b1[1]) / 2)
        if m1 == m2:
            continue
        verts = [ORIGIN]
        if m1 != ORIGIN:
            verts.append(m1)
        if m2 != ORIGIN:
            verts.append(m2)
        if len(verts) >= 3:
            out.append(Loop(verts))
    return out


@dataclass
class AuditReport:
    loops: int
    trials: int
    base_traces: list[complex]
    max_deviation: float
    variants: int


def invariance_audit(
    loops: list[Loop],
    triplet: CharTriplet,
    trials: int = 5,
    seed: int = 0,
    max_enumerations: int = 24,
) -> AuditReport:
    """Recompute every loop's trace under random spanning trees, random
    boundary start vertices, permuted face enumerations, and one chord
    refinement; report the maximal deviation from the canonical run."""
    if trials < 1:
        raise FieldError("trials must be at least 1")
    base = build_context(loops, triplet)
    base_traces = [master_trace(base, lp) for lp in loops]
    max_dev = 0.0
    variants = 0

    def record(ctx):
        nonlocal max_dev, variants
        variants += 1
        for lp, ref in zip(loops, base_traces):
            val = master_trace(ctx, lp)
            max_dev = max(max_dev, abs(val - ref))

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        record(build_context(loops, triplet, tree_rng=rng, basis_rng=rng))

    k = base.face_count
    perms = list(itertools.permutations(range(k)))
    if len(perms) > max_enumerations:
        idx = rng.choice(len(perms), size=max_enumerations, replace=False)
        perms = [perms[i] for i in idx]
    for perm in perms:
        record(build_context(loops, triplet, enumeration=list(perm)))

    splitters = _chord_split_loops(base.graph)
    if splitters:
        refined = build_context(list(loops) + splitters, triplet)
        for lp, ref in zip(loops, base_traces):
            val = master_trace(refined, lp)
            max_dev = max(max_dev, abs(val - ref))
        variants += 1

    return AuditReport(
        loops=len(loops), trials=trials, base_traces=base_traces,
        max_deviation=max_dev, variants=variants,
    )
