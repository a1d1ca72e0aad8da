"""Mixed moments of words in freely independent unitaries.

Two evaluators over the same marginal data:

* ``word_moment`` -- the centering recursion.  Split every letter into its
  trace plus a centered part; the fully centered alternating product has
  zero trace by free independence, so the word's trace is an alternating
  sum over letter-deletion patterns of traces of strictly shorter words.
  Memoized on canonical words.  Worst case exponential in the word length
  (fine at desk scale); words longer than ``CENTERING_CUTOFF`` are routed
  to the cumulant evaluator below, which computes the same functional.

* ``word_moment_nc`` -- independent oracle: sum over non-crossing
  partitions with generator-monochromatic blocks of products of
  *-cumulants, each unitary's cumulants obtained by Moebius inversion from
  its moments (which only depend on exponent sums).
"""

from __future__ import annotations

import math
import re
from itertools import combinations
from typing import Protocol, Sequence

from .levy import CharTriplet, MomentSeries, moments

CENTERING_CUTOFF = 11
NC_LENGTH_BOUND = 12


class WordError(ValueError):
    pass


# -- canonical power words -----------------------------------------------------

PowerWord = tuple[tuple[int, int], ...]  # ((generator, nonzero exponent), ...)


def canon_word(letters: Sequence[tuple[int, int]]) -> PowerWord:
    # stack pass: merging a cancellation re-exposes the previous letter,
    # which the next iteration checks again, so one pass suffices
    out: list[tuple[int, int]] = []
    for g, e in letters:
        e = int(e)
        if e == 0:
            continue
        if out and out[-1][0] == g:
            ne = out[-1][1] + e
            out.pop()
            if ne != 0:
                out.append((g, ne))
        else:
            out.append((g, e))
    return tuple(out)


def word_inverse(word: Sequence[tuple[int, int]]) -> PowerWord:
    return canon_word([(g, -e) for g, e in reversed(list(word))])


def word_concat(*wordlist: Sequence[tuple[int, int]]) -> PowerWord:
    letters: list[tuple[int, int]] = []
    for w in wordlist:
        letters.extend(w)
    return canon_word(letters)


def word_reversed(word: Sequence[tuple[int, int]]) -> PowerWord:
    """The word read right-to-left (letters reversed, exponents kept)."""
    return canon_word(list(reversed(list(word))))


_WORD_TOKEN = re.compile(r"^a(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str) -> PowerWord:
    """Parse "a1^2 a2^-1 a1" (1-based generator indices)."""
    letters = []
    for tok in text.split():
        m = _WORD_TOKEN.match(tok)
        if not m:
            raise WordError(f"bad word token {tok!r}")
        g = int(m.group(1)) - 1
        e = int(m.group(2)) if m.group(2) else 1
        letters.append((g, e))
    return canon_word(letters)


def format_word(word: Sequence[tuple[int, int]]) -> str:
    if not word:
        return "1"
    return " ".join(f"a{g+1}" if e == 1 else f"a{g+1}^{e}" for g, e in word)


# -- marginal moment providers ---------------------------------------------------


class MomentProvider(Protocol):
    def moment(self, n: int) -> complex: ...


class TripletMarginal:
    """Moments of one free Levy increment; deepens its series on demand."""

    def __init__(self, triplet: CharTriplet, t: float, order: int = 16):
        self.triplet = triplet
        self.t = float(t)
        self._series = moments(triplet, t, max(order, 1)) if t > 0 else None

    def moment(self, n: int) -> complex:
        n = int(n)
        if n == 0 or self.t == 0:
            return 1.0 + 0j
        a = abs(n)
        if self._series is None or a > self._series.order:
            self._series = moments(self.triplet, self.t, 2 * a)
        return self._series.moment(n)


class FixedMarginal:
    """Moments given as literal data; fails loudly past the given depth."""

    def __init__(self, values: dict[int, complex]):
        self.values = {0: 1.0 + 0j}
        for n, v in values.items():
            self.values[int(n)] = complex(v)
            self.values[-int(n)] = complex(v).conjugate()

    def moment(self, n: int) -> complex:
        n = int(n)
        if n not in self.values:
            raise WordError(f"fixed marginal exhausted at moment {n}")
        return self.values[n]


class HaarMarginal:
    """All nonzero moments vanish."""

    def moment(self, n: int) -> complex:
        return 1.0 + 0j if int(n) == 0 else 0j


class SeriesMarginal:
    """Wraps a MomentSeries."""

    def __init__(self, series: MomentSeries):
        self.series = series

    def moment(self, n: int) -> complex:
        return self.series.moment(n)


class Marginals:
    """The joint data: one moment provider per free generator, plus the
    evaluator's memo cache (keyed on canonical words)."""

    def __init__(self, providers: Sequence[MomentProvider]):
        self.providers = list(providers)
        self.cache: dict[PowerWord, complex] = {}
        self.kappa_cache: dict[tuple[int, tuple[int, ...]], complex] = {}
        self.nc_cache: dict[PowerWord, complex] = {}

    def __len__(self):
        return len(self.providers)

    def moment(self, g: int, n: int) -> complex:
        return self.providers[g].moment(n)


# -- centering recursion ----------------------------------------------------------


def word_moment(word: Sequence[tuple[int, int]], marginals: Marginals) -> complex:
    """Trace of the word under free independence of the generators."""
    w = canon_word(word)
    return _moment_any(w, marginals)


def _moment_any(w: PowerWord, marginals: Marginals) -> complex:
    if len(w) > CENTERING_CUTOFF:
        return _moment_cumulant(w, marginals)
    return _moment_centering(w, marginals)


def _moment_centering(w: PowerWord, marginals: Marginals) -> complex:
    if not w:
        return 1.0 + 0j
    if len(w) == 1:
        g, e = w[0]
        return marginals.moment(g, e)
    cached = marginals.cache.get(w)
    if cached is not None:
        return cached
    m = len(w)
    mv = [marginals.moment(g, e) for g, e in w]
    total = 0j
    idx = range(m)
    for r in range(1, m + 1):
        sign = 1.0 if r % 2 == 1 else -1.0
        for S in combinations(idx, r):
            coeff = sign
            for i in S:
                coeff *= mv[i]
            if coeff == 0:
                continue
            sub = canon_word([w[i] for i in idx if i not in S])
            total += coeff * _moment_any(sub, marginals)
    marginals.cache[w] = total
    return total


# -- non-crossing cumulant evaluator ------------------------------------------------


def _kappa(gen: int, exps: tuple[int, ...], marginals: Marginals) -> complex:
    """Free *-cumulant of (u^e1,..,u^er) for a single unitary u, from its
    moments by Moebius inversion on the non-crossing lattice."""
    key = (gen, exps)
    hit = marginals.kappa_cache.get(key)
    if hit is not None:
        return hit
    r = len(exps)
    if r == 1:
        v = marginals.moment(gen, exps[0])
    else:
        rest = _nc_moment_single(gen, exps, marginals, exclude_full=True)
        v = marginals.moment(gen, sum(exps)) - rest
    marginals.kappa_cache[key] = v
    return v


def _nc_moment_single(gen: int, exps: tuple[int, ...], marginals: Marginals,
                      exclude_full: bool = False) -> complex:
    """Moment of u^e1 .. u^er as the non-crossing cumulant sum, by the
    first-block recursion (optionally excluding the single-block term)."""
    r = len(exps)
    if r == 0:
        return 1.0 + 0j
    total = 0j
    others = list(range(1, r))
    for nb in range(0, r):
        for rest in combinations(others, nb):
            block = (0,) + rest
            if exclude_full and len(block) == r:
                continue
            prod = _kappa(gen, tuple(exps[i] for i in block), marginals)
            if prod == 0:
                continue
            prev = 0
            ok = True
            for bpos in list(block[1:]) + [r]:
                gap = exps[prev + 1 : bpos]
                prod *= _nc_moment_single(gen, tuple(gap), marginals)
                if prod == 0:
                    ok = False
                    break
                prev = bpos
            if ok:
                total += prod
    return total


def _moment_cumulant(w: PowerWord, marginals: Marginals) -> complex:
    if not w:
        return 1.0 + 0j
    hit = marginals.nc_cache.get(w)
    if hit is not None:
        return hit
    r = len(w)
    g0 = w[0][0]
    same = [i for i in range(1, r) if w[i][0] == g0]
    total = 0j
    for nb in range(0, len(same) + 1):
        for rest in combinations(same, nb):
            block = (0,) + rest
            exps = tuple(w[i][1] for i in block)
            prod = _kappa(g0, exps, marginals)
            if prod == 0:
                continue
            prev = 0
            ok = True
            for bpos in list(block[1:]) + [r]:
                gap = w[prev + 1 : bpos]
                prod *= _moment_cumulant(gap, marginals)
                if prod == 0:
                    ok = False
                    break
                prev = bpos
            if ok:
                total += prod
    marginals.nc_cache[w] = total
    return total


def word_moment_nc(word: Sequence[tuple[int, int]], marginals: Marginals,
                   max_length: int = NC_LENGTH_BOUND) -> complex:
    """Oracle evaluator: non-crossing partition sum over monochromatic
    blocks of products of *-cumulants."""
    w = canon_word(word)
    if len(w) > max_length:
        raise WordError(
            f"word length {len(w)} over the oracle bound {max_length}; "
            "use word_moment for long words"
        )
    return _moment_cumulant(w, marginals)


# -- the loop metric ------------------------------------------------------------------


def loop_l2_distance(w1: Sequence[tuple[int, int]], w2: Sequence[tuple[int, int]],
                     marginals: Marginals) -> float:
    """d(a, b) = sqrt(tau((a-b)(a-b)^*)) = sqrt(2 - 2 Re tau(b^-1 a)) for
    unitaries a, b given as words."""
    diff = word_concat(word_inverse(w2), w1)
    if not diff:
        return 0.0
    val = 2.0 - 2.0 * word_moment(diff, marginals).real
    if val < -1e-12:
        raise WordError(f"distance radicand {val} is negative beyond tolerance")
    return math.sqrt(max(val, 0.0))
