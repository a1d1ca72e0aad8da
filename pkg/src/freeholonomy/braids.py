"""Braid words, their action on free-group words and on tuples, and the
projection to permutations.

Generators are stored 0-based internally; the text format ("s1 s2^-1") and
reprs are 1-based.  Braid words act as left group actions: in a product
``u*v`` the right factor ``v`` acts first, so ``perm_of_braid`` is a plain
homomorphism into the symmetric group.
"""

from __future__ import annotations

import re
from typing import Sequence


class FreeWord:
    """A reduced word in the free group on ``rank`` generators.

    Letters are (generator, sign) with sign in {+1, -1}; adjacent inverse
    pairs are cancelled on construction.
    """

    __slots__ = ("rank", "letters")

    def __init__(self, rank: int, letters: Sequence[tuple[int, int]] = ()):
        self.rank = rank
        out: list[tuple[int, int]] = []
        for g, s in letters:
            if not (0 <= g < rank):
                raise ValueError(f"generator {g} out of range for rank {rank}")
            if s not in (1, -1):
                raise ValueError(f"letter sign must be +-1, got {s}")
            if out and out[-1][0] == g and out[-1][1] == -s:
                out.pop()
            else:
                out.append((g, s))
        self.letters = tuple(out)

    @classmethod
    def generator(cls, rank: int, g: int, sign: int = 1) -> "FreeWord":
        return cls(rank, [(g, sign)])

    @classmethod
    def identity(cls, rank: int) -> "FreeWord":
        return cls(rank, [])

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return FreeWord(self.rank, self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.rank, [(g, -s) for g, s in reversed(self.letters)])

    def __eq__(self, other):
        return (
            isinstance(other, FreeWord)
            and self.rank == other.rank
            and self.letters == other.letters
        )

    def __hash__(self):
        return hash((self.rank, self.letters))

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        if not self.letters:
            return "1"
        return " ".join(f"e{g+1}" if s > 0 else f"e{g+1}^-1" for g, s in self.letters)

    def substitute(self, images: Sequence["FreeWord"]) -> "FreeWord":
        """Apply the endomorphism sending generator i to images[i]."""
        if len(images) != self.rank:
            raise ValueError("need one image per generator")
        rank = images[0].rank if images else self.rank
        out: list[tuple[int, int]] = []
        for g, s in self.letters:
            img = images[g] if s > 0 else images[g].inverse()
            out.extend(img.letters)
        return FreeWord(rank, out)


class Permutation:
    """Permutation of {0..k-1}, stored as the tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        imgs = tuple(images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"not a bijection: {imgs}")
        self.images = imgs

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(range(k))

    @classmethod
    def transposition(cls, k: int, i: int, j: int) -> "Permutation":
        imgs = list(range(k))
        imgs[i], imgs[j] = imgs[j], imgs[i]
        return cls(imgs)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # function composition: (self*other)(x) = self(other(x))
        return Permutation([self.images[other.images[i]] for i in range(len(self.images))])

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation{self.images}"


_BRAID_TOKEN = re.compile(r"^s(\d+)(\^-1)?$")


class BraidWord:
    """A word in the standard braid generators on ``strands`` strands."""

    __slots__ = ("strands", "letters")

    def __init__(self, strands: int, letters: Sequence[tuple[int, int]] = ()):
        if strands < 2:
            raise ValueError("braid group needs at least 2 strands")
        for i, s in letters:
            if not (0 <= i < strands - 1):
                raise ValueError(f"braid generator {i} out of range for {strands} strands")
            if s not in (1, -1):
                raise ValueError("braid letter sign must be +-1")
        self.strands = strands
        self.letters = tuple(letters)

    @classmethod
    def parse(cls, strands: int, text: str) -> "BraidWord":
        letters = []
        for tok in text.split():
            m = _BRAID_TOKEN.match(tok)
            if not m:
                raise ValueError(f"bad braid token {tok!r}")
            letters.append((int(m.group(1)) - 1, -1 if m.group(2) else 1))
        return cls(strands, letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise ValueError("strand count mismatch")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, [(i, -s) for i, s in reversed(self.letters)])

    def __repr__(self):
        if not self.letters:
            return "<empty braid>"
        return " ".join(f"s{i+1}" if s > 0 else f"s{i+1}^-1" for i, s in self.letters)


def _act_gen_on_word(i: int, sign: int, word: FreeWord) -> FreeWord:
    """Action of a single braid generator (or its inverse) on a free word."""
    k = word.rank
    out: list[tuple[int, int]] = []
    if sign > 0:
        # e_i -> e_{i+1},  e_{i+1} -> e_{i+1} e_i e_{i+1}^-1
        for g, s in word.letters:
            if g == i:
                out.append((i + 1, s))
            elif g == i + 1:
                if s > 0:
                    out.extend([(i + 1, 1), (i, 1), (i + 1, -1)])
                else:
                    out.extend([(i + 1, 1), (i, -1), (i + 1, -1)])
            else:
                out.append((g, s))
    else:
        # inverse action: e_{i+1} -> e_i,  e_i -> e_i^-1 e_{i+1} e_i
        for g, s in word.letters:
            if g == i + 1:
                out.append((i, s))
            elif g == i:
                if s > 0:
                    out.extend([(i, -1), (i + 1, 1), (i, 1)])
                else:
                    out.extend([(i, -1), (i + 1, -1), (i, 1)])
            else:
                out.append((g, s))
    return FreeWord(k, out)


def act_free_word(braid: BraidWord, word: FreeWord) -> FreeWord:
    """Left action of a braid word on the free group of matching rank."""
    if word.rank != braid.strands:
        raise ValueError(f"rank {word.rank} does not match {braid.strands} strands")
    out = word
    for i, s in reversed(braid.letters):
        out = _act_gen_on_word(i, s, out)
    return out


def _act_gen_on_tuple(i: int, sign: int, tup: tuple[FreeWord, ...]) -> tuple[FreeWord, ...]:
    xs = list(tup)
    if sign > 0:
        # (.., x_i, x_{i+1}, ..) -> (.., x_i x_{i+1} x_i^-1, x_i, ..)
        xs[i], xs[i + 1] = xs[i] * xs[i + 1] * xs[i].inverse(), xs[i]
    else:
        xs[i], xs[i + 1] = xs[i + 1], xs[i + 1].inverse() * xs[i] * xs[i + 1]
    return tuple(xs)


def act_tuple(braid: BraidWord, tup: Sequence[FreeWord]) -> tuple[FreeWord, ...]:
    """Left action of a braid on k-tuples by conjugation-and-shift."""
    if len(tup) != braid.strands:
        raise ValueError(f"tuple length {len(tup)} does not match {braid.strands} strands")
    out = tuple(tup)
    for i, s in reversed(braid.letters):
        out = _act_gen_on_tuple(i, s, out)
    return out


def act_perm_tuple(perm: Permutation, tup: Sequence[FreeWord]) -> tuple[FreeWord, ...]:
    """sigma . (x_1,..,x_k) = (x_{sigma^-1(1)},..,x_{sigma^-1(k)})."""
    inv = perm.inverse()
    return tuple(tup[inv(i)] for i in range(len(tup)))


def perm_of_braid(braid: BraidWord) -> Permutation:
    """The homomorphism sending generator i to the transposition (i, i+1)."""
    out = Permutation.identity(braid.strands)
    for i, _s in braid.letters:
        out = out * Permutation.transposition(braid.strands, i, i + 1)
    return out


def symbol_tuple(k: int) -> tuple[FreeWord, ...]:
    """The tuple (x_1,..,x_k) of free generators, for symbolic tuple actions."""
    return tuple(FreeWord.generator(k, g) for g in range(k))
