"""Standard words, their bracketings, and the forbidden-pattern search.

Words are nonempty tuples of letters 1..r.  The order puts the first
differing letter in charge, and when one word is a proper prefix of the
other the longer word is the smaller one.  A word is standard when it is
strictly larger than every proper rotation of itself.  Standard words carry
a canonical bracketing through the maximal split into two standard halves,
which is how they are evaluated as iterated group commutators.

The avoidance search drives the combinatorial finiteness argument: a word
is forbidden once it contains a subword c*c, x*c*x, or c*x*c with c
standard and x a single letter, and the search finds the longest word over
a given alphabet avoiding all three shapes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import nilgroup as ng


def check_word(w) -> tuple:
    w = tuple(w)
    if not w:
        raise ValueError("empty word")
    for x in w:
        if not isinstance(x, int) or x < 1:
            raise ValueError("letters are positive integers, got %r" % (x,))
    return w


def parse_word(text: str) -> tuple:
    """Digit-string syntax: "211" is the word (2, 1, 1)."""
    if not text or not text.isdigit() or "0" in text:
        raise ValueError("word syntax is a nonempty string of digits 1-9")
    return tuple(int(ch) for ch in text)


def format_word(w) -> str:
    return "".join(str(x) for x in w)


def compare(u, v) -> int:
    """-1, 0 or 1.  First differing letter decides; a word extending
    another strictly is the smaller of the two."""
    u, v = check_word(u), check_word(v)
    for a, b in zip(u, v):
        if a != b:
            return -1 if a < b else 1
    if len(u) == len(v):
        return 0
    return -1 if len(u) > len(v) else 1


def is_standard(w) -> bool:
    w = check_word(w)
    return all(compare(w[i:] + w[:i], w) < 0 for i in range(1, len(w)))


def first_violating_rotation(w):
    """A proper rotation that is not strictly smaller, or None."""
    w = check_word(w)
    for i in range(1, len(w)):
        r = w[i:] + w[:i]
        if compare(r, w) >= 0:
            return r
    return None


def standard_decomposition(w) -> tuple:
    """The split w = a + b with both halves standard, a > b, and a as long
    as possible.  Defined for standard words of length at least 2."""
    w = check_word(w)
    if len(w) < 2:
        raise ValueError("length-1 words do not decompose")
    if not is_standard(w):
        raise ValueError("not a standard word: %s" % format_word(w))
    for k in range(len(w) - 1, 0, -1):
        a, b = w[:k], w[k:]
        if is_standard(a) and is_standard(b) and compare(a, b) > 0:
            return a, b
    raise AssertionError("standard word with no standard split")


@dataclass(frozen=True)
class CommutatorTree:
    """A leaf holds a letter; an inner node commutates its two children."""

    letter: int | None = None
    left: "CommutatorTree | None" = None
    right: "CommutatorTree | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.letter is not None

    def leaves(self) -> tuple:
        if self.is_leaf:
            return (self.letter,)
        return self.left.leaves() + self.right.leaves()

    def __str__(self) -> str:
        if self.is_leaf:
            return "x%d" % self.letter
        return "[%s,%s]" % (self.left, self.right)


def bracketing(w) -> CommutatorTree:
    """Canonical bracketing of a standard word via its maximal split."""
    w = check_word(w)
    if not is_standard(w):
        raise ValueError("not a standard word: %s" % format_word(w))
    if len(w) == 1:
        return CommutatorTree(letter=w[0])
    a, b = standard_decomposition(w)
    return CommutatorTree(left=bracketing(a), right=bracketing(b))


def com(w) -> CommutatorTree:
    """Left-normed comb over the letters of the word."""
    w = check_word(w)
    t = CommutatorTree(letter=w[0])
    for x in w[1:]:
        t = CommutatorTree(left=t, right=CommutatorTree(letter=x))
    return t


def eval_tree(t: CommutatorTree, assignment: dict):
    """Evaluate the tree as iterated group commutators, letters mapped
    through the assignment."""
    if t.is_leaf:
        try:
            return assignment[t.letter]
        except KeyError:
            raise ValueError("no assignment for letter %d" % t.letter)
    return ng.commutator(eval_tree(t.left, assignment),
                         eval_tree(t.right, assignment))


# -- forbidden patterns ------------------------------------------------------------


@dataclass(frozen=True)
class ForbiddenMatch:
    kind: str       # "cc", "xcx" or "cxc"
    position: int   # 1-indexed start of the match
    core: tuple     # the standard word c inside the pattern


def _match_at(w, p: int, size: int):
    """Pattern of the given window size starting at p, if any.  Within one
    window the shapes are tried in the order cc, xcx, cxc."""
    seg = w[p:p + size]
    if size % 2 == 0:
        m = size // 2
        if seg[:m] == seg[m:] and is_standard(seg[:m]):
            return ForbiddenMatch("cc", p + 1, seg[:m])
    if size >= 3:
        if seg[0] == seg[-1] and is_standard(seg[1:-1]):
            return ForbiddenMatch("xcx", p + 1, seg[1:-1])
    if size >= 3 and size % 2 == 1:
        m = (size - 1) // 2
        if seg[:m] == seg[m + 1:] and is_standard(seg[:m]):
            return ForbiddenMatch("cxc", p + 1, seg[:m])
    return None


def find_forbidden(w):
    """Leftmost (then shortest) occurrence of c*c, x*c*x or c*x*c with c
    standard, or None."""
    w = check_word(w)
    n = len(w)
    for p in range(n):
        for size in range(2, n - p + 1):
            hit = _match_at(w, p, size)
            if hit is not None:
                return hit
    return None


def _forbidden_ending_at_last(w) -> bool:
    n = len(w)
    for size in range(2, n + 1):
        if _match_at(w, n - size, size) is not None:
            return True
    return False


@dataclass(frozen=True)
class AvoidanceResult:
    rank: int
    longest: int
    witness: tuple
    exhaustive: bool


def longest_avoiding(rank: int, cap: int = 64) -> AvoidanceResult:
    """Depth-first search for the longest word over 1..rank containing no
    forbidden pattern.  Avoidance is inherited by prefixes, so extensions
    only need checking at the new last letter.  The result is exhaustive
    when no avoiding word reaches the cap."""
    if rank < 1:
        raise ValueError("rank must be positive")
    if cap < 1:
        raise ValueError("cap must be positive")
    best: tuple = ()
    exhaustive = True
    stack = [(x,) for x in range(rank, 0, -1)]
    while stack:
        w = stack.pop()
        if _forbidden_ending_at_last(w):
            continue
        if len(w) > len(best):
            best = w
        if len(w) >= cap:
            exhaustive = False
            continue
        for x in range(rank, 0, -1):
            stack.append(w + (x,))
    return AvoidanceResult(rank, len(best), best, exhaustive)
