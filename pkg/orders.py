"""The strong, weak, grid and t-orders on S_n and their up-sets.

Orientation: swapping an inversion into increasing order moves UP, so the
identity is the top element and the reversal the bottom. This is the mirror
of the textbook Bruhat convention; any off-the-shelf Bruhat criterion has to
be applied with its arguments exchanged.
"""
import random

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from permset import PermSet, iter_bits
from perms import (
    FACTORIALS,
    all_perms,
    check_same_n,
    decode_lehmer,
    inversion_count,
    inversions,
    lehmer_naive,
    rank,
)
from utils import InputError

# principal up-sets are tabulated as bitmasks up to this n
UP_MASK_MAX_N = 7
# cover tables are tabulated up to this n
COVER_MAX_N = 8

Perm = Tuple[int, ...]


@dataclass(frozen=True)
class OrderKind:
    """One of strong, weak, grid, or t (swaps at most t positions apart)"""

    name: str
    t: Optional[int] = None

    def __post_init__(self):
        if self.name not in ("strong", "weak", "grid", "t"):
            raise InputError(f"unknown order '{self.name}'")
        if self.name == "t":
            if not isinstance(self.t, int) or self.t < 1:
                raise InputError(f"t-order needs t >= 1, got {self.t}")
        elif self.t is not None:
            raise InputError(f"order '{self.name}' takes no t")

    @classmethod
    def parse(cls, text: str) -> "OrderKind":
        text = text.strip().lower()
        if text.startswith("t:"):
            try:
                return cls("t", int(text[2:]))
            except ValueError:
                raise InputError(f"'{text}' is not an order like t:3") from None
        return cls(text)

    def gap(self, n: int) -> Optional[int]:
        """Largest allowed position gap of a swap, None for grid"""
        if self.name == "grid":
            return None
        if self.name == "weak":
            return 1
        if self.name == "strong":
            return n
        if self.t > n:
            raise InputError(f"t = {self.t} exceeds n = {n}")
        return self.t

    def __str__(self):
        return f"t:{self.t}" if self.name == "t" else self.name


STRONG = OrderKind("strong")
WEAK = OrderKind("weak")
GRID = OrderKind("grid")


def t_order(t: int) -> OrderKind:
    return OrderKind("t", t)


def _swap(a: Sequence[int], p: int, q: int) -> Perm:
    b = list(a)
    b[p], b[q] = b[q], b[p]
    return tuple(b)


def up_moves(a: Sequence[int], kind: OrderKind) -> List[Perm]:
    """Everything one permitted move above a; each has fewer inversions"""
    a = tuple(a)
    n = len(a)
    gap = kind.gap(n)
    if gap is None:
        f = lehmer_naive(a)
        moves = []
        for k in range(n):
            if f[k] <= k:
                g = list(f)
                g[k] += 1
                moves.append(tuple(decode_lehmer(g)))
        return moves
    return [
        _swap(a, p, q)
        for p in range(n)
        for q in range(p + 1, min(n, p + gap + 1))
        if a[p] > a[q]
    ]


def dominated_inversions(a: Sequence[int]) -> FrozenSet[Tuple[int, int]]:
    """Inversions (i, j), i < j, where every entry strictly between j and i
    exceeds j"""
    n = len(a)
    result = set()
    for p in range(n):
        for q in range(p + 1, n):
            if a[p] > a[q] and all(a[m] > a[p] for m in range(p + 1, q)):
                result.add((a[q], a[p]))
    return frozenset(result)


def dominated_moves(a: Sequence[int]) -> List[Perm]:
    a = tuple(a)
    where = {v: idx for idx, v in enumerate(a)}
    return [_swap(a, where[j], where[i]) for i, j in sorted(dominated_inversions(a))]


def reachable(a: Sequence[int], kind: OrderKind) -> Set[Perm]:
    """Plain breadth-first search over up_moves, including a itself"""
    start = tuple(a)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for b in up_moves(cur, kind):
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return seen


@lru_cache(maxsize=None)
def cover_ranks(n: int, kind: OrderKind) -> Tuple[Tuple[int, ...], ...]:
    """cover_ranks(n, kind)[r] lists the ranks one move above rank r"""
    if n > COVER_MAX_N:
        raise InputError(f"n = {n} is too large for cover tables (max {COVER_MAX_N})")
    return tuple(
        tuple(rank(b) for b in up_moves(a, kind)) for a in all_perms(n)
    )


@lru_cache(maxsize=None)
def _cover_masks(n: int, kind: OrderKind) -> Tuple[int, ...]:
    masks = []
    for covers in cover_ranks(n, kind):
        m = 0
        for c in covers:
            m |= 1 << c
        masks.append(m)
    return tuple(masks)


@lru_cache(maxsize=None)
def _top_down_order(n: int) -> Tuple[int, ...]:
    """Ranks sorted by inversion count, so every move target comes first"""
    perms = all_perms(n)
    return tuple(sorted(range(len(perms)), key=lambda r: (inversion_count(perms[r]), r)))


@lru_cache(maxsize=None)
def up_masks(n: int, kind: OrderKind) -> Tuple[int, ...]:
    """Principal up-set of every rank as a bitmask (memoized reachability)"""
    if n > UP_MASK_MAX_N:
        raise InputError(f"n = {n} is too large for up-set tables (max {UP_MASK_MAX_N})")
    covers = cover_ranks(n, kind)
    masks = [0] * FACTORIALS[n]
    for r in _top_down_order(n):
        m = 1 << r
        for c in covers[r]:
            m |= masks[c]
        masks[r] = m
    return tuple(masks)


def _strong_criterion(a: Sequence[int], b: Sequence[int]) -> bool:
    # textbook tableau criterion for b <= a, i.e. a <=_s b in our orientation
    for i in range(1, len(a)):
        pa = sorted(a[:i])
        pb = sorted(b[:i])
        if any(x > y for x, y in zip(pb, pa)):
            return False
    return True


def leq_search(a: Sequence[int], b: Sequence[int], kind: OrderKind) -> bool:
    """Ground truth: is b reachable from a by up-moves"""
    check_same_n(a, b)
    n = len(a)
    if n <= UP_MASK_MAX_N:
        return bool(up_masks(n, kind)[rank(a)] >> rank(b) & 1)
    return tuple(b) in reachable(a, kind)


def leq(a: Sequence[int], b: Sequence[int], kind: OrderKind) -> bool:
    check_same_n(a, b)
    n = len(a)
    if kind.name == "grid":
        return all(x <= y for x, y in zip(lehmer_naive(a), lehmer_naive(b)))
    gap = kind.gap(n)
    if gap == 1:
        return inversions(b) <= inversions(a)
    if gap >= n - 1:
        return _strong_criterion(a, b)
    return leq_search(a, b, kind)


def is_up_set(family: PermSet, kind: OrderKind) -> bool:
    covers = _cover_masks(family.n, kind)
    missing = ~family.mask
    return all(covers[r] & missing == 0 for r in family.ranks())


def is_down_set(family: PermSet, kind: OrderKind) -> bool:
    return is_up_set(family.complement(), kind)


def up_closure_mask(n: int, kind: OrderKind, mask: int) -> int:
    if n <= UP_MASK_MAX_N:
        table = up_masks(n, kind)
        closed = 0
        for r in iter_bits(mask):
            if not closed >> r & 1:
                closed |= table[r]
        return closed
    covers = cover_ranks(n, kind)
    closed = mask
    stack = list(iter_bits(mask))
    while stack:
        r = stack.pop()
        for c in covers[r]:
            if not closed >> c & 1:
                closed |= 1 << c
                stack.append(c)
    return closed


def up_closure(family: PermSet, kind: OrderKind) -> PermSet:
    """Smallest up-set containing family"""
    return PermSet(family.n, up_closure_mask(family.n, kind, family.mask))


def slice_family(family: PermSet, k: int) -> PermSet:
    """Members with n at position k, with n deleted, as a family in S_{n-1}"""
    n = family.n
    if n < 2:
        raise InputError("slicing needs n >= 2")
    if not 1 <= k <= n:
        raise InputError(f"position {k} is outside 1..{n}")
    return PermSet.from_ranks(
        n - 1,
        (rank(a[: k - 1] + a[k:]) for a in family.perms() if a[k - 1] == n),
    )


class UpSetEnumeration:
    """Streams every up-set of (S_n, kind) exactly once.

    Ranks are decided top-down (fewest inversions first); a rank may join the
    set only when everything one move above it already has, so each include /
    exclude path ends in a distinct up-set and no path dead-ends. After
    iteration `truncated` tells whether `limit` cut the stream short.
    """

    def __init__(self, n: int, kind: OrderKind, limit: Optional[int] = None):
        if n > COVER_MAX_N:
            raise InputError(f"n = {n} is too large to enumerate up-sets")
        self.n = n
        self.kind = kind
        self.limit = limit
        self.count = 0
        self.truncated = False

    def masks(self) -> Iterator[int]:
        order = _top_down_order(self.n)
        covers = _cover_masks(self.n, self.kind)
        total = len(order)
        self.count = 0
        self.truncated = False
        stack = [(0, 0)]
        while stack:
            i, mask = stack.pop()
            if i == total:
                if self.limit is not None and self.count >= self.limit:
                    self.truncated = True
                    return
                self.count += 1
                yield mask
                continue
            r = order[i]
            stack.append((i + 1, mask))
            if covers[r] & ~mask == 0:
                stack.append((i + 1, mask | 1 << r))

    def __iter__(self) -> Iterator[PermSet]:
        return (PermSet(self.n, m) for m in self.masks())


def enumerate_up_sets(
    n: int, kind: OrderKind, limit: Optional[int] = None
) -> UpSetEnumeration:
    return UpSetEnumeration(n, kind, limit)


def random_up_mask(n: int, kind: OrderKind, density: float, rng: random.Random) -> int:
    if not 0 <= density <= 1:
        raise InputError(f"seed density {density} is outside [0, 1]")
    seeds = (r for r in range(FACTORIALS[n]) if rng.random() < density)
    return up_closure_mask(n, kind, PermSet.from_ranks(n, seeds).mask)


def random_up_set(
    n: int, kind: OrderKind, density: float, rng: random.Random
) -> PermSet:
    """Up-closure of a Bernoulli(density) random subset"""
    return PermSet(n, random_up_mask(n, kind, density, rng))
