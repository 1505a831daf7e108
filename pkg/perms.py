"""Permutations of [n] in one-line notation, inversions, and the Lehmer
bijection between S_n and the grid G_n = [1] x [2] x ... x [n].

Values and positions are 1-based throughout. The Lehmer code f(a) has
f_j = |{i in [j] : pos(a, i) <= pos(a, j)}|, so the identity maps to the top
element (1, 2, ..., n) of G_n and the reversal to the bottom (1, ..., 1).

Ranks use the reversed factoradic r = sum_k (k - f_k) * (k - 1)!, which puts
the identity at rank 0 and the reversal at rank n! - 1.
"""
from functools import lru_cache
from math import factorial
from typing import FrozenSet, Iterable, Iterator, List, Sequence, Tuple

from utils import InputError

MAX_N = 20
# enumeration tables up to this size are cached in memory
CACHE_N = 8

FACTORIALS = tuple(factorial(k) for k in range(MAX_N + 1))

Pair = Tuple[int, int]


class Permutation(tuple):
    """One-line notation (a_1, ..., a_n) of a permutation of [n]"""

    def __new__(cls, values: Iterable[int]):
        values = tuple(values)
        n = len(values)
        if not 1 <= n <= MAX_N:
            raise InputError(f"permutation length {n} is outside 1..{MAX_N}")
        if sorted(values) != list(range(1, n + 1)):
            raise InputError(f"{values} is not a permutation of 1..{n}")
        return super().__new__(cls, values)

    @classmethod
    def _trusted(cls, values: Iterable[int]) -> "Permutation":
        return tuple.__new__(cls, values)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parses the text form "3,1,2" """
        try:
            values = [int(v) for v in text.split(",")]
        except ValueError:
            raise InputError(f"'{text}' is not a comma-separated permutation") from None
        return cls(values)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def reversal(cls, n: int) -> "Permutation":
        return cls(range(n, 0, -1))

    @property
    def n(self) -> int:
        return len(self)

    def __str__(self):
        return ",".join(map(str, self))

    def __repr__(self):
        return f"Permutation({self})"


class LehmerCode(tuple):
    """Vector (f_1, ..., f_n) with 1 <= f_k <= k"""

    def __new__(cls, values: Iterable[int]):
        values = tuple(values)
        n = len(values)
        if not 1 <= n <= MAX_N:
            raise InputError(f"code length {n} is outside 1..{MAX_N}")
        for k, f_k in enumerate(values, 1):
            if not isinstance(f_k, int) or not 1 <= f_k <= k:
                raise InputError(f"f_{k} = {f_k} is outside 1..{k}")
        return super().__new__(cls, values)

    @classmethod
    def parse(cls, text: str) -> "LehmerCode":
        try:
            values = [int(v) for v in text.split(",")]
        except ValueError:
            raise InputError(f"'{text}' is not a comma-separated Lehmer code") from None
        return cls(values)

    @property
    def n(self) -> int:
        return len(self)

    def __str__(self):
        return ",".join(map(str, self))

    def __repr__(self):
        return f"LehmerCode({self})"


class _Fenwick:
    """Binary indexed tree over 1..size holding nonnegative counts"""

    __slots__ = ("size", "tree")

    def __init__(self, size: int, fill: int = 0):
        self.size = size
        self.tree = [0] * (size + 1)
        if fill:
            for i in range(1, size + 1):
                self.tree[i] += fill
                parent = i + (i & -i)
                if parent <= size:
                    self.tree[parent] += self.tree[i]

    def add(self, i: int, delta: int):
        while i <= self.size:
            self.tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & -i
        return total

    def find_kth(self, k: int) -> int:
        """Smallest index whose prefix sum reaches k"""
        idx = 0
        step = 1 << self.size.bit_length()
        while step:
            nxt = idx + step
            if nxt <= self.size and self.tree[nxt] < k:
                idx = nxt
                k -= self.tree[nxt]
            step >>= 1
        return idx + 1


def check_same_n(a: Sequence[int], b: Sequence[int]):
    if len(a) != len(b):
        raise InputError(f"mismatched n: {len(a)} and {len(b)}")


def positions(a: Sequence[int]) -> List[int]:
    """positions(a)[i - 1] == pos(a, i)"""
    p = [0] * len(a)
    for idx, value in enumerate(a, 1):
        p[value - 1] = idx
    return p


def pos(a: Sequence[int], i: int) -> int:
    n = len(a)
    if not 1 <= i <= n:
        raise InputError(f"value {i} is outside 1..{n}")
    return a.index(i) + 1


def inversions(a: Sequence[int]) -> FrozenSet[Pair]:
    """Value pairs (i, j), i < j, with j placed before i"""
    n = len(a)
    return frozenset(
        (a[q], a[p]) for p in range(n) for q in range(p + 1, n) if a[p] > a[q]
    )


def adjacent_inversions(a: Sequence[int]) -> FrozenSet[Pair]:
    return frozenset(
        (a[p + 1], a[p]) for p in range(len(a) - 1) if a[p] > a[p + 1]
    )


def inversion_count(a: Sequence[int]) -> int:
    n = len(a)
    return sum(1 for p in range(n) for q in range(p + 1, n) if a[p] > a[q])


def encode_lehmer(a: Sequence[int]) -> LehmerCode:
    """Lehmer code in O(n log n); f_j is one plus the number of smaller
    values placed before j"""
    n = len(a)
    p = positions(a)
    seen = _Fenwick(n)
    f = []
    for j in range(1, n + 1):
        f.append(1 + seen.prefix(p[j - 1] - 1))
        seen.add(p[j - 1], 1)
    return LehmerCode(f)


def lehmer_naive(a: Sequence[int]) -> Tuple[int, ...]:
    """O(n^2) Lehmer code straight from the definition"""
    p = positions(a)
    return tuple(
        sum(1 for i in range(1, j + 1) if p[i - 1] <= p[j - 1])
        for j in range(1, len(a) + 1)
    )


def decode_lehmer(f: Sequence[int]) -> Permutation:
    """Inverse of encode_lehmer in O(n log n).

    Element j is the f_j-th of {1..j} from the left, so placing values from n
    down to 1 puts j into the f_j-th slot not yet taken by a larger value.
    """
    f = f if isinstance(f, LehmerCode) else LehmerCode(f)
    n = len(f)
    free = _Fenwick(n, fill=1)
    values = [0] * n
    for j in range(n, 0, -1):
        slot = free.find_kth(f[j - 1])
        values[slot - 1] = j
        free.add(slot, -1)
    return Permutation._trusted(values)


def decode_naive(f: Sequence[int]) -> Tuple[int, ...]:
    """Insertion construction: insert j at index f_j - 1 for j = 1..n"""
    values: List[int] = []
    for j, f_j in enumerate(f, 1):
        values.insert(f_j - 1, j)
    return tuple(values)


def rank_of_code(f: Sequence[int]) -> int:
    return sum((k - f_k) * FACTORIALS[k - 1] for k, f_k in enumerate(f, 1))


def rank(a: Sequence[int]) -> int:
    return rank_of_code(lehmer_naive(a))


def code_of_rank(r: int, n: int) -> Tuple[int, ...]:
    if not 1 <= n <= MAX_N:
        raise InputError(f"n = {n} is outside 1..{MAX_N}")
    if not 0 <= r < FACTORIALS[n]:
        raise InputError(f"rank {r} is outside 0..{FACTORIALS[n] - 1}")
    return tuple(k - (r // FACTORIALS[k - 1]) % k for k in range(1, n + 1))


def unrank(r: int, n: int) -> Permutation:
    return decode_lehmer(code_of_rank(r, n))


@lru_cache(maxsize=None)
def all_perms(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Every permutation of [n] as a plain tuple, in rank order"""
    if n == 0:
        return ((),)
    if not 1 <= n <= CACHE_N:
        raise InputError(f"n = {n} is too large to tabulate (max {CACHE_N})")
    smaller = all_perms(n - 1)
    result = []
    # the digit n - f_n carries weight (n-1)!, so it varies slowest
    for d in range(n):
        idx = n - 1 - d
        for p in smaller:
            result.append(p[:idx] + (n,) + p[idx:])
    return tuple(result)


def iter_perms(n: int) -> Iterator[Tuple[int, ...]]:
    """Rank-order enumeration that also works beyond the cached range"""
    if n <= CACHE_N:
        yield from all_perms(n)
        return
    if n > MAX_N:
        raise InputError(f"n = {n} is outside 1..{MAX_N}")
    for d in range(n):
        idx = n - 1 - d
        for p in iter_perms(n - 1):
            yield p[:idx] + (n,) + p[idx:]


@lru_cache(maxsize=None)
def all_codes(n: int) -> Tuple[Tuple[int, ...], ...]:
    """Lehmer codes in rank order, aligned with all_perms(n)"""
    if n == 0:
        return ((),)
    if not 1 <= n <= CACHE_N:
        raise InputError(f"n = {n} is too large to tabulate (max {CACHE_N})")
    smaller = all_codes(n - 1)
    return tuple(c + (n - d,) for d in range(n) for c in smaller)


def grid_join(a: Sequence[int], b: Sequence[int]) -> Permutation:
    check_same_n(a, b)
    return decode_lehmer(
        [max(x, y) for x, y in zip(lehmer_naive(a), lehmer_naive(b))]
    )


def grid_meet(a: Sequence[int], b: Sequence[int]) -> Permutation:
    check_same_n(a, b)
    return decode_lehmer(
        [min(x, y) for x, y in zip(lehmer_naive(a), lehmer_naive(b))]
    )


def displacement(a: Sequence[int], i: int) -> int:
    return abs(i - pos(a, i))


def displacement_list(a: Sequence[int]) -> Tuple[int, ...]:
    return tuple(abs(i - p) for i, p in enumerate(positions(a), 1))
