"""Families of permutations stored as bitmasks over factoradic ranks"""
from typing import Callable, Iterable, Iterator, Optional, Sequence, Tuple

from perms import CACHE_N, FACTORIALS, all_perms, iter_perms, rank, unrank
from utils import InputError

PERMSET_MAX_N = 10
# above this many members to_json switches to the hex form
JSON_LIST_MAX = 64


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of mask, ascending"""
    data = mask.to_bytes((mask.bit_length() + 7) // 8, "little")
    for offset, byte in enumerate(data):
        base = offset << 3
        while byte:
            low = byte & -byte
            yield base + low.bit_length() - 1
            byte ^= low


def mask_from_ranks(size: int, ranks: Iterable[int]) -> int:
    buf = bytearray((size + 7) // 8)
    for r in ranks:
        if not 0 <= r < size:
            raise InputError(f"rank {r} is outside 0..{size - 1}")
        buf[r >> 3] |= 1 << (r & 7)
    return int.from_bytes(buf, "little")


def check_permset_n(n: int):
    if not 1 <= n <= PERMSET_MAX_N:
        raise InputError(f"n = {n} is outside 1..{PERMSET_MAX_N} for families")


class PermSet:
    """Subset of S_n; bit r of mask is set iff the permutation of rank r is a
    member. Immutable after construction."""

    __slots__ = ("n", "mask", "_view")

    def __init__(self, n: int, mask: int = 0):
        check_permset_n(n)
        if mask < 0 or mask.bit_length() > FACTORIALS[n]:
            raise InputError(f"mask does not fit S_{n}")
        self.n = n
        self.mask = mask
        self._view: Optional[bytes] = None

    @classmethod
    def empty(cls, n: int) -> "PermSet":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "PermSet":
        check_permset_n(n)
        return cls(n, (1 << FACTORIALS[n]) - 1)

    @classmethod
    def from_ranks(cls, n: int, ranks: Iterable[int]) -> "PermSet":
        check_permset_n(n)
        return cls(n, mask_from_ranks(FACTORIALS[n], ranks))

    @classmethod
    def from_perms(cls, n: int, perms: Iterable[Sequence[int]]) -> "PermSet":
        check_permset_n(n)
        ranks = []
        for a in perms:
            if len(a) != n or sorted(a) != list(range(1, n + 1)):
                raise InputError(f"{tuple(a)} is not a permutation of 1..{n}")
            ranks.append(rank(a))
        return cls.from_ranks(n, ranks)

    @classmethod
    def from_predicate(
        cls, n: int, predicate: Callable[[Tuple[int, ...]], bool]
    ) -> "PermSet":
        check_permset_n(n)
        return cls.from_ranks(
            n, (r for r, a in enumerate(iter_perms(n)) if predicate(a))
        )

    @property
    def universe(self) -> int:
        return FACTORIALS[self.n]

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __len__(self):
        return self.size

    def __bool__(self):
        return self.mask != 0

    def _bytes(self) -> bytes:
        if self._view is None:
            self._view = self.mask.to_bytes((self.universe + 7) // 8, "little")
        return self._view

    def has_rank(self, r: int) -> bool:
        if not 0 <= r < self.universe:
            return False
        return bool(self._bytes()[r >> 3] >> (r & 7) & 1)

    def __contains__(self, a) -> bool:
        if len(a) != self.n:
            return False
        return self.has_rank(rank(a))

    def ranks(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def perms(self) -> Iterator[Tuple[int, ...]]:
        if self.n <= CACHE_N:
            table = all_perms(self.n)
            return (table[r] for r in self.ranks())
        return (tuple(unrank(r, self.n)) for r in self.ranks())

    def __iter__(self):
        return self.perms()

    def _check_other(self, other: "PermSet"):
        if not isinstance(other, PermSet):
            raise TypeError(f"expected PermSet, got {type(other).__name__}")
        if other.n != self.n:
            raise InputError(f"mismatched n: {self.n} and {other.n}")

    def __and__(self, other: "PermSet") -> "PermSet":
        self._check_other(other)
        return PermSet(self.n, self.mask & other.mask)

    def __or__(self, other: "PermSet") -> "PermSet":
        self._check_other(other)
        return PermSet(self.n, self.mask | other.mask)

    def __sub__(self, other: "PermSet") -> "PermSet":
        self._check_other(other)
        return PermSet(self.n, self.mask & ~other.mask)

    def complement(self) -> "PermSet":
        return PermSet(self.n, ((1 << self.universe) - 1) ^ self.mask)

    def issubset(self, other: "PermSet") -> bool:
        self._check_other(other)
        return self.mask & ~other.mask == 0

    def __le__(self, other: "PermSet") -> bool:
        return self.issubset(other)

    def __eq__(self, other):
        if not isinstance(other, PermSet):
            return NotImplemented
        return self.n == other.n and self.mask == other.mask

    def __hash__(self):
        return hash((self.n, self.mask))

    def __repr__(self):
        if self.size <= 8:
            members = " ".join("".join(map(str, a)) for a in self.perms())
            return f"PermSet(n={self.n}, {{{members}}})"
        return f"PermSet(n={self.n}, size={self.size})"

    def to_hex(self) -> str:
        return format(self.mask, "x")

    def to_json(self) -> dict:
        if self.size <= JSON_LIST_MAX:
            return {"n": self.n, "perms": [",".join(map(str, a)) for a in self.perms()]}
        return {"n": self.n, "hex": self.to_hex()}

    @classmethod
    def from_json(cls, data: dict) -> "PermSet":
        try:
            n = int(data["n"])
        except (KeyError, TypeError, ValueError):
            raise InputError("a family needs an integer 'n'") from None
        if "hex" in data:
            try:
                return cls(n, int(data["hex"], 16))
            except ValueError:
                raise InputError(f"'{data['hex']}' is not a hex bitmask") from None
        perms = []
        for item in data.get("perms", []):
            if isinstance(item, str):
                try:
                    item = [int(v) for v in item.split(",")]
                except ValueError:
                    raise InputError(f"'{item}' is not a permutation") from None
            perms.append(tuple(item))
        return cls.from_perms(n, perms)
