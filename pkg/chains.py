"""Set families on P([n]), left compression, and maximal chains.

A maximal chain {} = C_0 < C_1 < ... < C_n = [n] corresponds to the
permutation a with C_i = {a_1, ..., a_i}, so chains are enumerated through
permutations. The normalized counts c(A) / n! are plain numbers; they do not
form a probability measure on P([n]).
"""
import random

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from tabulate import tabulate

from permset import PermSet, iter_bits, mask_from_ranks
from perms import FACTORIALS, iter_perms
from utils import InputError, print_warning

SETFAMILY_MAX_N = 16
# chain enumeration visits all n! permutations
CHAIN_MAX_N = 10
TAIL_MAX_N = 9


def subset_mask(elements: Iterable[int], n: int) -> int:
    """Characteristic mask of a subset of [n]; element i is bit i - 1"""
    s = 0
    for i in elements:
        if not isinstance(i, int) or not 1 <= i <= n:
            raise InputError(f"element {i} is outside 1..{n}")
        s |= 1 << (i - 1)
    return s


def subset_elements(s: int) -> List[int]:
    return [b + 1 for b in iter_bits(s)]


def _check_chain_n(n: int, limit: int = CHAIN_MAX_N):
    if n > limit:
        raise InputError(f"n = {n} is too large for chain enumeration (max {limit})")


class SetFamily:
    """Family of subsets of [n]; bit s of mask is set iff the subset with
    characteristic mask s is a member"""

    __slots__ = ("n", "mask")

    def __init__(self, n: int, mask: int = 0):
        if not 1 <= n <= SETFAMILY_MAX_N:
            raise InputError(f"n = {n} is outside 1..{SETFAMILY_MAX_N} for set families")
        if mask < 0 or mask.bit_length() > 1 << n:
            raise InputError(f"mask does not fit P([{n}])")
        self.n = n
        self.mask = mask

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, mask_from_ranks(1 << n, (subset_mask(s, n) for s in sets)))

    @classmethod
    def from_subset_masks(cls, n: int, masks: Iterable[int]) -> "SetFamily":
        return cls(n, mask_from_ranks(1 << n, masks))

    @classmethod
    def full(cls, n: int) -> "SetFamily":
        return cls(n, (1 << (1 << n)) - 1)

    def __contains__(self, s: int) -> bool:
        return bool(self.mask >> s & 1)

    def members(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def sets(self) -> List[List[int]]:
        return [subset_elements(s) for s in self.members()]

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.n == other.n and self.mask == other.mask

    def __hash__(self):
        return hash((self.n, self.mask))

    def __repr__(self):
        return f"SetFamily(n={self.n}, {self.sets()})"

    def to_json(self) -> dict:
        return {"n": self.n, "sets": self.sets()}

    @classmethod
    def from_json(cls, data: dict) -> "SetFamily":
        try:
            n = int(data["n"])
        except (KeyError, TypeError, ValueError):
            raise InputError("a set family needs an integer 'n'") from None
        if "hex" in data:
            try:
                return cls(n, int(data["hex"], 16))
            except ValueError:
                raise InputError(f"'{data['hex']}' is not a hex bitmask") from None
        return cls.from_sets(n, data.get("sets", []))


def _check_same_n(a: SetFamily, b: SetFamily):
    if a.n != b.n:
        raise InputError(f"mismatched n: {a.n} and {b.n}")


def is_left_compressed(family: SetFamily) -> bool:
    n = family.n
    for s in family.members():
        for j in range(1, n):
            if not s >> j & 1:
                continue
            for i in range(j):
                if not s >> i & 1 and (s ^ (1 << j) | (1 << i)) not in family:
                    return False
    return True


def _compress_pair(members: set, i: int, j: int) -> bool:
    """One C_ij compression in place, i < j as bit indices"""
    changed = False
    for s in sorted(members):
        if s >> j & 1 and not s >> i & 1:
            t = s ^ (1 << j) | (1 << i)
            if t not in members:
                members.discard(s)
                members.add(t)
                changed = True
    return changed


def left_compress(family: SetFamily) -> SetFamily:
    """Applies C_ij for (i, j) in lexicographic order, i < j, until nothing
    moves. Size and member cardinalities are preserved."""
    n = family.n
    members = set(family.members())
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                if _compress_pair(members, i, j):
                    changed = True
    return SetFamily.from_subset_masks(n, members)


def random_left_compressed(
    n: int, rng: random.Random, density: float = 0.3, r: Optional[int] = None
) -> SetFamily:
    """Bernoulli(density) family, restricted to r-sets if r is given, then
    left-compressed"""
    if not 0 <= density <= 1:
        raise InputError(f"density {density} is outside [0, 1]")
    if r is not None and not 0 <= r <= n:
        raise InputError(f"r = {r} is outside 0..{n}")
    members = [
        s
        for s in range(1 << n)
        if (r is None or s.bit_count() == r) and rng.random() < density
    ]
    return left_compress(SetFamily.from_subset_masks(n, members))


def colex_initial_segment(n: int, r: int, size: int) -> SetFamily:
    """The first `size` r-subsets of [n] in colex order"""
    if not 0 <= r <= n:
        raise InputError(f"r = {r} is outside 0..{n}")
    # same-size subsets in colex order are their masks in numeric order
    segment = [s for s in range(1 << n) if s.bit_count() == r][:size]
    if len(segment) < size:
        raise InputError(f"there are fewer than {size} {r}-subsets of [{n}]")
    return SetFamily.from_subset_masks(n, segment)


def chain_of_perm(a: Sequence[int]) -> List[List[int]]:
    """Prefix sets C_0, ..., C_n of a, each sorted"""
    return [sorted(a[:i]) for i in range(len(a) + 1)]


def _prefix_masks(a: Sequence[int]) -> Iterator[int]:
    s = 0
    yield s
    for v in a:
        s |= 1 << (v - 1)
        yield s


def _count_meeting(n: int, families: Sequence[SetFamily]) -> int:
    """Chains meeting every family, by prefix DFS; once all are met the
    remaining (n - i)! completions count at once"""
    full = (1 << len(families)) - 1

    def hits(s: int) -> int:
        return sum(1 << idx for idx, f in enumerate(families) if f.mask >> s & 1)

    total = 0
    stack = [(0, 0, hits(0))]
    while stack:
        s, size, met = stack.pop()
        if met == full:
            total += FACTORIALS[n - size]
            continue
        for b in range(n):
            if not s >> b & 1:
                t = s | 1 << b
                stack.append((t, size + 1, met | hits(t)))
    return total


def c(family: SetFamily) -> int:
    """Number of maximal chains containing a member of family"""
    _check_chain_n(family.n)
    return _count_meeting(family.n, [family])


def c2(family_a: SetFamily, family_b: SetFamily) -> int:
    """Number of maximal chains meeting both families"""
    _check_same_n(family_a, family_b)
    _check_chain_n(family_a.n)
    return _count_meeting(family_a.n, [family_a, family_b])


def chain_stat(family: SetFamily, a: Sequence[int]) -> int:
    """N_F(C): prefix sets of a, {} and [n] included, that lie in F"""
    if len(a) != family.n:
        raise InputError(f"mismatched n: {family.n} and {len(a)}")
    return sum(1 for s in _prefix_masks(a) if family.mask >> s & 1)


def chain_up_set(family: SetFamily) -> PermSet:
    """C(A): permutations whose chain meets family"""
    return chain_stat_tail(family, 1)


def chain_stat_tail(family: SetFamily, k: int) -> PermSet:
    """{a : N_F(a) >= k}; a strong up-set whenever F is left-compressed"""
    n = family.n
    return PermSet.from_ranks(
        n, (r for r, a in enumerate(iter_perms(n)) if chain_stat(family, a) >= k)
    )


@dataclass
class TailReport:
    k: int
    l: int
    p_joint: Fraction
    p_a: Fraction
    p_b: Fraction

    @property
    def slack(self) -> Fraction:
        return self.p_joint - self.p_a * self.p_b

    @property
    def holds(self) -> bool:
        return self.slack >= 0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "p_joint": str(self.p_joint),
            "p_a": str(self.p_a),
            "p_b": str(self.p_b),
            "slack": str(self.slack),
            "holds": self.holds,
        }


def _stat_histogram(family_a: SetFamily, family_b: SetFamily) -> Dict[Tuple[int, int], int]:
    hist: Dict[Tuple[int, int], int] = {}
    for a in iter_perms(family_a.n):
        na = nb = 0
        for s in _prefix_masks(a):
            na += family_a.mask >> s & 1
            nb += family_b.mask >> s & 1
        hist[na, nb] = hist.get((na, nb), 0) + 1
    return hist


def _tail_counts(n: int, hist: Dict[Tuple[int, int], int]) -> List[List[int]]:
    """tails[k][l] = #{a : N_A >= k and N_B >= l}, for k, l in 0..n + 2"""
    size = n + 3
    tails = [[0] * size for _ in range(size)]
    for (na, nb), count in hist.items():
        tails[na][nb] += count
    for k in range(size - 1, -1, -1):
        for l in range(size - 1, -1, -1):
            if k + 1 < size:
                tails[k][l] += tails[k + 1][l]
            if l + 1 < size:
                tails[k][l] += tails[k][l + 1]
            if k + 1 < size and l + 1 < size:
                tails[k][l] -= tails[k + 1][l + 1]
    return tails


def _prepare_tails(family_a: SetFamily, family_b: SetFamily) -> List[List[int]]:
    _check_same_n(family_a, family_b)
    _check_chain_n(family_a.n, TAIL_MAX_N)
    for name, family in (("A", family_a), ("B", family_b)):
        if not is_left_compressed(family):
            print_warning(f"family {name} is not left-compressed; the tail inequality may fail")
    return _tail_counts(family_a.n, _stat_histogram(family_a, family_b))


def _tail_report(tails: List[List[int]], n: int, k: int, l: int) -> TailReport:
    if k < 0 or l < 0:
        raise InputError(f"thresholds k = {k}, l = {l} must be nonnegative")
    last = len(tails) - 1
    k_idx, l_idx = min(k, last), min(l, last)
    total = FACTORIALS[n]
    return TailReport(
        k,
        l,
        Fraction(tails[k_idx][l_idx], total),
        Fraction(tails[k_idx][0], total),
        Fraction(tails[0][l_idx], total),
    )


def joint_tail_check(family_a: SetFamily, family_b: SetFamily, k: int, l: int) -> TailReport:
    """P(N_A >= k, N_B >= l) against P(N_A >= k) P(N_B >= l) for a uniform
    random maximal chain"""
    tails = _prepare_tails(family_a, family_b)
    return _tail_report(tails, family_a.n, k, l)


class JointTailTable:
    """Every (k, l) in 0..n + 1 from one pass over the chains"""

    def __init__(self, family_a: SetFamily, family_b: SetFamily):
        tails = _prepare_tails(family_a, family_b)
        n = family_a.n
        self.n = n
        self.rows = [
            _tail_report(tails, n, k, l) for k in range(n + 2) for l in range(n + 2)
        ]

    @property
    def holds(self) -> bool:
        return all(row.holds for row in self.rows)

    @property
    def min_slack(self) -> Fraction:
        return min(row.slack for row in self.rows)

    def __str__(self):
        headers = ["k", "l", "P(joint)", "P(A)", "P(B)", "slack"]
        body = [
            [r.k, r.l, str(r.p_joint), str(r.p_a), str(r.p_b), str(r.slack)]
            for r in self.rows
        ]
        return tabulate(body, headers, tablefmt="psql")


def joint_tail_table(family_a: SetFamily, family_b: SetFamily) -> JointTailTable:
    return JointTailTable(family_a, family_b)
