"""Named families of permutations: U_ij, layers, band-like families,
sequentially dominating families and the anti-correlated weak up-sets
built from the g and h statistics."""
import json

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, comb, floor
from typing import Any, Callable, Dict, Iterable, List, Sequence, Set, Tuple

from permset import PermSet
from perms import displacement_list, inversion_count, positions
from utils import InputError, Number, parse_number

Vector = Tuple[int, ...]

BAND_PRESETS: Dict[str, Callable[[Sequence[int]], int]] = {
    "max": max,
    "sum": sum,
    "sumsq": lambda d: sum(x * x for x in d),
}


def _check_n(n: int):
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n = {n} must be a positive integer")


def u_ij(n: int, i: int, j: int) -> PermSet:
    """Permutations in which i occurs before j"""
    _check_n(n)
    if not (1 <= i <= n and 1 <= j <= n):
        raise InputError(f"values {i}, {j} must lie in 1..{n}")
    if i == j:
        raise InputError("U_ij needs i != j")
    return PermSet.from_predicate(n, lambda a: a.index(i) < a.index(j))


def _check_layer(n: int, k: int):
    _check_n(n)
    if not 0 <= k <= comb(n, 2):
        raise InputError(f"layer {k} is outside 0..{comb(n, 2)}")


def layer(n: int, k: int) -> PermSet:
    """L_k: exactly k inversions"""
    _check_layer(n, k)
    return PermSet.from_predicate(n, lambda a: inversion_count(a) == k)


def layers_le(n: int, k: int) -> PermSet:
    """At most k inversions, i.e. products of at most k adjacent
    transpositions. With the identity on top this is the strong up-set; the
    family written L_{>=k} in the sorted-at-bottom convention is
    layers_le(n, C(n, 2) - k)."""
    _check_layer(n, k)
    return PermSet.from_predicate(n, lambda a: inversion_count(a) <= k)


def layers_ge(n: int, k: int) -> PermSet:
    """At least k inversions; a down-set under the identity-on-top orientation"""
    _check_layer(n, k)
    return PermSet.from_predicate(n, lambda a: inversion_count(a) >= k)


def t_band(n: int, t: int) -> PermSet:
    """No element displaced by more than t"""
    _check_n(n)
    if not 0 <= t <= n - 1:
        raise InputError(f"band width {t} is outside 0..{n - 1}")
    return PermSet.from_predicate(n, lambda a: max(displacement_list(a)) <= t)


def _check_vectors(n: int, vectors: Iterable[Sequence[int]]) -> Set[Vector]:
    result = set()
    for v in vectors:
        v = tuple(v)
        if len(v) != n or any(not isinstance(x, int) or not 0 <= x <= n - 1 for x in v):
            raise InputError(f"{v} is not a displacement vector in {{0..{n - 1}}}^{n}")
        result.add(v)
    return result


def band_like(n: int, vectors: Iterable[Sequence[int]]) -> PermSet:
    """A(D): permutations whose displacement list lies in D"""
    _check_n(n)
    allowed = _check_vectors(n, vectors)
    return PermSet.from_predicate(n, lambda a: displacement_list(a) in allowed)


def band_preset(n: int, preset: str, t: Number) -> PermSet:
    """A(D) for D = {d : stat(d) <= t}, stat one of max, sum, sumsq"""
    _check_n(n)
    if preset not in BAND_PRESETS:
        raise InputError(f"unknown band preset '{preset}', expected one of {list(BAND_PRESETS)}")
    stat = BAND_PRESETS[preset]
    t = parse_number(t)
    return PermSet.from_predicate(n, lambda a: stat(displacement_list(a)) <= t)


def displacement_vectors(n: int, preset: str, t: Number) -> Set[Vector]:
    """Materializes a preset's D inside {0..n-1}^n"""
    if preset not in BAND_PRESETS:
        raise InputError(f"unknown band preset '{preset}'")
    stat = BAND_PRESETS[preset]
    t = parse_number(t)
    return {v for v in product(range(n), repeat=n) if stat(v) <= t}


def validate_band_like(vectors: Iterable[Sequence[int]], n: int) -> bool:
    """Checks that D is closed under reordering, decreasing an entry, and
    replacing two entries by ones with no larger sum and no larger
    difference"""
    allowed = _check_vectors(n, vectors)
    for v in allowed:
        for p in range(n - 1):
            w = list(v)
            w[p], w[p + 1] = w[p + 1], w[p]
            if tuple(w) not in allowed:
                return False
        for p in range(n):
            if v[p] > 0:
                w = list(v)
                w[p] -= 1
                if tuple(w) not in allowed:
                    return False
        for p in range(n):
            for q in range(p + 1, n):
                s, d = v[p] + v[q], abs(v[p] - v[q])
                for x in range(n):
                    for y in range(n):
                        if x + y <= s and abs(x - y) <= d:
                            w = list(v)
                            w[p], w[q] = x, y
                            if tuple(w) not in allowed:
                                return False
    return True


def _parse_reals(values: Sequence[Any], n: int, what: str) -> List[Number]:
    if len(values) != n:
        raise InputError(f"{what} needs {n} entries, got {len(values)}")
    return [float("-inf") if v is None else parse_number(v) for v in values]


def seq_dominating(n: int, w: Sequence[Any], t: Sequence[Any]) -> PermSet:
    """D(w, t): every prefix sum of weights w_{a_1} + ... + w_{a_m} is at least t_m"""
    _check_n(n)
    w = _parse_reals(w, n, "w")
    t = _parse_reals(t, n, "t")
    if any(w[i] < w[i + 1] for i in range(n - 1)):
        raise InputError("weights must be nonincreasing for a strong up-set")

    def member(a):
        total = 0
        for m, value in enumerate(a):
            total += w[value - 1]
            if total < t[m]:
                return False
        return True

    return PermSet.from_predicate(n, member)


def at_least_in_prefix(n: int, count: int, b: int, c: int) -> PermSet:
    """At least `count` elements of {1..b} among the first c positions"""
    if not (0 <= count and 1 <= b <= n and 1 <= c <= n):
        raise InputError(f"invalid prefix parameters count={count}, b={b}, c={c}")
    w = [1] * b + [0] * (n - b)
    t = [count if m == c else 0 for m in range(1, n + 1)]
    return seq_dominating(n, w, t)


def seq_dominating_prime(n: int, w: Sequence[Any], t: Sequence[Any]) -> PermSet:
    """D'(w, t): the prefix sum up to position m is at least t_{a_m}"""
    _check_n(n)
    w = _parse_reals(w, n, "w")
    t = _parse_reals(t, n, "t")

    def member(a):
        total = 0
        for value in a:
            total += w[value - 1]
            if total < t[value - 1]:
                return False
        return True

    return PermSet.from_predicate(n, member)


def _check_stat_m(a: Sequence[int], m: int):
    if not 1 <= m <= len(a):
        raise InputError(f"m = {m} is outside 1..{len(a)}")


def g_stat(a: Sequence[int], m: int) -> int:
    """|{i in [m] : pos(a, i) <= pos(a, m)}|"""
    _check_stat_m(a, m)
    p = positions(a)
    return sum(1 for i in range(m) if p[i] <= p[m - 1])


def h_stat(a: Sequence[int], m: int) -> int:
    """|{i in [m, n] : pos(a, i) >= pos(a, m)}|"""
    _check_stat_m(a, m)
    p = positions(a)
    return sum(1 for i in range(m - 1, len(a)) if p[i] >= p[m - 1])


def _unit(value: Any, name: str) -> Fraction:
    value = parse_number(value)
    if not 0 < value < 1:
        raise InputError(f"{name} = {value} must lie strictly between 0 and 1")
    return Fraction(value)


def thm2_m(n: int, alpha: Any, beta: Any) -> int:
    """m = ceil(alpha / (alpha + beta) * n)"""
    alpha, beta = _unit(alpha, "alpha"), _unit(beta, "beta")
    return ceil(alpha / (alpha + beta) * n)


def thm2_pair(n: int, alpha: Any, beta: Any) -> Tuple[PermSet, PermSet]:
    """A = {g >= (1 - alpha) m} and B = {h >= (1 - beta)(n - m + 1)}, two weak
    up-sets of measure at least alpha and beta with a small intersection"""
    _check_n(n)
    alpha, beta = _unit(alpha, "alpha"), _unit(beta, "beta")
    m = thm2_m(n, alpha, beta)
    threshold_a = (1 - alpha) * m
    threshold_b = (1 - beta) * (n - m + 1)
    family_a = PermSet.from_predicate(n, lambda a: g_stat(a, m) >= threshold_a)
    family_b = PermSet.from_predicate(n, lambda a: h_stat(a, m) >= threshold_b)
    return family_a, family_b


def thm2_A(n: int, alpha: Any, beta: Any) -> PermSet:
    return thm2_pair(n, alpha, beta)[0]


def thm2_B(n: int, alpha: Any, beta: Any) -> PermSet:
    return thm2_pair(n, alpha, beta)[1]


def thm2_prime_weights(n: int, alpha: Any, beta: Any):
    """Weights and value-indexed thresholds for which D'(u, s) and D'(v, t)
    are exactly thm2_A and thm2_B.

    u is 1 on [m]; the prefix sum at the position of m is g(a). v is -1 above
    m; its prefix sum there is h(a) - (n - m + 1). Thresholds away from m are
    below every reachable prefix sum.
    """
    alpha, beta = _unit(alpha, "alpha"), _unit(beta, "beta")
    m = thm2_m(n, alpha, beta)
    u = [1 if i <= m else 0 for i in range(1, n + 1)]
    s = [(1 - alpha) * m if k == m else Fraction(0) for k in range(1, n + 1)]
    v = [0 if i <= m else -1 for i in range(1, n + 1)]
    t = [-beta * (n - m + 1) if k == m else Fraction(-n) for k in range(1, n + 1)]
    return (u, s), (v, t)


def _e_windows(n: int, alpha: Fraction, beta: Fraction, eps: Fraction):
    m = thm2_m(n, alpha, beta)
    u1_end = floor((1 - alpha - eps) * n)
    u2_start = max(ceil((beta + eps) * n), 1)
    return m, u1_end, u2_start


def e_families(n: int, alpha: Any, beta: Any, eps: Any) -> Tuple[PermSet, PermSet]:
    """E_1 = {N_1 >= (1 - alpha) m} with N_1 counting values of [m] in the
    first (1 - alpha - eps) n positions; E_2 symmetric for [m, n] in the
    positions from (beta + eps) n on"""
    _check_n(n)
    alpha, beta = _unit(alpha, "alpha"), _unit(beta, "beta")
    eps = _unit(eps, "eps")
    m, u1_end, u2_start = _e_windows(n, alpha, beta, eps)
    need_1 = (1 - alpha) * m
    need_2 = (1 - beta) * (n - m + 1)

    def in_e1(a):
        return sum(1 for k in range(max(u1_end, 0)) if a[k] <= m) >= need_1

    def in_e2(a):
        return sum(1 for k in range(u2_start - 1, n) if a[k] >= m) >= need_2

    return PermSet.from_predicate(n, in_e1), PermSet.from_predicate(n, in_e2)


def thm2_interval_violations(n: int, alpha: Any, beta: Any, eps: Any) -> int:
    """Members of (A & B) - (E_1 | E_2) with pos(a, m) outside
    [(1 - alpha - eps) n, (beta + eps) n]; the counting argument says none"""
    alpha, beta = _unit(alpha, "alpha"), _unit(beta, "beta")
    eps = _unit(eps, "eps")
    family_a, family_b = thm2_pair(n, alpha, beta)
    e1, e2 = e_families(n, alpha, beta, eps)
    m = thm2_m(n, alpha, beta)
    low, high = (1 - alpha - eps) * n, (beta + eps) * n
    core = (family_a & family_b) - (e1 | e2)
    return sum(1 for a in core.perms() if not low <= a.index(m) + 1 <= high)


def structured_families(n: int) -> List[Tuple[str, PermSet]]:
    """Every strong up-set instance of the standard positive-correlation
    examples: layers, t-bands, bounded total displacement, and prefix
    containment. Duplicate sets keep their first label."""
    candidates: List[Tuple[str, Callable[[], PermSet]]] = []
    for k in range(comb(n, 2) + 1):
        candidates.append((f"layers_le(k={k})", lambda k=k: layers_le(n, k)))
    for t in range(n):
        candidates.append((f"t_band(t={t})", lambda t=t: t_band(n, t)))
    max_sum = sum(abs(i - (n + 1 - i)) for i in range(1, n + 1))
    for t in range(max_sum + 1):
        candidates.append((f"band_sum(t={t})", lambda t=t: band_preset(n, "sum", t)))
    for b in range(1, n + 1):
        for c in range(1, n + 1):
            for count in range(1, min(b, c) + 1):
                candidates.append(
                    (
                        f"prefix(count={count},b={b},c={c})",
                        lambda count=count, b=b, c=c: at_least_in_prefix(n, count, b, c),
                    )
                )
    seen = set()
    result = []
    for label, build in candidates:
        family = build()
        if family.mask not in seen:
            seen.add(family.mask)
            result.append((label, family))
    return result


@dataclass(frozen=True)
class FamilySpec:
    """Tagged family description as read from JSON"""

    family: str
    params: Dict[str, Any] = field(default_factory=dict, hash=False)

    KINDS = (
        "u_ij",
        "layer",
        "layers_le",
        "layers_ge",
        "t_band",
        "band_like",
        "seq_dom",
        "seq_dom_prime",
        "thm2",
        "e_family",
        "explicit",
    )

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "FamilySpec":
        if not isinstance(data, dict) or "family" not in data:
            raise InputError("a family spec needs a 'family' key")
        kind = data["family"]
        if kind not in cls.KINDS:
            raise InputError(f"unknown family '{kind}', expected one of {cls.KINDS}")
        return cls(kind, {k: v for k, v in data.items() if k != "family"})

    def label(self) -> str:
        return json.dumps({"family": self.family, **self.params}, sort_keys=True)

    def _get(self, key: str):
        try:
            return self.params[key]
        except KeyError:
            raise InputError(f"family '{self.family}' needs '{key}'") from None

    def build(self, n: int) -> PermSet:
        kind, get = self.family, self._get
        if kind == "u_ij":
            return u_ij(n, int(get("i")), int(get("j")))
        if kind == "layer":
            return layer(n, int(get("k")))
        if kind == "layers_le":
            return layers_le(n, int(get("k")))
        if kind == "layers_ge":
            return layers_ge(n, int(get("k")))
        if kind == "t_band":
            return t_band(n, int(get("t")))
        if kind == "band_like":
            if "vectors" in self.params:
                return band_like(n, self.params["vectors"])
            return band_preset(n, get("preset"), get("t"))
        if kind == "seq_dom":
            return seq_dominating(n, get("w"), get("t"))
        if kind == "seq_dom_prime":
            return seq_dominating_prime(n, get("w"), get("t"))
        if kind == "thm2":
            side = str(self.params.get("side", "A")).upper()
            if side not in ("A", "B"):
                raise InputError(f"thm2 side must be A or B, got {side}")
            family_a, family_b = thm2_pair(n, get("alpha"), get("beta"))
            return family_a if side == "A" else family_b
        if kind == "e_family":
            side = int(self.params.get("side", 1))
            if side not in (1, 2):
                raise InputError(f"e_family side must be 1 or 2, got {side}")
            return e_families(n, get("alpha"), get("beta"), get("eps"))[side - 1]
        family = PermSet.from_json({"n": self.params.get("n", n), "perms": get("perms")})
        if family.n != n:
            raise InputError(f"explicit family lives in S_{family.n}, expected S_{n}")
        return family
