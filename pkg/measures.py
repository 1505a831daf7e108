"""Probability measures on S_n.

A measure is either product-form over Lehmer coordinates (independently
generated: mu(a) = prod_k P(X_k = f(a)_k)) or dense (one mass per rank).
Masses are exact Fractions whenever every input is rational, floats
otherwise.
"""
import abc
import random

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Any, Dict, List, Optional, Sequence, Tuple

from perms import (
    FACTORIALS,
    MAX_N,
    all_codes,
    decode_lehmer,
    encode_lehmer,
    iter_perms,
    positions,
    rank,
    rank_of_code,
    unrank,
)
from permset import PermSet
from utils import InputError, Number, is_exact, parse_number, print_warning

DENSE_MAX_N = 10
DENSE_LARGE_N = 12
LATTICE_MAX_N = 7
# float tolerance for normalization and slack signs
FLOAT_TOL = 1e-9
# float tolerance for a single coordinate distribution
DIST_TOL = 1e-12


def _zero(exact: bool) -> Number:
    return Fraction(0) if exact else 0.0


def _one(exact: bool) -> Number:
    return Fraction(1) if exact else 1.0


@dataclass(frozen=True)
class CoordinateDistribution:
    """Law of X_k on [k]; probs[v - 1] = P(X_k = v)"""

    k: int
    probs: Tuple[Number, ...]

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise InputError(f"coordinate index {self.k} must be a positive integer")
        probs = tuple(parse_number(p) for p in self.probs)
        if len(probs) != self.k:
            raise InputError(f"X_{self.k} needs {self.k} probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise InputError(f"X_{self.k} has a negative probability")
        total = sum(probs)
        if all(is_exact(p) for p in probs):
            if total != 1:
                raise InputError(f"X_{self.k} probabilities sum to {total}, not 1")
        else:
            probs = tuple(float(p) for p in probs)
            if abs(total - 1) > DIST_TOL:
                raise InputError(f"X_{self.k} probabilities sum to {total}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, k: int) -> "CoordinateDistribution":
        return cls(k, tuple(Fraction(1, k) for _ in range(k)))

    @classmethod
    def point(cls, k: int, value: int) -> "CoordinateDistribution":
        if not 1 <= value <= k:
            raise InputError(f"point {value} is outside 1..{k}")
        return cls(k, tuple(Fraction(int(v == value)) for v in range(1, k + 1)))

    @classmethod
    def from_weights(cls, k: int, weights: Sequence[Any]) -> "CoordinateDistribution":
        weights = [parse_number(w) for w in weights]
        total = sum(weights)
        if total <= 0:
            raise InputError(f"X_{k} weights must have a positive sum")
        return cls(k, tuple(w / total for w in weights))

    @property
    def exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.probs)

    def is_uniform(self) -> bool:
        return all(p == self.probs[0] for p in self.probs)


class Measure(metaclass=abc.ABCMeta):
    n: int
    label: str

    @property
    @abc.abstractmethod
    def exact(self) -> bool:
        pass

    @abc.abstractmethod
    def density(self, a: Sequence[int]) -> Number:
        pass

    @abc.abstractmethod
    def masses(self) -> Sequence[Number]:
        """Mass of every permutation, in rank order"""

    @abc.abstractmethod
    def sample(self, rng: random.Random) -> Tuple[int, ...]:
        pass

    @abc.abstractmethod
    def to_float(self) -> "Measure":
        pass

    def is_uniform(self) -> bool:
        return False

    def total(self) -> Number:
        return sum(self.masses(), _zero(self.exact))

    def _check_n(self, a: Sequence[int]):
        if len(a) != self.n:
            raise InputError(f"mismatched n: measure on S_{self.n}, got length {len(a)}")

    def __repr__(self):
        return f"<{type(self).__name__} {self.label} on S_{self.n}>"


class ProductMeasure(Measure):
    """Independently generated measure from one distribution per coordinate"""

    def __init__(self, dists: Sequence[CoordinateDistribution], label: str = "ig"):
        n = len(dists)
        if not 1 <= n <= MAX_N:
            raise InputError(f"need 1..{MAX_N} coordinate distributions, got {n}")
        for k, dist in enumerate(dists, 1):
            if not isinstance(dist, CoordinateDistribution) or dist.k != k:
                raise InputError(f"distribution {k} must be a law on [{k}]")
        self.n = n
        self.dists = tuple(dists)
        self.label = label
        self._masses: Optional[List[Number]] = None
        self._cum = [list(accumulate(float(p) for p in d.probs)) for d in self.dists]

    @property
    def exact(self) -> bool:
        return all(d.exact for d in self.dists)

    def is_uniform(self) -> bool:
        return all(d.is_uniform() for d in self.dists)

    def density(self, a: Sequence[int]) -> Number:
        self._check_n(a)
        mass = _one(self.exact)
        for dist, f_k in zip(self.dists, encode_lehmer(a)):
            mass *= dist.probs[f_k - 1]
        return mass

    def masses(self) -> List[Number]:
        if self._masses is None:
            if self.n > DENSE_MAX_N:
                raise InputError(f"n = {self.n} is too large to tabulate masses")
            ms = [_one(self.exact)]
            # rank digit k - f_k varies slower for larger k
            for k, dist in enumerate(self.dists, 1):
                ms = [dist.probs[k - d - 1] * m for d in range(k) for m in ms]
            self._masses = ms
        return self._masses

    def sample(self, rng: random.Random) -> Tuple[int, ...]:
        code = []
        for k, cum in enumerate(self._cum, 1):
            idx = bisect_right(cum, rng.random() * cum[-1])
            code.append(min(idx, k - 1) + 1)
        return tuple(decode_lehmer(code))

    def to_float(self) -> "ProductMeasure":
        return ProductMeasure(
            [CoordinateDistribution(d.k, tuple(float(p) for p in d.probs)) for d in self.dists],
            label=self.label,
        )


class DenseMeasure(Measure):
    """Explicit mass per rank"""

    def __init__(
        self,
        n: int,
        masses: Sequence[Number],
        label: str = "dense",
        allow_large: bool = False,
    ):
        cap = DENSE_LARGE_N if allow_large else DENSE_MAX_N
        if not 1 <= n <= cap:
            raise InputError(f"dense measures need 1 <= n <= {cap}, got {n}")
        if len(masses) != FACTORIALS[n]:
            raise InputError(f"expected {FACTORIALS[n]} masses, got {len(masses)}")
        masses = list(masses)
        if all(is_exact(m) for m in masses):
            masses = [Fraction(m) for m in masses]
            exact = True
        else:
            masses = [float(m) for m in masses]
            exact = False
        if any(m < 0 for m in masses):
            raise InputError("masses must be nonnegative")
        total = sum(masses, _zero(exact))
        if (exact and total != 1) or (not exact and abs(total - 1) > FLOAT_TOL):
            raise InputError(f"masses sum to {total}, not 1")
        self.n = n
        self.label = label
        self._masses = masses
        self._exact = exact
        self._cum: Optional[List[float]] = None

    @classmethod
    def from_weights(
        cls, n: int, weights: Sequence[Number], label: str = "dense", allow_large=False
    ) -> "DenseMeasure":
        total = sum(weights)
        if total <= 0:
            raise InputError("weights must have a positive sum")
        return cls(n, [w / total for w in weights], label=label, allow_large=allow_large)

    @property
    def exact(self) -> bool:
        return self._exact

    def is_uniform(self) -> bool:
        return all(m == self._masses[0] for m in self._masses)

    def density(self, a: Sequence[int]) -> Number:
        self._check_n(a)
        return self._masses[rank(a)]

    def masses(self) -> List[Number]:
        return self._masses

    def sample(self, rng: random.Random) -> Tuple[int, ...]:
        if self._cum is None:
            self._cum = list(accumulate(float(m) for m in self._masses))
        r = bisect_right(self._cum, rng.random() * self._cum[-1])
        r = min(r, len(self._cum) - 1)
        return tuple(unrank(r, self.n))

    def to_float(self) -> "DenseMeasure":
        return DenseMeasure(
            self.n,
            [float(m) for m in self._masses],
            label=self.label,
            allow_large=self.n > DENSE_MAX_N,
        )


def uniform_measure(n: int) -> ProductMeasure:
    return ProductMeasure(
        [CoordinateDistribution.uniform(k) for k in range(1, n + 1)], label="uniform"
    )


def ig_measure(dists: Sequence[CoordinateDistribution], label: str = "ig") -> ProductMeasure:
    return ProductMeasure(dists, label=label)


def random_ig_measure(n: int, rng: random.Random, max_weight: int = 5) -> ProductMeasure:
    """Rational IG measure with integer coordinate weights in 0..max_weight"""
    dists = []
    for k in range(1, n + 1):
        weights = [rng.randint(0, max_weight) for _ in range(k)]
        if not any(weights):
            weights[rng.randrange(k)] = 1
        dists.append(CoordinateDistribution.from_weights(k, weights))
    return ProductMeasure(dists, label="ig-random")


def mallows_measure(n: int, q: Any) -> ProductMeasure:
    """mu(a) proportional to q^|inv(a)|, as the IG measure with
    P(X_k = v) proportional to q^(k - v)"""
    q = parse_number(q)
    if q <= 0:
        raise InputError(f"Mallows parameter q = {q} must be positive")
    if q > 1:
        print_warning(f"Mallows parameter q = {q} > 1 favours permutations with many inversions")
    dists = [
        CoordinateDistribution.from_weights(k, [q ** (k - v) for v in range(1, k + 1)])
        for k in range(1, n + 1)
    ]
    return ProductMeasure(dists, label=f"mallows(q={q})")


class Potential:
    """Nondecreasing pair potential V applied to x(i) - x(pos(a, i))"""

    NAMES = ("abs", "square", "left_indicator", "zero_indicator", "table")

    def __init__(self, name: str, table: Optional[Dict[Any, Any]] = None):
        if name not in self.NAMES:
            raise InputError(f"unknown potential '{name}', expected one of {self.NAMES}")
        if name == "table":
            if not table:
                raise InputError("a table potential needs a non-empty 'table'")
            table = {parse_number(u): parse_number(v) for u, v in table.items()}
        self.name = name
        self.table = table

    def __call__(self, u):
        if self.name == "abs":
            return abs(u)
        if self.name == "square":
            return u * u
        if self.name == "left_indicator":
            return 1 if u < 0 else 0
        if self.name == "zero_indicator":
            return 0 if u == 0 else 1
        try:
            return self.table[u]
        except KeyError:
            raise InputError(f"potential table has no entry for {u}") from None


def _power(q: Number, exponent) -> Number:
    if isinstance(q, Fraction) and is_exact(exponent) and Fraction(exponent).denominator == 1:
        return q ** int(exponent)
    return float(q) ** float(exponent)


def boltzmann_measure(
    points: Sequence[Any],
    potential: Any,
    q: Any,
    allow_large: bool = False,
    label: Optional[str] = None,
) -> DenseMeasure:
    """mu(a) proportional to q^(sum_i V(x(i) - x(pos(a, i))))"""
    xs = [parse_number(x) for x in points]
    n = len(xs)
    if any(xs[i] > xs[i + 1] for i in range(n - 1)):
        raise InputError("points must be nondecreasing")
    if not isinstance(potential, Potential):
        potential = Potential(potential)
    q = parse_number(q)
    if not 0 < q <= 1:
        raise InputError(f"q = {q} must lie in (0, 1]")
    cap = DENSE_LARGE_N if allow_large else DENSE_MAX_N
    if not 1 <= n <= cap:
        raise InputError(f"Boltzmann measures need 1 <= n <= {cap}, got {n}")
    weights = []
    for a in iter_perms(n):
        p = positions(a)
        energy = sum(potential(xs[i] - xs[p[i] - 1]) for i in range(n))
        weights.append(_power(q, energy))
    if not all(isinstance(w, Fraction) for w in weights):
        weights = [float(w) for w in weights]
    return DenseMeasure.from_weights(
        n, weights, label=label or f"boltzmann(V={potential.name}, q={q})", allow_large=allow_large
    )


def equally_spaced_measure(n: int, q: Any) -> DenseMeasure:
    """mu(a) proportional to q^(sum_i |i - pos(a, i)|)"""
    return boltzmann_measure(range(1, n + 1), "abs", q, label=f"equally_spaced(q={q})")


def middle_gap_count(a: Sequence[int]) -> int:
    """Number of values from the upper half placed in the lower half of positions"""
    n = len(a)
    if n % 2:
        raise InputError(f"the middle gap needs even n, got {n}")
    half = n // 2
    return sum(1 for k in range(half) if a[k] > half)


def middle_gap_measure(n: int, q: Any) -> DenseMeasure:
    """mu(a) proportional to q^m(a)"""
    if n % 2:
        raise InputError(f"the middle gap measure needs even n, got {n}")
    half = n // 2
    return boltzmann_measure(
        [0] * half + [1] * half, "left_indicator", q, label=f"middle_gap(q={q})"
    )


def fixed_point_measure(n: int, q: Any) -> DenseMeasure:
    """mu(a) proportional to q^(n - fixed points of a)"""
    q = parse_number(q)
    if not 0 < q <= 1:
        raise InputError(f"q = {q} must lie in (0, 1]")
    if not 1 <= n <= DENSE_MAX_N:
        raise InputError(f"dense measures need 1 <= n <= {DENSE_MAX_N}, got {n}")
    weights = [
        _power(q, n - sum(1 for k, v in enumerate(a, 1) if k == v)) for a in iter_perms(n)
    ]
    return DenseMeasure.from_weights(n, weights, label=f"fixed_points(q={q})")


@dataclass
class LatticeReport:
    holds: bool
    worst_slack: Number
    worst_pair: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    pairs: int = 0
    symbolic: bool = False
    # largest slack seen; zero together with worst_slack means equality everywhere
    best_slack: Optional[Number] = None


def check_lattice_condition(measure: Measure, exhaustive: bool = False) -> LatticeReport:
    """Checks mu(a v b) mu(a ^ b) >= mu(a) mu(b) over the grid lattice.

    Product measures satisfy it with equality coordinate by coordinate, so
    they are answered without a scan unless exhaustive is set.
    """
    exact = measure.exact
    if isinstance(measure, ProductMeasure) and not exhaustive:
        return LatticeReport(
            holds=True, worst_slack=_zero(exact), symbolic=True, best_slack=_zero(exact)
        )
    n = measure.n
    if n > LATTICE_MAX_N:
        raise InputError(f"n = {n} is too large for an all-pairs scan (max {LATTICE_MAX_N})")
    codes = all_codes(n)
    masses = measure.masses()
    worst = best = None
    worst_pair = None
    pairs = 0
    for i, fa in enumerate(codes):
        ma = masses[i]
        for j in range(i + 1, len(codes)):
            fb = codes[j]
            join = rank_of_code([x if x > y else y for x, y in zip(fa, fb)])
            meet = rank_of_code([y if x > y else x for x, y in zip(fa, fb)])
            slack = masses[join] * masses[meet] - ma * masses[j]
            pairs += 1
            if worst is None or slack < worst:
                worst = slack
                worst_pair = (i, j)
            if best is None or slack > best:
                best = slack
    if worst is None:
        worst = best = _zero(exact)
    holds = worst >= 0 if exact else worst >= -FLOAT_TOL
    if worst_pair is not None:
        i, j = worst_pair
        worst_pair = (tuple(decode_lehmer(codes[i])), tuple(decode_lehmer(codes[j])))
    return LatticeReport(
        holds=holds, worst_slack=worst, worst_pair=worst_pair, pairs=pairs, best_slack=best
    )


def measure_of_set(measure: Measure, family: PermSet) -> Number:
    if family.n != measure.n:
        raise InputError(f"mismatched n: measure on S_{measure.n}, family in S_{family.n}")
    if measure.exact and measure.is_uniform():
        return Fraction(family.size, FACTORIALS[family.n])
    masses = measure.masses()
    return sum((masses[r] for r in family.ranks()), _zero(measure.exact))


def sample(measure: Measure, rng: random.Random) -> Tuple[int, ...]:
    return measure.sample(rng)


def _parse_dists(raw: Any) -> List[CoordinateDistribution]:
    if not isinstance(raw, list):
        raise InputError("'dists' must be a list of probability lists")
    return [CoordinateDistribution(k, tuple(row)) for k, row in enumerate(raw, 1)]


def measure_from_json(spec: Dict[str, Any], n: int) -> Measure:
    """Builds a measure from its JSON spec, e.g. {"measure": "mallows", "q": "1/2"}"""
    if not isinstance(spec, dict) or "measure" not in spec:
        raise InputError("a measure spec needs a 'measure' key")
    kind = spec["measure"]
    if kind == "uniform":
        return uniform_measure(n)
    if kind == "mallows":
        return mallows_measure(n, spec.get("q", 1))
    if kind == "ig":
        dists = _parse_dists(spec.get("dists"))
        if len(dists) != n:
            raise InputError(f"'dists' has {len(dists)} coordinates, expected {n}")
        return ig_measure(dists)
    if kind == "boltzmann":
        xs = spec.get("x")
        if not isinstance(xs, list) or len(xs) != n:
            raise InputError(f"'x' must list {n} points")
        name = spec.get("V", "abs")
        potential = Potential(name, spec.get("table")) if name == "table" else Potential(name)
        return boltzmann_measure(xs, potential, spec.get("q", 1))
    if kind == "equally_spaced":
        return equally_spaced_measure(n, spec.get("q", 1))
    if kind == "middle_gap":
        return middle_gap_measure(n, spec.get("q", 1))
    if kind == "fixed_points":
        return fixed_point_measure(n, spec.get("q", 1))
    raise InputError(f"unknown measure '{kind}'")
