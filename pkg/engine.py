"""Correlation reports and the experiment drivers built on them.

Every exact computation stays in Fractions; a slack is compared with zero
exactly. Float measures and Monte Carlo runs are flagged in their reports.
"""
import csv
import math
import os
import random

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from tabulate import tabulate
from tqdm import tqdm

from families import structured_families, thm2_m, thm2_pair
from measures import (
    FLOAT_TOL,
    Measure,
    equally_spaced_measure,
    fixed_point_measure,
    measure_of_set,
    middle_gap_measure,
    uniform_measure,
)
from orders import COVER_MAX_N, STRONG, OrderKind, UpSetEnumeration, random_up_mask, t_order
from permset import PermSet, iter_bits, mask_from_ranks
from perms import FACTORIALS, iter_perms, positions
from utils import (
    InputError,
    InvariantViolation,
    Number,
    format_number,
    is_exact,
    parse_number,
    print_warning,
)

DEFAULT_DENSITY = 0.3
RANDOM_SCAN_MAX_N = COVER_MAX_N
# without a limit, exhaustive pair scans stop here
EXHAUSTIVE_SCAN_MAX_N = 4
EXHAUSTIVE_MAX_N = 10
OPEN_QUESTION_MAX_N = 7
T_SCAN_MAX_N = 8
# pairs per RNG stream; chunk c of a scan seeded with s draws from Random(f"{s}/{c}")
CHUNK = 1000
# outer up-sets per task in an exhaustive scan
BLOCK = 64
WILSON_Z = 1.96

Predicate = Union[PermSet, Callable[[Tuple[int, ...]], bool]]


def _all_exact(*values) -> bool:
    return all(is_exact(v) for v in values)


@dataclass
class CorrelationReport:
    """mu(A & B) against mu(A) mu(B) for one pair of families"""

    n: int
    p_ab: Number
    p_a: Number
    p_b: Number
    measure: str = ""
    family_a: str = "A"
    family_b: str = "B"
    mode: str = "exact"
    samples: Optional[int] = None
    intervals: Dict[str, Tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        self.check()

    @property
    def exact(self) -> bool:
        return _all_exact(self.p_ab, self.p_a, self.p_b)

    @property
    def product(self) -> Number:
        return self.p_a * self.p_b

    @property
    def slack(self) -> Number:
        return self.p_ab - self.product

    @property
    def ratio(self) -> Optional[Number]:
        if self.product == 0:
            return None
        return self.p_ab / self.product

    def check(self):
        """Frechet bounds: max(p_a + p_b - 1, 0) <= p_ab <= min(p_a, p_b)"""
        tol = 0 if self.exact else FLOAT_TOL
        low = max(self.p_a + self.p_b - 1, 0)
        high = min(self.p_a, self.p_b)
        if not low - tol <= self.p_ab <= high + tol:
            raise InvariantViolation(
                f"p_ab = {self.p_ab} is outside the Frechet bounds [{low}, {high}]"
            )

    def to_json(self) -> dict:
        data = {
            "n": self.n,
            "measure": self.measure,
            "family_a": self.family_a,
            "family_b": self.family_b,
            "mode": self.mode,
            "exact": self.exact,
            "p_ab": format_number(self.p_ab),
            "p_a": format_number(self.p_a),
            "p_b": format_number(self.p_b),
            "product": format_number(self.product),
            "slack": format_number(self.slack),
            "ratio": format_number(self.ratio),
            "ratio_defined": self.ratio is not None,
        }
        if self.mode == "monte_carlo":
            data["samples"] = self.samples
            data["intervals"] = {k: list(v) for k, v in self.intervals.items()}
        return data

    def __str__(self):
        rows = [
            ["mu(A & B)", self.p_ab],
            ["mu(A)", self.p_a],
            ["mu(B)", self.p_b],
            ["mu(A) mu(B)", self.product],
            ["slack", self.slack],
            ["ratio", "undefined" if self.ratio is None else self.ratio],
        ]
        body = [[name, str(value)] for name, value in rows]
        title = f"{self.family_a} vs {self.family_b} under {self.measure} on S_{self.n}"
        return title + "\n" + tabulate(body, ["quantity", "value"], tablefmt="psql")


def correlate(
    measure: Measure,
    family_a: PermSet,
    family_b: PermSet,
    label_a: str = "A",
    label_b: str = "B",
) -> CorrelationReport:
    if family_a.n != family_b.n:
        raise InputError(f"mismatched n: {family_a.n} and {family_b.n}")
    return CorrelationReport(
        n=measure.n,
        p_ab=measure_of_set(measure, family_a & family_b),
        p_a=measure_of_set(measure, family_a),
        p_b=measure_of_set(measure, family_b),
        measure=measure.label,
        family_a=label_a,
        family_b=label_b,
    )


class MassIndex:
    """Evaluates mu on bitmask families.

    For exact measures the ranks are grouped into classes of equal mass, so
    mu(S) is a sum of integer class weights times popcounts over a common
    denominator D, and slacks are compared as integers over D^2.
    """

    def __init__(self, measure: Measure):
        self.n = measure.n
        self.exact = measure.exact
        masses = measure.masses()
        if self.exact:
            groups: Dict[Fraction, List[int]] = {}
            for r, m in enumerate(masses):
                if m:
                    groups.setdefault(m, []).append(r)
            self.denominator = math.lcm(*(m.denominator for m in groups))
            size = FACTORIALS[self.n]
            self.classes = [
                (m.numerator * (self.denominator // m.denominator), mask_from_ranks(size, ranks))
                for m, ranks in groups.items()
            ]
        else:
            self.masses = list(masses)

    def raw(self, mask: int) -> Union[int, float]:
        """mu(S) times D for exact measures, mu(S) otherwise"""
        if self.exact:
            return sum(w * (mask & cls).bit_count() for w, cls in self.classes)
        return sum(self.masses[r] for r in iter_bits(mask))

    def __call__(self, mask: int) -> Number:
        if self.exact:
            return Fraction(self.raw(mask), self.denominator)
        return self.raw(mask)

    def raw_slack(self, mask_a: int, mask_b: int, raw_a=None, raw_b=None):
        raw_a = self.raw(mask_a) if raw_a is None else raw_a
        raw_b = self.raw(mask_b) if raw_b is None else raw_b
        raw_ab = self.raw(mask_a & mask_b)
        if self.exact:
            return raw_ab * self.denominator - raw_a * raw_b
        return raw_ab - raw_a * raw_b

    def slack_value(self, raw) -> Number:
        if self.exact:
            return Fraction(raw, self.denominator * self.denominator)
        return raw


@dataclass(frozen=True)
class Exhaustive:
    limit: Optional[int] = None


@dataclass(frozen=True)
class RandomPairs:
    count: int
    seed: Any
    density: float = DEFAULT_DENSITY


# (raw slack, pair index, mask a, mask b); smaller slack wins, then smaller index
Best = Optional[Tuple[Any, int, int, int]]


def _better(best: Best, candidate: Best) -> Best:
    if best is None:
        return candidate
    if candidate is None:
        return best
    return candidate if candidate[:2] < best[:2] else best


@dataclass
class ScanReport:
    n: int
    order: str
    measure: str
    mode: str
    pairs_tested: int = 0
    min_slack: Optional[Number] = None
    mean_slack: Optional[Number] = None
    witness: Optional[Tuple[PermSet, PermSet]] = None
    witness_labels: Optional[Tuple[str, str]] = None
    truncated: bool = False
    seed: Optional[str] = None

    @property
    def nonnegative(self) -> Optional[bool]:
        if self.min_slack is None:
            return None
        if is_exact(self.min_slack):
            return self.min_slack >= 0
        return self.min_slack >= -FLOAT_TOL

    def recheck(self, measure: Measure) -> CorrelationReport:
        """Recomputes the witness pair on the plain code path; the minimum must
        be attained there"""
        if self.witness is None:
            raise InvariantViolation("the scan has no witness pair to recheck")
        report = correlate(measure, *self.witness)
        if is_exact(self.min_slack) and is_exact(report.slack):
            same = report.slack == self.min_slack
        else:
            same = abs(report.slack - self.min_slack) <= FLOAT_TOL
        if not same:
            raise InvariantViolation(
                f"witness slack {report.slack} differs from reported minimum {self.min_slack}"
            )
        return report

    def to_json(self) -> dict:
        data = {
            "n": self.n,
            "order": self.order,
            "measure": self.measure,
            "mode": self.mode,
            "seed": self.seed,
            "pairs_tested": self.pairs_tested,
            "min_slack": format_number(self.min_slack),
            "mean_slack": format_number(self.mean_slack),
            "nonnegative": self.nonnegative,
            "truncated": self.truncated,
            "witness": None,
        }
        if self.witness is not None:
            data["witness"] = {"a": self.witness[0].to_json(), "b": self.witness[1].to_json()}
            if self.witness_labels is not None:
                data["witness"]["labels"] = list(self.witness_labels)
        return data

    def __str__(self):
        body = [
            ["n", self.n],
            ["order", self.order],
            ["measure", self.measure],
            ["mode", self.mode],
            ["pairs tested", self.pairs_tested],
            ["min slack", self.min_slack],
            ["mean slack", self.mean_slack],
            ["truncated", self.truncated],
        ]
        if self.witness_labels is not None:
            body.append(["witness", " vs ".join(self.witness_labels)])
        elif self.witness is not None:
            body.append(["witness", f"{self.witness[0]!r} vs {self.witness[1]!r}"])
        return tabulate([[k, str(v)] for k, v in body], ["field", "value"], tablefmt="psql")


def _finish(report: ScanReport, index: MassIndex, count: int, total, best: Best) -> ScanReport:
    report.pairs_tested = count
    if best is not None:
        report.min_slack = index.slack_value(best[0])
        report.witness = (PermSet(index.n, best[2]), PermSet(index.n, best[3]))
    if count:
        if index.exact:
            report.mean_slack = Fraction(total, count * index.denominator * index.denominator)
        else:
            report.mean_slack = total / count
    return report


def _random_chunk(
    index: MassIndex, kind: OrderKind, seed: Any, chunk: int, count: int, density: float
):
    rng = random.Random(f"{seed}/{chunk}")
    n = index.n
    best: Best = None
    total = 0
    for i in range(count):
        mask_a = random_up_mask(n, kind, density, rng)
        mask_b = random_up_mask(n, kind, density, rng)
        slack = index.raw_slack(mask_a, mask_b)
        total += slack
        best = _better(best, (slack, chunk * CHUNK + i, mask_a, mask_b))
    return count, total, best


def _random_chunk_task(args):
    measure, kind, seed, chunk, count, density = args
    return _random_chunk(MassIndex(measure), kind, seed, chunk, count, density)


def _exhaustive_block(
    index: MassIndex, masks: Sequence[int], raws: Sequence, start: int, stop: int
):
    best: Best = None
    total = 0
    count = 0
    size = len(masks)
    for i in range(start, stop):
        for j in range(i, size):
            slack = index.raw_slack(masks[i], masks[j], raws[i], raws[j])
            total += slack
            count += 1
            best = _better(best, (slack, i * size + j, masks[i], masks[j]))
    return count, total, best


def _exhaustive_block_task(args):
    measure, masks, start, stop = args
    index = MassIndex(measure)
    return _exhaustive_block(index, masks, [index.raw(m) for m in masks], start, stop)


def _run(tasks: List, local: Callable, remote: Callable, workers: int, progress: bool, desc: str):
    """Runs tasks in process or across a pool; results keep task order"""
    if workers <= 1:
        it = (local(t) for t in tasks)
        return list(tqdm(it, total=len(tasks), desc=desc, disable=not progress))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        it = executor.map(remote, tasks)
        return list(tqdm(it, total=len(tasks), desc=desc, disable=not progress))


def _reduce(results) -> Tuple[int, Any, Best]:
    count, total, best = 0, 0, None
    for c, t, b in results:
        count += c
        total += t
        best = _better(best, b)
    return count, total, best


def scan_up_set_pairs(
    n: int,
    kind: OrderKind,
    measure: Measure,
    mode: Union[Exhaustive, RandomPairs],
    workers: int = 1,
    progress: bool = False,
) -> ScanReport:
    """Minimum of mu(A & B) - mu(A) mu(B) over pairs of up-sets of `kind`.

    Exhaustive mode takes every unordered pair (A = B included) of the
    enumerated up-sets and needs a limit above n = 4. RandomPairs draws both
    sets as up-closures of Bernoulli subsets. Results do not depend on
    `workers`.
    """
    if measure.n != n:
        raise InputError(f"mismatched n: measure on S_{measure.n}, scan over S_{n}")
    if isinstance(mode, RandomPairs):
        if n > RANDOM_SCAN_MAX_N:
            raise InputError(
                f"random scans need n <= {RANDOM_SCAN_MAX_N}, got {n}: up-closures walk the"
                f" cover tables, which stop at n = {COVER_MAX_N}"
            )
        if mode.count < 0:
            raise InputError(f"pair count {mode.count} must be nonnegative")
        if not 0 <= mode.density <= 1:
            raise InputError(f"seed density {mode.density} is outside [0, 1]")
        index = MassIndex(measure)
        report = ScanReport(n, str(kind), measure.label, "random", seed=str(mode.seed))
        sizes = [min(CHUNK, mode.count - start) for start in range(0, mode.count, CHUNK)]
        tasks = [
            (measure, kind, mode.seed, c, size, mode.density) for c, size in enumerate(sizes)
        ]
        results = _run(
            tasks,
            lambda t: _random_chunk(index, *t[1:]),
            _random_chunk_task,
            workers,
            progress,
            "random pairs",
        )
        return _finish(report, index, *_reduce(results))
    if n > EXHAUSTIVE_SCAN_MAX_N and mode.limit is None:
        raise InputError(
            f"exhaustive scans need n <= {EXHAUSTIVE_SCAN_MAX_N} without a limit, got {n}"
        )
    enumeration = UpSetEnumeration(n, kind, mode.limit)
    masks = list(enumeration.masks())
    index = MassIndex(measure)
    report = ScanReport(n, str(kind), measure.label, "exhaustive", truncated=enumeration.truncated)
    if enumeration.truncated:
        print_warning(f"up-set enumeration stopped after {mode.limit} up-sets")
    raws = [index.raw(m) for m in masks]
    blocks = [(start, min(start + BLOCK, len(masks))) for start in range(0, len(masks), BLOCK)]
    results = _run(
        [(measure, masks, start, stop) for start, stop in blocks],
        lambda t: _exhaustive_block(index, masks, raws, t[2], t[3]),
        _exhaustive_block_task,
        workers,
        progress,
        "up-set pairs",
    )
    return _finish(report, index, *_reduce(results))


def scan_family_pairs(
    measure: Measure, families: Sequence[Tuple[str, PermSet]], order: str = "explicit"
) -> ScanReport:
    """Every unordered pair of the given labelled families"""
    index = MassIndex(measure)
    masks = []
    for label, family in families:
        if family.n != measure.n:
            raise InputError(f"family {label} lives in S_{family.n}, measure on S_{measure.n}")
        masks.append(family.mask)
    raws = [index.raw(m) for m in masks]
    count, total, best = _exhaustive_block(index, masks, raws, 0, len(masks))
    report = _finish(
        ScanReport(measure.n, order, measure.label, "families"), index, count, total, best
    )
    if best is not None:
        size = len(masks)
        i, j = divmod(best[1], size)
        report.witness_labels = (families[i][0], families[j][0])
    return report


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> Tuple[float, float]:
    if trials <= 0:
        raise InputError("a confidence interval needs at least one trial")
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _as_predicate(family: Predicate) -> Callable[[Tuple[int, ...]], bool]:
    if isinstance(family, PermSet):
        return family.__contains__
    return family


def monte_carlo_correlate(
    measure: Measure,
    pred_a: Predicate,
    pred_b: Predicate,
    samples: int,
    rng: random.Random,
    label_a: str = "A",
    label_b: str = "B",
) -> CorrelationReport:
    """Empirical frequencies over `samples` draws from measure, with Wilson
    intervals"""
    if samples <= 0:
        raise InputError(f"need a positive number of samples, got {samples}")
    in_a, in_b = _as_predicate(pred_a), _as_predicate(pred_b)
    count_a = count_b = count_ab = 0
    for _ in range(samples):
        a = measure.sample(rng)
        hit_a, hit_b = bool(in_a(a)), bool(in_b(a))
        count_a += hit_a
        count_b += hit_b
        count_ab += hit_a and hit_b
    return CorrelationReport(
        n=measure.n,
        p_ab=Fraction(count_ab, samples),
        p_a=Fraction(count_a, samples),
        p_b=Fraction(count_b, samples),
        measure=measure.label,
        family_a=label_a,
        family_b=label_b,
        mode="monte_carlo",
        samples=samples,
        intervals={
            "p_a": wilson_interval(count_a, samples),
            "p_b": wilson_interval(count_b, samples),
            "p_ab": wilson_interval(count_ab, samples),
        },
    )


@dataclass(frozen=True)
class Thm2Row:
    """Sizes of the anti-correlated weak up-sets A, B at one n"""

    n: int
    m: int
    count_a: int
    count_b: int
    count_ab: int
    total: int
    exact: bool = True

    @property
    def density_a(self) -> Fraction:
        return Fraction(self.count_a, self.total)

    @property
    def density_b(self) -> Fraction:
        return Fraction(self.count_b, self.total)

    @property
    def density_ab(self) -> Fraction:
        return Fraction(self.count_ab, self.total)

    @property
    def lower_bound(self) -> Fraction:
        return Fraction(max(self.count_a + self.count_b - self.total, 0), self.total)

    def csv_row(self) -> List[str]:
        return [str(self.n)] + [
            format_number(v)
            for v in (self.density_a, self.density_b, self.density_ab, self.lower_bound)
        ]


THM2_COLUMNS = ["n", "density_a", "density_b", "density_ab", "lower_bound"]
GOLDEN_COLUMNS = ["alpha", "beta", "n", "m", "count_a", "count_b", "count_ab", "total"]


def _thm2_thresholds(n: int, alpha: Fraction, beta: Fraction):
    m = thm2_m(n, alpha, beta)
    return m, (1 - alpha) * m, (1 - beta) * (n - m + 1)


def _thm2_counts(perms: Iterable[Sequence[int]], m: int, need_a, need_b) -> Tuple[int, int, int]:
    count_a = count_b = count_ab = 0
    for a in perms:
        p = positions(a)
        pm = p[m - 1]
        in_a = sum(1 for x in p[:m] if x <= pm) >= need_a
        in_b = sum(1 for x in p[m - 1 :] if x >= pm) >= need_b
        count_a += in_a
        count_b += in_b
        count_ab += in_a and in_b
    return count_a, count_b, count_ab


def _unit_fraction(value: Any, name: str) -> Fraction:
    value = parse_number(value)
    if not 0 < value < 1:
        raise InputError(f"{name} = {value} must lie strictly between 0 and 1")
    return Fraction(value)


def thm2_sweep(
    alpha: Any,
    beta: Any,
    n_list: Sequence[int],
    samples: Optional[int] = None,
    rng: Optional[random.Random] = None,
    progress: bool = False,
) -> List[Thm2Row]:
    """Exact counts of A, B and A & B for every n <= EXHAUSTIVE_MAX_N; larger
    n are sampled uniformly when samples and rng are given"""
    alpha, beta = _unit_fraction(alpha, "alpha"), _unit_fraction(beta, "beta")
    rows = []
    for n in n_list:
        if n < 1:
            raise InputError(f"n = {n} must be positive")
        m, need_a, need_b = _thm2_thresholds(n, alpha, beta)
        if n <= EXHAUSTIVE_MAX_N:
            perms = tqdm(iter_perms(n), total=FACTORIALS[n], desc=f"n={n}", disable=not progress)
            rows.append(Thm2Row(n, m, *_thm2_counts(perms, m, need_a, need_b), FACTORIALS[n]))
            continue
        if samples is None or rng is None:
            raise InputError(f"n = {n} exceeds {EXHAUSTIVE_MAX_N}; pass samples and a seed")
        if samples <= 0:
            raise InputError(f"need a positive number of samples, got {samples}")
        values = list(range(1, n + 1))
        draws = (rng.sample(values, n) for _ in range(samples))
        rows.append(
            Thm2Row(n, m, *_thm2_counts(draws, m, need_a, need_b), samples, exact=False)
        )
    return rows


def thm2_oracle_row(n: int, alpha: Any, beta: Any) -> Thm2Row:
    """Same counts through the family constructors and set algebra"""
    family_a, family_b = thm2_pair(n, alpha, beta)
    return Thm2Row(
        n,
        thm2_m(n, alpha, beta),
        family_a.size,
        family_b.size,
        (family_a & family_b).size,
        FACTORIALS[n],
    )


def read_golden(path: str) -> Dict[Tuple[Fraction, Fraction, int], Thm2Row]:
    golden = {}
    with open(path, newline="") as f:
        for record in csv.DictReader(f):
            try:
                key = (Fraction(record["alpha"]), Fraction(record["beta"]), int(record["n"]))
                golden[key] = Thm2Row(
                    *(int(record[c]) for c in GOLDEN_COLUMNS[2:])
                )
            except (KeyError, ValueError, TypeError):
                raise InputError(f"malformed golden file {path}") from None
    return golden


def write_golden(
    path: str, alpha: Fraction, beta: Fraction, rows: Iterable[Thm2Row], existing=None
):
    records = dict(existing or {})
    for row in rows:
        records[alpha, beta, row.n] = row
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(GOLDEN_COLUMNS)
        for (a, b, n), row in sorted(records.items()):
            writer.writerow(
                [str(a), str(b), n, row.m, row.count_a, row.count_b, row.count_ab, row.total]
            )


def compare_golden(rows: Sequence[Thm2Row], path: str, alpha: Any, beta: Any) -> List[int]:
    """Compares exact sweep rows with the golden file bit for bit.

    Rows the file does not hold yet are recomputed by thm2_oracle_row, must
    agree with the sweep, and are then written. Returns the newly written n.
    """
    alpha, beta = _unit_fraction(alpha, "alpha"), _unit_fraction(beta, "beta")
    golden = read_golden(path) if os.path.exists(path) else {}
    fresh = []
    for row in rows:
        if not row.exact:
            continue
        expected = golden.get((alpha, beta, row.n))
        if expected is None:
            expected = thm2_oracle_row(row.n, alpha, beta)
            fresh.append(expected)
        if expected != row:
            raise InvariantViolation(
                f"n = {row.n}: sweep gives {row.csv_row()}, golden value is {expected.csv_row()}"
            )
    if fresh:
        write_golden(path, alpha, beta, fresh, golden)
    return [row.n for row in fresh]


@dataclass
class SequenceReport:
    lhs: Number
    rhs: Number

    @property
    def holds(self) -> bool:
        if _all_exact(self.lhs, self.rhs):
            return self.lhs >= self.rhs
        return self.lhs >= self.rhs - FLOAT_TOL

    def to_json(self) -> dict:
        return {"lhs": format_number(self.lhs), "rhs": format_number(self.rhs), "holds": self.holds}


def sequence_sides(t: Sequence[Number], u: Sequence[Number], v: Sequence[Number]) -> SequenceReport:
    """sum t_k u_k v_k and (sum t_k u_k)(sum t_k v_k), no preconditions"""
    if not len(t) == len(u) == len(v):
        raise InputError("t, u and v must have equal length")
    lhs = sum(x * y * z for x, y, z in zip(t, u, v))
    rhs = sum(x * y for x, y in zip(t, u)) * sum(x * z for x, z in zip(t, v))
    return SequenceReport(lhs, rhs)


def check_sequence_inequality(
    t: Sequence[Any], u: Sequence[Any], v: Sequence[Any]
) -> SequenceReport:
    """sum t_k u_k v_k >= (sum t_k u_k)(sum t_k v_k) for t >= 0 with
    sum t <= 1 and u, v nonnegative and nondecreasing"""
    t, u, v = ([parse_number(x) for x in seq] for seq in (t, u, v))
    if not t:
        raise InputError("the vectors must be non-empty")
    if not len(t) == len(u) == len(v):
        raise InputError("t, u and v must have equal length")
    if any(x < 0 for x in t + u + v):
        raise InputError("t, u and v must be nonnegative")
    if sum(t) > 1:
        raise InputError(f"sum of t is {sum(t)} > 1")
    for name, seq in (("u", u), ("v", v)):
        if any(seq[k] > seq[k + 1] for k in range(len(seq) - 1)):
            raise InputError(f"{name} must be nondecreasing")
    return sequence_sides(t, u, v)


def _random_fractions(rng: random.Random, length: int, scale: int = 10) -> List[Fraction]:
    return [Fraction(rng.randint(0, scale), scale) for _ in range(length)]


def search_sequence_counterexample(
    rng: random.Random, drop: str, trials: int = 10000, length: int = 3
) -> Optional[Tuple[List[Fraction], List[Fraction], List[Fraction], SequenceReport]]:
    """Random instances meeting every hypothesis but one; returns the first
    where the inequality fails, or None.

    drop is "sum" (sum t may exceed 1), "monotone" (v may decrease) or
    "sign" (u may be negative).
    """
    if drop not in ("sum", "monotone", "sign"):
        raise InputError(f"unknown hypothesis '{drop}', expected sum, monotone or sign")
    for _ in range(trials):
        t = _random_fractions(rng, length)
        if drop != "sum":
            total = sum(t)
            if total > 1:
                t = [x / total for x in t]
        u = sorted(_random_fractions(rng, length))
        v = sorted(_random_fractions(rng, length))
        if drop == "monotone":
            v = v[::-1]
        if drop == "sign":
            u = [x - 1 for x in u]
        report = sequence_sides(t, u, v)
        if not report.holds:
            return t, u, v, report
    return None


def _open_question_measure(question: int, n: int, q_param: Any) -> Measure:
    if question == 1:
        return equally_spaced_measure(n, q_param)
    if question == 2:
        return middle_gap_measure(n, q_param)
    if question == 3:
        return fixed_point_measure(n, q_param)
    raise InputError(f"open question {question} is not one of 1, 2, 3")


def open_question_experiment(
    question: int,
    n: int,
    q_param: Any,
    source: str = "structured",
    pairs: int = 1000,
    seed: Any = None,
    limit: Optional[int] = None,
    density: float = DEFAULT_DENSITY,
    workers: int = 1,
) -> ScanReport:
    """Scans strong up-set pairs under one of the open-question measures and
    reports the minimum slack; its sign is evidence only"""
    if not 1 <= n <= OPEN_QUESTION_MAX_N:
        raise InputError(f"open-question experiments need 1 <= n <= {OPEN_QUESTION_MAX_N}")
    measure = _open_question_measure(question, n, q_param)
    if source == "structured":
        return scan_family_pairs(measure, structured_families(n), order=str(STRONG))
    if source == "exhaustive":
        return scan_up_set_pairs(n, STRONG, measure, Exhaustive(limit), workers=workers)
    if source == "random":
        if seed is None:
            raise InputError("a random open-question scan needs a seed")
        return scan_up_set_pairs(
            n, STRONG, measure, RandomPairs(pairs, seed, density), workers=workers
        )
    raise InputError(f"unknown pair source '{source}', expected structured, exhaustive or random")


@dataclass
class TScanRow:
    t: int
    trials: int
    min_slack: Optional[Number]
    mean_slack: Optional[Number]

    def csv_row(self) -> List[Any]:
        return [self.t, self.trials, format_number(self.min_slack), format_number(self.mean_slack)]


TSCAN_COLUMNS = ["t", "trials", "min_slack", "mean_slack"]


def t_up_set_experiment(
    n: int,
    t_list: Sequence[int],
    trials: int,
    seed: Any,
    density: float = DEFAULT_DENSITY,
    workers: int = 1,
) -> List[TScanRow]:
    """Uniform-measure slack statistics over random pairs of t-up-sets"""
    if not 1 <= n <= T_SCAN_MAX_N:
        raise InputError(f"t-up-set scans need 1 <= n <= {T_SCAN_MAX_N}, got {n}")
    measure = uniform_measure(n)
    rows = []
    for t in t_list:
        if not 1 <= t <= n:
            raise InputError(f"t = {t} is outside 1..{n}")
        if trials == 0:
            rows.append(TScanRow(t, 0, None, None))
            continue
        report = scan_up_set_pairs(
            n, t_order(t), measure, RandomPairs(trials, f"{seed}/t{t}", density), workers=workers
        )
        rows.append(TScanRow(t, report.pairs_tested, report.min_slack, report.mean_slack))
    return rows


def write_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], stream):
    writer = csv.writer(stream)
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
