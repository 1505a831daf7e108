"""The invariant suite behind `permcorr.py selfcheck`.

Each check returns a CheckResult; run_selfcheck collects them into one table
and raises InvariantViolation when any of them failed.
"""
import random

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

from tabulate import tabulate
from tqdm import tqdm

import chains
import engine
import families
import measures
import orders
import perms
from permset import PermSet
from utils import InvariantViolation

DEFAULT_SEED = 20240501


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _result(name: str, failures: List[str], detail: str = "") -> CheckResult:
    if failures:
        return CheckResult(name, False, "; ".join(failures[:3]))
    return CheckResult(name, True, detail)


def check_lehmer(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    for n in range(1, 7):
        for a, f in zip(perms.all_perms(n), perms.all_codes(n)):
            if perms.encode_lehmer(a) != f or tuple(perms.decode_lehmer(f)) != a:
                failures.append(f"round trip fails at {a}")
            if perms.inversion_count(a) != sum(k - f_k for k, f_k in enumerate(f, 1)):
                failures.append(f"inversion count identity fails at {a}")
    for _ in range(50 if quick else 500):
        a = tuple(rng.sample(range(1, 13), 12))
        if tuple(perms.decode_lehmer(perms.encode_lehmer(a))) != a:
            failures.append(f"round trip fails at {a}")
    return _result("Lehmer bijection", failures, "n <= 6 exhaustive, n = 12 random")


def check_rank(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    top = 5 if quick else 7
    for n in range(1, top + 1):
        seen = set()
        for r in range(perms.FACTORIALS[n]):
            a = perms.unrank(r, n)
            seen.add(a)
            if perms.rank(a) != r:
                failures.append(f"rank(unrank({r}, {n})) != {r}")
        if len(seen) != perms.FACTORIALS[n]:
            failures.append(f"unrank is not injective at n = {n}")
    return _result("rank / unrank", failures, f"n <= {top} exhaustive")


def _dominated_masks(n: int) -> Tuple[int, ...]:
    """Principal up-sets under dominated-inversion swaps"""
    masks = [0] * perms.FACTORIALS[n]
    table = perms.all_perms(n)
    for r in sorted(range(len(table)), key=lambda r: perms.inversion_count(table[r])):
        m = 1 << r
        for b in orders.dominated_moves(table[r]):
            m |= masks[perms.rank(b)]
        masks[r] = m
    return tuple(masks)


def check_order_criteria(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    top = 5 if quick else 6
    for n in range(1, top + 1):
        table = perms.all_perms(n)
        invs = [perms.inversions(a) for a in table]
        strong = orders.up_masks(n, orders.STRONG)
        weak = orders.up_masks(n, orders.WEAK)
        grid = orders.up_masks(n, orders.GRID)
        codes = perms.all_codes(n)
        dominated = _dominated_masks(n)
        for r, a in enumerate(table):
            strong_fast = sum(
                1 << s for s, b in enumerate(table) if orders.leq(a, b, orders.STRONG)
            )
            if strong_fast != strong[r]:
                failures.append(f"strong tableau criterion disagrees with search at {a}")
            weak_fast = sum(1 << s for s in range(len(table)) if invs[s] <= invs[r])
            if weak_fast != weak[r]:
                failures.append(f"weak criterion disagrees with search at {a}")
            grid_fast = sum(
                1 << s
                for s in range(len(table))
                if all(x <= y for x, y in zip(codes[r], codes[s]))
            )
            if grid_fast != grid[r] or grid_fast != dominated[r]:
                failures.append(f"grid order disagrees with dominated swaps at {a}")
    return _result("order criteria", failures, f"n <= {top} exhaustive")


def check_order_containments(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    top = 4 if quick else 5
    for n in range(1, top + 1):
        strong = orders.up_masks(n, orders.STRONG)
        weak = orders.up_masks(n, orders.WEAK)
        grid = orders.up_masks(n, orders.GRID)
        by_t = {t: orders.up_masks(n, orders.t_order(t)) for t in range(1, n + 1)}
        for r in range(perms.FACTORIALS[n]):
            if weak[r] & ~strong[r] or grid[r] & ~strong[r]:
                failures.append(f"containment in the strong order fails at rank {r}, n = {n}")
            if by_t[1][r] != weak[r] or by_t[n][r] != strong[r]:
                failures.append(f"t-order endpoints differ at rank {r}, n = {n}")
            for t in range(1, n):
                if by_t[t][r] & ~by_t[t + 1][r]:
                    failures.append(f"t-order {t} not inside {t + 1} at rank {r}")
    return _result("order containments", failures, f"n <= {top} exhaustive")


def check_slices(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    count = 0
    for family in orders.enumerate_up_sets(4, orders.STRONG):
        count += 1
        slices = [orders.slice_family(family, k) for k in range(1, 5)]
        if not all(orders.is_up_set(s, orders.STRONG) for s in slices):
            failures.append(f"a slice of {family!r} is not a strong up-set")
        if not all(slices[k] <= slices[k + 1] for k in range(3)):
            failures.append(f"slices of {family!r} are not nested")
    return _result("slice nesting", failures, f"{count} strong up-sets at n = 4")


def check_closure(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    for _ in range(20 if quick else 200):
        n = rng.randint(2, 6)
        kind = rng.choice([orders.STRONG, orders.WEAK, orders.GRID])
        size = perms.FACTORIALS[n]
        small = PermSet(n, rng.getrandbits(size) & rng.getrandbits(size))
        big = small | PermSet(n, rng.getrandbits(size))
        closed = orders.up_closure(small, kind)
        if not small <= closed or orders.up_closure(closed, kind) != closed:
            failures.append(f"closure not extensive or idempotent at n = {n}")
        if not closed <= orders.up_closure(big, kind):
            failures.append(f"closure not monotone at n = {n}")
    return _result("closure operator", failures)


def check_uniform_correlation(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    report = engine.scan_up_set_pairs(
        3, orders.STRONG, measures.uniform_measure(3), engine.Exhaustive()
    )
    if report.min_slack < 0:
        failures.append(f"negative slack {report.min_slack} at n = 3")
    pairs = 2000 if quick else 100000
    for n in (5, 6):
        report = engine.scan_up_set_pairs(
            n,
            orders.STRONG,
            measures.uniform_measure(n),
            engine.RandomPairs(pairs, rng.getrandbits(64)),
        )
        if report.min_slack < 0:
            failures.append(f"negative slack {report.min_slack} at n = {n}")
    detail = f"n = 3 exhaustive, {pairs} pairs at n = 5, 6"
    return _result("uniform strong up-sets", failures, detail)


def check_ig_measures(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    count, pairs = (3, 200) if quick else (20, 1000)
    for n in (4, 5):
        for _ in range(count):
            measure = measures.random_ig_measure(n, rng)
            report = engine.scan_up_set_pairs(
                n, orders.STRONG, measure, engine.RandomPairs(pairs, rng.getrandbits(64))
            )
            if report.min_slack < 0:
                failures.append(f"negative slack under an IG measure at n = {n}")
            if n == 4:
                lattice = measures.check_lattice_condition(measure, exhaustive=True)
                if lattice.worst_slack != 0 or lattice.best_slack != 0:
                    failures.append("an IG measure is not a lattice equality case")
    return _result("IG measures", failures, f"{count} measures x {pairs} pairs at n = 4, 5")


def check_grid_lattice(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    count, pairs = (2, 500) if quick else (10, 2000)
    for n in (4, 5):
        for _ in range(count):
            measure = measures.random_ig_measure(n, rng)
            if not measures.check_lattice_condition(measure, exhaustive=True).holds:
                failures.append(f"an IG measure breaks the lattice condition at n = {n}")
            report = engine.scan_up_set_pairs(
                n, orders.GRID, measure, engine.RandomPairs(pairs, rng.getrandbits(64))
            )
            if report.min_slack < 0:
                failures.append(f"negative grid slack {report.min_slack} at n = {n}")
    weights = [Fraction(2 ** min(f[1], f[2])) for f in perms.all_codes(3)]
    dense = measures.DenseMeasure.from_weights(3, weights)
    report = engine.scan_up_set_pairs(3, orders.GRID, dense, engine.Exhaustive())
    if report.min_slack < 0:
        failures.append("negative grid slack under a dense lattice measure at n = 3")
    detail = f"{count} IG measures x {pairs} pairs at n = 4, 5"
    return _result("grid up-sets, lattice measures", failures, detail)


def check_mallows(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    for q in (Fraction(1, 3), Fraction(1, 2), Fraction(7, 10), Fraction(1)):
        for n in range(1, 6):
            measure = measures.mallows_measure(n, q)
            table = perms.all_perms(n)
            weights = [q ** perms.inversion_count(a) for a in table]
            z = sum(weights)
            if any(m != w / z for m, w in zip(measure.masses(), weights)):
                failures.append(f"Mallows masses differ at n = {n}, q = {q}")
    return _result("Mallows as IG", failures, "n <= 5, four values of q")


def check_thm2(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    n_list = [6, 8] if quick else [6, 8, 10]
    rows = engine.thm2_sweep("1/2", "1/2", n_list)
    half = Fraction(1, 2)
    for row in rows:
        if row.density_a < half or row.density_b < half:
            failures.append(f"A or B below half of S_{row.n}")
        if row.density_ab >= row.density_a * row.density_b:
            failures.append(f"A and B not anti-correlated at n = {row.n}")
        if row.density_ab < row.lower_bound:
            failures.append(f"intersection below the union bound at n = {row.n}")
    for prev, cur in zip(rows, rows[1:]):
        if cur.density_ab > prev.density_ab:
            failures.append(f"intersection density grows from n = {prev.n} to {cur.n}")
    detail = ", ".join(f"n={r.n}: {r.density_ab}" for r in rows)
    return _result("weak up-set construction", failures, detail)


def check_prime_weights(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    top = 5 if quick else 7
    for alpha, beta in (("1/2", "1/2"), ("1/3", "1/2"), ("2/3", "1/4")):
        for n in range(2, top + 1):
            family_a, family_b = families.thm2_pair(n, alpha, beta)
            (u, s), (v, t) = families.thm2_prime_weights(n, alpha, beta)
            if families.seq_dominating_prime(n, u, s) != family_a:
                failures.append(f"u-weights miss A at n = {n}, alpha = {alpha}")
            if families.seq_dominating_prime(n, v, t) != family_b:
                failures.append(f"v-weights miss B at n = {n}, beta = {beta}")
    return _result("prefix-weight description", failures, f"n <= {top}")


def check_strong_families(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    top = 4 if quick else 5
    for n in range(1, top + 1):
        labelled = families.structured_families(n)
        for label, family in labelled:
            if not orders.is_up_set(family, orders.STRONG):
                failures.append(f"{label} is not a strong up-set at n = {n}")
    for measure in (measures.uniform_measure(5), measures.mallows_measure(5, "1/2")):
        report = engine.scan_family_pairs(measure, families.structured_families(5))
        if report.min_slack < 0:
            failures.append(f"{' vs '.join(report.witness_labels)} anti-correlated")
    return _result("strong families", failures, f"n <= {top}, pairs at n = 5")


def check_chains(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    pairs = 20 if quick else 200
    for n in (4, 5, 6):
        for _ in range(pairs):
            fa = chains.random_left_compressed(n, rng, rng.random())
            fb = chains.random_left_compressed(n, rng, rng.random())
            ca, cb, cab = chains.c(fa), chains.c(fb), chains.c2(fa, fb)
            if cab * perms.FACTORIALS[n] < ca * cb:
                failures.append(f"chain counts anti-correlated at n = {n}")
            if ca != chains.chain_up_set(fa).size:
                failures.append(f"c(A) differs from |C(A)| at n = {n}")
    for _ in range(5 if quick else 50):
        fa = chains.random_left_compressed(5, rng, rng.random())
        fb = chains.random_left_compressed(5, rng, rng.random())
        if not chains.joint_tail_table(fa, fb).holds:
            failures.append("joint tail inequality fails at n = 5")
    return _result("chains", failures, f"{pairs} pairs at n = 4, 5, 6")


def check_sequence_inequality(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    for _ in range(1000 if quick else 10000):
        length = rng.randint(1, 5)
        t = [Fraction(rng.randint(0, 10), 10) for _ in range(length)]
        total = sum(t)
        if total > 1:
            t = [x / total for x in t]
        u = sorted(Fraction(rng.randint(0, 20), 4) for _ in range(length))
        v = sorted(Fraction(rng.randint(0, 20), 4) for _ in range(length))
        if not engine.check_sequence_inequality(t, u, v).holds:
            failures.append(f"fails at t={t}, u={u}, v={v}")
    return _result("sequence inequality", failures)


def check_sampler(quick: bool, rng: random.Random) -> CheckResult:
    failures = []
    draws = 20000 if quick else 100000
    measure = measures.uniform_measure(4)
    counts = [0] * 24
    for _ in range(draws):
        counts[perms.rank(measure.sample(rng))] += 1
    p = Fraction(1, 24)
    sigma = (draws * p * (1 - p)) ** 0.5
    if any(abs(c - draws * p) > 4 * sigma for c in counts):
        failures.append("uniform sampler frequencies off")
    mallows = measures.mallows_measure(4, "1/2")
    hist = [0] * 7
    for _ in range(draws):
        hist[perms.inversion_count(mallows.sample(rng))] += 1
    exact = [Fraction(0)] * 7
    for a, m in zip(perms.all_perms(4), mallows.masses()):
        exact[perms.inversion_count(a)] += m
    for k in range(7):
        sigma = (draws * exact[k] * (1 - exact[k])) ** 0.5
        if abs(hist[k] - draws * exact[k]) > 4 * sigma:
            failures.append(f"Mallows inversion histogram off at {k}")
    return _result("samplers", failures, f"{draws} draws")


SUITE: List[Callable[[bool, random.Random], CheckResult]] = [
    check_lehmer,
    check_rank,
    check_order_criteria,
    check_order_containments,
    check_slices,
    check_closure,
    check_uniform_correlation,
    check_ig_measures,
    check_grid_lattice,
    check_mallows,
    check_thm2,
    check_prime_weights,
    check_strong_families,
    check_chains,
    check_sequence_inequality,
    check_sampler,
]


class SelfCheck:
    def __init__(self, quick: bool = False, seed: int = DEFAULT_SEED):
        self.quick = quick
        self.seed = seed
        self.results: List[CheckResult] = []

    def run(self, progress: bool = False) -> List[CheckResult]:
        self.results = []
        for check in tqdm(SUITE, desc="selfcheck", disable=not progress):
            rng = random.Random(f"{self.seed}/{check.__name__}")
            self.results.append(check(self.quick, rng))
        return self.results

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __str__(self):
        body = [[r.name, "ok" if r.passed else "FAILED", r.detail] for r in self.results]
        return tabulate(body, ["check", "status", "detail"], tablefmt="psql")


def run_selfcheck(
    quick: bool = False, seed: int = DEFAULT_SEED, progress: bool = False
) -> SelfCheck:
    suite = SelfCheck(quick, seed)
    suite.run(progress)
    if not suite.passed:
        failed = ", ".join(r.name for r in suite.results if not r.passed)
        raise InvariantViolation(f"selfcheck failed: {failed}\n{suite}")
    return suite
