import csv
import io
import random

from fractions import Fraction

import pytest

from hypothesis import given
from hypothesis import strategies as st

import engine
from engine import (
    CorrelationReport,
    Exhaustive,
    MassIndex,
    RandomPairs,
    Thm2Row,
    check_sequence_inequality,
    compare_golden,
    correlate,
    monte_carlo_correlate,
    open_question_experiment,
    scan_family_pairs,
    scan_up_set_pairs,
    search_sequence_counterexample,
    t_up_set_experiment,
    thm2_oracle_row,
    thm2_sweep,
    wilson_interval,
    write_csv,
    write_golden,
)
from families import u_ij
from measures import (
    DenseMeasure,
    check_lattice_condition,
    mallows_measure,
    random_ig_measure,
    uniform_measure,
)
from orders import GRID, STRONG, WEAK, enumerate_up_sets, random_up_set, t_order
from perms import all_codes
from permset import PermSet
from utils import InputError, InvariantViolation


def test_correlate_examples():
    mu = uniform_measure(3)
    positive = correlate(mu, u_ij(3, 1, 2), u_ij(3, 1, 3), "U12", "U13")
    assert positive.p_ab == Fraction(1, 3)
    assert positive.slack == Fraction(1, 12)
    assert positive.ratio == Fraction(4, 3)
    negative = correlate(mu, u_ij(3, 1, 2), u_ij(3, 2, 3))
    assert negative.slack == Fraction(-1, 12)
    data = positive.to_json()
    assert data["p_ab"] == "1/3"
    assert data["slack"] == "1/12"
    assert data["exact"] is True
    assert "U12 vs U13" in str(positive)


def test_correlate_checks():
    with pytest.raises(InputError):
        correlate(uniform_measure(3), PermSet.full(3), PermSet.full(4))
    empty = correlate(uniform_measure(3), PermSet.empty(3), PermSet.full(3))
    assert empty.ratio is None
    assert empty.to_json()["ratio_defined"] is False
    half = Fraction(1, 2)
    with pytest.raises(InvariantViolation):
        CorrelationReport(n=3, p_ab=Fraction(2, 3), p_a=half, p_b=half)
    with pytest.raises(InvariantViolation):
        CorrelationReport(n=3, p_ab=Fraction(0), p_a=Fraction(3, 4), p_b=Fraction(3, 4))


def test_float_measures_are_flagged():
    report = correlate(mallows_measure(3, "1/2").to_float(), u_ij(3, 1, 2), u_ij(3, 1, 3))
    assert not report.exact
    assert report.to_json()["exact"] is False


def test_mass_index():
    mu = mallows_measure(3, "1/2")
    index = MassIndex(mu)
    assert index(u_ij(3, 1, 2).mask) == Fraction(2, 3)
    assert index(PermSet.full(3).mask) == 1
    a, b = u_ij(3, 1, 2), u_ij(3, 2, 3)
    raw = index.raw_slack(a.mask, b.mask)
    assert index.slack_value(raw) == correlate(mu, a, b).slack


def test_product_measures_correlate_strong_up_sets(rng):
    for _ in range(30):
        n = rng.randint(2, 5)
        mu = random_ig_measure(n, rng)
        a = random_up_set(n, STRONG, rng.random() / 2, rng)
        b = random_up_set(n, STRONG, rng.random() / 2, rng)
        assert correlate(mu, a, b).slack >= 0


def test_complements_share_the_slack(rng):
    for _ in range(20):
        n = rng.randint(2, 5)
        mu = random_ig_measure(n, rng)
        a = random_up_set(n, STRONG, rng.random(), rng)
        b = random_up_set(n, STRONG, rng.random(), rng)
        down = correlate(mu, a.complement(), b.complement())
        assert down.slack == correlate(mu, a, b).slack


def test_exhaustive_strong_scan():
    count = len(list(enumerate_up_sets(3, STRONG)))
    report = scan_up_set_pairs(3, STRONG, uniform_measure(3), Exhaustive())
    assert report.pairs_tested == count * (count + 1) // 2
    assert report.nonnegative
    assert report.min_slack == 0
    assert not report.truncated
    report.recheck(uniform_measure(3))


def test_exhaustive_weak_scan_finds_anti_correlation():
    mu = uniform_measure(3)
    report = scan_up_set_pairs(3, WEAK, mu, Exhaustive())
    assert report.min_slack <= Fraction(-1, 12)
    assert report.nonnegative is False
    assert report.recheck(mu).slack == report.min_slack
    data = report.to_json()
    assert data["witness"]["a"]["n"] == 3


def test_grid_scan_under_lattice_measure():
    weights = [Fraction(2 ** min(f[1], f[2])) for f in all_codes(3)]
    mu = DenseMeasure.from_weights(3, weights)
    assert check_lattice_condition(mu).holds
    report = scan_up_set_pairs(3, GRID, mu, Exhaustive())
    assert report.nonnegative


def test_exhaustive_scan_beyond_four_needs_a_limit():
    report = scan_up_set_pairs(5, STRONG, uniform_measure(5), Exhaustive(limit=5))
    assert report.truncated
    assert report.pairs_tested == 15
    assert report.nonnegative


@pytest.mark.parametrize("n", [4, 5])
def test_grid_scan_under_random_ig_measures(n, rng):
    for _ in range(3):
        mu = random_ig_measure(n, rng)
        assert check_lattice_condition(mu, exhaustive=True).holds
        report = scan_up_set_pairs(n, GRID, mu, RandomPairs(500, rng.randrange(10**6)))
        assert report.pairs_tested == 500
        assert report.nonnegative
        assert report.min_slack >= 0


def test_scan_truncation(capsys):
    report = scan_up_set_pairs(3, WEAK, uniform_measure(3), Exhaustive(limit=3))
    assert report.truncated
    assert report.pairs_tested == 6
    assert "stopped after 3" in capsys.readouterr().err


def test_scan_checks():
    with pytest.raises(InputError):
        scan_up_set_pairs(4, STRONG, uniform_measure(3), Exhaustive())
    with pytest.raises(InputError, match="exhaustive scans need n <= 4"):
        scan_up_set_pairs(5, STRONG, uniform_measure(5), Exhaustive())
    with pytest.raises(InputError, match="cover tables"):
        scan_up_set_pairs(9, STRONG, uniform_measure(9), RandomPairs(10, 1))
    with pytest.raises(InputError):
        scan_up_set_pairs(3, STRONG, uniform_measure(3), RandomPairs(10, 1, density=2.0))


def test_random_scan_is_reproducible():
    mu = mallows_measure(4, "1/2")
    first = scan_up_set_pairs(4, WEAK, mu, RandomPairs(300, 11))
    second = scan_up_set_pairs(4, WEAK, mu, RandomPairs(300, 11))
    assert first.to_json() == second.to_json()
    assert first.pairs_tested == 300
    assert first.seed == "11"
    first.recheck(mu)


@pytest.mark.slow
def test_random_scan_ignores_worker_count():
    mu = uniform_measure(4)
    mode = RandomPairs(2 * engine.CHUNK + 17, 5)
    serial = scan_up_set_pairs(4, STRONG, mu, mode)
    pooled = scan_up_set_pairs(4, STRONG, mu, mode, workers=2)
    assert serial.to_json() == pooled.to_json()
    assert serial.nonnegative


def test_recheck_catches_a_wrong_minimum():
    mu = uniform_measure(3)
    report = scan_up_set_pairs(3, WEAK, mu, Exhaustive())
    report.min_slack -= 1
    with pytest.raises(InvariantViolation):
        report.recheck(mu)


def test_scan_family_pairs():
    labelled = [("U12", u_ij(3, 1, 2)), ("U23", u_ij(3, 2, 3))]
    report = scan_family_pairs(uniform_measure(3), labelled)
    assert report.pairs_tested == 3
    assert report.min_slack == Fraction(-1, 12)
    assert report.mean_slack == Fraction(5, 36)
    assert report.witness_labels == ("U12", "U23")
    assert "U12 vs U23" in str(report)


def test_wilson_interval():
    low, high = wilson_interval(0, 10)
    assert low == pytest.approx(0, abs=1e-12)
    assert 0 < high < 1
    low, high = wilson_interval(10, 10)
    assert high == pytest.approx(1)
    assert 0 < low < 1
    low, high = wilson_interval(30, 100)
    assert low < 0.3 < high
    with pytest.raises(InputError):
        wilson_interval(0, 0)


def test_monte_carlo_correlate():
    mu = uniform_measure(4)
    report = monte_carlo_correlate(
        mu, u_ij(4, 1, 2), lambda a: a.index(1) < a.index(3), 4000, random.Random(3)
    )
    assert report.mode == "monte_carlo"
    # true values 1/2, 1/2 and 1/3
    assert abs(report.p_a - Fraction(1, 2)) < Fraction(1, 25)
    assert abs(report.p_ab - Fraction(1, 3)) < Fraction(1, 25)
    data = report.to_json()
    assert data["samples"] == 4000
    assert set(data["intervals"]) == {"p_a", "p_b", "p_ab"}
    with pytest.raises(InputError):
        monte_carlo_correlate(mu, u_ij(4, 1, 2), u_ij(4, 1, 3), 0, random.Random(3))


def test_thm2_sweep_constants():
    six, eight = thm2_sweep("1/2", "1/2", [6, 8])
    assert (six.m, six.count_a, six.count_b, six.count_ab) == (3, 480, 540, 312)
    assert (six.density_a, six.density_b, six.density_ab) == (
        Fraction(2, 3),
        Fraction(3, 4),
        Fraction(13, 30),
    )
    assert six.csv_row() == ["6", "2/3", "3/4", "13/30", "5/12"]
    assert (eight.m, eight.density_a, eight.density_b, eight.density_ab) == (
        4,
        Fraction(3, 4),
        Fraction(3, 5),
        Fraction(103, 280),
    )
    for row in (six, eight):
        assert row.lower_bound <= row.density_ab < row.density_a * row.density_b
        assert row == thm2_oracle_row(row.n, "1/2", "1/2")


@pytest.mark.slow
def test_thm2_sweep_at_ten():
    (ten,) = thm2_sweep("1/2", "1/2", [10])
    assert (ten.m, ten.density_a, ten.density_b, ten.density_ab) == (
        5,
        Fraction(3, 5),
        Fraction(2, 3),
        Fraction(92, 315),
    )


def test_thm2_lower_bound_vanishes_for_small_alpha():
    for row in thm2_sweep("1/4", "1/4", [4, 6, 8]):
        assert row.lower_bound == 0


def test_thm2_sweep_sampling():
    with pytest.raises(InputError):
        thm2_sweep("1/2", "1/2", [11])
    (row,) = thm2_sweep("1/2", "1/2", [12], samples=200, rng=random.Random(4))
    assert not row.exact
    assert row.total == 200
    assert row.count_ab <= min(row.count_a, row.count_b)
    with pytest.raises(InputError):
        thm2_sweep("1/2", "1", [6])


def test_golden_file(tmp_path):
    path = str(tmp_path / "thm2.csv")
    rows = thm2_sweep("1/2", "1/2", [4, 6])
    assert compare_golden(rows, path, "1/2", "1/2") == [4, 6]
    assert compare_golden(rows, path, "1/2", "1/2") == []
    with open(path, newline="") as f:
        records = list(csv.DictReader(f))
    assert [r["n"] for r in records] == ["4", "6"]
    assert records[1]["count_ab"] == "312"
    half = Fraction(1, 2)
    write_golden(path, half, half, [Thm2Row(6, 3, 480, 540, 311, 720)])
    with pytest.raises(InvariantViolation):
        compare_golden(rows, path, "1/2", "1/2")


def test_malformed_golden_file(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("alpha,beta,n\n1/2,1/2,x\n")
    with pytest.raises(InputError):
        compare_golden(thm2_sweep("1/2", "1/2", [4]), str(path), "1/2", "1/2")


def test_sequence_inequality_examples():
    half = Fraction(1, 2)
    report = check_sequence_inequality([half, half], [0, 1], [0, 1])
    assert (report.lhs, report.rhs) == (half, Fraction(1, 4))
    assert report.holds
    assert report.to_json() == {"lhs": "1/2", "rhs": "1/4", "holds": True}
    for t, u, v in (
        ([], [], []),
        ([1], [1, 2], [1, 2]),
        (["-1/2"], [1], [1]),
        (["3/4", "1/2"], [0, 1], [0, 1]),
        ([half, half], [1, 0], [0, 1]),
        ([half, half], [0, 1], [1, 0]),
    ):
        with pytest.raises(InputError):
            check_sequence_inequality(t, u, v)


rationals = st.fractions(min_value=0, max_value=4, max_denominator=12)


@st.composite
def sequence_triples(draw):
    k = draw(st.integers(1, 6))
    vector = st.lists(rationals, min_size=k, max_size=k)
    return draw(vector), draw(vector), draw(vector)


@given(sequence_triples())
def test_sequence_inequality_holds(vectors):
    t, u, v = vectors
    total = sum(t)
    if total > 1:
        t = [x / total for x in t]
    assert check_sequence_inequality(t, sorted(u), sorted(v)).holds


@pytest.mark.parametrize("drop", ["sum", "monotone", "sign"])
def test_each_hypothesis_is_needed(drop):
    found = search_sequence_counterexample(random.Random(8), drop)
    assert found is not None
    t, u, v, report = found
    assert not report.holds
    with pytest.raises(InputError):
        search_sequence_counterexample(random.Random(8), "size")


def test_open_question_experiment():
    report = open_question_experiment(3, 4, "1/2")
    assert report.mode == "families"
    assert report.pairs_tested > 0
    assert report.witness_labels is not None
    random_report = open_question_experiment(1, 4, "1/2", source="random", pairs=50, seed=2)
    assert random_report.pairs_tested == 50
    with pytest.raises(InputError):
        open_question_experiment(2, 5, "1/2")
    with pytest.raises(InputError):
        open_question_experiment(4, 4, "1/2")
    with pytest.raises(InputError):
        open_question_experiment(1, 8, "1/2")
    with pytest.raises(InputError):
        open_question_experiment(1, 4, "1/2", source="random")
    with pytest.raises(InputError):
        open_question_experiment(1, 4, "1/2", source="everything")


def test_t_up_set_experiment():
    rows = t_up_set_experiment(4, [1, 4], 60, seed=3)
    assert [r.t for r in rows] == [1, 4]
    assert all(r.trials == 60 for r in rows)
    # t = n is the strong order
    assert rows[1].min_slack >= 0
    assert t_up_set_experiment(4, [2], 0, seed=3)[0].csv_row() == [2, 0, None, None]
    with pytest.raises(InputError):
        t_up_set_experiment(4, [5], 10, seed=3)
    with pytest.raises(InputError):
        t_up_set_experiment(9, [1], 10, seed=3)


def test_t_order_scan_matches_strong_at_n():
    mu = uniform_measure(3)
    a = scan_up_set_pairs(3, t_order(3), mu, Exhaustive())
    b = scan_up_set_pairs(3, STRONG, mu, Exhaustive())
    assert (a.pairs_tested, a.min_slack) == (b.pairs_tested, b.min_slack)


def test_write_csv():
    stream = io.StringIO()
    write_csv(engine.TSCAN_COLUMNS, [[1, 10, "0", "1/4"]], stream)
    assert stream.getvalue().splitlines() == ["t,trials,min_slack,mean_slack", "1,10,0,1/4"]
