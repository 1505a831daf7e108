import math
import random

from collections import Counter
from fractions import Fraction

import pytest

import measures
from measures import (
    CoordinateDistribution,
    DenseMeasure,
    Potential,
    boltzmann_measure,
    check_lattice_condition,
    equally_spaced_measure,
    fixed_point_measure,
    ig_measure,
    mallows_measure,
    measure_from_json,
    measure_of_set,
    middle_gap_count,
    middle_gap_measure,
    random_ig_measure,
    uniform_measure,
)
from perms import FACTORIALS, all_codes, all_perms, inversion_count, rank
from permset import PermSet
from utils import InputError

from conftest import family


def test_coordinate_distribution_validation():
    assert CoordinateDistribution.uniform(3).probs == (Fraction(1, 3),) * 3
    assert CoordinateDistribution(2, ("1/4", "3/4")).probs == (Fraction(1, 4), Fraction(3, 4))
    with pytest.raises(InputError):
        CoordinateDistribution(2, ("1/2", "1/3"))
    with pytest.raises(InputError):
        CoordinateDistribution(2, (1,))
    with pytest.raises(InputError):
        CoordinateDistribution(2, ("3/2", "-1/2"))
    with pytest.raises(InputError):
        CoordinateDistribution.point(2, 3)
    assert not CoordinateDistribution(2, (0.5, 0.5)).exact


def test_uniform_measure():
    mu = uniform_measure(3)
    assert mu.is_uniform()
    assert all(m == Fraction(1, 6) for m in mu.masses())
    assert mu.density((2, 3, 1)) == Fraction(1, 6)
    assert measure_of_set(mu, family(3, "123", "132")) == Fraction(1, 3)
    assert mu.total() == 1


def test_point_mass_example():
    mu = ig_measure(
        [
            CoordinateDistribution.uniform(1),
            CoordinateDistribution.uniform(2),
            CoordinateDistribution.point(3, 3),
        ]
    )
    support = {a: mu.density(a) for a in all_perms(3) if mu.density(a)}
    assert support == {(1, 2, 3): Fraction(1, 2), (2, 1, 3): Fraction(1, 2)}


@pytest.mark.parametrize("n", range(1, 6))
def test_product_masses_are_in_rank_order(n, rng):
    mu = random_ig_measure(n, rng)
    masses = mu.masses()
    assert len(masses) == FACTORIALS[n]
    for a in all_perms(n):
        assert masses[rank(a)] == mu.density(a)
    assert sum(masses) == 1


def test_mallows_example():
    mu = mallows_measure(3, "1/2")
    assert mu.density((1, 2, 3)) == Fraction(8, 21)
    assert measure_of_set(mu, family(3, "123", "132", "312")) == Fraction(2, 3)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_mallows_is_geometric_in_inversions(n):
    q = Fraction(2, 3)
    mu = mallows_measure(n, q)
    identity = mu.density(tuple(range(1, n + 1)))
    for a in all_perms(n):
        assert mu.density(a) == identity * q ** inversion_count(a)


def test_mallows_parameter_checks(capsys):
    with pytest.raises(InputError):
        mallows_measure(3, 0)
    with pytest.raises(InputError):
        mallows_measure(3, "-1/2")
    mallows_measure(3, 2)
    assert "q = 2" in capsys.readouterr().err
    assert mallows_measure(4, 1).is_uniform()


def test_fixed_point_measure():
    assert fixed_point_measure(2, "1/2").masses() == [Fraction(4, 5), Fraction(1, 5)]
    assert fixed_point_measure(3, 1).is_uniform()


def test_equally_spaced_measure():
    assert equally_spaced_measure(4, 1).is_uniform()
    mu = equally_spaced_measure(3, "1/2")
    # |i - pos(a, i)| summed: 0 for the identity, 4 for the reversal
    assert mu.density((3, 2, 1)) == mu.density((1, 2, 3)) / 16


def test_middle_gap():
    assert middle_gap_count((3, 4, 1, 2)) == 2
    assert middle_gap_count((1, 3, 2, 4)) == 1
    mu = middle_gap_measure(4, "1/3")
    assert mu.density((3, 4, 1, 2)) == mu.density((1, 2, 3, 4)) / 9
    with pytest.raises(InputError):
        middle_gap_measure(5, "1/2")
    with pytest.raises(InputError):
        middle_gap_count((1, 2, 3))


def test_boltzmann_checks():
    with pytest.raises(InputError):
        boltzmann_measure([2, 1, 3], "abs", "1/2")
    with pytest.raises(InputError):
        boltzmann_measure([1, 2, 3], "abs", 0)
    with pytest.raises(InputError):
        boltzmann_measure([1, 2, 3], "cube", "1/2")
    with pytest.raises(InputError):
        boltzmann_measure([1, 2, 3], Potential("table", {"0": 0}), "1/2")
    mu = boltzmann_measure([1, 2, 3], "square", 0.5)
    assert not mu.exact
    assert math.isclose(mu.total(), 1)


def test_dense_measure_checks():
    with pytest.raises(InputError):
        DenseMeasure(2, [Fraction(1, 2)])
    with pytest.raises(InputError):
        DenseMeasure(2, [Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(InputError):
        DenseMeasure(2, [Fraction(3, 2), Fraction(-1, 2)])
    with pytest.raises(InputError):
        DenseMeasure.from_weights(2, [0, 0])
    mu = DenseMeasure.from_weights(2, [Fraction(1), Fraction(3)])
    assert mu.masses() == [Fraction(1, 4), Fraction(3, 4)]
    assert mu.to_float().masses() == [0.25, 0.75]
    with pytest.raises(InputError):
        mu.density((1, 2, 3))


def test_large_dense_measure_converts_to_float(monkeypatch):
    monkeypatch.setattr(measures, "DENSE_MAX_N", 2)
    with pytest.raises(InputError):
        DenseMeasure.from_weights(3, [Fraction(1)] * 6)
    mu = DenseMeasure.from_weights(3, [Fraction(k) for k in range(1, 7)], allow_large=True)
    floats = mu.to_float()
    assert not floats.exact
    assert floats.masses() == pytest.approx([k / 21 for k in range(1, 7)])


def test_measure_of_set_checks_n():
    with pytest.raises(InputError):
        measure_of_set(uniform_measure(3), PermSet.full(4))


def test_lattice_condition_for_product_measures(rng):
    for n in (2, 3, 4):
        mu = random_ig_measure(n, rng)
        assert check_lattice_condition(mu).symbolic
        report = check_lattice_condition(mu, exhaustive=True)
        assert report.holds
        assert report.worst_slack == report.best_slack == 0
        assert report.pairs == FACTORIALS[n] * (FACTORIALS[n] - 1) // 2


def test_lattice_condition_detects_violation():
    third = Fraction(1, 6)
    masses = [third, third, Fraction(1, 12), Fraction(1, 4), Fraction(1, 4), Fraction(1, 12)]
    report = check_lattice_condition(DenseMeasure(3, masses))
    assert not report.holds
    assert report.worst_slack < 0
    assert report.worst_pair is not None


def test_lattice_condition_for_supermodular_weights():
    weights = [Fraction(2 ** min(f[1], f[2])) for f in all_codes(4)]
    report = check_lattice_condition(DenseMeasure.from_weights(4, weights))
    assert report.holds
    assert report.best_slack > 0


def test_lattice_condition_size_cap():
    with pytest.raises(InputError):
        check_lattice_condition(uniform_measure(8), exhaustive=True)


@pytest.mark.parametrize(
    "make", [lambda: mallows_measure(3, "1/2"), lambda: fixed_point_measure(3, "1/4")]
)
def test_sampler_frequencies(make):
    mu = make()
    draws = 4000
    rng = random.Random(99)
    counts = Counter(mu.sample(rng) for _ in range(draws))
    for a in all_perms(3):
        p = float(mu.density(a))
        sigma = math.sqrt(draws * p * (1 - p))
        assert abs(counts[a] - draws * p) <= 4 * sigma + 1


def test_measure_from_json():
    assert measure_from_json({"measure": "uniform"}, 3).is_uniform()
    mu = measure_from_json({"measure": "mallows", "q": "1/2"}, 3)
    assert mu.density((1, 2, 3)) == Fraction(8, 21)
    ig = measure_from_json({"measure": "ig", "dists": [[1], ["1/2", "1/2"]]}, 2)
    assert ig.is_uniform()
    bz = measure_from_json(
        {"measure": "boltzmann", "x": [0, 0, 1], "V": "left_indicator", "q": "1/2"}, 3
    )
    assert bz.exact
    assert measure_from_json({"measure": "middle_gap", "q": "1/2"}, 4).n == 4
    bad_specs = (
        {},
        {"measure": "zipf"},
        {"measure": "ig", "dists": [[1]]},
        {"measure": "boltzmann", "x": [1]},
    )
    for bad in bad_specs:
        with pytest.raises(InputError):
            measure_from_json(bad, 2)
