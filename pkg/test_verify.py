"""
Tests for the verification layer: lemma checks, proposition ratios and the
sweep harness.
"""

import math
from itertools import permutations

import pytest
from pydantic import ValidationError

from bessel import bessel_j, besselB_scaled_diff
from errors import DomainError
from models import PROPOSITION12_K2, EvalPoint, MultiplicityB, SeriesPolicy, SweepConfig, to_json
from partitions import Partition
from verify import (
    evaluate_prop12,
    fit_convergence_order,
    generate_points,
    lemma31_check,
    lemma31_sweep,
    lemma32_check,
    lemma32_sweep,
    naive_difference,
    onedim_check,
    onedim_error,
    onedim_sweep,
    prop11_ratio,
    prop12_ratio,
    conjecture_ratio,
    default_onedim_grid,
    run_sweep,
    series_regime,
)


def _point(x, y):
    return EvalPoint(x=tuple(x), y=tuple(y))


def test_lemma31_at_ones():
    check = lemma31_check(1.0, [1.0, 1.0], [1.0, 1.0], 5)
    assert check.lhs == pytest.approx(2.0 ** 5, rel=1e-13)
    assert check.rhs == pytest.approx(4.0 ** 5, rel=1e-13)
    assert check.passed


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_lemma31_random_points(alpha):
    report = lemma31_sweep(N=3, alpha=alpha, max_weight=6, points=10, seed=7)
    assert report.passed
    assert len(report.records) == 7
    assert 0.0 < report.summary["max_lhs_over_rhs"] <= 1.0 + 1e-10


@pytest.mark.slow
@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_lemma31_full_grid(N, alpha):
    report = lemma31_sweep(N=N, alpha=alpha, max_weight=8, points=100, seed=31)
    assert report.passed
    assert [r["m"] for r in report.records] == list(range(9))


def test_lemma31_arguments():
    with pytest.raises(DomainError):
        lemma31_check(1.0, [1.0, 2.0], [1.0], 2)
    with pytest.raises(DomainError):
        lemma31_check(1.0, [1.0], [1.0], -1)


def test_lemma32_example():
    check = lemma32_check(N=2, k1=4.0, k2=1.0, lam=Partition((2,)))
    assert check.lhs == pytest.approx(1 / 6.5, rel=1e-13)
    assert check.rhs == pytest.approx(4.0 * 2 * 4 / 12, rel=1e-13)
    assert check.ratio == pytest.approx(5.5 / 6.5, rel=1e-13)
    assert check.ratio_bound == 4.0
    assert check.passed and check.ratio_passed


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("k2", [0.5, 1.0, 2.0])
def test_lemma32_sweep_passes(N, k2):
    report = lemma32_sweep(N=N, k2=k2, max_weight=8)
    assert report.passed
    k1_values = {r["k1"] for r in report.records}
    assert k2 * (N - 1) in k1_values
    assert all(r["max_ratio"] <= r["ratio_bound"] for r in report.records)


def test_lemma32_arguments():
    with pytest.raises(DomainError):
        lemma32_check(2, 1.0, 0.0, Partition((1,)))
    with pytest.raises(DomainError):
        lemma32_check(2, 0.5, 1.0, Partition((1,)))
    with pytest.raises(DomainError):
        lemma32_check(2, 4.0, 1.0, Partition((1, 1, 1)))


def test_ratios_vanish_at_zero_argument():
    mult = MultiplicityB.from_mu(50.0, 1.0, 2)
    pt = _point([0.0, 0.0], [0.5, 0.7])
    assert prop11_ratio(mult, pt) == 0.0
    assert prop12_ratio(mult, pt) == 0.0
    assert conjecture_ratio(MultiplicityB.from_mu(50.0, 0.7, 2), pt) == 0.0


@pytest.mark.parametrize("mu", [5.0, 50.0, 500.0])
def test_prop11_in_one_variable(mu):
    x, y = 0.6, 0.8
    mult = MultiplicityB.from_mu(mu, 1.0, 1)
    t = x * y
    error = abs(bessel_j(mu - 1, 2 * math.sqrt(mu) * t) - math.exp(-t * t))
    expected = mu * error / (t ** 4 * math.exp(t * t))
    assert prop11_ratio(mult, _point([x], [y])) == pytest.approx(expected, rel=1e-8)


def test_prop12_k2_zero_obeys_telescoping_bound():
    pts = generate_points(2, 20, seed=3)
    for mu in (3.0, 30.0, 300.0):
        mult = MultiplicityB.from_mu(mu, 0.0, 2)
        for pt in pts:
            ev = evaluate_prop12(mult, pt, SeriesPolicy())
            telescoped = sum(
                sum(onedim_error(mu, 2 * wx[l] * pt.y[l]) for l in range(2))
                for wx in permutations(pt.x)
            ) / 2
            assert ev.error <= telescoped * (1 + 1e-10) + 1e-15


def test_prop12_rejects_unsupported_k2():
    pt = _point([0.1, 0.2], [0.3, 0.4])
    with pytest.raises(DomainError):
        prop12_ratio(MultiplicityB.from_mu(20.0, 0.7, 2), pt)
    assert conjecture_ratio(MultiplicityB.from_mu(20.0, 0.7, 2), pt) > 0.0


def test_propositions_need_the_hypothesis():
    pt = _point([0.1, 0.2], [0.3, 0.4])
    below = MultiplicityB(k1=0.5, k2=1.0, N=2)
    with pytest.raises(DomainError):
        prop11_ratio(below, pt)
    with pytest.raises(DomainError):
        prop11_ratio(MultiplicityB(k1=2.0, k2=0.0, N=2), pt)


@pytest.mark.slow
@pytest.mark.parametrize("mu", [3.0, 10.0, 100.0])
def test_single_series_matches_naive_difference(mu):
    for k2 in (0.5, 1.0):
        mult = MultiplicityB.from_mu(mu + k2, k2, 2)
        for pt in generate_points(2, 50, seed=11, max_norm_product=1.0):
            single = besselB_scaled_diff(mult, pt.vx, pt.vy).value
            naive = naive_difference(mult, pt).value
            assert abs(single - naive) <= 1e-9 * (1.0 + abs(naive))


def test_generate_points():
    pts = generate_points(3, 50, seed=9)
    assert len(pts) == 50
    assert all(pt.N == 3 for pt in pts)
    assert all(pt.norm_product <= 3.0 * (1 + 1e-12) for pt in pts)
    assert sum(1 for pt in pts if pt.norm_product <= 0.1 * (1 + 1e-12)) >= 10
    assert generate_points(3, 50, seed=9) == pts
    assert generate_points(3, 50, seed=10) != pts
    with pytest.raises(DomainError):
        generate_points(3, 0, seed=1)


def test_sweep_config_validation():
    pts = generate_points(2, 3, seed=1)
    SweepConfig(subject="prop12", N=2, k2=0.5, mu_grid=[10.0, 100.0], point_grid=pts)
    with pytest.raises(ValidationError):
        SweepConfig(subject="prop12", N=2, k2=0.7, mu_grid=[10.0], point_grid=pts)
    with pytest.raises(ValidationError):
        SweepConfig(subject="prop11", N=2, k2=0.0, mu_grid=[10.0], point_grid=pts)
    with pytest.raises(ValidationError):
        SweepConfig(subject="prop11", N=2, k2=1.0, mu_grid=[100.0, 10.0], point_grid=pts)
    with pytest.raises(ValidationError):
        SweepConfig(subject="prop11", N=2, k2=1.0, mu_grid=[2.0], point_grid=pts)
    with pytest.raises(ValidationError):
        SweepConfig(subject="prop11", N=3, k2=1.0, mu_grid=[10.0], point_grid=pts)
    boundary = SweepConfig(subject="prop11", N=2, k2=1.0, mu_grid=[2.5], point_grid=pts)
    assert boundary.multiplicity(2.5).on_boundary


def test_fit_convergence_order():
    mus = [10.0, 100.0, 1000.0]
    assert fit_convergence_order(mus, [3.0 / m for m in mus]) == pytest.approx(1.0, rel=1e-12)
    assert fit_convergence_order(mus, [1.0 / m ** 2 for m in mus]) == pytest.approx(2.0, rel=1e-12)
    assert fit_convergence_order([10.0], [0.1]) is None
    assert fit_convergence_order(mus, [0.0, 0.0, 0.5]) is None


def test_onedim_check():
    xs = [0.1 * i for i in range(1, 101)]
    check = onedim_check(1000.0, xs)
    assert check.passed
    assert 0.1 < check.sup_ratio < 1.0
    assert not onedim_check(1000.0, xs, ceiling=check.sup_ratio / 2).passed
    with pytest.raises(DomainError):
        onedim_check(2.0, xs)


def test_onedim_sweep():
    xs = [0.2 * i for i in range(1, 51)]
    report = onedim_sweep([100.0, 1000.0, 10000.0], xs)
    assert report.passed
    assert 0.9 <= report.summary["order_at_x"] <= 1.1
    assert report.summary["sup_ratio_spread"] < 0.5


@pytest.mark.slow
def test_onedim_rate_on_the_reference_grid():
    report = onedim_sweep([4.0, 16.0, 64.0, 256.0], default_onedim_grid())
    assert report.inputs["points"] == 200
    assert report.passed
    assert all(math.isfinite(r["sup_ratio"]) for r in report.records)
    assert report.summary["sup_ratio_spread"] <= 0.25
    assert 0.8 <= report.summary["order_at_x"] <= 1.2


def test_series_regime():
    assert series_regime(MultiplicityB(k1=1.0, k2=0.0, N=3))
    assert series_regime(MultiplicityB.from_mu(10.0, 1.0, 3))
    assert not series_regime(MultiplicityB(k1=0.0, k2=2.0, N=4))


def _small_config(**overrides):
    settings = dict(
        subject="prop11",
        N=2,
        k2=1.0,
        mu_grid=[10.0, 100.0],
        point_grid=generate_points(2, 4, seed=5),
        seed=5,
    )
    settings.update(overrides)
    return SweepConfig(**settings)


def test_sweep_report_shape():
    config = _small_config()
    report = run_sweep(config)
    assert report.passed
    assert report.command == "verify prop11"
    assert [r.mu for r in report.records] == [10.0] * 4 + [100.0] * 4
    assert report.empirical_constant == max(r.ratio for r in report.records)
    assert report.convergence_order is not None
    assert len(report.convergence_order.per_point) == 4
    assert report.inputs["policy_id"] == config.policy.policy_id
    assert '"pass":true' in to_json(report)


def test_sweep_single_mu_has_no_order():
    report = run_sweep(_small_config(mu_grid=[50.0]))
    assert report.convergence_order is None


def test_sweep_ceiling():
    report = run_sweep(_small_config())
    failing = run_sweep(_small_config(ceiling=report.empirical_constant / 2))
    assert not failing.passed
    assert failing.failures[-1]["reason"] == "empirical constant above ceiling"
    assert run_sweep(_small_config(ceiling=report.empirical_constant * 1.5)).passed


def test_conjecture_is_informational():
    report = run_sweep(_small_config(subject="conjecture", k2=0.7, ceiling=0.0))
    assert report.informational
    assert report.passed
    assert report.failures == []


def test_sweep_is_deterministic():
    first = to_json(run_sweep(_small_config()))
    second = to_json(run_sweep(_small_config()))
    assert first == second


def test_worker_count_does_not_change_output():
    config = _small_config(subject="prop12", k2=0.5)
    assert to_json(run_sweep(config, workers=2)) == to_json(run_sweep(config, workers=1))


@pytest.mark.slow
def test_convergence_order_is_one():
    config = SweepConfig(
        subject="prop11",
        N=2,
        k2=1.0,
        mu_grid=[10.0, 100.0, 1000.0, 10000.0],
        point_grid=generate_points(2, 10, seed=21),
        seed=21,
    )
    report = run_sweep(config)
    assert report.passed
    assert 0.8 <= report.convergence_order.median <= 1.2


@pytest.mark.slow
def test_prop12_constant_is_stable_across_mu():
    pts = generate_points(2, 10, seed=4)
    for k2 in (0.0, 0.5, 1.0, 2.0):
        ratios = []
        for mu in (100.0, 10000.0):
            mult = MultiplicityB.from_mu(mu + 2 * k2, k2, 2)
            ratios.append(max(prop12_ratio(mult, pt) for pt in pts))
        assert ratios[1] <= 2 * ratios[0]


@pytest.mark.slow
@pytest.mark.parametrize("k2", [0.7, 1.0, 1.5])
def test_locally_uniform_rate(k2):
    mus = [10.0, 100.0, 1000.0, 10000.0]
    config = SweepConfig(
        subject="prop11",
        N=2,
        k2=k2,
        mu_grid=mus,
        point_grid=generate_points(2, 25, seed=7, max_norm_product=1.0),
        seed=7,
    )
    report = run_sweep(config)
    assert report.passed
    assert all(math.isfinite(r.ratio) for r in report.records)
    per_mu = [max(r.ratio for r in report.records if r.mu == mu) for mu in mus]
    assert max(per_mu) <= 3.0 * min(per_mu)
    assert 0.8 <= report.convergence_order.median <= 1.2


@pytest.mark.slow
@pytest.mark.parametrize("k2", PROPOSITION12_K2)
def test_uniform_bound_rate_and_ceiling(k2):
    points = generate_points(2, 25, seed=0)
    assert any(2.0 <= pt.norm_product <= 3.0 for pt in points)
    config = SweepConfig(
        subject="prop12",
        N=2,
        k2=k2,
        mu_grid=[10.0, 100.0, 1000.0, 10000.0],
        point_grid=points,
        seed=0,
    )
    report = run_sweep(config)
    assert report.passed
    assert all(math.isfinite(r.ratio) for r in report.records)
    assert 0.8 <= report.convergence_order.median <= 1.2
    minted = 1.5 * report.empirical_constant
    assert run_sweep(config.model_copy(update={"ceiling": minted})).passed
