import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crsense.hypothesis import (
    UNIT,
    OffsetDistribution,
    arrival_offset_dist,
    busy_tx_offset_dist,
    combinatorial_factor,
    convolve,
    departure_offset_dist,
    hypothesis_prob_aggregate,
    hypothesis_weights,
    hypothesis_weights_case1,
    hypothesis_weights_case2,
    idle_tx_offset_dist,
    k_range,
)
from crsense.traffic import FrameGeometry, TrafficParams, cdf_busy, cdf_idle

from oracles import enumerate_joint, nested_sum_case1

T_S = 1e-4


def by_hyp(weights):
    return {tuple(w.hyp): w for w in weights}


def test_k_range_worked_example():
    # ten PUs, eight busy at the start, three at the end of sensing
    assert k_range(10, 8, 3) == (1, 3)


@pytest.mark.parametrize("n,m,i,expected", [(5, 0, 0, (0, 0)), (4, 4, 4, (4, 4)), (3, 3, 0, (0, 0)), (3, 0, 3, (0, 0))])
def test_k_range_edges(n, m, i, expected):
    assert k_range(n, m, i) == expected


def test_k_range_domain():
    with pytest.raises(ValueError):
        k_range(3, 4, 0)
    with pytest.raises(ValueError):
        k_range(3, 0, -1)


@pytest.mark.parametrize("rule", ["exact", "simplified"])
@pytest.mark.parametrize("args,expected", [((3, 3, 1, 1), 3), ((3, 0, 2, 0), 3), ((3, 1, 1, 1), 1)])
def test_combinatorial_factor_examples(rule, args, expected):
    assert combinatorial_factor(*args, rule=rule) == expected


def test_combinatorial_factor_rules_differ_inside():
    # one of three PUs busy, it leaves, one of the two idle ones arrives
    assert combinatorial_factor(3, 1, 1, 0, rule="exact") == 2
    assert combinatorial_factor(3, 1, 1, 0, rule="simplified") == 1


def test_combinatorial_factor_rejects_bad_k():
    with pytest.raises(ValueError):
        combinatorial_factor(3, 2, 2, 0)
    with pytest.raises(ValueError):
        combinatorial_factor(3, 2, 2, 2, rule="bogus")


@pytest.mark.parametrize("horizon", [1, 3, 40])
def test_arrival_and_departure_totals(horizon):
    p = TrafficParams(0.02, 0.035, 1, 0.3)
    g = FrameGeometry(T_S, horizon, horizon)
    arr = arrival_offset_dist(p, g, horizon)
    dep = departure_offset_dist(p, g, horizon)
    assert arr.total == pytest.approx(cdf_idle(p, horizon * T_S), rel=1e-12)
    assert dep.total == pytest.approx(cdf_busy(p, horizon * T_S), rel=1e-12)
    assert (arr.lo, arr.hi) == (1, horizon)
    assert (dep.lo, dep.hi) == (0, horizon - 1)


def test_single_sample_window():
    p = TrafficParams(0.02, 0.02, 1, 0.3)
    g = FrameGeometry(T_S, 1, 1)
    arr = arrival_offset_dist(p, g, 1)
    assert arr.lo == 1 and arr.mass.size == 1
    assert arr[1] == pytest.approx(cdf_idle(p, T_S), rel=1e-14)


def test_three_sample_window_term_by_term():
    p = TrafficParams(0.02, 0.02, 1, 0.3)
    g = FrameGeometry(T_S, 3, 3)
    arr = arrival_offset_dist(p, g, 3)
    dep = departure_offset_dist(p, g, 3)
    for a in range(3):
        direct = math.exp(-a * T_S / 0.02) - math.exp(-(a + 1) * T_S / 0.02)
        assert arr[3 - a] == pytest.approx(direct, rel=1e-12)
        assert dep[a] == pytest.approx(direct, rel=1e-12)


def test_convolve_identity_and_totals():
    x = OffsetDistribution(2, np.array([0.1, 0.3, 0.05]))
    y = OffsetDistribution(0, np.array([0.2, 0.7]))
    ident = convolve(x, UNIT)
    assert ident.lo == x.lo
    np.testing.assert_array_equal(ident.mass, x.mass)
    assert convolve(x, y).total == pytest.approx(x.total * y.total, abs=1e-12)


def test_self_convolution_matches_enumeration():
    x = OffsetDistribution(1, np.array([0.5, 0.3, 0.2]))
    sq = convolve(x, x)
    expected = {}
    for a, b in itertools.product(range(1, 4), repeat=2):
        expected[a + b] = expected.get(a + b, 0.0) + x[a] * x[b]
    assert (sq.lo, sq.hi) == (2, 6)
    for s, v in expected.items():
        assert sq[s] == pytest.approx(v, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0, 1), min_size=1, max_size=6),
    st.integers(0, 5),
    st.integers(0, 4),
)
def test_convolution_power_support(mass, lo, r):
    d = OffsetDistribution(lo, np.array(mass))
    acc = UNIT
    for _ in range(r):
        acc = convolve(acc, d)
    assert (acc.lo, acc.hi) == (r * d.lo, r * d.hi)
    assert acc.total == pytest.approx(d.total**r, rel=1e-9, abs=1e-15)


def test_single_pu_stays_busy():
    p = TrafficParams(0.02, 0.02, 1, 0.3)
    g = FrameGeometry(T_S, 40, 300)
    w = by_hyp(hypothesis_weights_case1(p, g))
    assert w[(1, 1, 1)].prob == pytest.approx(p.p_busy * (1 - cdf_busy(p, g.sensing_time)), rel=1e-14)


@pytest.mark.parametrize("n_pu", range(1, 9))
@pytest.mark.parametrize("n_sense", [1, 30, 150, 290])
def test_normalization_both_cases(n_pu, n_sense, ref_params):
    p = ref_params(n_pu)
    g = FrameGeometry(T_S, n_sense, 300)
    for case in (1, 2):
        assert sum(w.prob for w in hypothesis_weights(p, g, case)) == pytest.approx(1, abs=1e-9)


def test_simplified_multiplicity_does_not_normalize_for_three_pus(ref_params):
    g = FrameGeometry(T_S, 150, 300)
    total = sum(w.prob for w in hypothesis_weights(ref_params(3), g, 1, "simplified"))
    assert abs(total - 1) > 1e-2
    total2 = sum(w.prob for w in hypothesis_weights(ref_params(2), g, 1, "simplified"))
    assert total2 == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("rule", ["exact", "simplified"])
def test_case1_matches_literal_nested_sums(rule):
    ta, tb, n_pu, L = 0.02, 0.011, 3, 4
    p = TrafficParams(ta, tb, n_pu, 0.3)
    g = FrameGeometry(T_S, L, 10)
    for w in hypothesis_weights(p, g, 1, rule):
        i, m, k = w.hyp
        mult = combinatorial_factor(n_pu, m, i, k, rule)
        prob, energy = nested_sum_case1(ta, tb, T_S, n_pu, L, i, m, k, mult)
        assert w.prob == pytest.approx(prob, abs=1e-12)
        for n, v in energy.items():
            assert w.prob * w.sense_energy_dist[n] == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("case", [1, 2])
def test_two_pus_match_trajectory_enumeration(case):
    ta, tb = 0.02, 0.02
    p = TrafficParams(ta, tb, 2, 0.3)
    g = FrameGeometry(T_S, 3 if case == 2 else 4, 6 if case == 2 else 8)
    joint = enumerate_joint(ta, tb, T_S, 2, g.n_sense, g.n_frame, case)
    weights = hypothesis_weights(p, g, case)
    assert {tuple(w.hyp) for w in weights} == set(joint)
    for w in weights:
        cell = joint[tuple(w.hyp)]
        assert w.prob == pytest.approx(cell["prob"], abs=1e-12)
        for n, v in cell["energy"].items():
            assert w.prob * w.sense_energy_dist[n] == pytest.approx(v, abs=1e-12)
        if case == 2:
            for off, v in cell["tx"].items():
                assert w.prob * w.tx_interference_dist[off] == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("n_pu", [1, 2, 4, 6])
def test_case2_marginalizes_to_case1(n_pu, ref_params):
    p = ref_params(n_pu, theta=0.013)
    g = FrameGeometry(T_S, 70, 300)
    c1, c2 = by_hyp(hypothesis_weights_case1(p, g)), by_hyp(hypothesis_weights_case2(p, g))
    assert c1.keys() == c2.keys()
    for key in c1:
        assert c2[key].prob == pytest.approx(c1[key].prob, abs=1e-9)
        assert c2[key].tx_interference_dist.total == pytest.approx(1.0, abs=1e-12) or c2[key].prob == 0


def test_tx_single_pu_distributions_telescope():
    p = TrafficParams(0.02, 0.03, 1, 0.3)
    g = FrameGeometry(T_S, 20, 90)
    assert busy_tx_offset_dist(p, g).total == pytest.approx(1 - cdf_busy(p, g.sensing_time), abs=1e-14)
    assert idle_tx_offset_dist(p, g).total == pytest.approx(1 - cdf_idle(p, g.sensing_time), abs=1e-14)


def test_all_idle_hypothesis_has_no_interference_when_nobody_arrives():
    p = TrafficParams(1e9, 1e9, 3, 0.3)
    g = FrameGeometry(T_S, 10, 50)
    w = by_hyp(hypothesis_weights_case2(p, g))[(0, 0, 0)]
    assert w.tx_interference_dist[0] == pytest.approx(1.0, abs=1e-9)


def test_support_bounds(ref_params):
    p = ref_params(4, theta=0.01)
    L, S = 25, 60
    g = FrameGeometry(T_S, L, S)
    for w in hypothesis_weights_case2(p, g):
        i, m, k = w.hyp
        assert w.sense_energy_dist.lo == k * L + (i - k)
        assert w.sense_energy_dist.hi == k * L + (i - k) * L + (m - k) * (L - 1)
        n_idle = p.n_pu - (i - k) - m
        assert w.tx_interference_dist.lo == (i - k) * (S - L)
        assert w.tx_interference_dist.hi == (k + (i - k) + n_idle) * (S - L)
        assert np.all(w.sense_energy_dist.mass >= 0)
        if w.prob > 0:
            assert w.sense_energy_dist.total == pytest.approx(1, abs=1e-12)


def test_aggregate_three_pus_against_enumeration():
    ta, tb = 0.015, 0.025
    p = TrafficParams(ta, tb, 3, 0.3)
    g = FrameGeometry(T_S, 5, 9)
    summary = hypothesis_prob_aggregate(hypothesis_weights_case1(p, g))
    joint = enumerate_joint(ta, tb, T_S, 3, 5, 9, 1)
    per_i = np.zeros(4)
    for (i, _m, _k), cell in joint.items():
        per_i[i] += cell["prob"]
    np.testing.assert_allclose(summary.p_h1i, per_i, atol=1e-12, rtol=0)
    assert summary.p_h0 + summary.p_h1 == pytest.approx(1, abs=1e-9)


def test_aggregate_short_sensing_keeps_prior():
    p = TrafficParams(0.02, 0.02, 1, 0.3)
    g = FrameGeometry(1e-9, 1, 2)
    assert hypothesis_prob_aggregate(hypothesis_weights_case1(p, g)).p_h1 == pytest.approx(0.5, abs=1e-6)


def test_frozen_traffic_concentrates_on_no_change():
    p = TrafficParams(1e12, 1e12, 4, 0.3)
    g = FrameGeometry(T_S, 30, 60)
    for w in hypothesis_weights_case1(p, g):
        i, m, k = w.hyp
        if i == m == k:
            assert w.prob == pytest.approx(math.comb(4, m) / 16, rel=1e-6)
        else:
            assert w.prob < 1e-9


def test_case2_needs_transmission_period():
    p = TrafficParams(0.02, 0.02, 1, 0.3)
    with pytest.raises(ValueError):
        hypothesis_weights(p, FrameGeometry(T_S, 10, 10), 2)
    with pytest.raises(ValueError):
        hypothesis_weights(p, FrameGeometry(T_S, 10, 20), 3)
