"""Occupancy hypotheses (i, m, k) and their probability weights.

A hypothesis fixes ``m`` PUs busy at frame start, ``i`` busy at the end of
sensing and ``k`` busy throughout sensing. Its weight is a product of
identical per-PU factors, so the nested sums over individual arrival and
departure samples collapse into repeated discrete convolutions of a single
PU's offset distribution.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Optional

import numpy as np

from .traffic import (
    FrameGeometry,
    TrafficParams,
    cdf_busy,
    cdf_idle,
    pmf_busy_to_idle,
    pmf_idle_to_busy,
    prior_busy_count,
)

MULTIPLICITY_RULES = ("exact", "simplified")


class OccupancyHypothesis(NamedTuple):
    i: int
    m: int
    k: int

    @property
    def arrivals(self) -> int:
        return self.i - self.k

    @property
    def departures(self) -> int:
        return self.m - self.k


@dataclass(frozen=True)
class OffsetDistribution:
    """Nonnegative weights on the contiguous integer support ``lo .. lo+len-1``.

    Weights need not sum to one; ``total`` is the aggregate factor carried.
    """

    lo: int
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 1 or mass.size == 0:
            raise ValueError("mass must be a non-empty 1-d array")
        object.__setattr__(self, "mass", mass)

    @property
    def hi(self) -> int:
        return self.lo + self.mass.size - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    def shift(self, offset: int) -> "OffsetDistribution":
        return OffsetDistribution(self.lo + offset, self.mass)

    def normalized(self) -> "OffsetDistribution":
        t = self.total
        if t <= 0:
            return self
        return OffsetDistribution(self.lo, self.mass / t)

    def expect(self, func) -> float:
        """Weighted sum of ``func(support)`` (not divided by ``total``)."""
        return float(np.dot(self.mass, func(self.support)))

    def __getitem__(self, offset: int) -> float:
        if self.lo <= offset <= self.hi:
            return float(self.mass[offset - self.lo])
        return 0.0


UNIT = OffsetDistribution(0, np.array([1.0]))


def convolve(a: OffsetDistribution, b: OffsetDistribution) -> OffsetDistribution:
    """Distribution of the sum of two independent offsets."""
    return OffsetDistribution(a.lo + b.lo, np.convolve(a.mass, b.mass))


def convolution_powers(dist: OffsetDistribution, r_max: int) -> list[OffsetDistribution]:
    """``[dist^0, dist^1, ..., dist^r_max]`` under convolution."""
    out = [UNIT]
    for _ in range(r_max):
        out.append(convolve(out[-1], dist))
    return out


@dataclass(frozen=True)
class HypothesisWeight:
    hyp: OccupancyHypothesis
    prob: float
    sense_energy_dist: OffsetDistribution
    tx_interference_dist: Optional[OffsetDistribution] = None


class WeightSet(list):
    """List of :class:`HypothesisWeight` that remembers how it was built."""

    def __init__(self, items, params: TrafficParams, geom: FrameGeometry, case: int):
        super().__init__(items)
        self.params = params
        self.geom = geom
        self.case = case


class HypothesisSummary(NamedTuple):
    p_h1i: np.ndarray
    p_h1: float
    p_h0: float


def _check_counts(n_pu, m, i):
    if not (0 <= m <= n_pu and 0 <= i <= n_pu):
        raise ValueError(f"m and i must lie in [0, {n_pu}], got m={m}, i={i}")


def k_range(n_pu: int, m: int, i: int) -> tuple[int, int]:
    """Admissible count of PUs busy throughout sensing, inclusive bounds."""
    _check_counts(n_pu, m, i)
    k_min, k_max = max(0, m + i - n_pu), min(m, i)
    assert k_min <= k_max
    return k_min, k_max


def combinatorial_factor(n_pu: int, m: int, i: int, k: int, rule: str = "exact") -> int:
    """Number of PU-identity assignments folded into one (i, m, k) weight.

    ``"exact"`` counts which of the m busy PUs stay (C(m, k)) and which of
    the N - m idle PUs arrive (C(N - m, i - k)). ``"simplified"`` applies that
    count only when m = N or m = 0 and uses 1 otherwise; both rules agree
    whenever one of those binomials is trivial.
    """
    k_min, k_max = k_range(n_pu, m, i)
    if not k_min <= k <= k_max:
        raise ValueError(f"k={k} outside [{k_min}, {k_max}] for N={n_pu}, m={m}, i={i}")
    if rule == "exact":
        return comb(m, k) * comb(n_pu - m, i - k)
    if rule == "simplified":
        if m == n_pu:
            return comb(n_pu, n_pu - k)
        if m == 0:
            return comb(n_pu, i)
        return 1
    raise ValueError(f"unknown multiplicity rule {rule!r}; expected one of {MULTIPLICITY_RULES}")


def arrival_offset_dist(params: TrafficParams, geom: FrameGeometry, horizon: int) -> OffsetDistribution:
    """Occupied samples contributed by one PU arriving inside a ``horizon`` window.

    Arrival after sample ``a`` leaves ``horizon - a`` occupied samples.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    a = np.arange(horizon)
    mass = pmf_idle_to_busy(params, geom, a)
    # offsets horizon - a run from horizon down to 1; store ascending
    return OffsetDistribution(1, np.asarray(mass)[::-1])


def departure_offset_dist(params: TrafficParams, geom: FrameGeometry, horizon: int) -> OffsetDistribution:
    """Occupied samples contributed by one PU departing inside a ``horizon`` window."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    d = np.arange(horizon)
    return OffsetDistribution(0, np.atleast_1d(pmf_busy_to_idle(params, geom, d)))


def busy_tx_offset_dist(params: TrafficParams, geom: FrameGeometry) -> OffsetDistribution:
    """Transmission-period samples still occupied by a PU busy through sensing.

    Departure after sample g in L..S-1 occupies g - L samples; g = S (no
    departure before frame end) occupies all S - L.
    """
    n_sense, n_frame = geom.n_sense, geom.n_frame
    g = np.arange(n_sense, n_frame)
    mass = np.empty(n_frame - n_sense + 1)
    mass[:-1] = pmf_busy_to_idle(params, geom, g)
    mass[-1] = 1.0 - cdf_busy(params, geom.frame_time)
    return OffsetDistribution(0, mass)


def idle_tx_offset_dist(params: TrafficParams, geom: FrameGeometry) -> OffsetDistribution:
    """Transmission-period samples occupied by a PU idle through sensing.

    Arrival after sample c in L..S-1 occupies S - c samples; c = S occupies none.
    """
    n_sense, n_frame = geom.n_sense, geom.n_frame
    c = np.arange(n_sense, n_frame)
    by_c = np.empty(n_frame - n_sense + 1)
    by_c[:-1] = pmf_idle_to_busy(params, geom, c)
    by_c[-1] = 1.0 - cdf_idle(params, geom.frame_time)
    # offset S - c is descending in c
    return OffsetDistribution(0, by_c[::-1])


def hypothesis_weights(
    params: TrafficParams,
    geom: FrameGeometry,
    case: int = 1,
    multiplicity: str = "exact",
) -> WeightSet:
    """Weights of every admissible (i, m, k) hypothesis.

    ``case=1`` confines status changes to the sensing period, ``case=2``
    lets them occur anywhere in the frame and attaches the distribution of
    the transmission-period interference numerator (samples-times-PUs,
    divide by S - L for the occupancy fraction).
    """
    if case not in (1, 2):
        raise ValueError(f"case must be 1 or 2, got {case!r}")
    if case == 2 and geom.n_frame <= geom.n_sense:
        raise ValueError("case 2 needs a transmission period (n_frame > n_sense)")

    n_pu, n_sense = params.n_pu, geom.n_sense
    t_sense = geom.sensing_time
    stay_busy = 1.0 - cdf_busy(params, t_sense)
    stay_idle = 1.0 - cdf_idle(params, t_sense)
    arrive = cdf_idle(params, t_sense)
    depart = cdf_busy(params, t_sense)

    arr_pow = convolution_powers(arrival_offset_dist(params, geom, n_sense), n_pu)
    dep_pow = convolution_powers(departure_offset_dist(params, geom, n_sense), n_pu)
    if case == 2:
        tx_span = geom.n_frame - n_sense
        btx_pow = convolution_powers(busy_tx_offset_dist(params, geom), n_pu)
        itx_pow = convolution_powers(idle_tx_offset_dist(params, geom), n_pu)

    weights = []
    for i in range(n_pu + 1):
        for m in range(n_pu + 1):
            prior = prior_busy_count(params, m)
            k_min, k_max = k_range(n_pu, m, i)
            for k in range(k_min, k_max + 1):
                n_arr, n_dep = i - k, m - k
                n_idle = n_pu - n_arr - m
                mult = combinatorial_factor(n_pu, m, i, k, multiplicity)
                energy = convolve(arr_pow[n_arr], dep_pow[n_dep]).shift(k * n_sense)
                tx = None
                if case == 1:
                    through = stay_busy**k * stay_idle**n_idle
                else:
                    # sums over g and c telescope to the case-1 survival factors
                    through = btx_pow[k].total * itx_pow[n_idle].total
                    tx = convolve(btx_pow[k], itx_pow[n_idle]).shift(n_arr * tx_span).normalized()
                prob = mult * prior * through * arrive**n_arr * depart**n_dep
                weights.append(
                    HypothesisWeight(OccupancyHypothesis(i, m, k), prob, energy.normalized(), tx)
                )
    return WeightSet(weights, params, geom, case)


def hypothesis_weights_case1(params, geom, multiplicity="exact"):
    return hypothesis_weights(params, geom, 1, multiplicity)


def hypothesis_weights_case2(params, geom, multiplicity="exact"):
    return hypothesis_weights(params, geom, 2, multiplicity)


def hypothesis_prob_aggregate(weights: list[HypothesisWeight]) -> HypothesisSummary:
    """Per-i end-of-sensing occupancy probabilities and the H1/H0 split."""
    n_pu = max(w.hyp.m for w in weights)
    p_h1i = np.zeros(n_pu + 1)
    for w in weights:
        p_h1i[w.hyp.i] += w.prob
    return HypothesisSummary(p_h1i, float(p_h1i[1:].sum()), float(p_h1i[0]))
