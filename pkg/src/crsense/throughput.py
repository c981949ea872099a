"""Average achievable secondary-user throughput for both traffic regimes.

Throughput is in bits/s/Hz weighted by the transmission duty cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .hypothesis import WeightSet, hypothesis_prob_aggregate
from .traffic import FrameGeometry


@dataclass(frozen=True)
class ThroughputConfig:
    gamma_s: float
    geometry: FrameGeometry

    def __post_init__(self):
        if not self.gamma_s > 0:
            raise ValueError("gamma_s must be positive")


class ThroughputResult(NamedTuple):
    r: float
    r_h1: float
    r_h0: float


def capacity_case1(i, gamma_s: float, gamma_p: float):
    """Capacity with ``i`` PUs interfering for the whole transmission period."""
    i = np.asarray(i, dtype=float)
    if np.any(i < 0):
        raise ValueError("busy count must be non-negative")
    out = np.log2(1.0 + gamma_s / (1.0 + i * gamma_p))
    return float(out) if out.ndim == 0 else out


def capacity_case2(interference_offset, geom: FrameGeometry, gamma_s: float, gamma_p: float):
    """Capacity when PUs occupy ``interference_offset`` transmission sample-slots.

    The offset already sums whole-period occupants, (S - L) each, and the
    partial occupancy of PUs that depart or arrive during transmission.
    """
    span = geom.n_frame - geom.n_sense
    if span == 0:
        raise ZeroDivisionError("no transmission period (n_frame == n_sense)")
    off = np.asarray(interference_offset, dtype=float)
    if np.any(off < 0):
        raise ValueError("interference offset must be non-negative")
    out = np.log2(1.0 + gamma_s / (1.0 + off / span * gamma_p))
    return float(out) if out.ndim == 0 else out


def _check_probs(p_d, p_f):
    if not (0.0 <= p_d <= 1.0 and 0.0 <= p_f <= 1.0):
        raise ValueError("P_d and P_f must lie in [0, 1]")


def throughput_case1(weights: WeightSet, p_d: float, p_f: float, cfg: ThroughputConfig) -> ThroughputResult:
    """Throughput when PU states freeze at the end of sensing.

    Busy-channel throughput accrues only on a missed detection, so it is
    scaled by 1 - P_d; idle-channel throughput by 1 - P_f.
    """
    _check_probs(p_d, p_f)
    geom, gamma_p = cfg.geometry, weights.params.gamma_p
    duty = geom.duty_cycle
    summary = hypothesis_prob_aggregate(weights)
    counts = np.arange(summary.p_h1i.size)
    caps = capacity_case1(counts, cfg.gamma_s, gamma_p)
    r_h1 = (1.0 - p_d) * duty * float(np.dot(summary.p_h1i[1:], caps[1:]))
    r_h0 = (1.0 - p_f) * duty * summary.p_h0 * caps[0]
    return ThroughputResult(r_h1 + r_h0, r_h1, r_h0)


def throughput_case2(weights: WeightSet, p_d: float, p_f: float, cfg: ThroughputConfig) -> ThroughputResult:
    """Throughput when PUs may also arrive or depart during transmission."""
    _check_probs(p_d, p_f)
    if weights.case != 2:
        raise ValueError("case-2 throughput needs case-2 hypothesis weights")
    geom, gamma_p = cfg.geometry, weights.params.gamma_p
    duty = geom.duty_cycle
    if duty == 0.0:
        return ThroughputResult(0.0, 0.0, 0.0)
    busy_sum = idle_sum = 0.0
    for w in weights:
        cap = w.prob * w.tx_interference_dist.expect(lambda off: capacity_case2(off, geom, cfg.gamma_s, gamma_p))
        if w.hyp.i > 0:
            busy_sum += cap
        else:
            idle_sum += cap
    r_h1 = (1.0 - p_d) * duty * busy_sum
    r_h0 = (1.0 - p_f) * duty * idle_sum
    return ThroughputResult(r_h1 + r_h0, r_h1, r_h0)
