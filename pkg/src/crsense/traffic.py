"""Exponential on/off primary-user traffic.

Holding times are in seconds. Each PU alternates between busy (mean
``theta_alpha``) and idle (mean ``theta_beta``) spells; within one window a
PU is allowed to toggle at most once.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class TrafficParams:
    """Stochastic environment shared by all PUs.

    Parameters
    ----------
    theta_alpha, theta_beta : float
        Mean busy / idle holding times in seconds.
    n_pu : int
        Number of primary users.
    gamma_p : float
        Per-PU linear SNR at the secondary receiver.
    """

    theta_alpha: float
    theta_beta: float
    n_pu: int
    gamma_p: float

    def __post_init__(self):
        if not self.theta_alpha > 0 or not self.theta_beta > 0:
            raise ValueError("holding-time means must be positive")
        if int(self.n_pu) != self.n_pu or self.n_pu < 1:
            raise ValueError(f"n_pu must be an integer >= 1, got {self.n_pu!r}")
        if not self.gamma_p >= 0:
            raise ValueError("gamma_p must be non-negative")

    @property
    def p_busy(self) -> float:
        return self.theta_alpha / (self.theta_alpha + self.theta_beta)

    @property
    def p_idle(self) -> float:
        return self.theta_beta / (self.theta_alpha + self.theta_beta)


@dataclass(frozen=True)
class FrameGeometry:
    """Sampled frame layout: ``n_sense`` sensing samples out of ``n_frame``."""

    t_s: float
    n_sense: int
    n_frame: int

    def __post_init__(self):
        if not self.t_s > 0:
            raise ValueError("sampling interval must be positive")
        if self.n_sense < 1:
            raise ValueError("n_sense must be >= 1")
        if self.n_frame < self.n_sense:
            raise ValueError("n_frame must be >= n_sense")

    @property
    def sensing_time(self) -> float:
        return self.n_sense * self.t_s

    @property
    def frame_time(self) -> float:
        return self.n_frame * self.t_s

    @property
    def duty_cycle(self) -> float:
        """Fraction of the frame left for transmission, (T_f - T_s) / T_f."""
        return (self.n_frame - self.n_sense) / self.n_frame


def _exp_cdf(theta: float, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("CDF argument must be non-negative")
    # -expm1 keeps full relative precision for x << theta
    out = -np.expm1(-x / theta)
    return float(out) if out.ndim == 0 else out


def cdf_busy(params: TrafficParams, x):
    """P(busy holding time <= x)."""
    return _exp_cdf(params.theta_alpha, x)


def cdf_idle(params: TrafficParams, x):
    """P(idle holding time <= x)."""
    return _exp_cdf(params.theta_beta, x)


def _exp_pmf(theta: float, t_s: float, j):
    # F((j+1)t) - F(jt) = exp(-jt/theta) * (1 - exp(-t/theta))
    j = np.asarray(j, dtype=float)
    out = np.exp(-j * t_s / theta) * -np.expm1(-t_s / theta)
    return float(out) if out.ndim == 0 else out


def _check_index(j, horizon):
    j = np.asarray(j)
    if horizon is not None and np.any((j < 0) | (j >= horizon)):
        raise ValueError(f"sample index out of range [0, {horizon - 1}]")
    if np.any(j < 0):
        raise ValueError("sample index must be non-negative")


def pmf_idle_to_busy(params: TrafficParams, geom: FrameGeometry, j, horizon=None):
    """Probability that an idle PU turns busy right after sample ``j``.

    ``horizon`` (samples) bounds the admissible index; pass ``geom.n_sense``
    for the sensing window or ``geom.n_frame`` for the whole frame.
    """
    _check_index(j, horizon)
    return _exp_pmf(params.theta_beta, geom.t_s, j)


def pmf_busy_to_idle(params: TrafficParams, geom: FrameGeometry, j, horizon=None):
    """Probability that a busy PU turns idle right after sample ``j``."""
    _check_index(j, horizon)
    return _exp_pmf(params.theta_alpha, geom.t_s, j)


def prior_busy_count(params: TrafficParams, m: int) -> float:
    """Probability that exactly ``m`` of the N PUs are busy at frame start."""
    n = params.n_pu
    if not 0 <= m <= n:
        raise ValueError(f"m must lie in [0, {n}], got {m}")
    return comb(n, m) * params.p_busy**m * params.p_idle ** (n - m)
