"""Energy-detector performance under random PU arrivals and departures."""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

from .hypothesis import OffsetDistribution, WeightSet


class UndefinedConditionalError(ValueError):
    """Conditioning event has zero probability."""


class ThresholdSolverError(RuntimeError):
    def __init__(self, message, bracket=None, values=None):
        super().__init__(message)
        self.bracket = bracket
        self.values = values


@dataclass(frozen=True)
class DetectorConfig:
    """Threshold in noise-normalized energy units (sigma^2 = 1)."""

    threshold: float
    gamma_p: float
    target_pd: float = 0.9

    def __post_init__(self):
        if not 0 < self.target_pd < 1:
            raise ValueError("target_pd must lie in (0, 1)")


def detect_prob_given_energy(eta, n_sense: int, occupied, gamma_p: float):
    """P(energy statistic > eta) when PUs occupy ``occupied`` sample-slots.

    Gaussian approximation with mean L + n*gamma_p and variance
    2L + 4n*gamma_p.
    """
    if n_sense < 1:
        raise ValueError("n_sense must be >= 1")
    energy = np.asarray(occupied, dtype=float) * gamma_p
    arg = (np.asarray(eta, dtype=float) - n_sense - energy) / (
        2.0 * sqrt(2.0) * np.sqrt(n_sense / 2.0 + energy)
    )
    out = 0.5 * erfc(arg)
    return float(out) if np.ndim(out) == 0 else out


def energy_mixture(weights: WeightSet, occupied: bool) -> OffsetDistribution:
    """Probability-weighted mixture of occupied-sample counts.

    ``occupied=True`` pools hypotheses with i >= 1, otherwise i == 0. The
    returned total is P(H1) or P(H0) respectively.
    """
    picked = [w for w in weights if (w.hyp.i > 0) == occupied]
    if not picked:
        return OffsetDistribution(0, np.zeros(1))
    lo = min(w.sense_energy_dist.lo for w in picked)
    hi = max(w.sense_energy_dist.hi for w in picked)
    mass = np.zeros(hi - lo + 1)
    for w in picked:
        d = w.sense_energy_dist
        mass[d.lo - lo : d.hi - lo + 1] += w.prob * d.mass
    return OffsetDistribution(lo, mass)


def _conditional(mix: OffsetDistribution, eta, n_sense, gamma_p, label):
    total = mix.total
    if total <= 0:
        raise UndefinedConditionalError(f"P({label}) = 0; conditional probability undefined")
    return mix.expect(lambda n: detect_prob_given_energy(eta, n_sense, n, gamma_p)) / total


def prob_detection(weights: WeightSet, detector: DetectorConfig) -> float:
    """Unconditional detection probability, averaged over busy hypotheses."""
    mix = energy_mixture(weights, True)
    return _conditional(mix, detector.threshold, weights.geom.n_sense, detector.gamma_p, "H1")


def prob_false_alarm(weights: WeightSet, detector: DetectorConfig) -> float:
    """False-alarm probability, averaged over the all-idle-at-sensing-end hypotheses."""
    mix = energy_mixture(weights, False)
    return _conditional(mix, detector.threshold, weights.geom.n_sense, detector.gamma_p, "H0")


def threshold_bracket(n_sense: int, n_pu: int, gamma_p: float) -> tuple[float, float]:
    return 0.0, n_sense * (1.0 + n_pu * gamma_p) + 20.0 * sqrt(2.0 * n_sense)


def solve_threshold(weights: WeightSet, gamma_p: float, target_pd: float = 0.9, tol: float = 1e-9) -> float:
    """Threshold at which detection probability equals ``target_pd``.

    Both P_d and P_f fall strictly with the threshold, so the root is also
    the smallest-P_f threshold meeting the detection target.
    """
    if not 0 < target_pd < 1:
        raise ValueError("target_pd must lie in (0, 1)")
    if not tol > 0:
        raise ValueError("tol must be positive")
    n_sense = weights.geom.n_sense
    mix = energy_mixture(weights, True)
    if mix.total <= 0:
        raise UndefinedConditionalError("P(H1) = 0; detection target is meaningless")
    support = mix.support
    pmf = mix.mass / mix.total

    def gap(eta):
        return float(np.dot(pmf, detect_prob_given_energy(eta, n_sense, support, gamma_p))) - target_pd

    lo, hi = threshold_bracket(n_sense, weights.params.n_pu, gamma_p)
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo < 0 or g_hi > 0:
        raise ThresholdSolverError(
            f"target P_d={target_pd} not bracketed on [{lo:.6g}, {hi:.6g}] at L={n_sense}: "
            f"P_d ranges over [{g_hi + target_pd:.6g}, {g_lo + target_pd:.6g}]",
            bracket=(lo, hi),
            values=(g_lo + target_pd, g_hi + target_pd),
        )
    eta = brentq(gap, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(gap(eta)) > tol:
        raise ThresholdSolverError(f"root finder stalled: |P_d - target| = {abs(gap(eta)):.3g} > {tol:g}")
    return eta


__all__ = [
    "DetectorConfig",
    "ThresholdSolverError",
    "UndefinedConditionalError",
    "detect_prob_given_energy",
    "energy_mixture",
    "prob_detection",
    "prob_false_alarm",
    "solve_threshold",
    "threshold_bracket",
]
