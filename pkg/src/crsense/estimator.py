"""scikit-learn style front end to the tradeoff sweep.

``fit`` takes a column of candidate sensing lengths (in samples), solves the
threshold at each and records the throughput-optimal one; ``predict`` and
``transform`` evaluate arbitrary lengths. Hyper-parameters go through
``get_params``/``set_params`` so the usual tooling (``clone``,
``ParameterGrid``) can drive traffic or SNR studies.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .sweep import SweepConfig, evaluate_point, find_optimum
from .validation import check_sensing_samples

OUTPUT_COLUMNS = ("threshold", "p_d", "p_f", "r_case1", "r_case2")


class SensingTradeoff(TransformerMixin, BaseEstimator):
    """Sensing-throughput tradeoff for ``n_pu`` on/off primary users.

    Parameters
    ----------
    n_pu : int
        Number of primary users.
    theta_alpha, theta_beta : float
        Mean busy and idle holding times, seconds.
    t_s, t_f : float
        Sampling interval and frame length, seconds.
    gamma_p_db, gamma_s_db : float
        Per-PU SNR at the SU and SU link SNR, dB.
    target_pd : float
        Detection probability the threshold is solved for.
    case : {1, 2}
        Traffic regime optimized by ``fit`` and returned by ``predict``.

    Attributes
    ----------
    points_ : list of TradeoffPoint
    optimal_sensing_samples_ : int
    optimal_sensing_time_ : float
    optimal_throughput_ : float
    """

    def __init__(
        self,
        n_pu=1,
        theta_alpha=0.02,
        theta_beta=0.02,
        t_s=1e-4,
        t_f=0.03,
        gamma_p_db=-5.0,
        gamma_s_db=10.0,
        target_pd=0.9,
        case=2,
        solver_tol=1e-9,
        multiplicity="exact",
    ):
        self.n_pu = n_pu
        self.theta_alpha = theta_alpha
        self.theta_beta = theta_beta
        self.t_s = t_s
        self.t_f = t_f
        self.gamma_p_db = gamma_p_db
        self.gamma_s_db = gamma_s_db
        self.target_pd = target_pd
        self.case = case
        self.solver_tol = solver_tol
        self.multiplicity = multiplicity

    def _config(self) -> SweepConfig:
        if self.case not in (1, 2):
            raise ValueError(f"case must be 1 or 2, got {self.case!r}")
        return SweepConfig(
            theta_alpha=self.theta_alpha,
            theta_beta=self.theta_beta,
            n_pu=self.n_pu,
            t_s=self.t_s,
            t_f=self.t_f,
            gamma_p_db=self.gamma_p_db,
            gamma_s_db=self.gamma_s_db,
            target_pd=self.target_pd,
            solver_tol=self.solver_tol,
            multiplicity=self.multiplicity,
        )

    def _points(self, X):
        cfg = self._config()
        lengths = check_sensing_samples(X, cfg.n_frame)
        cache = {p.sensing_samples: p for p in getattr(self, "points_", [])}
        return [cache.get(int(n)) or evaluate_point(int(n), cfg) for n in lengths]

    def fit(self, X, y=None):
        """Evaluate the candidate sensing lengths in ``X`` and keep the best."""
        cfg = self._config()
        lengths = np.unique(check_sensing_samples(X, cfg.n_frame))
        self.points_ = [evaluate_point(int(n), cfg) for n in lengths]
        self.n_frame_ = cfg.n_frame
        best, r_star = find_optimum(self.points_, self.case)
        self.optimal_sensing_samples_ = best
        self.optimal_sensing_time_ = best * self.t_s
        self.optimal_throughput_ = r_star
        return self

    def predict(self, X):
        """Average achievable throughput (bits/s/Hz) at each sensing length."""
        check_is_fitted(self, "points_")
        return np.array([getattr(p, f"r_case{self.case}") for p in self._points(X)])

    def transform(self, X):
        """Columns ``threshold, p_d, p_f, r_case1, r_case2`` per sensing length."""
        check_is_fitted(self, "points_")
        return np.array([[getattr(p, c) for c in OUTPUT_COLUMNS] for p in self._points(X)], dtype=float)

    def score(self, X, y=None):
        """Best throughput reachable on the grid ``X``."""
        return float(np.max(self.predict(X)))
