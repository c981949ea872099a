"""Sensing-length sweep: threshold, detection and throughput per grid point."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .detection import DetectorConfig, ThresholdSolverError, prob_detection, prob_false_alarm, solve_threshold
from .hypothesis import hypothesis_weights
from .montecarlo import CampaignResult, SimConfig, run_campaign
from .throughput import ThroughputConfig, throughput_case1, throughput_case2
from .traffic import FrameGeometry, TrafficParams, db_to_linear

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "n_pu", "L", "t_s_ms", "eta", "pd", "pf", "r_case1", "r_case2",
    "pd_mc", "pf_mc", "r1_mc", "r2_mc",
    "pd_mc_lo", "pd_mc_hi", "pf_mc_lo", "pf_mc_hi",
    "r1_mc_lo", "r1_mc_hi", "r2_mc_lo", "r2_mc_hi",
    "error",
)


class PointError(RuntimeError):
    def __init__(self, n_sense, cause):
        super().__init__(f"L={n_sense}: {cause}")
        self.n_sense = n_sense
        self.cause = cause


@dataclass(frozen=True)
class SweepConfig:
    """Physical inputs of a sweep; SNRs in dB, times in seconds."""

    theta_alpha: float
    theta_beta: float
    n_pu: int
    t_s: float
    t_f: float
    gamma_p_db: float
    gamma_s_db: float
    target_pd: float = 0.9
    solver_tol: float = 1e-9
    grid: tuple = ()
    cases: tuple = (1, 2)
    sim: Optional[SimConfig] = None
    multiplicity: str = "exact"

    def __post_init__(self):
        n_frame = self.t_f / self.t_s
        if abs(n_frame - round(n_frame)) > 1e-6 * n_frame:
            raise ValueError(f"t_f / t_s = {n_frame:g} is not an integer sample count")
        grid = tuple(int(v) for v in self.grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if grid and not (grid[0] >= 1 and grid[-1] < self.n_frame):
            raise ValueError(f"grid values must lie in [1, {self.n_frame - 1}]")
        object.__setattr__(self, "grid", grid)
        if not set(self.cases) <= {1, 2} or not self.cases:
            raise ValueError("cases must be a non-empty subset of {1, 2}")

    @property
    def n_frame(self) -> int:
        return int(round(self.t_f / self.t_s))

    @property
    def gamma_p(self) -> float:
        return db_to_linear(self.gamma_p_db)

    @property
    def gamma_s(self) -> float:
        return db_to_linear(self.gamma_s_db)

    def traffic(self) -> TrafficParams:
        return TrafficParams(self.theta_alpha, self.theta_beta, self.n_pu, self.gamma_p)

    def geometry(self, n_sense: int) -> FrameGeometry:
        return FrameGeometry(self.t_s, n_sense, self.n_frame)


@dataclass
class TradeoffPoint:
    n_pu: int
    sensing_samples: int
    sensing_time: float
    threshold: float = float("nan")
    p_d: float = float("nan")
    p_f: float = float("nan")
    r_case1: Optional[float] = None
    r_case2: Optional[float] = None
    mc: Optional[CampaignResult] = field(default=None, repr=False)
    error: Optional[str] = None


def point_seed(seed: int, n_pu: int, n_sense: int) -> int:
    return int(np.random.SeedSequence([seed, n_pu, n_sense]).generate_state(1, np.uint64)[0])


def evaluate_point(n_sense: int, cfg: SweepConfig) -> TradeoffPoint:
    """Solve the threshold at ``n_sense`` and evaluate every requested output."""
    if not 1 <= n_sense < cfg.n_frame:
        raise ValueError(f"sensing samples must lie in [1, {cfg.n_frame - 1}], got {n_sense}")
    params, geom = cfg.traffic(), cfg.geometry(n_sense)
    w1 = hypothesis_weights(params, geom, 1, cfg.multiplicity)
    try:
        eta = solve_threshold(w1, params.gamma_p, cfg.target_pd, cfg.solver_tol)
    except ThresholdSolverError as exc:
        raise PointError(n_sense, exc) from exc
    det = DetectorConfig(eta, params.gamma_p, cfg.target_pd)
    p_d, p_f = prob_detection(w1, det), prob_false_alarm(w1, det)
    tcfg = ThroughputConfig(cfg.gamma_s, geom)
    point = TradeoffPoint(params.n_pu, n_sense, geom.sensing_time, eta, p_d, p_f)
    if 1 in cfg.cases:
        point.r_case1 = throughput_case1(w1, p_d, p_f, tcfg).r
    if 2 in cfg.cases:
        w2 = hypothesis_weights(params, geom, 2, cfg.multiplicity)
        point.r_case2 = throughput_case2(w2, p_d, p_f, tcfg).r
    if cfg.sim is not None:
        case = "both" if len(cfg.cases) == 2 else str(cfg.cases[0])
        sim = replace(cfg.sim, seed=point_seed(cfg.sim.seed, params.n_pu, n_sense), case=case)
        point.mc = run_campaign(params, geom, det, cfg.gamma_s, sim)
    return point


def _safe_point(args):
    n_sense, cfg = args
    try:
        return evaluate_point(n_sense, cfg)
    except PointError as exc:
        return TradeoffPoint(cfg.n_pu, n_sense, n_sense * cfg.t_s, error=str(exc.cause))


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[TradeoffPoint]:
    """Evaluate every grid point; solver failures are recorded on the point."""
    work = [(n_sense, cfg) for n_sense in cfg.grid]
    if jobs == 1 or len(work) < 2:
        return [_safe_point(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_safe_point, work))


def find_optimum(points: Sequence[TradeoffPoint], case: int = 2) -> tuple[int, float]:
    """Throughput-maximizing sensing length; ties go to the shorter one."""
    valid = [p for p in points if p.error is None and getattr(p, f"r_case{case}") is not None]
    if not valid:
        raise ValueError("no evaluated points to optimize over")
    best = min(valid, key=lambda p: (-getattr(p, f"r_case{case}"), p.sensing_samples))
    return best.sensing_samples, float(getattr(best, f"r_case{case}"))


def _fmt(x):
    if x is None:
        return ""
    return repr(float(x))


def point_row(p: TradeoffPoint) -> list[str]:
    row = [str(p.n_pu), str(p.sensing_samples), _fmt(p.sensing_time * 1e3)]
    row += [_fmt(v) if p.error is None else "" for v in (p.threshold, p.p_d, p.p_f)]
    row += [_fmt(p.r_case1), _fmt(p.r_case2)]
    ests = [None] * 4
    if p.mc is not None:
        ests = [p.mc.p_d, p.mc.p_f, p.mc.r_case1, p.mc.r_case2]
    row += [_fmt(e.value) if e is not None else "" for e in ests]
    for e in ests:
        row += [_fmt(v) for v in e.ci95] if e is not None else ["", ""]
    row.append(p.error or "")
    return row


def write_csv(path, points: Sequence[TradeoffPoint]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for p in points:
            writer.writerow(point_row(p))


def summarize(cfgs: Sequence[SweepConfig], results: Sequence[Sequence[TradeoffPoint]], seed=None) -> dict:
    optima = []
    for cfg, points in zip(cfgs, results):
        entry = {"n_pu": cfg.n_pu}
        for case in cfg.cases:
            try:
                l_star, r_star = find_optimum(points, case)
            except ValueError:
                l_star, r_star = None, None
            entry[f"case{case}"] = {
                "L_star": l_star,
                "t_s_star_ms": None if l_star is None else l_star * cfg.t_s * 1e3,
                "r_star": r_star,
            }
        entry["failed_points"] = [p.sensing_samples for p in points if p.error]
        optima.append(entry)
    base = asdict(cfgs[0])
    base.pop("sim")
    base["n_pu"] = [c.n_pu for c in cfgs]
    base["grid"] = list(cfgs[0].grid)
    base["cases"] = list(cfgs[0].cases)
    sim = cfgs[0].sim
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "seed": seed,
        "monte_carlo": None if sim is None else {"frames": sim.n_frames, "mode": sim.mode},
        "parameters": base,
        "optima": optima,
    }


def write_summary(path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
