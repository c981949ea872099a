"""Frame-level Monte Carlo simulator for sensing and secondary throughput.

Each frame draws every PU's initial state from the stationary split and its
holding time(s) from the exponential law, then runs the energy detector and
books the capacity the SU would realize if it transmits.

Two detector fidelities are available. ``"statistic"`` draws the energy
statistic straight from its Gaussian law (mean L + n*gamma_p, variance
2L + 4n*gamma_p); ``"sample"`` synthesizes every received sample, with the
PU contribution at a sample carrying power u*gamma_p when u PUs are on.

Both traffic regimes are simulated from the same trajectories: case I uses
the state reached at the end of sensing for the whole transmission period,
case II keeps following the trajectory to the end of the frame.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .detection import DetectorConfig
from .traffic import FrameGeometry, TrafficParams

Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimConfig:
    n_frames: int = 100_000
    seed: int = 0
    mode: str = "statistic"
    case: str = "both"
    renewal: bool = False
    chunk_size: int = 8192

    def __post_init__(self):
        if int(self.n_frames) != self.n_frames or self.n_frames < 1:
            raise ValueError("n_frames must be a positive integer")
        if self.mode not in ("statistic", "sample"):
            raise ValueError(f"mode must be 'statistic' or 'sample', got {self.mode!r}")
        if str(self.case) not in ("1", "2", "both"):
            raise ValueError(f"case must be 1, 2 or 'both', got {self.case!r}")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")


@dataclass
class FrameTrace:
    """Per-frame record; arrays are indexed [frame] or [frame, pu].

    ``transition_sample`` holds the sample after which a PU first toggles
    inside its window, or -1 when it does not.
    """

    initial_states: np.ndarray
    transition_sample: np.ndarray
    busy_end: np.ndarray
    occupied: np.ndarray
    tx_offset: np.ndarray
    decision: np.ndarray
    capacity_case1: np.ndarray
    capacity_case2: np.ndarray


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float

    @property
    def ci95(self) -> tuple[float, float]:
        return self.value - Z95 * self.stderr, self.value + Z95 * self.stderr


@dataclass
class CampaignResult:
    n_frames: int
    n_busy: int
    n_idle: int
    p_d: Estimate
    p_f: Estimate
    r_case1: Optional[Estimate]
    r_case2: Optional[Estimate]
    realized_case1: Optional[Estimate]
    realized_case2: Optional[Estimate]
    trace: Optional[FrameTrace] = field(default=None, repr=False)


class _Trajectories:
    """Occupancy summary of one chunk of frames."""

    def __init__(self, initial, first_toggle, busy_end, occupied, tx_offset, per_sample):
        self.initial = initial
        self.first_toggle = first_toggle
        self.busy_end = busy_end
        self.occupied = occupied
        self.tx_offset = tx_offset
        self.per_sample = per_sample


def _simulate_chunk(params, geom, rng, size, *, window, renewal, per_sample):
    """Walk every PU's busy/idle spells for ``size`` frames.

    A spell covers samples ``start+1 .. end`` (1-based); a toggle drawn at or
    beyond ``window`` never happens, and without ``renewal`` the state is
    frozen after the first toggle.
    """
    n_pu, L, S, t_s = params.n_pu, geom.n_sense, geom.n_frame, geom.t_s
    never = np.iinfo(np.int64).max // 4
    initial = rng.random((size, n_pu)) < params.p_busy
    state = initial.copy()
    start = np.zeros((size, n_pu), dtype=np.int64)
    cum = np.zeros((size, n_pu))
    first_toggle = np.full((size, n_pu), -1, dtype=np.int64)
    occupied = np.zeros(size, dtype=np.int64)
    tx_offset = np.zeros(size, dtype=np.int64)
    busy_end = np.zeros(size, dtype=np.int64)
    diff = np.zeros((size, L + 1), dtype=np.int64) if per_sample else None
    rows = np.broadcast_to(np.arange(size)[:, None], (size, n_pu))

    def add_spells(mask, end):
        nonlocal occupied, tx_offset, busy_end
        on = mask & state
        sense_hi = np.minimum(end, L)
        occupied += np.where(on, np.maximum(sense_hi - start, 0), 0).sum(axis=1)
        tx_offset += np.where(on, np.maximum(np.minimum(end, S) - np.maximum(start, L), 0), 0).sum(axis=1)
        busy_end += (on & (start < L) & (end >= L)).sum(axis=1)
        if per_sample:
            mark = on & (sense_hi > start)
            np.add.at(diff, (rows[mark], start[mark]), 1)
            np.add.at(diff, (rows[mark], sense_hi[mark]), -1)

    live = np.ones((size, n_pu), dtype=bool)
    while live.any():
        scale = np.where(state, params.theta_alpha, params.theta_beta)
        cum = np.where(live, cum + rng.exponential(1.0, (size, n_pu)) * scale, cum)
        j = np.floor(cum / t_s)
        toggles = live & (j < window)
        end = np.where(toggles, j, never).astype(np.int64)
        add_spells(live, end)
        first_toggle = np.where((first_toggle < 0) & toggles, end, first_toggle)
        state = np.where(toggles, ~state, state)
        start = np.where(toggles, end, start)
        if not renewal:
            add_spells(toggles, np.full_like(start, never))
            break
        live = toggles

    per = np.cumsum(diff[:, :L], axis=1) if per_sample else None
    return _Trajectories(initial, first_toggle, busy_end, occupied, tx_offset, per)


def sample_pu_trajectory(params: TrafficParams, geom: FrameGeometry, rng, case=2, size=1, renewal=False):
    """Draw ``size`` frames of PU trajectories.

    Returns ``(initial_states, transition_sample)`` with -1 marking PUs that
    do not toggle inside the window (sensing window for case 1, frame for
    case 2).
    """
    window = geom.n_sense if int(case) == 1 else geom.n_frame
    tr = _simulate_chunk(params, geom, rng, size, window=window, renewal=renewal, per_sample=False)
    return tr.initial, tr.first_toggle


def run_sensing(occupied, detector: DetectorConfig, geom: FrameGeometry, rng, mode="statistic", per_sample=None):
    """Energy-detector decisions (True = declared busy) for a batch of frames."""
    L, gp = geom.n_sense, detector.gamma_p
    occupied = np.asarray(occupied, dtype=float)
    if mode == "statistic":
        mean = L + occupied * gp
        std = np.sqrt(2.0 * L + 4.0 * occupied * gp)
        stat = mean + std * rng.standard_normal(occupied.shape)
    elif mode == "sample":
        if per_sample is None:
            raise ValueError("sample-level sensing needs the per-sample busy counts")
        amp = np.sqrt(np.asarray(per_sample, dtype=float) * gp)
        y = amp + rng.standard_normal(amp.shape)
        stat = np.einsum("ij,ij->i", y, y)
    else:
        raise ValueError(f"unknown sensing mode {mode!r}")
    return stat > detector.threshold


def _prop_estimate(hits, n):
    if n == 0:
        return Estimate(float("nan"), float("nan"))
    p = hits / n
    return Estimate(p, float(np.sqrt(p * (1.0 - p) / n)))


def _mean_estimate(x):
    x = np.asarray(x, dtype=float)
    return Estimate(float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0)


def _formula_estimate(busy, declared, cap, duty):
    """Plug-in estimate of (1-P_d)*E[C; H1] + (1-P_f)*E[C; H0], with delta-method stderr.

    This mirrors the closed-form throughput, which scales the busy and idle
    capacity terms by the unconditional miss and no-false-alarm rates.
    """
    h1 = busy.astype(float)
    h0 = 1.0 - h1
    z = np.column_stack([h1, declared * h1, cap * h1, h0, declared * h0, cap * h0])
    mu = z.mean(axis=0)
    n = z.shape[0]
    if mu[0] == 0 or mu[3] == 0:
        m1 = (1 - mu[1] / mu[0]) * mu[2] if mu[0] else 0.0
        m0 = (1 - mu[4] / mu[3]) * mu[5] if mu[3] else 0.0
        return Estimate(duty * (m1 + m0), float("nan"))
    value = (1 - mu[1] / mu[0]) * mu[2] + (1 - mu[4] / mu[3]) * mu[5]
    grad = np.array(
        [
            mu[1] * mu[2] / mu[0] ** 2,
            -mu[2] / mu[0],
            1 - mu[1] / mu[0],
            mu[4] * mu[5] / mu[3] ** 2,
            -mu[5] / mu[3],
            1 - mu[4] / mu[3],
        ]
    )
    cov = np.cov(z, rowvar=False)
    var = float(grad @ cov @ grad) / n
    return Estimate(duty * value, duty * float(np.sqrt(max(var, 0.0))))


def run_campaign(
    params: TrafficParams,
    geom: FrameGeometry,
    detector: DetectorConfig,
    gamma_s: float,
    sim: SimConfig,
    keep_trace: bool = False,
) -> CampaignResult:
    """Monte Carlo estimates of P_d, P_f and throughput for both cases.

    ``r_case*`` are plug-in estimates of the closed-form throughput;
    ``realized_case*`` average what each frame actually delivers (transmit
    only after an idle decision).
    """
    L, S, gp = geom.n_sense, geom.n_frame, detector.gamma_p
    duty = geom.duty_cycle
    want = {"1": (1,), "2": (2,), "both": (1, 2)}[str(sim.case)]
    per_sample = sim.mode == "sample"

    parts = []
    n_chunks = -(-sim.n_frames // sim.chunk_size)
    for c in range(n_chunks):
        size = min(sim.chunk_size, sim.n_frames - c * sim.chunk_size)
        rng = np.random.default_rng(np.random.SeedSequence([sim.seed, c]))
        tr = _simulate_chunk(params, geom, rng, size, window=S, renewal=sim.renewal, per_sample=per_sample)
        declared = run_sensing(tr.occupied, detector, geom, rng, sim.mode, tr.per_sample)
        parts.append((tr, declared))

    def cat(get):
        return np.concatenate([get(p) for p in parts])

    busy_end = cat(lambda p: p[0].busy_end)
    declared = cat(lambda p: p[1])
    busy = busy_end > 0
    if S > L:
        cap1 = np.log2(1.0 + gamma_s / (1.0 + busy_end * gp))
        cap2 = np.log2(1.0 + gamma_s / (1.0 + cat(lambda p: p[0].tx_offset) / (S - L) * gp))
    else:
        cap1 = cap2 = np.zeros(busy_end.size)

    n_busy = int(busy.sum())
    n_idle = busy.size - n_busy
    result = CampaignResult(
        n_frames=sim.n_frames,
        n_busy=n_busy,
        n_idle=n_idle,
        p_d=_prop_estimate(int((declared & busy).sum()), n_busy),
        p_f=_prop_estimate(int((declared & ~busy).sum()), n_idle),
        r_case1=None,
        r_case2=None,
        realized_case1=None,
        realized_case2=None,
    )
    for case, cap in ((1, cap1), (2, cap2)):
        if case not in want:
            continue
        setattr(result, f"r_case{case}", _formula_estimate(busy, declared.astype(float), cap, duty))
        setattr(result, f"realized_case{case}", _mean_estimate(np.where(declared, 0.0, cap) * duty))

    if keep_trace:
        result.trace = FrameTrace(
            initial_states=cat(lambda p: p[0].initial),
            transition_sample=cat(lambda p: p[0].first_toggle),
            busy_end=busy_end,
            occupied=cat(lambda p: p[0].occupied),
            tx_offset=cat(lambda p: p[0].tx_offset),
            decision=declared,
            capacity_case1=np.where(declared, 0.0, cap1),
            capacity_case2=np.where(declared, 0.0, cap2),
        )
    return result


TRACE_COLUMNS = ("frame", "m", "i", "n_occ", "tx_off", "decision", "cap1", "cap2", "toggles")


def write_trace(path, trace: FrameTrace) -> None:
    """Dump a trace as whitespace-separated columns with a ``#`` header.

    ``toggles`` lists each PU's first toggle sample joined by commas (-1 for none).
    """
    with open(path, "w") as fh:
        fh.write("# " + " ".join(TRACE_COLUMNS) + "\n")
        for f in range(trace.decision.size):
            toggles = ",".join(str(int(v)) for v in trace.transition_sample[f])
            fh.write(
                f"{f} {int(trace.initial_states[f].sum())} {int(trace.busy_end[f])} "
                f"{int(trace.occupied[f])} {int(trace.tx_offset[f])} {int(trace.decision[f])} "
                f"{trace.capacity_case1[f]:.6f} {trace.capacity_case2[f]:.6f} {toggles}\n"
            )
