"""Sensing-throughput tradeoff for cognitive radio under multi-PU on/off traffic."""

__version__ = "0.1.0"

from .detection import (  # noqa: E402
    DetectorConfig,
    ThresholdSolverError,
    UndefinedConditionalError,
    detect_prob_given_energy,
    prob_detection,
    prob_false_alarm,
    solve_threshold,
)
from .estimator import SensingTradeoff  # noqa: E402
from .hypothesis import (  # noqa: E402
    OffsetDistribution,
    OccupancyHypothesis,
    combinatorial_factor,
    convolve,
    hypothesis_prob_aggregate,
    hypothesis_weights,
    hypothesis_weights_case1,
    hypothesis_weights_case2,
    k_range,
)
from .montecarlo import SimConfig, run_campaign  # noqa: E402
from .sweep import SweepConfig, TradeoffPoint, evaluate_point, find_optimum, run_sweep  # noqa: E402
from .throughput import (  # noqa: E402
    ThroughputConfig,
    capacity_case1,
    capacity_case2,
    throughput_case1,
    throughput_case2,
)
from .traffic import FrameGeometry, TrafficParams, db_to_linear  # noqa: E402
