import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from crsense.traffic import FrameGeometry, TrafficParams, db_to_linear  # noqa: E402

GAMMA_P = db_to_linear(-5.0)
GAMMA_S = db_to_linear(10.0)
T_S = 1e-4
N_FRAME = 300


@pytest.fixture
def ref_params():
    """Reference traffic: 20 ms holding times, -5 dB per-PU SNR."""

    def make(n_pu=1, theta=0.02):
        return TrafficParams(theta, theta, n_pu, GAMMA_P)

    return make


@pytest.fixture
def ref_geom():
    def make(n_sense, n_frame=N_FRAME):
        return FrameGeometry(T_S, n_sense, n_frame)

    return make


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
