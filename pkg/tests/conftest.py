import numpy as np
import pytest
from hypothesis import strategies as st

from muxsource import DetectorModel, PhotonNumberDistribution


@st.composite
def distributions(draw, max_n=12, total=1.0):
    """Random photon-number distributions with the given total mass."""
    n = draw(st.integers(min_value=0, max_value=max_n))
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n + 1, max_size=n + 1)))
    if w.sum() == 0:
        w[0] = 1.0
    return PhotonNumberDistribution(total * w / w.sum())


efficiencies = st.floats(min_value=0.0, max_value=1.0)

ALL_DETECTORS = [
    DetectorModel.binary(0.7),
    DetectorModel.pnr(0.7),
    DetectorModel.pseudo_pnr(0.7, 8),
]


@pytest.fixture(params=ALL_DETECTORS, ids=lambda d: d.label)
def detector(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import CRITERIA, RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, _ in CRITERIA:
        if name in RESULTS:
            ok, detail = RESULTS[name]
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
