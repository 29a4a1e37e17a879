import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bmatrack import Frame

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {k:2d}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_frame(rng, width=24, height=18, levels=256, index=0) -> Frame:
    px = rng.integers(0, levels, size=(height, width, 3))
    if levels < 256:
        px = px * (255 // (levels - 1))
    return Frame(px.astype(np.uint8), index=index)


def solid_frame(rgb, width=32, height=24, index=0) -> Frame:
    px = np.empty((height, width, 3), dtype=np.uint8)
    px[:] = rgb
    return Frame(px, index=index)
