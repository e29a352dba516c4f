import math
from pathlib import Path

import numpy as np
import pytest

from vesselrange.frames import CameraIntrinsics, Pose

ROOT = Path(__file__).resolve().parents[1]
HARBOR = ROOT / "data" / "harbor"


def random_pose(rng: np.random.Generator, z_range=(20.0, 150.0), tilt=0.3) -> Pose:
    return Pose(
        rng.uniform(-50, 50),
        rng.uniform(-50, 50),
        rng.uniform(*z_range),
        rng.uniform(-math.pi, math.pi),
        rng.uniform(-tilt, tilt),
        rng.uniform(-tilt, tilt),
    )


def random_intrinsics(rng: np.random.Generator) -> CameraIntrinsics:
    w = int(rng.integers(64, 1920))
    h = int(rng.integers(48, 1080))
    return CameraIntrinsics(
        w,
        h,
        rng.uniform(0.002, 0.02),
        rng.uniform(0.002, 0.02),
        rng.uniform(0.002, 0.05),
        (rng.uniform(0, w - 1), rng.uniform(0, h - 1)),
    )


@pytest.fixture
def harbor_dir():
    return HARBOR


# One line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES: list = []


@pytest.fixture
def acceptance():
    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
