import sys

import numpy as np
import pytest

from spoofkit.audio import AudioClip


def tone(freq, seconds=1.0, rate=16000, amp=0.5, phase=0.0):
    t = np.arange(int(round(seconds * rate))) / rate
    return AudioClip(amp * np.sin(2 * np.pi * freq * t + phase), rate, f"tone{freq:g}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
