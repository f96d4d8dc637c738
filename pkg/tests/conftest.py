from __future__ import annotations

import numpy as np
import pytest


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion (printed in the terminal summary)."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(criterion: str, ok: bool, detail: str) -> bool:
        lines[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} -- {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines, key=lambda k: (int(k.rstrip("abcdefgh")), k)):
            terminalreporter.write_line(lines[key])
