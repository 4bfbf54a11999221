import numpy as np
import pytest

from qabba import _backend

BACKENDS = [_backend.pure] + ([_backend.compiled] if _backend.compiled is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def kernels(request, monkeypatch):
    """Run a test once per available kernel backend."""
    mod = request.param
    for name in ("segment_sse", "compress_breakpoints", "dtw_sq", "ga_sweep"):
        monkeypatch.setattr(_backend, name, getattr(mod, name))
    return mod


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion."""
    def record(number, text, ok):
        _ACCEPTANCE[number] = (ok, text)
        assert ok, f"criterion {number} failed: {text}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, text = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {text}")
