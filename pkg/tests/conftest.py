import numpy as np
import pytest

from sprepair import TextBuffer, remap_input


def make_text(s, code_limit=None):
    """Buffer over the first-occurrence codes of ``s`` (str or bytes)."""
    data = s.encode() if isinstance(s, str) else bytes(s)
    codes, _ = remap_input(data)
    if code_limit is None:
        code_limit = len(codes) + 258
    return TextBuffer.from_symbols(codes, code_limit=code_limit)


def random_bytes(rng, n, sigma):
    return bytes((rng.integers(0, sigma, n) + 97).astype(np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
