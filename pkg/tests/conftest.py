import sys

import numpy as np
import pytest

from compactseg import _backend


def brute_convolve(field, weights):
    """Direct 2-D zero-padded convolution, independent of the library paths."""
    field = np.asarray(field, dtype=np.float64)
    H, W = field.shape
    n = weights.shape[0] // 2
    out = np.zeros_like(field)
    for i in range(H):
        for j in range(W):
            acc = 0.0
            for di in range(-n, n + 1):
                for dj in range(-n, n + 1):
                    y, x = i - di, j - dj
                    if 0 <= y < H and 0 <= x < W:
                        acc += weights[di + n, dj + n] * field[y, x]
            out[i, j] = acc
    return out


def brute_q(u, weights):
    """``<u, G*(1-u)>`` with u extended by zero outside the grid, by padding explicitly."""
    u = np.asarray(u, dtype=np.float64)
    n = weights.shape[0] // 2
    big = np.pad(u, n)
    one_minus = 1.0 - big
    H, W = u.shape
    total = 0.0
    for i in range(H):
        for j in range(W):
            if u[i, j] == 0:
                continue
            patch = one_minus[i:i + 2 * n + 1, j:j + 2 * n + 1]
            total += u[i, j] * float(np.sum(weights[::-1, ::-1] * patch))
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend_name(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
