import numpy as np
import pytest

from tvlevelset.phantom import default_phantom_spec, render_phantom


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def phantom():
    return render_phantom(default_phantom_spec())


def dense_difference_matrix(m, n):
    """Explicit matrix of forward_differences acting on row-major images.

    Rows are ordered: all vertical differences (row-major over (m-1, n)),
    then all horizontal differences (row-major over (m, n-1)).
    """
    rows = []
    idx = lambda i, j: i * n + j  # noqa: E731
    for i in range(m - 1):
        for j in range(n):
            r = np.zeros(m * n)
            r[idx(i, j)] = 1.0
            r[idx(i + 1, j)] = -1.0
            rows.append(r)
    for i in range(m):
        for j in range(n - 1):
            r = np.zeros(m * n)
            r[idx(i, j)] = 1.0
            r[idx(i, j + 1)] = -1.0
            rows.append(r)
    return np.array(rows).reshape(-1, m * n)


def brute_force_tv(X, isotropic):
    """Term-by-term evaluation of the TV double sums with explicit loops."""
    m, n = X.shape
    total = 0.0
    for i in range(m - 1):
        for j in range(n - 1):
            a = X[i, j] - X[i + 1, j]
            b = X[i, j] - X[i, j + 1]
            total += np.sqrt(a * a + b * b) if isotropic else abs(a) + abs(b)
    for i in range(m - 1):
        total += abs(X[i, n - 1] - X[i + 1, n - 1])
    for j in range(n - 1):
        total += abs(X[m - 1, j] - X[m - 1, j + 1])
    return total


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
