import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def price_csv(tmp_path):
    """Write a date,close file of a seeded random walk and return its path."""

    def make(n=3000, seed=7, sigma=0.015, name="stock.csv"):
        import datetime as dt

        r = np.random.default_rng(seed).normal(0.0, sigma, n - 1)
        closes = 50.0 * np.exp(np.concatenate(([0.0], np.cumsum(r))))
        day = dt.date(1990, 1, 2)
        lines = ["date,close"]
        for c in closes:
            lines.append(f"{day.isoformat()},{float(c)!r}")
            day += dt.timedelta(days=1)
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path

    return make


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
