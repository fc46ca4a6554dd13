import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    seen: dict = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props or (rep.when != "call" and key != "error"):
                continue
            ok, cases, took = seen.get(props["criterion"], (True, 0, 0.0))
            seen[props["criterion"]] = (ok and key == "passed", cases + 1, took + props.get("elapsed_s", 0.0))
    if not seen:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(seen):
        ok, cases, took = seen[crit]
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  ({cases} case(s), {took:.1f} s)")
