import numpy as np
import pytest

from morreyops import abelian_aniso, abelian_iso, heisenberg1
from morreyops.plan import QuadraturePlan


@pytest.fixture(scope="session")
def g_aniso():
    return abelian_aniso([1, 2])


@pytest.fixture(scope="session")
def g_iso2():
    return abelian_iso(2)


@pytest.fixture(scope="session")
def g_heis():
    return heisenberg1()


@pytest.fixture(scope="session")
def plan():
    return QuadraturePlan(tol=1e-3)


@pytest.fixture(scope="session")
def fast_plan():
    # the desk-scale plan the bundled suite uses
    return QuadraturePlan(
        tol=1e-3, shells_per_octave=1, sphere_order=8, delta_min=2.0**-14,
        r_max=2.0**16, radial_intervals=16, norm_grid=(2, -6, 6),
        maximal_grid=(2, -6, 6), ball_inner_octaves=12,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            name = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in name:
                crit = name.split("::")[-1]
                ok = status == "passed"
                lines.setdefault(crit, ok)
                lines[crit] = lines[crit] and ok
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for crit in sorted(lines):
            flag = "PASS" if lines[crit] else "FAIL"
            terminalreporter.write_line(f"  {flag}  {crit}")
