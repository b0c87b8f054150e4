from __future__ import annotations

import functools

import pytest

from dirac_lattice.dirac import classify, run_algorithm
from dirac_lattice.lattice import LatticeSpec
from dirac_lattice.theory import maxwell_first_order, paper_g0_theory


@functools.lru_cache(maxsize=None)
def analysis(theory: str, n: int):
    """(constraints, multipliers, hamiltonian, classified) for a built-in theory, computed once."""
    spec = paper_g0_theory() if theory == "paper_g0" else maxwell_first_order()
    constraints, mult, h = run_algorithm(spec, LatticeSpec(n))
    return constraints, mult, h, classify(constraints, mult)


@pytest.fixture(scope="session")
def g0():
    return lambda n: analysis("paper_g0", n)


@pytest.fixture(scope="session")
def maxwell():
    return lambda n: analysis("maxwell1", n)


_criteria: dict[int, list[bool]] = {}

TITLES = {
    1: "primary constraint count",
    2: "primary bracket rank and nullity",
    3: "secondary constraints and multipliers",
    4: "first/second class split",
    5: "reducibility",
    6: "degrees of freedom",
    7: "Dirac bracket degeneracy",
    8: "constraint algebra",
    9: "gauge invariance and generator flow",
    10: "diffeomorphisms on shell",
    11: "symplectic structure",
    12: "smeared flows",
    13: "first-order Maxwell regression",
    14: "B/connection map and flat metric",
    15: "thread determinism",
}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_c"):
        return
    key = int(name[len("test_c"):].split("_")[0])
    _criteria.setdefault(key, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        verdict = "PASS" if all(_criteria[key]) else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {key:2d}  {TITLES.get(key, '')}")
