import itertools

import pytest

from belyi_geodesics.rotation_graph import RotationGraph

K4_PAIRS = list(itertools.combinations(range(4), 2))

# 4-cycle 0-1-2-3 joining two copies of K4 minus an edge
BARBELL_PAIRS = [
    (0, 1), (1, 2), (2, 3), (3, 0),
    (0, 4), (1, 5), (2, 8), (3, 9),
    (4, 6), (4, 7), (5, 6), (5, 7), (6, 7),
    (8, 10), (8, 11), (9, 10), (9, 11), (10, 11),
]

PETERSEN_PAIRS = (
    [(i, (i + 1) % 5) for i in range(5)]
    + [(i, i + 5) for i in range(5)]
    + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
)


@pytest.fixture
def k4():
    return RotationGraph.from_vertex_edges(4, K4_PAIRS)


@pytest.fixture
def barbell():
    return RotationGraph.from_vertex_edges(12, BARBELL_PAIRS)


@pytest.fixture
def petersen():
    return RotationGraph.from_vertex_edges(10, PETERSEN_PAIRS)


# --- acceptance PASS/FAIL lines -------------------------------------------

_ACCEPTANCE: dict[str, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    label, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = getattr(item, "acceptance_detail", "")
        if not rep.passed:
            msg = str(rep.longrepr.reprcrash.message) if hasattr(rep.longrepr, "reprcrash") else str(rep.longrepr)
            detail = f"{detail} | {msg.splitlines()[0]}" if detail else msg.splitlines()[0]
        _ACCEPTANCE[label] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: (int("".join(filter(str.isdigit, s))), s)):
        status, title, detail = _ACCEPTANCE[label]
        line = f"{status} criterion {label}: {title}"
        terminalreporter.write_line(f"{line} -- {detail}" if detail else line)
