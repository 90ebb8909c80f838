from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pim.eventlog import EventLog

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], print_blob=True
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

L0_TRACES = {
    tuple("abce"): 1,
    tuple("acbf"): 1,
    tuple("abcdcbe"): 2,
    tuple("acbdbcf"): 1,
    tuple("acbdbcdbcf"): 1,
    tuple("ag"): 9,
    tuple("agcg"): 1,
}
L5_TRACES = {
    tuple("bc"): 1,
    tuple("cb"): 1,
    tuple("bcdcb"): 2,
    tuple("cbdbc"): 1,
    tuple("cbdbcdbc"): 1,
}
L6_TRACES = {tuple("bc"): 6, tuple("cb"): 5}
L0_TREE = "->(a, x(g, ->(loop(/\\(b, c), d), x(e, f))))"


@pytest.fixture
def l0() -> EventLog:
    return EventLog.from_traces(L0_TRACES)


@pytest.fixture
def l5() -> EventLog:
    return EventLog.from_traces(L5_TRACES)


@pytest.fixture
def l6() -> EventLog:
    return EventLog.from_traces(L6_TRACES)


ALPHABET = "abcdef"


@st.composite
def small_logs(draw, max_activities: int = 6, max_len: int = 8, max_variants: int = 6, empty: bool = True):
    """Logs over at most 6 activities with at most 8 events per trace."""
    k = draw(st.integers(1, max_activities))
    letters = ALPHABET[:k]
    traces = draw(
        st.lists(
            st.tuples(
                st.lists(st.sampled_from(letters), min_size=1, max_size=max_len).map(tuple),
                st.integers(1, 5),
            ),
            min_size=1,
            max_size=max_variants,
        )
    )
    counts: dict[tuple[str, ...], int] = {}
    for t, c in traces:
        counts[t] = counts.get(t, 0) + c
    n_empty = draw(st.integers(0, 3)) if empty else 0
    if n_empty:
        counts[()] = n_empty
    return EventLog.from_traces(counts)


DISCOVERED: list = []


@pytest.fixture(scope="session", autouse=True)
def block_structure_check_on_every_discovery():
    """Run the block-structure check on each top-level discovered tree, in every test."""
    from pim import discovery
    from pim.bpmn import GATEWAY_KINDS, check_block_structure, to_block_graph

    original = discovery._discover

    def checked(log, opts, record, depth, guard, verbose):
        tree = original(log, opts, record, depth, guard, verbose)
        if depth == 0:
            g = to_block_graph(tree)
            problems = check_block_structure(g)
            assert not problems, (str(tree), problems)
            assert {k for k in g.kinds if "split" in k or "join" in k} <= GATEWAY_KINDS
            DISCOVERED.append(tree)
        return tree

    discovery._discover = checked
    yield DISCOVERED
    discovery._discover = original


# criterion -> list of (check, ok, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, check: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((check, ok, detail))
    print(f"criterion {criterion} {'PASS' if ok else 'FAIL'}: {check} {detail}".rstrip())
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[criterion]
        failed = [f"{c} {d}".strip() for c, ok, d in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {criterion}: {status} ({len(checks) - len(failed)}/{len(checks)} checks)"
        if failed:
            line += " failing: " + "; ".join(failed)
        terminalreporter.write_line(line)
    terminalreporter.write_line(
        "criterion 9: NOT REPRODUCIBLE (declared): external benchmark logs, measurement toolchain and user study"
    )
