"""Suite-wide hooks.

Every STree constructed while a test runs is audited on the spot
(anti-monotonicity, size bounds, sus consistency). Tests that time tree
construction opt out with ``@pytest.mark.no_tree_audit`` and audit their
trees explicitly outside the timed region.

Acceptance tests record one verdict per criterion through the ``report``
fixture; the verdicts are printed together at the end of the run.
"""

from __future__ import annotations

import pytest

from bimine import stree as stree_mod

AUDIT = {"trees": 0, "nodes": 0, "violations": []}
_VERDICTS: list[tuple[str, bool, str]] = []
_state = {"enabled": True}

_original_init = stree_mod.STree.__init__


def _audited_init(self, *args, **kwargs):
    _original_init(self, *args, **kwargs)
    if _state["enabled"]:
        AUDIT["trees"] += 1
        AUDIT["nodes"] += self.node_count
        problems = self.invariant_violations()
        if problems:
            AUDIT["violations"].append((repr(self), problems))
            raise AssertionError(f"tree invariant violated: {problems}")


def pytest_configure(config):
    config.addinivalue_line("markers", "no_tree_audit: skip the per-tree invariant audit")
    stree_mod.STree.__init__ = _audited_init


def pytest_unconfigure(config):
    stree_mod.STree.__init__ = _original_init


@pytest.fixture(autouse=True)
def _tree_audit_switch(request):
    _state["enabled"] = request.node.get_closest_marker("no_tree_audit") is None
    yield
    _state["enabled"] = True


@pytest.fixture
def report():
    def record(criterion: str, passed: bool, detail: str = "") -> None:
        _VERDICTS.append((criterion, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'} {criterion}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if AUDIT["trees"]:
        terminalreporter.write_line(
            f"tree audit: {AUDIT['trees']} trees, {AUDIT['nodes']} nodes, "
            f"{len(AUDIT['violations'])} violating trees"
        )
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for criterion, passed, detail in sorted(_VERDICTS, key=lambda v: _crit_key(v[0])):
            terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")


def _crit_key(name: str):
    head = name.split()[0].rstrip(".:")
    return (int(head), name) if head.isdigit() else (10**6, name)
