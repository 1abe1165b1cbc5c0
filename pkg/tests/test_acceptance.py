"""Acceptance gate: one test (one pass/fail line) per verification criterion.

The criteria are executed once per session through the shared ``acceptance``
fixture; each test here reports a single criterion so the pytest output shows
an independent pass/fail line for every one of them.
"""

import pytest

from smclab.verification import CRITERIA, SUITES, format_results

CRITERION_IDS = tuple(sorted(CRITERIA))


@pytest.mark.parametrize("criterion", CRITERION_IDS)
def test_criterion(criterion, acceptance):
    r = acceptance[criterion]
    msg = (
        f"{r.criterion} ({r.description}): measured {r.measured}, "
        f"expected {r.expected} [tolerance: {r.tolerance}]"
    )
    if r.details:
        msg += "\n  " + "\n  ".join(r.details)
    assert r.passed, msg


def test_named_suites_cover_every_criterion():
    covered = set()
    for name, members in SUITES.items():
        if name != "all":
            covered.update(members)
    assert covered == set(CRITERION_IDS)
    assert SUITES["all"] == CRITERION_IDS


def test_result_table_reports_full_score(acceptance):
    text = format_results([acceptance[c] for c in CRITERION_IDS])
    assert f"{len(CRITERION_IDS)}/{len(CRITERION_IDS)} criteria passed" in text
