"""Acceptance matrix: one printed pass/fail line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines; they are
also collected in the terminal summary.
"""

from __future__ import annotations

import pytest

from fracflow.acceptance import CRITERIA

LINES: list[str] = []


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_criterion(criterion):
    res = criterion()
    line = res.line()
    LINES.append(line)
    print(line)
    assert res.passed, line


def test_matrix_is_complete():
    assert len(CRITERIA) == 12
    assert len({c.__name__ for c in CRITERIA}) == 12
