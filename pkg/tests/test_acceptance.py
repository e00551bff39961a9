"""Acceptance criteria 1-10 at their stated time limits.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal
summary.  Criterion 10 is checked twice: as written (étale D_4 components at
g = 5, which the genus formula rules out, so it is an expected failure) and
with the étale type at g = 9, where the formula puts it.
"""
import pytest

from conftest import ACCEPTANCE_LINES
from dihedral_covers.verification import check_catalog_corrected, run_criterion, _timed

# seconds allowed per criterion
LIMITS = {1: 1, 2: 1, 3: 4 * 60, 4: 2 * 60, 5: 10 * 60, 6: 60, 7: 5 * 60, 8: 10 * 60, 9: 2 * 60, 10: 5 * 60}


def _report(result):
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    return result


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number):
    result = _report(run_criterion(number, "full"))
    assert result.passed, result.detail
    assert result.seconds <= LIMITS[number], f"took {result.seconds:.1f}s"


@pytest.mark.xfail(strict=True, reason="the genus formula places the étale D_4 type at g = 9; M_5(D_4) has no étale component")
def test_criterion_10_as_written():
    result = _report(run_criterion(10, "full"))
    assert result.passed, result.detail


def test_criterion_10_etale_at_genus_9():
    result = _report(_timed(10, "catalog regression (etale D_4 at g=9)", check_catalog_corrected))
    assert result.passed, result.detail
    assert result.seconds <= LIMITS[10]
