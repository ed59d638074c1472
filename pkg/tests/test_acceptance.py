"""The twelve acceptance criteria at their stated tolerances on the default
configuration.  One PASS/FAIL line per criterion is printed in the
"acceptance verdicts" section of the pytest summary."""
import pytest

from shamp.acceptance import CRITERIA, TITLES
from shamp.config import ExperimentConfig

CFG = ExperimentConfig()
_CACHE = {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, verdicts):
    try:
        chk = CRITERIA[number](CFG, _CACHE)
    except Exception as exc:
        verdicts.append((number, f"[FAIL] criterion {number:2d}: {TITLES[number]} -- error: {exc}"))
        raise
    verdicts.append((number, f"[{'PASS' if chk.passed else 'FAIL'}] criterion {number:2d}: "
                             f"{TITLES[number]} -- {chk.detail}"))
    assert chk.passed, chk.detail
