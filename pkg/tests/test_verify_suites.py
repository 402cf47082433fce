import pytest

from qlefschetz.verify import SUITES


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_is_green(suite):
    checks = SUITES[suite]()
    failures = [c for c in checks if not c.passed]
    assert not failures, [f"{c.name}: {c.detail}" for c in failures]
