import json
import time

import pytest

from ionsim import golden


def test_all_goldens_pass_within_budget():
    t0 = time.perf_counter()
    checks = golden.golden_suite()
    assert time.perf_counter() - t0 <= 60
    failed = [f"{c.module}: {c.name} = {c.value!r} (want {c.expected!r}, {c.tolerance})" for c in checks if not c.passed]
    assert not failed, "\n".join(failed)
    assert {c.module for c in checks} == set(golden.SUITES)


@pytest.mark.parametrize("name", list(golden.SUITES))
def test_filter_selects_one_module(name):
    checks = golden.golden_suite(name)
    assert checks and {c.module for c in checks} == {name}


def test_checks_serialize():
    json.dumps([c.to_dict() for c in golden.golden_suite("cz_gate")])
