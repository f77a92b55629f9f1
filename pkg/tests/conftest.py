import math

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

R2 = 1 / math.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_complex(rng, n=None):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
nonzero_complexes = complexes.filter(lambda z: abs(z) > 1e-3)
statistics = st.sampled_from(["boson", "fermion"])


# (criterion id, description, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE: list[tuple[str, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, desc, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid}  {desc}  [{detail}]")
