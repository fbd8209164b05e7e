import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def golay():
    from multibasis.codebook import build_code
    return build_code("golay24")


@pytest.fixture(scope="session")
def golay_f1_matrix(golay):
    from multibasis.orbits import GOLAY_FAMILY_COGS, build_parity_matrix
    return build_parity_matrix(GOLAY_FAMILY_COGS[1], golay)


def naive_rank(M):
    """Textbook elimination on a float-free int copy, pivoting column by column."""
    A = np.array(M, dtype=np.int64) % 2
    r = 0
    for c in range(A.shape[1]):
        rows = [i for i in range(r, A.shape[0]) if A[i, c]]
        if not rows:
            continue
        A[[r, rows[0]]] = A[[rows[0], r]]
        for i in range(A.shape[0]):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        r += 1
    return r


# -- acceptance summary ----------------------------------------------------

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: (int(re.match(r"\d+", c).group()), c)):
        ok, detail = ACCEPTANCE[crit]
        terminalreporter.write_line(f"criterion {crit:>3}: {'PASS' if ok else 'FAIL'}  {detail}")
