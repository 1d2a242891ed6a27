import numpy as np
import pytest

from pmc import FINSTOCH, PAR, REL, Signature, obj


@pytest.fixture(params=["finstoch", "par", "rel"])
def backend_name(request):
    return request.param


@pytest.fixture
def kernel_sig():
    """X, Y of size 2 with the two-row kernel f used throughout the examples."""
    f = FINSTOCH.from_payload([[0.5, 0.5], [0.2, 0.3]], 2, 2)
    return Signature({"X": 2, "Y": 2}).with_generator("f", obj("X"), obj("Y"), finstoch=f)


def brute_tensor(a, b):
    """Kronecker product by explicit index arithmetic."""
    n1, m1 = a.shape
    n2, m2 = b.shape
    out = np.zeros((n1 * n2, m1 * m2), dtype=np.result_type(a, b))
    for x1 in range(n1):
        for x2 in range(n2):
            for y1 in range(m1):
                for y2 in range(m2):
                    out[x1 * n2 + x2, y1 * m2 + y2] = a[x1, y1] * b[x2, y2]
    return out


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {line}")
