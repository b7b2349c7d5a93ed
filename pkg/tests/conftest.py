import sys
from pathlib import Path

import numpy as np
import pytest

# Allow running the suite from a source checkout without installing.
_SRC = Path(__file__).resolve().parents[1] / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from ripkit.sensing import SensingMatrix


@pytest.fixture
def canonical():
    """2x3 dictionary with columns e1, e2, (e1 + e2)/sqrt(2).

    Worst column pair has Gram [[1, 1/sqrt(2)], [1/sqrt(2), 1]], so the exact
    order-2 constant is 1/sqrt(2).
    """
    r = 1.0 / np.sqrt(2.0)
    return SensingMatrix(2, 3, np.array([[1.0, 0.0, r], [0.0, 1.0, r]]))


@pytest.fixture
def orthonormal8():
    rng = np.random.default_rng(11)
    q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
    return SensingMatrix(8, 8, q)
