import numpy as np
import pytest

from cavityqnd.optimizer import Mode, sweep_curve

REFERENCE_COOPERATIVITIES = np.geomspace(1e2, 1e5, 13)


@pytest.fixture(scope="session")
def reference_sweeps():
    """The full error-vs-cooperativity sweep shared by acceptance tests.

    13 log-spaced cooperativities, the three fixed-success curves plus the
    repeat-until-success bound curve.
    """
    curves = {ps: sweep_curve(REFERENCE_COOPERATIVITIES, ps) for ps in (0.001, 0.3, 0.5)}
    curves["bound"] = sweep_curve(REFERENCE_COOPERATIVITIES, 0.5, Mode.REPEATED_BOUND)
    return curves
