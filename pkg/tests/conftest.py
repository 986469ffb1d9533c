import json
from pathlib import Path

import hypothesis
import numpy as np
import pytest

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)
hypothesis.settings.register_profile("dev", deadline=None)
hypothesis.settings.load_profile("dev")

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def golden_seed1():
    with open(GOLDEN / "random_mdp_seed1.json") as fh:
        return json.load(fh)
