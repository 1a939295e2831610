import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fairfront.population import Population

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def make_pop(scores, groups, outcomes=None, dm_entries=None, group_count=None):
    """Hand-built population for small exact cases."""
    score = np.asarray(scores, dtype=np.float64)
    group = np.asarray(groups, dtype=np.int64)
    gc = int(group.max()) + 1 if group_count is None else group_count
    out = None if outcomes is None else np.asarray(outcomes, dtype=np.int64)
    dm = None if dm_entries is None else np.asarray(dm_entries, dtype=np.float64)
    return Population(score=score, group=group, group_count=gc, outcome=out, dm_entries=dm)


@pytest.fixture
def two_group_pop():
    # scores straddle 0.5 in both groups; outcomes track score > 0.5
    return make_pop(
        scores=[0.9, 0.2, 0.7, 0.4, 0.6, 0.1],
        groups=[0, 0, 0, 1, 1, 1],
        outcomes=[1, 0, 1, 0, 1, 0],
    )
