import pytest

from wavebound import solver
from wavebound.config import ExperimentConfig


@pytest.fixture(scope="session")
def run_cache():
    """Session cache of diagnostic series keyed by config fields.

    State from a run is immutable once finalized, so sharing across tests is
    safe and keeps the suite fast.
    """
    cache = {}

    def get(**kwargs):
        key = tuple(sorted(kwargs.items()))
        if key not in cache:
            cache[key] = solver.run(ExperimentConfig(**kwargs))
        return cache[key]

    return get
