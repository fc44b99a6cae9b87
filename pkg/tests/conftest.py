import time

import pytest

SESSION_T0 = time.perf_counter()


@pytest.fixture(scope="session")
def session_started() -> float:
    return SESSION_T0


@pytest.fixture(scope="session")
def default_run():
    """The default campaign dataset (seeds 0/0), generated once per session."""
    from icstwin.simulation import generate_dataset

    started = time.perf_counter()
    result = generate_dataset(plant_seed=0, campaign_seed=0)
    result.wall_seconds = time.perf_counter() - started
    return result


@pytest.fixture(scope="session")
def default_split(default_run):
    from icstwin.dataset import split

    return split(default_run.dataset, train_frac=0.70, seed=0)


@pytest.fixture(scope="session")
def trained_suite(default_split):
    """All eight kinds plus the stacked model trained on the default split."""
    from icstwin.evaluation import train_eval_suite

    train_samples, test_samples = default_split
    return train_eval_suite(train_samples, test_samples, seed=0)
